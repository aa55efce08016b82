import os
import subprocess
import sys

import numpy as np
import pytest

from ergoxeb import _accel
from ergoxeb.statevector import _group_indices


def test_neumaier_beats_naive_on_cancellation():
    # classic pathological sum: 1 + 1e100 - 1e100 + 1
    x = np.array([1.0, 1e100, 1.0, -1e100])
    assert _accel.neumaier_sum(x) == 2.0


def test_neumaier_matches_fsum():
    import math

    rng = np.random.default_rng(0)
    x = rng.standard_normal(10_000) * 10.0 ** rng.integers(-8, 8, 10_000)
    assert _accel.neumaier_sum(x) == pytest.approx(
        math.fsum(x), rel=1e-15, abs=1e-12
    )


@pytest.mark.skipif(not _accel.HAS_NUMBA, reason="numba not installed")
def test_kernel_paths_agree():
    rng = np.random.default_rng(1)
    n = 8
    amps = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
    amps /= np.linalg.norm(amps)
    gate = np.linalg.qr(
        rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    )[0]
    idx = _group_indices(n, (2, 5))
    a, b = amps.copy(), amps.copy()
    _accel._apply_block_groups_nb(a, idx, gate)
    _accel._apply_block_groups_numpy(b, idx, gate)
    np.testing.assert_allclose(a, b, atol=1e-13)

    x = rng.standard_normal(10_000)
    assert _accel._neumaier_sum_nb(x) == _accel._neumaier_sum_py(x)

    probs = rng.dirichlet(np.ones(64))
    accept = probs * 64
    alias = np.arange(64, dtype=np.int64)
    u1, u2 = rng.random(1000), rng.random(1000)
    assert np.array_equal(
        _accel._alias_draw_nb(accept, alias, u1, u2),
        _accel._alias_draw_numpy(accept, alias, u1, u2),
    )


def test_env_flag_disables_numba():
    # fresh interpreter with the opt-out flag set must take the numpy path
    env = dict(os.environ, ERGOXEB_NO_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c",
         "from ergoxeb import _accel; print(_accel.using_numba())"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "False"


def test_pipeline_identical_without_numba():
    # estimator results must not depend on which kernel path is active
    script = (
        "import numpy as np\n"
        "from ergoxeb.ensembles import haar_state_probs\n"
        "from ergoxeb.estimators import SchemeFunction, estimate_C_f\n"
        "from ergoxeb.noise import sample_bitstrings\n"
        "from ergoxeb.statevector import OutputDistribution, SystemDims\n"
        "rng = np.random.default_rng(55)\n"
        "P = OutputDistribution(SystemDims(6), haar_state_probs(64, rng))\n"
        "s = sample_bitstrings(P, 5000, seed=56)\n"
        "est = estimate_C_f(P, s, SchemeFunction.monomial(2))\n"
        "print(format(est.value, '.17g'), format(est.std_error, '.17g'))\n"
    )
    outs = []
    for flag in ("", "1"):
        env = dict(os.environ, ERGOXEB_NO_NUMBA=flag)
        r = subprocess.run([sys.executable, "-c", script], env=env,
                           capture_output=True, text=True, check=True)
        outs.append(r.stdout)
    assert outs[0] == outs[1]
