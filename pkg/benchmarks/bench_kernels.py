"""Time the numba kernels against their pure-numpy fallbacks.

Run:  python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from ergoxeb import _accel
from ergoxeb.statevector import _group_indices


def _time(fn, *args, repeat=5):
    fn(*args)  # warm-up (triggers JIT compilation on the numba path)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_apply_block(n=16, layers=20):
    rng = np.random.default_rng(0)
    amps = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
    amps /= np.linalg.norm(amps)
    gate = np.linalg.qr(
        rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    )[0]
    idx = _group_indices(n, (3, 7))

    def run(kernel):
        work = amps.copy()
        for _ in range(layers):
            kernel(work, idx, gate)
        return work

    results = {}
    if _accel.HAS_NUMBA:
        results["numba"] = _time(run, _accel._apply_block_groups_nb)
    results["numpy"] = _time(run, _accel._apply_block_groups_numpy)
    ref = run(_accel._apply_block_groups_numpy)
    for name in results:
        kernel = (_accel._apply_block_groups_nb if name == "numba"
                  else _accel._apply_block_groups_numpy)
        assert np.allclose(run(kernel), ref, atol=1e-12)
    return results


def bench_neumaier(size=2_000_000):
    rng = np.random.default_rng(1)
    x = rng.standard_normal(size)
    results = {}
    if _accel.HAS_NUMBA:
        results["numba"] = _time(_accel._neumaier_sum_nb, x)
        assert abs(_accel._neumaier_sum_nb(x) - _accel._neumaier_sum_py(x[:10000]) - _accel._neumaier_sum_nb(x[10000:])) < 1e-6
    results["numpy-loop"] = _time(lambda a: _accel._neumaier_sum_py(a), x[:200_000]) * (size / 200_000)
    return results


def bench_alias(k=1024, draws=1_000_000):
    rng = np.random.default_rng(2)
    probs = rng.dirichlet(np.ones(k))
    accept = probs * k
    alias = np.arange(k, dtype=np.int64)
    u1, u2 = rng.random(draws), rng.random(draws)
    results = {}
    if _accel.HAS_NUMBA:
        results["numba"] = _time(_accel._alias_draw_nb, accept, alias, u1, u2)
    results["numpy"] = _time(_accel._alias_draw_numpy, accept, alias, u1, u2)
    if _accel.HAS_NUMBA:
        same = np.array_equal(
            _accel._alias_draw_nb(accept, alias, u1, u2),
            _accel._alias_draw_numpy(accept, alias, u1, u2),
        )
        assert same, "numba and numpy alias draws disagree"
    return results


def main():
    print(f"numba path active: {_accel.using_numba()}")
    for name, bench in [
        ("apply_block (n=16, 20 two-qubit layers)", bench_apply_block),
        ("neumaier_sum (2e6 doubles, numpy path extrapolated)",
         bench_neumaier),
        ("alias_draw (1e6 draws, K=1024)", bench_alias),
    ]:
        results = bench()
        line = ", ".join(f"{k}: {v * 1e3:.2f} ms" for k, v in results.items())
        print(f"{name}: {line}")


if __name__ == "__main__":
    main()
