import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from ergoxeb import analytic
from ergoxeb.estimators import SchemeFunction

mpmath.mp.dps = 40


# -- special functions vs an independent high-precision oracle ---------------

@pytest.mark.parametrize("z", [0.1, 0.5, 1.0, 1.5, 2.0, 3.7, 10.0, 64.0,
                               1024.0, 1e6])
def test_log_gamma_vs_mpmath(z):
    ref = float(mpmath.loggamma(z))
    assert analytic.log_gamma(z) == pytest.approx(ref, rel=5e-15, abs=5e-15)


def test_log_gamma_known_values():
    assert analytic.log_gamma(1.0) == pytest.approx(0.0, abs=1e-14)
    assert analytic.log_gamma(5.0) == pytest.approx(math.log(24.0), rel=1e-14)
    assert analytic.log_gamma(0.5) == pytest.approx(
        0.5 * math.log(math.pi), rel=1e-14
    )


def test_log_gamma_recurrence():
    # Gamma(z+1) = z Gamma(z)
    for z in [0.3, 1.7, 3.7, 25.2]:
        lhs = analytic.log_gamma(z + 1.0)
        rhs = analytic.log_gamma(z) + math.log(z)
        assert lhs == pytest.approx(rhs, rel=1e-13, abs=1e-13)


@pytest.mark.parametrize("z", [0.2, 1.0, 2.0, 3.7, 12.5, 100.0, 4096.0])
def test_polygamma_vs_mpmath(z):
    assert analytic.polygamma(0, z) == pytest.approx(
        float(mpmath.digamma(z)), rel=2e-14, abs=2e-14
    )
    assert analytic.polygamma(1, z) == pytest.approx(
        float(mpmath.polygamma(1, z)), rel=2e-14, abs=2e-14
    )


def test_digamma_is_log_gamma_derivative():
    # central difference of log_gamma matches digamma
    for z in [1.5, 4.2, 30.0]:
        h = 1e-6
        num = (analytic.log_gamma(z + h) - analytic.log_gamma(z - h)) / (2 * h)
        assert analytic.polygamma(0, z) == pytest.approx(num, rel=1e-8)


def test_polygamma_domain():
    with pytest.raises(ValueError):
        analytic.polygamma(0, -1.0)
    with pytest.raises(ValueError):
        analytic.polygamma(2, 1.0)


# -- Haar moments and covariances --------------------------------------------

def test_joint_moment_integer_cases():
    # E[P^i] = Gamma(i+1) Gamma(N) / Gamma(i+N); i=1 must be exactly 1/N
    N = 16
    assert analytic.haar_joint_moment(1.0, 0.0, N) == pytest.approx(
        1.0 / N, rel=1e-14
    )
    assert analytic.haar_joint_moment(2.0, 0.0, N) == pytest.approx(
        2.0 / (N * (N + 1)), rel=1e-13
    )
    assert analytic.haar_joint_moment(1.0, 1.0, N) == pytest.approx(
        1.0 / (N * (N + 1)), rel=1e-13
    )


def test_joint_moment_vs_beta_quadrature():
    # marginal check against direct integration of the Beta(1, N-1) law
    N = 32
    for q in [0.5, 1.0, 2.5]:
        ref, _ = quad(lambda p: p**q * analytic.beta_pdf(p, N), 0.0, 1.0)
        assert analytic.haar_joint_moment(q, 0.0, N) == pytest.approx(
            ref, rel=1e-9
        )


def test_covariance_hand_computable_values():
    # small-N cases computable by hand from the Gamma-ratio formula
    assert analytic.haar_covariance(1.0, 1.0, 4) == pytest.approx(
        1.0 / 20.0 - 1.0 / 16.0, rel=1e-12
    )
    # Gamma(3)^2 [Gamma(2)/Gamma(6) - Gamma(2)^2/Gamma(4)^2] = -7/90
    assert analytic.haar_covariance(2.0, 2.0, 2) == pytest.approx(
        -7.0 / 90.0, rel=1e-12
    )


def test_covariance_symmetry():
    for N in [2, 8, 100]:
        a = analytic.haar_covariance(0.7, 2.3, N)
        b = analytic.haar_covariance(2.3, 0.7, N)
        assert a == pytest.approx(b, rel=1e-14)


@settings(max_examples=200, deadline=None)
@given(
    q1=st.floats(1e-3, 5.0),
    q2=st.floats(1e-3, 5.0),
    n=st.integers(1, 8),
)
def test_covariance_strictly_negative(q1, q2, n):
    assert analytic.haar_covariance(q1, q2, 1 << n) < 0.0


def test_covariance_large_n_no_overflow():
    v = analytic.haar_covariance(3.0, 3.0, 1 << 24)
    assert v < 0.0
    assert math.isfinite(v)


# -- Porter-Thomas limit ------------------------------------------------------

def test_pt_moment_and_sigma():
    N = 64
    assert analytic.pt_moment(2, N) == pytest.approx(2.0 / N**2, rel=1e-13)
    assert analytic.pt_sigma(1, N) == pytest.approx(1.0 / N, rel=1e-13)
    assert analytic.pt_sigma(2, N) == pytest.approx(
        math.sqrt(24 - 4) / N**2, rel=1e-13
    )


def test_pdfs_normalized():
    N = 48
    for pdf in (analytic.pt_pdf, analytic.beta_pdf):
        total, _ = quad(lambda p: pdf(p, N), 0.0, 1.0)
        assert total == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("i", [2, 3, 5])
def test_exact_moment_approaches_pt(i):
    # i = 1 is excluded: both moments are exactly 1/N there
    # relative gap between exact and Porter-Thomas moments shrinks with N
    gaps = []
    for n in [5, 8, 11]:
        N = 1 << n
        exact = analytic.haar_joint_moment(float(i), 0.0, N)
        gaps.append(abs(exact / analytic.pt_moment(i, N) - 1.0))
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 0.05


# -- scheme means -------------------------------------------------------------

def test_scheme_means_exact_values():
    N = 256
    m2 = SchemeFunction.monomial(2)
    assert m2.haar_mean(N, "exact") == pytest.approx(
        2.0 * N / (N + 1), rel=1e-13
    )
    assert m2.haar_mean(N, "porter_thomas") == pytest.approx(2.0, rel=1e-13)
    nl = SchemeFunction.neglog()
    assert nl.haar_mean(N, "porter_thomas") == pytest.approx(
        math.log(N) + analytic.EULER_GAMMA, rel=1e-13
    )
    pl = SchemeFunction.plogp()
    assert pl.haar_mean(N, "porter_thomas") == pytest.approx(
        (1.0 - analytic.EULER_GAMMA - math.log(N)) / N, rel=1e-12
    )


def test_scheme_means_vs_quadrature():
    # every closed form against brute-force Beta(1, N-1) integration
    N = 64
    cases = [
        (SchemeFunction.monomial(3), lambda p: (N * p) ** 3),
        (SchemeFunction.normalized_monomial(3),
         lambda p: (N * p) ** 3 / 4.0),
        (SchemeFunction.plogp(), lambda p: p * math.log(p) if p else 0.0),
        (SchemeFunction.neglog(), lambda p: -math.log(p)),
    ]
    for scheme, f in cases:
        ref, _ = quad(lambda p: f(p) * analytic.beta_pdf(p, N), 0.0, 1.0,
                      limit=200)
        assert scheme.haar_mean(N, "exact") == pytest.approx(ref, rel=1e-6)


def test_scheme_sigmas_vs_quadrature():
    N = 64
    cases = [
        (SchemeFunction.monomial(2), lambda p: (N * p) ** 2),
        (SchemeFunction.plogp(), lambda p: p * math.log(p) if p else 0.0),
        (SchemeFunction.neglog(), lambda p: -math.log(p)),
    ]
    for scheme, f in cases:
        mean, _ = quad(lambda p: f(p) * analytic.beta_pdf(p, N), 0.0, 1.0,
                       limit=200)
        second, _ = quad(lambda p: f(p) ** 2 * analytic.beta_pdf(p, N),
                         0.0, 1.0, limit=200)
        ref = math.sqrt(second - mean * mean)
        assert scheme.sigma(N, "exact") == pytest.approx(ref, rel=1e-5)


def test_pt_mean_quadrature_matches_closed_form():
    N = 128
    val = analytic.pt_mean_quadrature(lambda p: -math.log(p), N)
    assert val == pytest.approx(
        analytic.neglog_mean(N, "porter_thomas"), rel=1e-6
    )


# -- replica covariance -------------------------------------------------------

def test_gi_covariance_converges_to_plogp():
    for N in [8, 16, 64]:
        target = analytic.plogp_covariance(N)
        rel = abs(analytic.gi_covariance(1e-4, N) / target - 1.0)
        assert rel <= 1e-3


def test_gi_covariance_monotone_in_i():
    N = 32
    target = analytic.plogp_covariance(N)
    errs = [abs(analytic.gi_covariance(i, N) / target - 1.0)
            for i in (0.1, 0.01, 1e-3, 1e-4)]
    assert errs[0] > errs[1] > errs[2] > errs[3]


def test_gi_covariance_domain_guards():
    with pytest.raises(ValueError, match="replica exponent"):
        analytic.gi_covariance(0.5, 32)
    with pytest.raises(ValueError, match="cancellation"):
        analytic.gi_covariance(1e-9, 32)


def test_plogp_covariance_vs_mpmath_limit():
    # independent oracle: numerical replica limit at 40-digit precision
    for N in [8, 64, 256]:
        i = mpmath.mpf("1e-12")

        def cov(q1, q2):
            return (
                mpmath.gamma(q1 + 1) * mpmath.gamma(q2 + 1) * (
                    mpmath.gamma(N) / mpmath.gamma(q1 + q2 + N)
                    - mpmath.gamma(N) ** 2
                    / (mpmath.gamma(q1 + N) * mpmath.gamma(q2 + N))
                )
            )

        ref = float(
            (cov(i + 1, i + 1) - 2 * cov(i + 1, 1) + cov(1, 1)) / i**2
        )
        assert analytic.plogp_covariance(N) == pytest.approx(ref, rel=1e-9)


def test_plogp_covariance_asymptotic_agreement():
    N = 1024
    exact = analytic.plogp_covariance(N)
    asym = analytic.plogp_covariance_asymptotic(N)
    assert abs(asym / exact - 1.0) < 0.01


def test_plogp_covariance_domain():
    with pytest.raises(ValueError, match="N >= 4"):
        analytic.plogp_covariance(2)
