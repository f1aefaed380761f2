import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from anharmonic import continuum, oracles, recurrence
from anharmonic.errors import DomainError, NotPositiveDefiniteError
from anharmonic.slicing import ModelParams, build_grid, zn_multisum


# ---------------------------------------------------------------------------
# one-dimensional integral

def test_integrate_i1_examples():
    r = oracles.integrate_i1(1, 0, 0)
    assert r.value == pytest.approx(2 * math.gamma(1.25), rel=1e-12)
    assert r.value == pytest.approx(1.8128049541, rel=1e-10)
    assert r.error_estimate >= 0 and r.cost > 0
    assert oracles.integrate_i1(0.5, 1, 2).value == pytest.approx(oracles.integrate_i1(0.5, 1, -2).value, rel=1e-13)
    q = oracles.integrate_i1(1, -2, 0.3).value
    assert oracles.i1_series(1, -2, 0.3, 80) == pytest.approx(q, rel=1e-8)
    with pytest.raises(DomainError):
        oracles.integrate_i1(0, 1, 1)


def test_i1_series_examples():
    A, B = 0.7, 1.3
    z = B / math.sqrt(2 * A)
    from anharmonic.specfun import pcf_d
    single = math.exp(z * z / 4) * math.sqrt(math.pi) * (2 * A) ** -0.25 * pcf_d(-0.5, z)
    assert oracles.i1_series(A, B, 0.0, 5) == pytest.approx(single, rel=1e-13)
    ref = oracles.integrate_i1(1, 1, 1).value
    assert oracles.i1_series(1, 1, 1, 60) == pytest.approx(ref, rel=1e-9)
    assert abs(oracles.i1_series(1, 1, 1, 120) - oracles.i1_series(1, 1, 1, 60)) < 1e-12


@settings(max_examples=25, deadline=None)
@given(st.floats(0.1, 2), st.floats(-1, 2), st.floats(0, 2))
def test_i1_series_vs_quadrature_property(A, B, C):
    ref = oracles.integrate_i1(A, B, C).value
    assert oracles.i1_series(A, B, C, 120) == pytest.approx(ref, rel=1e-8)


def test_integrate_i1_error_estimate_honest():
    rng = np.random.default_rng(5)
    ok = 0
    for _ in range(20):
        A, B, C = rng.uniform(0.1, 2), rng.uniform(-1, 2), rng.uniform(0, 2)
        r = oracles.integrate_i1(A, B, C)
        ref = oracles.i1_series(A, B, C, 160)
        ok += abs(r.value - ref) <= max(r.error_estimate, 1e-14 * abs(ref))
    assert ok >= 19


# ---------------------------------------------------------------------------
# brute force slices

def test_zn_bruteforce_n1_reduction():
    rng = np.random.default_rng(11)
    for _ in range(20):
        a, b, c, beta = rng.uniform(0.05, 1), rng.uniform(-0.3, 2), rng.uniform(0.5, 2), rng.uniform(0.3, 1.5)
        P = ModelParams(a, b, c, beta)
        eps = b * beta * beta / c
        ref = (2 * math.pi * beta / c) ** -0.5 * oracles.integrate_i1(a * beta, (c / beta) * (0.5 + eps), 0).value
        assert oracles.zn_bruteforce(P, 1).value == pytest.approx(ref, rel=1e-9)


def test_zn_bruteforce_n2_matches_multisum():
    P = ModelParams(0.1, 1, 1, 0.5)
    assert zn_multisum(build_grid(P, 2), 40) == pytest.approx(oracles.zn_bruteforce(P, 2).value, rel=1e-6)


def test_zn_bruteforce_small_a_is_gaussian():
    for N in (1, 2, 3):
        P = ModelParams(1e-8, 1, 1, 1)
        assert oracles.zn_bruteforce(P, N).value == pytest.approx(oracles.zn_gaussian(P.replace(a=0.0), N), rel=1e-6)


def test_zn_bruteforce_rejects_large_n():
    with pytest.raises(DomainError):
        oracles.zn_bruteforce(ModelParams(0.1, 1, 1, 1), 4)


# ---------------------------------------------------------------------------
# Gaussian oracle

def test_zn_gaussian_examples():
    for N in (1, 2, 7, 100):
        assert oracles.zn_gaussian(ModelParams(0, 0, 1.3, 0.8), N) == pytest.approx(1, rel=1e-13)
    g = build_grid(ModelParams(0, 1, 1, 1), 1)
    expected = (2 * (1 + 1.0) * g.omega0) ** -0.5
    assert oracles.zn_gaussian(ModelParams(0, 1, 1, 1), 1) == pytest.approx(expected, rel=1e-14)


def test_zn_gaussian_extrapolates_to_harmonic_closed_form():
    P = ModelParams(0, 1, 1, 1)
    Ns = [2 ** k for k in range(8, 13)]
    v, _ = oracles.extrapolate_in_n(lambda N: oracles.zn_gaussian(P, N), Ns, orders=(1, 2, 3))
    assert v == pytest.approx(math.cosh(math.sqrt(2)) ** -0.5, rel=1e-9)


def test_zn_gaussian_not_positive_definite():
    with pytest.raises(NotPositiveDefiniteError) as info:
        oracles.zn_gaussian(ModelParams(0, -40, 1, 1), 4)
    assert info.value.index >= 1


@given(st.floats(0, 5), st.floats(0.1, 3), st.floats(0.01, 3), st.integers(1, 40))
def test_zn_gaussian_monotone_in_b(b, db, c, N):
    P = ModelParams(0, b, c, 1.0)
    assert oracles.zn_gaussian(P.replace(b=b + db), N) <= oracles.zn_gaussian(P, N) * (1 + 1e-14)


# ---------------------------------------------------------------------------
# coupling derivative

def test_coupling_derivative_b0_limit():
    v, _ = oracles.extrapolate_in_n(lambda N: oracles.coupling_derivative(ModelParams(0, 0, 1, 1), N),
                                    [256, 512, 1024])
    assert v == pytest.approx(1.0, rel=1e-6)


def test_coupling_derivative_vs_finite_difference():
    P = ModelParams(0, 1, 1, 1)
    h = 1e-5
    zp = oracles.zn_bruteforce(P.replace(a=2 * h), 2).value
    zm = oracles.zn_bruteforce(P.replace(a=h), 2).value
    z0 = oracles.zn_gaussian(P, 2)
    # one-sided second-order difference at a = 0 from a = h, 2h
    d = (-3 * math.log(z0) + 4 * math.log(zm) - math.log(zp)) / (2 * h)
    assert -d == pytest.approx(oracles.coupling_derivative(P, 2), rel=1e-4)


def test_coupling_derivative_vs_continuum_c1():
    P = ModelParams(0, 1, 0.5, 1)
    v = oracles.coupling_derivative(P, 512) * P.c ** 2
    assert v == pytest.approx(continuum.continuum_c2(P, 1.0), rel=1e-2)


@given(st.floats(-0.5, 5), st.floats(0.2, 3), st.floats(0.1, 2), st.integers(1, 64))
def test_coupling_derivative_positive(b, c, beta, N):
    P = ModelParams(0, b, c, beta)
    try:
        v = oracles.coupling_derivative(P, N)
    except NotPositiveDefiniteError:
        return
    assert v > 0


def test_bridge_is_smaller_than_free_end():
    P = ModelParams(0, 1, 1, 1)
    assert 0 < oracles.bridge_coupling_derivative(P, 64) < oracles.coupling_derivative(P, 64)


def test_gaussian_c_term_mu1_matches_closed_form():
    for b in (0.0, 1.0, -0.5):
        P = ModelParams(0.1, b, 1, 1)
        assert oracles.gaussian_c_term(P, 1.0, 1) == pytest.approx(continuum.continuum_c2(P, 1.0), rel=1e-10)


# ---------------------------------------------------------------------------
# Monte Carlo

def test_montecarlo_a0_exact():
    P = ModelParams(0, 1, 1, 1)
    r = oracles.zn_montecarlo(P, 6, 10_000, 3)
    assert r.value == oracles.zn_gaussian(P, 6) and r.error_estimate == 0


def test_montecarlo_deterministic_and_worker_independent():
    P = ModelParams(0.1, 1, 1, 1)
    r1 = oracles.zn_montecarlo(P, 6, 64_000, 42)
    r2 = oracles.zn_montecarlo(P, 6, 64_000, 42, workers=4)
    assert r1 == r2


def test_montecarlo_seeds_consistent():
    P = ModelParams(0.1, 1, 1, 1)
    r1 = oracles.zn_montecarlo(P, 8, 100_000, 1)
    r2 = oracles.zn_montecarlo(P, 8, 100_000, 2)
    assert abs(r1.value - r2.value) < 3 * math.hypot(r1.error_estimate, r2.error_estimate)


def test_montecarlo_vs_recurrence_pipeline():
    P = ModelParams(0.1, 1, 1, 1)
    r = oracles.zn_montecarlo(P, 8, 1_000_000, 2024)
    zc, proxy = recurrence.z_cut(build_grid(P, 8), 3)
    assert abs(r.value - zc) < 3 * r.error_estimate + proxy


def test_montecarlo_rejects_small_sample():
    with pytest.raises(ValueError):
        oracles.zn_montecarlo(ModelParams(0.1, 1, 1, 1), 4, 100, 0)
