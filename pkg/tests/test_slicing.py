import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import logsumexp

from anharmonic import oracles, slicing
from anharmonic.errors import DomainError
from anharmonic.slicing import ModelParams, build_grid, zn_multisum
from anharmonic.specfun import log_pcf_scaled, pcf_scaled


def test_model_params_validation():
    for bad in (dict(a=-1), dict(c=0), dict(beta=-1), dict(b=float("nan"))):
        kw = dict(a=0.1, b=1, c=1, beta=1)
        kw.update(bad)
        with pytest.raises(DomainError):
            ModelParams(**kw)
    assert ModelParams(0, -3, 1, 1).b == -3


def test_build_grid_b0():
    g = build_grid(ModelParams(0.2, 0, 1.5, 1), 4)
    assert g.xi == 1 and g.omega0 == 0.5 and g.A == 0.5 and g.B == 0
    assert g.z == pytest.approx(1.5 / math.sqrt(2 * 0.2 * 0.25 ** 3), rel=1e-15)


def test_build_grid_example():
    g = build_grid(ModelParams(0.1, 1, 1, 1), 10)
    assert g.delta == pytest.approx(0.1)
    assert g.xi == pytest.approx(1 / 1.01, rel=1e-15)
    assert g.xi_last == pytest.approx(1.01 ** -0.5 * 0.51 ** -0.5, rel=1e-15)
    s = math.sqrt(2 * 0.1 * 0.1 ** 3)
    assert g.z == pytest.approx(1.01 / s, rel=1e-14)
    assert g.z_last == pytest.approx(0.51 / s, rel=1e-14)
    assert g.z_at(10) == g.z_last and g.z_at(3) == g.z
    assert g.xi_at(10) == 1 and g.xi_at(9) == g.xi_last


def test_build_grid_too_coarse_for_negative_b():
    with pytest.raises(DomainError, match="1/2"):
        build_grid(ModelParams(0.1, -0.6, 1, 1), 1)


@given(st.floats(0, 2), st.floats(-1, 5), st.floats(0.2, 3), st.floats(0.2, 2), st.integers(2, 200))
def test_build_grid_identities(a, b, c, beta, N):
    P = ModelParams(a, b, c, beta)
    if 0.5 + b * (beta / N) ** 2 / c <= 0:
        with pytest.raises(DomainError):
            build_grid(P, N)
        return
    g = build_grid(P, N)
    assert abs(g.omega0 - (0.5 + g.B)) < 1e-15
    assert g.A == pytest.approx(1 / (2 * (1 + g.eps)), rel=1e-15)
    assert g.A + g.B == pytest.approx(0.5, abs=1e-15)


# ---------------------------------------------------------------------------
# multi-index sum

def test_multisum_n1_closed_form():
    P = ModelParams(0.3, 0.7, 1.2, 0.9)
    g = build_grid(P, 1)
    expected = (2 * math.pi * (0.5 + g.eps)) ** -0.5 * math.gamma(0.5) * pcf_scaled(0, g.z_last)
    assert zn_multisum(g, 0) == pytest.approx(expected, rel=1e-13)
    assert zn_multisum(g, 5) == pytest.approx(oracles.zn_bruteforce(P, 1).value, rel=1e-9)


def test_multisum_n2_vs_bruteforce():
    P = ModelParams(0.1, 1, 1, 0.5)
    assert zn_multisum(build_grid(P, 2), 40) == pytest.approx(oracles.zn_bruteforce(P, 2).value, rel=1e-6)


def test_multisum_converges_in_k0():
    g = build_grid(ModelParams(0.1, 1, 1, 1), 3)
    assert abs(zn_multisum(g, 40) - zn_multisum(g, 30)) < 1e-10


def test_multisum_loop_order_invariance():
    g = build_grid(ModelParams(0.2, 0.5, 1, 1), 4)
    assert zn_multisum(g, 20, "forward") == pytest.approx(zn_multisum(g, 20, "backward"), rel=1e-12)


def test_multisum_brute_loops_n3():
    # explicit nested loops in two orders against the vectorised sum
    g = build_grid(ModelParams(0.2, 0.5, 1, 1), 3)
    K0 = 12
    xi, xl, z, zl = g.xi, g.xi_last, g.z, g.z_last

    def log_term(k1, k2):
        return (2 * k1 * math.log(xi) + 2 * k2 * math.log(xl) - math.lgamma(2 * k1 + 1) - math.lgamma(2 * k2 + 1)
                + math.lgamma(k1 + 0.5) + log_pcf_scaled(k1, z)
                + math.lgamma(k1 + k2 + 0.5) + log_pcf_scaled(k1 + k2, z)
                + math.lgamma(k2 + 0.5) + log_pcf_scaled(k2, zl))

    rows = [log_term(k1, k2) for k1, k2 in itertools.product(range(K0 + 1), repeat=2)]
    cols = [log_term(k1, k2) for k2, k1 in itertools.product(range(K0 + 1), repeat=2)]
    pref = (2 * math.pi * (1 + g.eps)) ** -1 * (2 * math.pi * (0.5 + g.eps)) ** -0.5
    v1 = pref * math.exp(logsumexp(rows))
    v2 = pref * math.exp(logsumexp(cols))
    assert v1 == pytest.approx(v2, rel=1e-12)
    assert zn_multisum(g, K0) == pytest.approx(v1, rel=1e-12)


def test_multisum_rejects_large_n():
    with pytest.raises(DomainError):
        zn_multisum(build_grid(ModelParams(0.1, 1, 1, 1), 6), 5)


def test_multisum_decreases_with_a():
    vals = [zn_multisum(build_grid(ModelParams(a, 1, 1, 1), 3), 30) for a in (0.05, 0.1, 0.5, 2.0)]
    assert all(x > y for x, y in zip(vals, vals[1:]))


# ---------------------------------------------------------------------------
# asymptotics of single terms

def test_term_log_asymptotics_leading_behaviour():
    k = 10_000
    v = slicing.term_log_asymptotics(k, 0, 0, 1.0, 1.0)
    assert abs(v / (-k * math.log(k)) - 1) < 0.2


def test_term_log_asymptotics_vs_direct_large_k():
    k, z = 2000, 1.0
    approx = slicing.term_log_asymptotics(k, 0, 0, 1.0, z)
    exact = slicing.log_single_term(k, 0, 0, 1.0, z)
    assert abs(approx - exact) / abs(exact) < 0.15


def test_term_log_asymptotics_vs_direct_k50_z30():
    # k = 50, z = 30: sqrt(k) is well below z, so the large-k form does not yet apply
    approx = slicing.term_log_asymptotics(50, 0, 0, 1.0, 30.0)
    exact = slicing.log_single_term(50, 0, 0, 1.0, 30.0)
    assert abs(approx - exact) / abs(exact) < 0.15


def test_terms_decrease_past_knee():
    g = build_grid(ModelParams(0.1, 1, 1, 1), 8)
    logs = [slicing.log_single_term(k, 0, 0, g.xi, g.z) for k in range(120)]
    knee = int(np.argmax(logs))
    assert all(b < a for a, b in zip(logs[knee:], logs[knee + 1:]))


# ---------------------------------------------------------------------------
# principal sum bookkeeping

def test_principal_epsilon_monotone_in_k0():
    g = build_grid(ModelParams(0.1, 1, 1, 1), 8)
    eps = [slicing.principal_sum_epsilon(g, K0) for K0 in range(1, 12)]
    assert all(b < a for a, b in zip(eps, eps[1:]))


def test_principal_sandwich_n3():
    g = build_grid(ModelParams(0.1, 1, 1, 1), 3)
    K0 = 4
    lo = zn_multisum(g, K0)
    full = zn_multisum(g, 60)
    eps = slicing.max_principal_epsilon(g, K0)
    assert lo <= full * (1 + 1e-14)
    assert full <= (1 + eps) ** 2 * lo * (1 + 1e-14)


@pytest.mark.parametrize("N", [4, 8, 16])
def test_principal_epsilon_below_inverse_square(N):
    g = build_grid(ModelParams(0.1, 1, 1, 1), N)
    K0 = next(K for K in range(1, 60) if slicing.principal_sum_epsilon(g, K) < N ** -2)
    assert slicing.principal_sum_epsilon(g, K0) < N ** -2
