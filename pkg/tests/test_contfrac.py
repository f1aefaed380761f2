import math
from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given, settings, strategies as st

from anharmonic import contfrac
from anharmonic.errors import RecurrenceBlowUpError
from anharmonic.slicing import ModelParams, build_grid


def _grid(b, N=50, c=1.0, beta=1.0):
    return build_grid(ModelParams(0.1, b, c, beta), N)


def test_roots_solve_characteristic_equation():
    for b in (-0.5, 0.5, 1, 5):
        g = _grid(b)
        st_ = contfrac.convergent_state(g.B, g.A)
        for r in (st_.rho1, st_.rho2):
            assert abs(r * r - r + mp.mpf(g.A) ** 2) < 1e-13


def test_omega_fixed_point_b0():
    assert contfrac.omega_iterate(0.5, 0.5, 137) == 0.5
    assert contfrac.omega_iterate(Fraction(1, 2), Fraction(1, 2), 40) == Fraction(1, 2)


def test_omega_iterate_vs_closed_form_b1():
    g = _grid(1.0)
    for n in (0, 1, 5, 50, 200):
        _, _, w = contfrac.convergent_closed_form(g.B, g.A, n)
        assert w == pytest.approx(contfrac.omega_iterate(g.omega0, g.A, n), rel=1e-12)


def test_omega_tends_to_larger_root():
    g = build_grid(ModelParams(0.1, 50, 1, 1), 10)
    st_ = contfrac.convergent_state(g.B, g.A)
    assert contfrac.omega_iterate(g.omega0, g.A, 400) == pytest.approx(float(mp.re(st_.rho1)), rel=1e-12)


def test_omega_blow_up_reported():
    with pytest.raises(RecurrenceBlowUpError) as info:
        contfrac.omega_iterate(Fraction(1), Fraction(1), 3)
    assert info.value.index == 1


def test_initial_values():
    B, A = 0.1, 0.4
    p, q, _ = contfrac.convergent_closed_form(B, A, 0)
    assert p == pytest.approx(1 + 2 * B, rel=1e-15)
    assert q == pytest.approx(2, rel=1e-15)
    assert contfrac.convergent_closed_form(B, A, 1)[1] == pytest.approx(1 + 2 * B, rel=1e-15)


def test_p_equals_next_q_closed_form():
    g = _grid(1.0)
    st_ = contfrac.convergent_state(g.B, g.A)
    for n in range(201):
        assert contfrac.p_closed(st_, n) == pytest.approx(contfrac.q_closed(st_, n + 1), rel=1e-12)


def test_p_equals_next_q_exact():
    for A, B in [(Fraction(1, 3), Fraction(1, 6)), (Fraction(2, 5), Fraction(1, 10)), (Fraction(3, 5), Fraction(-1, 10))]:
        p, q = contfrac.convergents_exact(B, A, 30)
        assert all(p[n] == q[n + 1] for n in range(31))


def test_degenerate_b0():
    st_ = contfrac.convergent_state(0.0, 0.5)
    assert st_.degenerate
    for n in range(20):
        assert contfrac.q_closed(st_, n) == pytest.approx(2 * 0.5 ** n, rel=1e-15)


def test_degenerate_is_limit_of_generic():
    A = 0.5 * math.sqrt(1 - 1e-12)
    B = 0.5 - A
    gen = contfrac.convergent_state(B, A)
    deg = contfrac.convergent_state(B, 0.5)
    assert not gen.degenerate and deg.degenerate
    for n in (1, 10, 50):
        assert abs(contfrac.q_scaled(gen, n) - contfrac.q_scaled(deg, n)) < 1e-6


@pytest.mark.parametrize("b", [-0.5, 0.0, 0.5, 1.0, 5.0])
def test_closed_form_vs_recurrence(b):
    g = _grid(b, N=400)
    st_ = contfrac.convergent_state(g.B, g.A)
    exact = contfrac.q_recurrence(Fraction(g.B), Fraction(g.A), 200)
    for n in range(0, 201, 7):
        assert contfrac.q_closed(st_, n) == pytest.approx(float(exact[n]), rel=1e-12)


def test_complex_roots_give_real_values():
    # 4A^2 > 1 happens for b < 0
    g = build_grid(ModelParams(0.1, -2, 1, 1), 4)
    st_ = contfrac.convergent_state(g.B, g.A)
    assert st_.complex_roots
    exact = contfrac.q_recurrence(Fraction(g.B), Fraction(g.A), 12)
    for n in range(13):
        assert contfrac.q_closed(st_, n) == pytest.approx(float(exact[n]), rel=1e-12, abs=1e-15)


def test_q_scaled_b0_is_two():
    st_ = contfrac.convergent_state(0.0, 0.5)
    assert all(contfrac.q_scaled(st_, n) == pytest.approx(2, rel=1e-15) for n in range(30))


def test_q_scaled_continuum_cosh():
    errs = []
    for delta in (2e-3, 1e-3, 5e-4):
        x = 0.7
        n = round(x / delta)
        g = build_grid(ModelParams(0.1, 1, 1, x), n)
        st_ = contfrac.convergent_state(g.B, g.A)
        errs.append(abs(contfrac.q_scaled(st_, n) - 2 * math.cosh(math.sqrt(2) * x)))
    assert errs[-1] < 1e-2
    assert errs[0] / errs[1] == pytest.approx(2, rel=0.1)
    assert errs[1] / errs[2] == pytest.approx(2, rel=0.1)


def test_q_scaled_ratio_identity():
    g = _grid(1.0, N=300)
    st_ = contfrac.convergent_state(g.B, g.A)
    w = contfrac.omega_sequence(g.omega0, g.A, 200)
    for k in range(1, 201, 9):
        lhs = g.A ** 2 / w[k - 1] ** 2
        rhs = (contfrac.q_scaled(st_, k - 1) / contfrac.q_scaled(st_, k)) ** 2
        assert lhs == pytest.approx(rhs, rel=1e-12)


def test_b_sequence():
    st0 = contfrac.convergent_state(0.0, 0.5)
    assert contfrac.b_sequence(st0, 3, 10) == pytest.approx(7 / 4, rel=1e-15)
    g = _grid(1.0)
    st_ = contfrac.convergent_state(g.B, g.A)
    assert contfrac.b_sequence(st_, 9, 10) == pytest.approx(
        1 / (contfrac.q_scaled(st_, 10) * contfrac.q_scaled(st_, 9)), rel=1e-15)


def test_b_continuum_factor_quarter():
    P = ModelParams(0.1, 1, 1, 1)
    f = [contfrac.b_continuum_factor(P, 1.0, 0.3, d) for d in (4e-3, 2e-3)]
    assert abs(f[1] - 0.25) < abs(f[0] - 0.25) + 1e-12
    assert f[1] == pytest.approx(0.25, rel=5e-3)
    assert contfrac.b_continuum_factor(ModelParams(0.1, 0, 1, 1), 1.0, 0.3, 1e-3) == pytest.approx(0.25, rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 9), st.integers(1, 9), st.integers(2, 30))
def test_p_equals_next_q_exact_property(num_a, num_b, n):
    A = Fraction(num_a, 10)
    B = Fraction(num_b, 20)
    p, q = contfrac.convergents_exact(B, A, n)
    assert all(p[i] == q[i + 1] for i in range(n + 1))
