"""The continued fraction ``omega_i = 1 - A^2 / omega_{i-1}`` and its closed form.

Writing ``omega_n = p_n / q_n`` with ``p_n = q_{n+1}``, the denominators obey
``q_n = q_{n-1} - A^2 q_{n-2}``, ``q_0 = 2``, ``q_1 = 1 + 2B``.  The
characteristic roots ``rho_{1,2} = (1 +- sqrt(1 - 4A^2)) / 2`` give

    q_n = w1 rho1^n + w2 rho2^n,   w_{1,2} = 1 +- 2B / sqrt(1 - 4A^2),
    p_n = w~1 rho1^n + w~2 rho2^n, w~_i = w_i rho_i.

For ``4A^2 > 1`` the roots form a complex pair and the formulas are
evaluated in complex arithmetic; at ``4A^2 = 1`` the double-root form
``q_n = (2 + 4B n) (1/2)^n`` is used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp

from .errors import DomainError, RecurrenceBlowUpError

#: ``|1 - 4A^2|`` below this switches to the double-root formulas
DEGENERACY_TOL = 1e-30
#: allowed imaginary residue of closed-form values (relative)
IMAG_TOL = 1e-12
#: working digits of the closed-form evaluation
CLOSED_DPS = 40


def omega_iterate(omega0, A, n: int):
    """``omega_n`` after ``n`` steps of ``omega -> 1 - A^2 / omega``.

    Works for floats and for ``Fraction`` input (exact).

    Raises
    ------
    RecurrenceBlowUpError
        An iterate vanished, with its index.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    w = omega0
    a2 = A * A
    for i in range(1, n + 1):
        if w == 0:
            raise RecurrenceBlowUpError(i - 1, w)
        w = 1 - a2 / w
    return w


def omega_sequence(omega0, A, n: int):
    """List ``[omega_0, ..., omega_n]``."""
    out = [omega0]
    a2 = A * A
    for i in range(1, n + 1):
        if out[-1] == 0:
            raise RecurrenceBlowUpError(i - 1, out[-1])
        out.append(1 - a2 / out[-1])
    return out


@dataclass(frozen=True)
class ConvergentState:
    """Closed-form data of the convergents for given ``(A, B)``.

    Roots and weights are held as ``mpmath`` numbers so that nearly
    coincident roots (``1 - 4A^2`` tiny) do not cost accuracy.
    """

    A: float
    B: float
    rho1: object
    rho2: object
    w1: object
    w2: object
    wt1: object
    wt2: object
    degenerate: bool

    @property
    def complex_roots(self) -> bool:
        return (not self.degenerate) and abs(mp.im(self.rho1)) > 0


def convergent_state(B: float, A: float) -> ConvergentState:
    """Roots and weights of the closed form for ``(A, B)``."""
    A = float(A)
    B = float(B)
    with mp.workdps(CLOSED_DPS):
        a, b = mp.mpf(A), mp.mpf(B)
        disc = 1 - 4 * a * a
        if abs(disc) < DEGENERACY_TOL:
            half = mp.mpf(0.5)
            # q_n = (alpha + gamma n) / 2^n with alpha = 2, gamma = 4B
            return ConvergentState(A, B, half, half, mp.mpf(2), 4 * b, mp.mpf(1), 2 * b, True)
        s = mp.sqrt(mp.mpc(disc))
        rho1 = (1 + s) / 2
        rho2 = (1 - s) / 2
        w1 = 1 + 2 * b / s
        w2 = 1 - 2 * b / s
        return ConvergentState(A, B, rho1, rho2, w1, w2, w1 * rho1, w2 * rho2, False)


def _realify(v, what: str) -> float:
    v = mp.mpc(v)
    if abs(v.imag) > IMAG_TOL * max(1, abs(v.real)):
        raise ArithmeticError(f"{what} has imaginary residue {float(v.imag)!r}")
    return float(v.real)


def _pair(state: ConvergentState, c1, c2, r1, r2, n: int) -> float:
    with mp.workdps(CLOSED_DPS):
        return _realify(c1 * r1 ** n + c2 * r2 ** n, "closed form")


def q_closed(state: ConvergentState, n: int) -> float:
    """Denominator ``q_n`` from the closed form."""
    if state.degenerate:
        with mp.workdps(CLOSED_DPS):
            return float((state.w1 + state.w2 * n) * mp.mpf(0.5) ** n)
    return _pair(state, state.w1, state.w2, state.rho1, state.rho2, n)


def p_closed(state: ConvergentState, n: int) -> float:
    """Numerator ``p_n`` from the closed form."""
    if state.degenerate:
        # p_n = q_{n+1}
        with mp.workdps(CLOSED_DPS):
            return float((state.w1 + state.w2 * (n + 1)) * mp.mpf(0.5) ** (n + 1))
    return _pair(state, state.wt1, state.wt2, state.rho1, state.rho2, n)


def convergent_closed_form(B: float, A: float, n: int):
    """``(p_n, q_n, omega_n)`` from the closed form.

    Raises
    ------
    DomainError
        ``q_n = 0`` so ``omega_n`` is undefined.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    st = convergent_state(B, A)
    p = p_closed(st, n)
    q = q_closed(st, n)
    if q == 0:
        raise DomainError(f"q_{n} = 0; omega_{n} undefined")
    return p, q, p / q


def convergents_exact(B, A, n: int):
    """Exact numerators and denominators from their own recurrences.

    ``q``: ``q_0 = 2``, ``q_1 = 1 + 2B``; ``p``: ``p_0 = 1 + 2B``,
    ``p_1 = 1 + 2B - 2A^2``; both obey ``x_k = x_{k-1} - A^2 x_{k-2}``.
    Returns lists ``p[0..n]``, ``q[0..n+1]`` of ``Fraction``.
    """
    A = Fraction(A)
    B = Fraction(B)
    a2 = A * A
    q = [Fraction(2), 1 + 2 * B]
    while len(q) < n + 2:
        q.append(q[-1] - a2 * q[-2])
    p = [1 + 2 * B, 1 + 2 * B - 2 * a2]
    while len(p) < n + 1:
        p.append(p[-1] - a2 * p[-2])
    return p[: n + 1], q[: n + 2]


def q_recurrence(B, A, n: int):
    """``q_0..q_n`` from the two-term recurrence (any numeric type)."""
    a2 = A * A
    q = [2 + 0 * A, 1 + 2 * B]
    while len(q) < n + 1:
        q.append(q[-1] - a2 * q[-2])
    return q[: n + 1]


def q_scaled(state: ConvergentState, n: int) -> float:
    """``Q_n = q_n / A^n = w1 (rho1/A)^n + w2 (rho2/A)^n``."""
    with mp.workdps(CLOSED_DPS):
        a = mp.mpf(state.A)
        if state.degenerate:
            return float((state.w1 + state.w2 * n) * (mp.mpf(0.5) / a) ** n)
        return _pair(state, state.w1, state.w2, state.rho1 / a, state.rho2 / a, n)


def q_scaled_exact(B, A, n: int):
    """Exact ``Q_0..Q_n`` for rational ``A``, ``B``."""
    q = q_recurrence(Fraction(B), Fraction(A), n)
    A = Fraction(A)
    return [q[i] / A ** i for i in range(n + 1)]


def b_sequence(state: ConvergentState, j: int, Lam: int) -> float:
    """``b_j = sum_{k=j}^{Lam-1} 1 / (Q_{k+1} Q_k)``."""
    if not 0 <= j < Lam:
        raise ValueError("need 0 <= j < Lam")
    Q = [q_scaled(state, k) for k in range(j, Lam + 1)]
    return math.fsum(1.0 / (Q[i + 1] * Q[i]) for i in range(len(Q) - 1))


def b_continuum_factor(params, tau: float, x: float, delta: float) -> float:
    """Ratio ``Delta gamma b_k / (tanh(gamma tau) - tanh(gamma x))`` at ``k = x / Delta``.

    For ``b = 0`` the ratio is taken against ``(tau - x)`` (the ``gamma -> 0``
    limit).  Measures the constant relating the discrete sums to the
    hyperbolic-tangent profile; it tends to 1/4.
    """
    from .slicing import build_grid
    Lam = int(round(tau / delta))
    k = int(round(x / delta))
    g = build_grid(params.replace(beta=tau), Lam)
    st = convergent_state(g.B, g.A)
    bk = b_sequence(st, k, Lam)
    if params.b == 0:
        return delta * bk / (tau - x)
    if params.b > 0:
        gam = math.sqrt(2 * params.b / params.c)
        return delta * gam * bk / (math.tanh(gam * tau) - math.tanh(gam * x))
    gam = math.sqrt(-2 * params.b / params.c)
    return delta * gam * bk / (math.tan(gam * tau) - math.tan(gam * x))
