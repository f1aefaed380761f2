"""Continuum limit of the leading part.

With ``C_mu(tau) = lim Delta^{3mu} (Lam)_0^{2mu}`` at ``Lam = tau / Delta``
the continuum function is

    S(a, b, c, tau) = sum_mu (-a / c^2)^mu / mu! * C_mu(tau).

``C_1`` is known in closed form; ``C_2`` and ``C_3`` are extrapolated from
the discrete recurrence.  For ``b < 0`` the hyperbolic functions turn into
their trigonometric counterparts with ``gamma~ = sqrt(-2b/c)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Chebyshev

from .errors import BranchPoleError, ConvergenceError, DomainError, SeriesBreakdownError
from .recurrence import lambda_final_batch
from .slicing import ModelParams, build_grid

#: recurrence resolutions used for the extrapolated terms
DEFAULT_LAMS = (64, 128, 256)
#: below this |gamma tau| the closed form of C_1 is replaced by its series
SERIES_CUTOFF = 1e-3
#: Chebyshev-Lobatto nodes of the tau interpolant
DEFAULT_NODES = 64

HYPERBOLIC, TRIGONOMETRIC, FREE = "hyperbolic", "trigonometric", "free"


def gamma_of(params: ModelParams):
    """Branch tag and ``gamma`` (``gamma~`` for ``b < 0``)."""
    if params.b > 0:
        return HYPERBOLIC, math.sqrt(2.0 * params.b / params.c)
    if params.b < 0:
        return TRIGONOMETRIC, math.sqrt(-2.0 * params.b / params.c)
    return FREE, 0.0


def _check_branch(params: ModelParams, tau: float):
    branch, g = gamma_of(params)
    if branch == TRIGONOMETRIC and g * tau >= math.pi / 2:
        raise BranchPoleError(f"gamma~ * tau = {g * tau:.6g} reaches the pole at pi/2")
    return branch, g


# ---------------------------------------------------------------------------
# mu = 1 closed form

def _c1_series(k: float, tau: float):
    """Series of ``C_1`` and two derivatives in ``k = 2b/c`` (any sign)."""
    t2 = tau * tau
    v = tau ** 3 * (1 - 0.7 * k * t2 + 17.0 / 42.0 * k * k * t2 * t2)
    d1 = 3 * t2 - 3.5 * k * t2 * t2 + 17.0 / 6.0 * k * k * t2 ** 3
    d2 = 6 * tau - 14 * k * tau ** 3 + 17 * k * k * tau ** 5
    return v, d1, d2


def _c1_all(params: ModelParams, tau: float):
    if tau < 0:
        raise DomainError("tau must be >= 0")
    branch, g = _check_branch(params, tau)
    k = 2.0 * params.b / params.c
    if branch == FREE or g * tau < SERIES_CUTOFF:
        return _c1_series(k, tau)
    u = g * tau
    if branch == HYPERBOLIC:
        t = math.tanh(u)
        s = 1.0 - t * t
        f = 3 * u * t * t + t - u
        f1 = 2 * t * t + 6 * u * t * s
        f2 = 10 * t * s + 6 * u * s * s - 12 * u * t * t * s
    else:
        t = math.tan(u)
        s = 1.0 + t * t
        f = 3 * u * t * t - t + u
        f1 = 2 * t * t + 6 * u * t * s
        f2 = 10 * t * s + 6 * u * s * s + 12 * u * t * t * s
    return 3 * f / (8 * g ** 3), 3 * f1 / (8 * g * g), 3 * f2 / (8 * g)


def continuum_c2(params: ModelParams, tau: float) -> float:
    """First term ``C_1(tau) = 3/(8 gamma^3) [3 gamma tau tanh^2 + tanh - gamma tau]``.

    Examples
    --------
    >>> round(continuum_c2(ModelParams(1.0, 0.0, 1.0, 1.0), 2.0), 12)
    8.0
    """
    return _c1_all(params, tau)[0]


def continuum_c2_derivatives(params: ModelParams, tau: float):
    """``(C_1, C_1', C_1'')`` at ``tau``, all analytic."""
    return _c1_all(params, tau)


# ---------------------------------------------------------------------------
# extrapolated terms

def c_terms_discrete(params: ModelParams, taus, Lam: int, mu_max: int) -> np.ndarray:
    """``Delta^{3mu} (Lam)_0^{2mu}`` with ``Delta = tau / Lam`` for every tau (shape ``(mu_max+1, n)``)."""
    taus = np.atleast_1d(np.asarray(taus, float))
    d = taus / Lam
    eps = params.b * d * d / params.c
    vals = lambda_final_batch(eps, Lam, mu_max)
    mu = np.arange(mu_max + 1)[:, None]
    return vals * d[None, :] ** (3 * mu)


def _extrapolate(params, taus, mu_max, lams):
    if len(lams) != 3 or lams[1] != 2 * lams[0] or lams[2] != 2 * lams[1]:
        raise ValueError("need three resolutions, each twice the previous")
    v0, v1, v2 = (c_terms_discrete(params, taus, L, mu_max) for L in lams)
    r0 = 2 * v1 - v0
    r1 = 2 * v2 - v1
    val = (4 * r1 - r0) / 3
    err = np.abs(val - r1)
    return val, err, (v0, v1, v2)


def extrapolate_c_term(params: ModelParams, tau: float, mu: int, lams=DEFAULT_LAMS):
    """``C_mu(tau)`` for ``mu`` in {2, 3} by Richardson extrapolation in ``Delta``.

    The discrete values carry ``O(Delta)`` and ``O(Delta^2)`` corrections;
    both are eliminated from the three resolutions ``lams``.

    Returns
    -------
    (value, error_estimate)

    Raises
    ------
    ConvergenceError
        The successive differences do not shrink.
    """
    if mu not in (1, 2, 3):
        raise ValueError("mu must be 1, 2 or 3")
    if tau < 0:
        raise DomainError("tau must be >= 0")
    if tau == 0:
        return 0.0, 0.0
    _check_branch(params, tau)
    val, err, (v0, v1, v2) = _extrapolate(params, [tau], mu, lams)
    d1 = abs(v1[mu, 0] - v0[mu, 0])
    d2 = abs(v2[mu, 0] - v1[mu, 0])
    if d2 > d1 and d2 > 1e-14 * abs(v2[mu, 0]):
        raise ConvergenceError(f"extrapolation of C_{mu} at tau={tau} is not converging")
    return float(val[mu, 0]), float(err[mu, 0])


def _sum_terms(params: ModelParams, terms) -> float:
    x = -params.a / params.c ** 2
    return sum(x ** mu / math.factorial(mu) * t for mu, t in enumerate(terms))


def s_continuum(params: ModelParams, tau: float, order: int = 3) -> float:
    """Continuum function ``S(a, b, c, tau)`` truncated after ``order`` terms."""
    if not 0 <= order <= 3:
        raise ValueError("order must be in 0..3")
    if params.a == 0 or tau == 0:
        return 1.0
    terms = [1.0, continuum_c2(params, tau)]
    for mu in range(2, order + 1):
        terms.append(extrapolate_c_term(params, tau, mu)[0])
    return _sum_terms(params, terms[: order + 1])


# ---------------------------------------------------------------------------
# smooth provider on an interval

@dataclass
class ContinuumSeries:
    """``S`` and its first two ``tau`` derivatives on ``[0, tau_max]``.

    ``C_1`` is evaluated analytically.  ``C_2`` and ``C_3`` are extrapolated
    at Chebyshev-Lobatto nodes (``tau_max`` is a node) and replaced by their
    interpolating polynomial, which is differentiated exactly.
    """

    params: ModelParams
    order: int
    tau_max: float
    nodes: int = DEFAULT_NODES
    lams: tuple = DEFAULT_LAMS
    provenance: list = field(init=False)
    error_estimate: float = field(init=False)
    _interp: list = field(init=False, repr=False)

    def __post_init__(self):
        if not 0 <= self.order <= 3:
            raise ValueError("order must be in 0..3")
        if self.tau_max <= 0:
            raise DomainError("tau_max must be positive")
        _check_branch(self.params, self.tau_max)
        self.provenance = ["exact", "closed-form"] + [
            f"extrapolated(Lam={list(self.lams)}, Richardson orders 1,2)" for _ in range(2, self.order + 1)]
        self.provenance = self.provenance[: self.order + 1]
        self._interp = []
        self.error_estimate = 0.0
        if self.order >= 2 and self.params.a > 0:
            j = np.arange(self.nodes + 1)
            x = 0.5 * self.tau_max * (1.0 - np.cos(np.pi * j / self.nodes))
            val, err, _ = _extrapolate(self.params, x[1:], self.order, self.lams)
            for mu in range(2, self.order + 1):
                y = np.concatenate([[0.0], val[mu]])
                self._interp.append(Chebyshev.fit(x, y, self.nodes, domain=[0.0, self.tau_max]))
                self.error_estimate = max(self.error_estimate, float(err[mu].max()))
            g = build_grid(self.params.replace(beta=self.tau_max), self.lams[-1])
            ratio = 2 * g.z ** 2 * g.delta ** 3 * self.params.a / self.params.c ** 2
            if abs(ratio - 1) > 10 * abs(g.eps) + 1e-12:
                raise ArithmeticError("2 z^2 Delta^3 does not approach c^2/a")

    def terms(self, tau: float):
        """``[(C_mu, C_mu', C_mu'') for mu = 0..order]``."""
        if not 0 <= tau <= self.tau_max * (1 + 1e-12):
            raise DomainError(f"tau={tau} outside [0, {self.tau_max}]")
        out = [(1.0, 0.0, 0.0)]
        if self.order >= 1:
            out.append(continuum_c2_derivatives(self.params, tau))
        for p in self._interp:
            out.append((float(p(tau)), float(p.deriv(1)(tau)), float(p.deriv(2)(tau))))
        return out[: self.order + 1]

    def derivs(self, tau: float):
        """``(S, S', S'')`` at ``tau``."""
        if self.params.a == 0:
            return 1.0, 0.0, 0.0
        t = self.terms(tau)
        return tuple(_sum_terms(self.params, [x[k] for x in t]) for k in range(3))

    def __call__(self, tau: float) -> float:
        return self.derivs(tau)[0]

    def derivs_array(self, taus) -> np.ndarray:
        """Vectorised :meth:`derivs`; returns shape ``(3, n)``."""
        taus = np.asarray(taus, float)
        out = np.zeros((3, taus.size))
        out[0] = 1.0
        if self.params.a == 0 or self.order == 0:
            return out
        if taus.min() < 0 or taus.max() > self.tau_max * (1 + 1e-12):
            raise DomainError(f"tau outside [0, {self.tau_max}]")
        x = -self.params.a / self.params.c ** 2
        c1 = np.array([continuum_c2_derivatives(self.params, t) for t in taus]).T
        out += x * c1
        for mu, p in enumerate(self._interp, start=2):
            w = x ** mu / math.factorial(mu)
            out[0] += w * p(taus)
            out[1] += w * p.deriv(1)(taus)
            out[2] += w * p.deriv(2)(taus)
        return out


def ggy_potential_term(params: ModelParams, tau: float, order: int = 3,
                       series: ContinuumSeries | None = None) -> float:
    """``-2 (ln S)'' - 4 ((ln S)')^2`` at ``tau``.

    Raises
    ------
    SeriesBreakdownError
        ``S <= 0`` (the truncated series has broken down).
    """
    if params.a == 0:
        return 0.0
    if series is None:
        series = ContinuumSeries(params, order, max(tau, 1e-12))
    s, s1, s2 = series.derivs(tau)
    if s <= 0:
        raise SeriesBreakdownError(f"S = {s:.6g} <= 0 at tau={tau}")
    l1 = s1 / s
    l2 = s2 / s - l1 * l1
    return -2 * l2 - 4 * l1 * l1


def fd_steps(tau: float):
    """Central-difference steps ``(h1, h2)`` for first and second derivatives."""
    eps = np.finfo(float).eps
    scale = max(tau, 1.0)
    return eps ** (1 / 3) * scale, eps ** (1 / 4) * scale
