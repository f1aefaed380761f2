"""Generalised Gelfand-Yaglom layer.

``F`` obeys

    F'' + 4 F' (ln S)' = F (2b/c - 2 (ln S)'' - 4 ((ln S)')^2),
    F(0) = 1 / S(0)^2,  F'(0) = -(1/S^2)'(0),

and ``Z(beta) = 1 / sqrt(F(beta))``.  The substitution ``y = F S^2`` reduces
it to ``y'' = (2b/c) y``, ``y(0) = 1``, ``y'(0) = 0``, so
``Z = S(beta) / sqrt(y(beta))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np

from .continuum import ContinuumSeries, gamma_of, s_continuum, HYPERBOLIC, TRIGONOMETRIC
from .errors import BranchPoleError, ConvergenceError, DomainError, SeriesBreakdownError
from .slicing import ModelParams

DEFAULT_STEPS = 4096


@dataclass
class GGYTrajectory:
    """Solution of the F equation on a uniform grid."""

    tau_grid: np.ndarray
    S_values: np.ndarray
    F_values: np.ndarray
    Fp_values: np.ndarray
    Z_beta: float
    method: str
    error_estimate: float
    positive: bool

    def y_values(self) -> np.ndarray:
        """``F S^2`` along the grid."""
        return self.F_values * self.S_values ** 2


def y_closed(params: ModelParams, tau):
    """``cosh(gamma tau)``, ``cos(gamma~ tau)`` or 1 by branch."""
    branch, g = gamma_of(params)
    if branch == HYPERBOLIC:
        return np.cosh(g * np.asarray(tau, float))
    if branch == TRIGONOMETRIC:
        return np.cos(g * np.asarray(tau, float))
    return np.ones_like(np.asarray(tau, float))


def _provider_table(s_provider, taus: np.ndarray) -> np.ndarray:
    if hasattr(s_provider, "derivs_array"):
        return s_provider.derivs_array(taus)
    f = s_provider.derivs if hasattr(s_provider, "derivs") else s_provider
    return np.array([f(t) for t in taus]).T


def _rk4_F(k: float, tab: np.ndarray, n: int, h: float, stride: int):
    """RK4 over ``n`` steps of size ``h``; ``tab`` is sampled every ``h / stride``."""
    S, S1, S2 = tab
    L1 = S1 / S
    L2 = S2 / S - L1 * L1
    G = k - 2 * L2 - 4 * L1 * L1
    F = np.empty(n + 1)
    Fp = np.empty(n + 1)
    F[0] = 1.0 / S[0] ** 2
    Fp[0] = 2.0 * S1[0] / S[0] ** 3
    half = stride // 2

    def rhs(i, f, fp):
        return fp, -4.0 * fp * L1[i] + f * G[i]

    for s in range(n):
        i0, im, i1 = s * stride, s * stride + half, (s + 1) * stride
        f, fp = F[s], Fp[s]
        k1f, k1p = rhs(i0, f, fp)
        k2f, k2p = rhs(im, f + 0.5 * h * k1f, fp + 0.5 * h * k1p)
        k3f, k3p = rhs(im, f + 0.5 * h * k2f, fp + 0.5 * h * k2p)
        k4f, k4p = rhs(i1, f + h * k3f, fp + h * k3p)
        F[s + 1] = f + h * (k1f + 2 * k2f + 2 * k3f + k4f) / 6
        Fp[s + 1] = fp + h * (k1p + 2 * k2p + 2 * k3p + k4p) / 6
    return F, Fp


def solve_ggy(params: ModelParams, s_provider, beta: float, h: float | None = None,
              tol: float = 1e-6) -> GGYTrajectory:
    """Integrate the F equation with classical RK4 at fixed step ``h``.

    ``s_provider`` returns ``(S, S', S'')`` (either a callable or an object
    with ``derivs``/``derivs_array``).  A second run at ``h/2`` gives the
    error estimate ``|F_h - F_{h/2}| / 15`` at ``beta``; the finer run is
    returned.

    Raises
    ------
    SeriesBreakdownError
        ``S <= 0`` on the grid.
    ConvergenceError
        The step-halving estimate of ``Z`` exceeds ``tol``.
    """
    if beta <= 0:
        raise DomainError("beta must be positive")
    h = beta / DEFAULT_STEPS if h is None else h
    if h <= 0:
        raise DomainError("h must be positive")
    n = max(1, int(round(beta / h)))
    h = beta / n
    fine = np.linspace(0.0, beta, 4 * n + 1)
    tab = _provider_table(s_provider, fine)
    if np.any(tab[0] <= 0):
        i = int(np.argmax(tab[0] <= 0))
        raise SeriesBreakdownError(f"S = {tab[0][i]:.6g} <= 0 at tau={fine[i]:.6g}")
    k = 2.0 * params.b / params.c
    F1, _ = _rk4_F(k, tab, n, h, 4)
    F2, Fp2 = _rk4_F(k, tab, 2 * n, h / 2, 2)
    grid = fine[::2]
    S = tab[0][::2]
    positive = bool(np.all(F2 > 0))
    if F2[-1] <= 0:
        raise DomainError(f"F(beta) = {F2[-1]:.6g} <= 0; Z undefined")
    z2 = F2[-1] ** -0.5
    err = abs(F1[-1] ** -0.5 - z2) / 15 if F1[-1] > 0 else math.inf
    if err > tol:
        raise ConvergenceError(f"step-halving estimate {err:.3g} exceeds tolerance {tol:.3g}")
    return GGYTrajectory(grid, S, F2, Fp2, float(z2), "direct-ode", float(err), positive)


def z_beta(params: ModelParams, order: int = 3, method: str = "closed-form",
           h: float | None = None, series: ContinuumSeries | None = None) -> float:
    """``Z(beta)`` with the continuum ``S`` truncated at ``order``.

    ``"closed-form"`` returns ``S(beta) / sqrt(y(beta))``; ``"direct-ode"``
    integrates the F equation with the smooth ``S`` provider.
    """
    beta = params.beta
    y = float(y_closed(params, beta))
    if y <= 0:
        raise BranchPoleError(f"y(beta) = {y:.6g} <= 0; beyond the first zero of cos")
    if method == "closed-form":
        s = s_continuum(params, beta, order)
        if s <= 0:
            raise SeriesBreakdownError(f"S(beta) = {s:.6g} <= 0")
        return s / math.sqrt(y)
    if method == "direct-ode":
        series = ContinuumSeries(params, order, beta) if series is None else series
        return solve_ggy(params, series, beta, h).Z_beta
    raise ValueError("method must be 'closed-form' or 'direct-ode'")


# ---------------------------------------------------------------------------
# time-dependent coefficient

@dataclass
class TimeDepResult:
    y_beta: float
    yp_beta: float
    tau_grid: np.ndarray
    y_values: np.ndarray
    F_values: np.ndarray | None
    c: float
    b_fn: object

    def invariant(self, tau):
        """Normal-form invariant ``I(tau) = -2 b(tau) / c``."""
        return -2.0 * np.vectorize(self.b_fn)(tau) / self.c


def _segments(beta: float, h: float, breakpoints):
    pts = sorted({0.0, beta, *[p for p in (breakpoints or []) if 0 < p < beta]})
    for t0, t1 in zip(pts[:-1], pts[1:]):
        n = max(1, math.ceil((t1 - t0) / h - 1e-9))
        yield t0, t1, n


def _rk4_y(b_fn, c, beta, h, breakpoints):
    ts, ys, yps = [0.0], [1.0], [0.0]
    y, yp = 1.0, 0.0
    for t0, t1, n in _segments(beta, h, breakpoints):
        hh = (t1 - t0) / n
        # evaluate b only strictly inside or at the ends of this segment
        eps_in = 1e-12 * max(1.0, abs(t1 - t0))

        def k_at(t):
            return 2.0 * b_fn(min(max(t, t0 + eps_in), t1 - eps_in)) / c

        for s in range(n):
            t = t0 + s * hh
            tm, te = t + 0.5 * hh, t + hh
            ka, km, ke = k_at(t), k_at(tm), k_at(te)
            k1y, k1p = yp, ka * y
            k2y, k2p = yp + 0.5 * hh * k1p, km * (y + 0.5 * hh * k1y)
            k3y, k3p = yp + 0.5 * hh * k2p, km * (y + 0.5 * hh * k2y)
            k4y, k4p = yp + hh * k3p, ke * (y + hh * k3y)
            y += hh * (k1y + 2 * k2y + 2 * k3y + k4y) / 6
            yp += hh * (k1p + 2 * k2p + 2 * k3p + k4p) / 6
            ts.append(te)
            ys.append(y)
            yps.append(yp)
    return np.array(ts), np.array(ys), np.array(yps)


def solve_timedep(b_fn, c: float, beta: float, h: float | None = None, breakpoints=None,
                  s_provider=None) -> TimeDepResult:
    """Integrate ``y'' = (2 b(tau) / c) y``, ``y(0) = 1``, ``y'(0) = 0`` with RK4.

    ``breakpoints`` lists discontinuities of ``b_fn``; steps never straddle
    them.  With ``s_provider`` the trajectory ``F = y / S^2`` is returned too.
    """
    if c <= 0 or beta <= 0:
        raise DomainError("need c > 0 and beta > 0")
    h = beta / DEFAULT_STEPS if h is None else h
    ts, ys, yps = _rk4_y(b_fn, c, beta, h, breakpoints)
    F = None
    if s_provider is not None:
        S = _provider_table(s_provider, ts)[0]
        if np.any(S <= 0):
            raise SeriesBreakdownError("S <= 0 on the grid")
        F = ys / S ** 2
    return TimeDepResult(float(ys[-1]), float(yps[-1]), ts, ys, F, c, b_fn)


# ---------------------------------------------------------------------------
# first quartic correction with coinciding endpoints

_MOELER_SERIES = (4 / 15, -4 / 105, 8 / 1575, -4 / 6237, 5528 / 70945875)


def _moeler_braces_over_u3(u: float) -> float:
    """``{-3 coth u + 2u [coth^2 u + 1/(2 sinh^2 u)]} / u^3``."""
    if u < 1e-3:
        u2 = u * u
        return sum(c * u2 ** k for k, c in enumerate(_MOELER_SERIES))
    with mp.workdps(50):
        x = mp.mpf(u)
        cth = mp.coth(x)
        v = (-3 * cth + 2 * x * (cth ** 2 + 1 / (2 * mp.sinh(x) ** 2))) / x ** 3
        return float(v)


def moeler_correction(params: ModelParams, beta: float | None = None) -> float:
    """``S(beta) = 1 - 3a/(32 c^2 gamma^3) {-3 coth(gb) + 2 gb [coth^2(gb) + 1/(2 sinh^2(gb))]}``.

    ``gb = gamma beta``.  Written as ``1 - 3a beta^3 / (32 c^2) * braces/gb^3``
    which stays finite as ``gamma -> 0`` (limit ``1 - a beta^3 / (40 c^2)``).
    """
    beta = params.beta if beta is None else beta
    if params.b < 0:
        raise DomainError("the coinciding-endpoint correction is defined on the hyperbolic branch")
    _, g = gamma_of(params)
    u = g * beta
    return 1.0 - 3.0 * params.a * beta ** 3 / (32.0 * params.c ** 2) * _moeler_braces_over_u3(u)


def moeler_asymptote(params: ModelParams, beta: float | None = None) -> float:
    """Large ``gamma beta`` form ``1 - 3a/(32 c^2 gamma^3) (2 gamma beta - 3)``."""
    beta = params.beta if beta is None else beta
    _, g = gamma_of(params)
    if g == 0:
        raise DomainError("asymptote needs b > 0")
    return 1.0 - 3.0 * params.a / (32.0 * params.c ** 2 * g ** 3) * (2 * g * beta - 3)
