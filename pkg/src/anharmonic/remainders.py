"""Remainder budget of the leading part.

The single-index series at fixed neighbours ``(k_prev, k_next)`` has terms

    T_k = xi^{2k}/(2k)! G(k + k_prev) G(k + k_next),   G(m) = Gamma(m + 1/2) Dsc(m, z),

and its head ``H = sum_{k <= K0} T_k``.  Three pieces, each relative to
``H``, bound what the leading part neglects:

* Poincare piece: replacing ``Dsc(k + k_next)`` by its expansion up to
  ``J`` terms in the head.
* tail piece: the terms ``k > K0``.
* difference piece: the surviving mismatch ``C z^{-2 min(n, J)}`` between the
  expansions of orders ``n`` and ``J``.

All pieces are upper bounds in absolute value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath as mp
import numpy as np
from scipy.special import logsumexp

from .errors import DomainError
from .slicing import ModelParams, SliceGrid, build_grid, log_single_term
from .specfun import (WORK_DPS, log_pcf_scaled, pcf_scaled, poincare_sum, poincare_term,
                      temme_leading_magnitude)

#: how many ratios past K0 are inspected for the geometric majorant
RATIO_WINDOW = 16
#: largest admissible majorant ratio
MAX_RATIO = 0.5


def default_k0_rule(N: int) -> int:
    """``K0 = max(2, ceil(2 log2 N))``."""
    return max(2, math.ceil(2 * math.log2(N)))


@dataclass
class RemainderBudget:
    poincare_piece: float
    tail_piece: float
    difference_piece: float
    N: int
    K0: int
    J: int
    n: int
    theta_fit: float = math.nan

    @property
    def total(self) -> float:
        return self.poincare_piece + self.tail_piece + self.difference_piece


@dataclass
class Certification:
    budgets: list
    theta: float
    monotone: bool
    certified: bool
    N_list: list = field(default_factory=list)


def _log_head(grid: SliceGrid, K0: int, k_prev: int, k_next: int) -> float:
    return logsumexp([log_single_term(k, k_prev, k_next, grid.xi, grid.z) for k in range(K0 + 1)])


def _temrem_prefactor(m: float, z: float, J: int) -> float:
    """Bound of :func:`specfun.temme_remainder_bound` without ``(m+1/2)_{2J} / ((J-1)! (2z^2)^J)``."""
    if 2.0 * math.sqrt(m) > z:
        return math.inf
    with mp.workdps(WORK_DPS):
        mm, zz = mp.mpf(m), mp.mpf(z)
        z2 = zz * zz
        den = z2 - 2 * mm
        x = 1 - mm * mm / z2
        theta = abs(mm * mm / 4 + mp.mpf(3) / 16) + (2 * mm / z2) * (1 + mm / (2 * z2)) * z2 / den ** 2
        f1 = mp.hyp2f1(mp.mpf(J) / 2, 0.5, mp.mpf(J) / 2 + 1, x)
        f2 = mp.hyp2f1(0.5, 0.5, 1.5, x)
        return float((2 * z2 / den) * f1 * mp.exp(4 * theta / den * f2))


def bound_poincare_piece(grid: SliceGrid, K0: int, J: int, k_prev: int = 0, k_next: int = 0) -> float:
    """Relative bound on the head error from expanding ``Dsc(k + k_next, z)``.

    ``M`` is the largest remainder prefactor over ``a = 0..max(2 K0, K0 + k_next)``;
    the bound is

        M / ((J-1)! (2z^2)^J) sum_{k <= K0} xi^{2k}/(2k)! G(k + k_prev)
                                  Gamma(k + k_next + 1/2) (k + k_next + 1/2)_{2J}  /  H.

    ``J = 0`` uses ``|Dsc - P_0| <= bound_1 + |term_1|``.

    Raises
    ------
    DomainError
        ``2 sqrt(a) > z`` somewhere in the range (bound unavailable).
    """
    if K0 < 0 or J < 0:
        raise ValueError("need K0 >= 0 and J >= 0")
    z = grid.z
    if not math.isfinite(z):
        raise DomainError("remainder bounds need a > 0")
    a_max = max(2 * K0, K0 + k_next)
    if 2.0 * math.sqrt(a_max) > z:
        raise DomainError(f"2 sqrt({a_max}) > z = {z:.6g}: Poincare bound unavailable")
    Jb = max(J, 1)
    M = max(_temrem_prefactor(a, z, Jb) for a in range(a_max + 1))
    log_scale = math.log(M) - math.lgamma(Jb) - Jb * math.log(2 * z * z)
    logs = []
    for k in range(K0 + 1):
        m1, m2 = k + k_prev, k + k_next
        base = (2 * k * math.log(grid.xi) - math.lgamma(2 * k + 1)
                + math.lgamma(m1 + 0.5) + log_pcf_scaled(m1, z) + math.lgamma(m2 + 0.5))
        lp = math.lgamma(m2 + 0.5 + 2 * Jb) - math.lgamma(m2 + 0.5)
        v = math.exp(log_scale + lp)
        if J == 0:
            v += abs(poincare_term(m2, z, 1))
        logs.append(base + math.log(v))
    return math.exp(logsumexp(logs) - _log_head(grid, K0, k_prev, k_next))


def _log_majorant_term(k: int, k_prev: int, k_next: int, grid: SliceGrid) -> float:
    """Log of ``T_k`` with each ``Dsc`` replaced by its leading uniform magnitude."""
    z = grid.z
    return (2 * k * math.log(grid.xi) - math.lgamma(2 * k + 1)
            + math.lgamma(k + k_prev + 0.5) + math.log(temme_leading_magnitude(k + k_prev, z))
            + math.lgamma(k + k_next + 0.5) + math.log(temme_leading_magnitude(k + k_next, z)))


def tail_majorant(grid: SliceGrid, K0: int, k_prev: int = 0, k_next: int = 0):
    """``(first majorant term, ratio)`` of the geometric tail majorant."""
    lt = [_log_majorant_term(k, k_prev, k_next, grid) for k in range(K0 + 1, K0 + 2 + RATIO_WINDOW)]
    r = math.exp(max(b - a for a, b in zip(lt[:-1], lt[1:])))
    return math.exp(lt[0]), r


def bound_tail_piece(grid: SliceGrid, K0: int, n: int = 0, k_prev: int = 0, k_next: int = 0) -> float:
    """Relative bound on ``sum_{k > K0} T_k``.

    Each ``Dsc`` is replaced by ``exp(-A z^2) (1 + 4 lam)^{-1/4}`` (the
    leading level of the uniform expansion, which dominates it) and the tail
    by a geometric series with the largest term ratio measured over
    ``RATIO_WINDOW`` steps.  Only the leading level is used, whatever ``n``.

    Raises
    ------
    DomainError
        The ratio is not below 1/2 (``K0`` too small).
    """
    if n < 0 or K0 < 0:
        raise ValueError("need n >= 0 and K0 >= 0")
    if not math.isfinite(grid.z):
        raise DomainError("remainder bounds need a > 0")
    first, r = tail_majorant(grid, K0, k_prev, k_next)
    if r >= MAX_RATIO:
        raise DomainError(f"term ratio {r:.3g} >= 1/2 at K0={K0}; increase K0")
    return first / (1.0 - r) / math.exp(_log_head(grid, K0, k_prev, k_next))


def difference_window(grid: SliceGrid) -> int:
    """Largest index ``m`` inspected by :func:`difference_constant`; set by the grid alone."""
    return 2 * default_k0_rule(grid.N) + 1


def difference_constant(grid: SliceGrid, order: int) -> float:
    """``max_m |Dsc(m, z) - P_{order-1}(m, z)| z^{2 order}`` over ``m = 0..difference_window``."""
    z = grid.z
    best = 0.0
    for m in range(difference_window(grid) + 1):
        d = pcf_scaled(m, z) - (poincare_sum(m, z, order - 1) if order > 0 else 0.0)
        best = max(best, abs(d) * z ** (2 * order))
    return best


def bound_difference_piece(grid: SliceGrid, K0: int, J: int, n: int) -> float:
    """``C z^{-2 min(n, J)}`` with ``C`` from :func:`difference_constant`.

    ``K0`` is accepted for a uniform signature; the inspected window depends
    on the grid only, so the piece does not grow with ``K0``.
    """
    if min(n, J) < 0:
        raise ValueError("need n, J >= 0")
    if not math.isfinite(grid.z):
        raise DomainError("remainder bounds need a > 0")
    o = min(n, J)
    return difference_constant(grid, o) * grid.z ** (-2 * o)


def remainder_budget(grid: SliceGrid, K0: int, J: int, n: int, k_prev: int = 0, k_next: int = 0) -> RemainderBudget:
    return RemainderBudget(bound_poincare_piece(grid, K0, J, k_prev, k_next),
                           bound_tail_piece(grid, K0, n, k_prev, k_next),
                           bound_difference_piece(grid, K0, J, n),
                           grid.N, K0, J, n)


def certify_decay(params: ModelParams, N_list, K0_rule=default_k0_rule, J: int = 2, n: int = 2) -> Certification:
    """Fit ``total(N) ~ N^{-1-theta}`` over ``N_list``.

    ``certified`` is ``theta > 0``; ``monotone`` reports whether the totals
    fall with ``N``.
    """
    N_list = list(N_list)
    if len(N_list) < 3:
        raise ValueError("need at least three N values")
    budgets = []
    for N in N_list:
        g = build_grid(params, N)
        budgets.append(remainder_budget(g, K0_rule(N), J, n))
    totals = np.array([b.total for b in budgets])
    slope = np.polyfit(np.log(N_list), np.log(totals), 1)[0]
    theta = float(-slope - 1.0)
    for b in budgets:
        b.theta_fit = theta
    monotone = bool(np.all(np.diff(totals) <= 0))
    return Certification(budgets, theta, monotone, theta > 0, N_list)
