"""Time-sliced partition function: model parameters, slice grid, the exact
truncated multi-index sum for small N and the single-index sum bookkeeping.

With ``eps = b Delta^2 / c`` the N-slice integral reads

    Z_N = [2 pi (1 + eps)]^{-(N-1)/2} [2 pi (1/2 + eps)]^{-1/2}
          * sum_{k_1..k_{N-1}} prod_{i=1}^{N} xi_i^{2 k_i} / (2 k_i)!
            * Gamma(k_{i-1} + k_i + 1/2) * Dsc(k_{i-1} + k_i, z_i)

with ``k_0 = k_N = 0``.  Every factor is positive, so the sum is accumulated
as log-sum-exp transfer products.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .errors import ConvergenceError, DomainError
from .specfun import log_pcf_scaled

_LN_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class ModelParams:
    """Constants of the action ``c/2 phi'^2 + b phi^2 + a phi^4`` on ``[0, beta]``.

    ``a = 0`` is admitted as the harmonic limit; quantities that need the
    quartic scale (``z``) reject it where used.
    """

    a: float
    b: float
    c: float
    beta: float

    def __post_init__(self):
        for name in ("a", "b", "c", "beta"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or not math.isfinite(v):
                raise DomainError(f"{name} must be a finite real number, got {v!r}")
        if self.a < 0:
            raise DomainError(f"quartic coupling a must be >= 0, got {self.a}")
        if self.c <= 0:
            raise DomainError(f"kinetic coefficient c must be > 0, got {self.c}")
        if self.beta <= 0:
            raise DomainError(f"time horizon beta must be > 0, got {self.beta}")

    def replace(self, **kw) -> "ModelParams":
        d = dict(a=self.a, b=self.b, c=self.c, beta=self.beta)
        d.update(kw)
        return ModelParams(**d)


@dataclass(frozen=True)
class SliceGrid:
    """Discretisation constants for N slices of width ``delta = beta / N``.

    ``z`` and ``z_last`` are ``inf`` when ``a = 0``.
    """

    params: ModelParams
    N: int
    delta: float
    eps: float
    xi: float
    xi_last: float
    z: float
    z_last: float
    omega0: float
    A: float
    B: float

    def z_at(self, i: int) -> float:
        """Argument of the i-th slice factor (1-based)."""
        if not 1 <= i <= self.N:
            raise IndexError(i)
        return self.z_last if i == self.N else self.z

    def xi_at(self, i: int) -> float:
        """Weight ``xi_i`` of index ``k_i``; ``xi_N`` multiplies ``k_N = 0`` and is 1."""
        if not 1 <= i <= self.N:
            raise IndexError(i)
        if i == self.N:
            return 1.0
        return self.xi_last if i == self.N - 1 else self.xi


def build_grid(params: ModelParams, N: int) -> SliceGrid:
    """Slice constants for ``params`` at ``N`` slices.

    Raises
    ------
    DomainError
        ``1 + eps <= 0`` or ``1/2 + eps <= 0`` (slices too coarse for this
        negative ``b``).
    """
    if not isinstance(N, (int, np.integer)) or N < 1:
        raise DomainError(f"N must be a positive integer, got {N!r}")
    N = int(N)
    delta = params.beta / N
    eps = params.b * delta * delta / params.c
    if 1.0 + eps <= 0.0:
        raise DomainError(f"1 + b*Delta^2/c = {1.0 + eps} is not positive")
    if 0.5 + eps <= 0.0:
        raise DomainError(f"1/2 + b*Delta^2/c = {0.5 + eps} is not positive")
    xi = 1.0 / (1.0 + eps)
    xi_last = (1.0 + eps) ** -0.5 * (0.5 + eps) ** -0.5
    if params.a > 0:
        s = math.sqrt(2.0 * params.a * delta ** 3)
        z = params.c * (1.0 + eps) / s
        z_last = params.c * (0.5 + eps) / s
    else:
        z = z_last = math.inf
    A = 1.0 / (2.0 * (1.0 + eps))
    B = eps / (2.0 * (1.0 + eps))
    omega0 = (0.5 + eps) / (1.0 + eps)
    if abs(omega0 - (0.5 + B)) > 1e-14 * max(1.0, abs(omega0)):
        raise ArithmeticError("omega0 != 1/2 + B")
    return SliceGrid(params, N, delta, eps, xi, xi_last, z, z_last, omega0, A, B)


# ---------------------------------------------------------------------------
# exact multi-index sum

def _log_gd(m_max: int, z: float) -> np.ndarray:
    """log[Gamma(m + 1/2) Dsc(m, z)] for m = 0..m_max."""
    return np.array([math.lgamma(m + 0.5) + log_pcf_scaled(m, z) for m in range(m_max + 1)])


def _log_weight(K0: int, xi: float) -> np.ndarray:
    k = np.arange(K0 + 1)
    return 2.0 * k * math.log(xi) - np.array([math.lgamma(2 * kk + 1) for kk in k])


def zn_multisum(grid: SliceGrid, K0: int, direction: str = "forward") -> float:
    """Exact N-slice sum with every index truncated at ``K0``.

    Parameters
    ----------
    grid : SliceGrid
        ``grid.N <= 5``.
    K0 : int
        Largest retained value of each ``k_i``.
    direction : {"forward", "backward"}
        Order in which the index sums are contracted.  Both give the same
        value up to rounding; the choice exists to test that.
    """
    N = grid.N
    if N > 5:
        raise DomainError(f"multi-index sum restricted to N <= 5 (cost (K0+1)^(N-1)); got N={N}")
    if K0 < 0:
        raise ValueError("K0 must be >= 0")
    if not math.isfinite(grid.z):
        raise DomainError("multi-index sum needs a > 0")
    log_pref = -0.5 * (N - 1) * (_LN_2PI + math.log1p(grid.eps)) \
        - 0.5 * (_LN_2PI + math.log(0.5 + grid.eps))
    if N == 1:
        return math.exp(log_pref + _log_gd(0, grid.z_last)[0])

    lgd = {z: _log_gd(2 * K0, z) for z in {grid.z, grid.z_last}}
    idx = np.arange(K0 + 1)
    pair = idx[:, None] + idx[None, :]

    # bond i couples k_{i-1} and k_i through Gamma * Dsc at argument z_i
    def bond(i):
        return lgd[grid.z_at(i)][pair]

    site = {i: _log_weight(K0, grid.xi_at(i)) for i in range(1, N)}

    if direction == "forward":
        v = lgd[grid.z_at(1)][idx] + site[1]
        for i in range(2, N):
            v = logsumexp(v[:, None] + bond(i), axis=0) + site[i]
        total = logsumexp(v + lgd[grid.z_at(N)][idx])
    elif direction == "backward":
        v = lgd[grid.z_at(N)][idx] + site[N - 1]
        for i in range(N - 1, 1, -1):
            v = logsumexp(bond(i) + v[None, :], axis=1) + site[i - 1]
        total = logsumexp(v + lgd[grid.z_at(1)][idx])
    else:
        raise ValueError("direction must be 'forward' or 'backward'")
    return math.exp(log_pref + total)


# ---------------------------------------------------------------------------
# single-index series

def log_single_term(k: int, k_prev: int, k_next: int, xi: float, z: float) -> float:
    """log of ``xi^{2k}/(2k)! Gamma(k_prev+k+1/2) Dsc(k_prev+k, z) Gamma(k+k_next+1/2) Dsc(k+k_next, z)``."""
    return (2 * k * math.log(xi) - math.lgamma(2 * k + 1)
            + math.lgamma(k_prev + k + 0.5) + log_pcf_scaled(k_prev + k, z)
            + math.lgamma(k + k_next + 0.5) + log_pcf_scaled(k + k_next, z))


def term_log_asymptotics(k: int, k_prev: int, k_next: int, xi: float, z: float) -> float:
    """Large-``k`` approximation of :func:`log_single_term`.

    ``-(k - (k_prev + k_next - 1)/2) ln k + 2k (ln(xi z) - ln 2 + 1/2)
    - 2 sqrt(k) z + (k_prev + k_next + 1) ln z + ln(pi)/2 + z^2/2``.

    The ``z^2/2`` term is the pair of ``exp(z^2/4)`` factors that the scaled
    cylinder function carries, so the result approximates the log of the term
    in scaled form.  The approximation is for ``k -> inf`` at fixed ``z``
    (it needs ``sqrt(k) >> z``).
    """
    if k < 2:
        raise ValueError("asymptotic form needs k >= 2")
    lk = math.log(k)
    return (-(k - (k_prev + k_next - 1) / 2.0) * lk
            + 2.0 * k * (math.log(xi * z) - math.log(2.0) + 0.5)
            - 2.0 * math.sqrt(k) * z
            + (k_prev + k_next + 1) * math.log(z)
            + 0.5 * math.log(math.pi) + 0.5 * z * z)


def single_sum_parts(grid: SliceGrid, K0: int, k_prev: int = 0, k_next: int = 0,
                     rel_floor: float = 1e-18, max_terms: int = 200000):
    """Log-terms of the single-index series split at ``K0``.

    Returns ``(log_head_terms, log_tail_terms)`` as arrays; the tail runs until
    a term falls below ``rel_floor`` times the head sum while decreasing.
    """
    xi, z = grid.xi, grid.z
    head = np.array([log_single_term(k, k_prev, k_next, xi, z) for k in range(K0 + 1)])
    log_head = logsumexp(head)
    tail = []
    k = K0 + 1
    prev = head[-1]
    floor = log_head + math.log(rel_floor)
    while True:
        t = log_single_term(k, k_prev, k_next, xi, z)
        tail.append(t)
        if t < floor and t < prev:
            break
        prev = t
        k += 1
        if k - K0 > max_terms:
            raise ConvergenceError("single-index series tail did not fall below the floor")
    return head, np.array(tail)


def principal_sum_epsilon(grid: SliceGrid, K0: int, k_prev: int = 0, k_next: int = 0) -> float:
    """Relative tail ``eps(K0) = (sum_{k > K0}) / (sum_{k <= K0})`` of the single-index series."""
    if K0 < 1:
        raise ValueError("K0 must be >= 1")
    head, tail = single_sum_parts(grid, K0, k_prev, k_next)
    return math.exp(logsumexp(tail) - logsumexp(head))


def max_principal_epsilon(grid: SliceGrid, K0: int) -> float:
    """Largest :func:`principal_sum_epsilon` over neighbour indices in ``0..K0``."""
    return max(principal_sum_epsilon(grid, K0, kp, kn)
               for kp in range(K0 + 1) for kn in range(kp, K0 + 1))
