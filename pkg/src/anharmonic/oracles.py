"""Independent reference computations.

Nothing here uses the parabolic-cylinder series or the recurrences.  The
references are direct quadrature, Gaussian determinants and covariances of
the tridiagonal quadratic form, and importance-sampled Monte Carlo.

The tridiagonal form: with ``eps = b Delta^2 / c`` the Gaussian part of the
N-slice exponent is ``(c / (2 Delta)) phi^T T phi`` where ``T`` has diagonal
``2 (1 + eps)`` (last entry ``1 + 2 eps``) and off-diagonal ``-1``.  The
covariance of ``phi`` is ``(Delta / c) T^{-1}``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DomainError, NotPositiveDefiniteError
from .slicing import ModelParams
from .specfun import WORK_DPS

import mpmath as mp


@dataclass(frozen=True)
class OracleResult:
    value: float
    error_estimate: float
    cost: int


# ---------------------------------------------------------------------------
# one-dimensional quartic integral

def _i1_quad(A, B, C, x_star, limit):
    f = lambda x: A * x ** 4 + B * x * x + C * x
    # locate the global minimum of the exponent (at most three stationary points)
    roots = np.roots([4 * A, 0.0, 2 * B, C])
    real = [r.real for r in roots if abs(r.imag) < 1e-9 * (1 + abs(r))]
    x_min = min(real, key=f)
    f_min = f(x_min)
    g = lambda x: math.exp(-(f(x) - f_min))
    pts = sorted(set(r for r in real if -x_star < r < x_star))
    val, err, info = integrate.quad(g, -x_star, x_star, points=pts or None, limit=limit,
                                    epsabs=0.0, epsrel=1e-13, full_output=True)[:3]
    return val, err, info["neval"], f_min


def _i1_cutoff(A, B, C, rel=1e-18):
    """|x| beyond which exp(-(f - f_min)) < rel, by bracketing the quartic."""
    f = lambda x: A * x ** 4 + B * x * x + C * x
    roots = np.roots([4 * A, 0.0, 2 * B, C])
    real = [r.real for r in roots if abs(r.imag) < 1e-9 * (1 + abs(r))]
    f_min = min(f(r) for r in real)
    target = f_min - math.log(rel)
    x = 1.0 + max(abs(r) for r in real)
    while min(f(x), f(-x)) < target:
        x *= 1.5
    return x


def integrate_i1(A: float, B: float, C: float) -> OracleResult:
    """Adaptive quadrature of ``int exp(-(A x^4 + B x^2 + C x)) dx`` over the real line.

    The domain is cut where the integrand drops below 1e-18 of its peak.  The
    error estimate is the larger of the quadrature estimate and the change on
    doubling both the domain and the subdivision limit.
    """
    if not A > 0:
        raise DomainError("A must be positive")
    x_star = _i1_cutoff(A, B, C)
    v1, e1, n1, f_min = _i1_quad(A, B, C, x_star, 200)
    v2, e2, n2, _ = _i1_quad(A, B, C, 2 * x_star, 400)
    scale = math.exp(-f_min)
    err = max(e1, e2, abs(v2 - v1)) * scale
    return OracleResult(v2 * scale, err, n1 + n2)


def i1_series(A: float, B: float, C: float, M: int) -> float:
    """Parabolic-cylinder series for the 1-D quartic integral, terms m = 0..M.

    ``I = exp(z^2/4) sqrt(pi) (2A)^{-1/4} sum_m xi^m / m! D_{-m-1/2}(z)`` with
    ``z = B / sqrt(2A)`` and ``xi = C^2 / (4 sqrt(2A))``.  The product
    ``exp(z^2/4) D`` is formed in extended precision, so negative ``B`` is fine.
    """
    if not A > 0:
        raise DomainError("A must be positive")
    if M < 1:
        raise ValueError("M must be >= 1")
    with mp.workdps(WORK_DPS):
        Am, Bm, Cm = mp.mpf(A), mp.mpf(B), mp.mpf(C)
        s2a = mp.sqrt(2 * Am)
        z = Bm / s2a
        xi = Cm * Cm / (4 * s2a)
        ez = mp.exp(z * z / 4)
        total = mp.mpf(0)
        coef = mp.mpf(1)
        for m in range(M + 1):
            total += coef * mp.pcfd(-m - mp.mpf(0.5), z)
            coef *= xi / (m + 1)
        return float(ez * mp.sqrt(mp.pi) * (2 * Am) ** mp.mpf(-0.25) * total)


# ---------------------------------------------------------------------------
# tridiagonal form helpers

def _diag(params: ModelParams, N: int):
    delta = params.beta / N
    eps = params.b * delta * delta / params.c
    d = np.full(N, 2.0 * (1.0 + eps))
    d[-1] = 1.0 + 2.0 * eps
    return d, delta, eps


def _pivots(d):
    """Forward pivots r_i = d_i - 1/r_{i-1} (ratios of leading minors)."""
    r = np.empty_like(d)
    prev = None
    for i, di in enumerate(d):
        r[i] = di if prev is None else di - 1.0 / prev
        if not r[i] > 0:
            raise NotPositiveDefiniteError(i + 1, float(r[i]))
        prev = r[i]
    return r


def _inverse_diagonal(d):
    """Diagonal of the inverse of tridiag(-1, d, -1) from two pivot sweeps."""
    n = len(d)
    fwd = _pivots(d)
    bwd = np.empty_like(d)
    prev = None
    for i in range(n - 1, -1, -1):
        bwd[i] = d[i] if prev is None else d[i] - 1.0 / prev
        prev = bwd[i]
    # (T^{-1})_{ii} = 1 / (fwd_i + bwd_i - d_i)
    return 1.0 / (fwd + bwd - d)


def zn_gaussian(params: ModelParams, N: int) -> float:
    """Exact harmonic (``a = 0``) N-slice value ``det(T)^{-1/2}``.

    Raises
    ------
    NotPositiveDefiniteError
        With the index of the first non-positive pivot.
    """
    if params.a != 0:
        raise DomainError("Gaussian oracle needs a = 0")
    if N < 1:
        raise ValueError("N must be >= 1")
    d, _, _ = _diag(params, N)
    r = _pivots(d)
    return math.exp(-0.5 * float(np.sum(np.log(r))))


def phi_variances(params: ModelParams, N: int) -> np.ndarray:
    """Variances ``Var(phi_i)``, i = 1..N, of the harmonic slice measure."""
    d, delta, _ = _diag(params, N)
    return (delta / params.c) * _inverse_diagonal(d)


def coupling_derivative(params: ModelParams, N: int) -> float:
    """``-d ln Z_N / da`` at ``a = 0``: ``Delta sum_i 3 Var(phi_i)^2``."""
    if params.a != 0:
        raise DomainError("coupling derivative is taken at a = 0")
    var = phi_variances(params, N)
    return (params.beta / N) * 3.0 * float(np.sum(var * var))


def bridge_coupling_derivative(params: ModelParams, N: int) -> float:
    """Same as :func:`coupling_derivative` with both path ends clamped to 0.

    Interior slices ``phi_1..phi_{N-1}`` carry the full diagonal
    ``2 (1 + eps)``; ``phi_N = 0`` is not integrated.
    """
    if params.a != 0:
        raise DomainError("coupling derivative is taken at a = 0")
    if N < 2:
        raise ValueError("a bridge needs N >= 2")
    delta = params.beta / N
    eps = params.b * delta * delta / params.c
    d = np.full(N - 1, 2.0 * (1.0 + eps))
    var = (delta / params.c) * _inverse_diagonal(d)
    return delta * 3.0 * float(np.sum(var * var))


def richardson(values, hs, orders):
    """Richardson table eliminating error terms ``h**p`` for ``p`` in ``orders``.

    ``values[i]`` is the estimate at step ``hs[i]``; returns the extrapolated
    value and the change contributed by the last elimination.
    """
    vals = [float(v) for v in values]
    hs = [float(h) for h in hs]
    last_change = math.inf
    for p in orders:
        new = []
        for i in range(len(vals) - 1):
            ratio = (hs[i] / hs[i + 1]) ** p
            new.append((ratio * vals[i + 1] - vals[i]) / (ratio - 1.0))
        last_change = abs(new[-1] - vals[-1])
        vals = new
        hs = hs[1:]
    return vals[-1], last_change


def extrapolate_in_n(fn, N_list, orders=(1, 2)):
    """Richardson-extrapolate ``fn(N)`` to ``N -> inf`` in powers of ``1/N``."""
    vals = [fn(N) for N in N_list]
    return richardson(vals, [1.0 / N for N in N_list], orders)


# ---------------------------------------------------------------------------
# Gaussian moment references for the continuum expansion coefficients

def continuum_green(params: ModelParams, tau: float, x, y):
    """``c G(x, y)`` of the continuum harmonic measure on ``[0, tau]``.

    ``x``, ``y`` are distances from the pinned end (phi(0) = 0); the far end
    is free.  ``cG = sinh(g min) cosh(g (tau - max)) / (g cosh(g tau))``, with
    the circular continuation for ``b < 0`` and ``min`` at ``b = 0``.
    """
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    lo = np.minimum(x, y)
    hi = np.maximum(x, y)
    b, c = params.b, params.c
    if b == 0:
        return lo
    if b > 0:
        g = math.sqrt(2 * b / c)
        return np.sinh(g * lo) * np.cosh(g * (tau - hi)) / (g * math.cosh(g * tau))
    g = math.sqrt(-2 * b / c)
    return np.sin(g * lo) * np.cos(g * (tau - hi)) / (g * math.cos(g * tau))


def gaussian_c_term(params: ModelParams, tau: float, mu: int) -> float:
    """Continuum coefficient ``C_mu(tau)`` of the expansion of S from Gaussian moments.

    ``C_mu = lim Delta^{3mu} <(sum_i u_i^4)^mu>`` with ``u`` the rescaled
    slice variables; in the continuum ``C_1 = 3 int (cG)^2`` and
    ``C_2 = int int [9 G_xx^2 G_yy^2 + 72 G_xx G_yy G_xy^2 + 24 G_xy^4]``
    (all ``G`` meaning ``cG``).  Only ``mu`` in {1, 2}.
    """
    if tau == 0:
        return 0.0
    g = lambda x, y: continuum_green(params, tau, x, y)
    if mu == 1:
        v, _ = integrate.quad(lambda x: 3.0 * float(g(x, x)) ** 2, 0.0, tau,
                              epsabs=0.0, epsrel=1e-13, limit=200)
        return v
    if mu == 2:
        def f(y, x):
            gxx, gyy, gxy = float(g(x, x)), float(g(y, y)), float(g(x, y))
            return 9 * gxx * gxx * gyy * gyy + 72 * gxx * gyy * gxy * gxy + 24 * gxy ** 4
        # split along the diagonal where min/max has a kink
        v1, _ = integrate.dblquad(f, 0.0, tau, lambda x: 0.0, lambda x: x, epsabs=0.0, epsrel=1e-12)
        v2, _ = integrate.dblquad(f, 0.0, tau, lambda x: x, lambda x: tau, epsabs=0.0, epsrel=1e-12)
        return v1 + v2
    raise ValueError("Gaussian moment reference implemented for mu = 1, 2")


# ---------------------------------------------------------------------------
# brute-force slice integral (N <= 3)

def _slice_log_kernel(params, delta, x, y):
    """Log of exp(-Delta [c/2 ((y - x)/Delta)^2 + b y^2 + a y^4])."""
    a, b, c = params.a, params.b, params.c
    return -(0.5 * c * (y - x) ** 2 / delta + delta * (b * y * y + a * y ** 4))


def _bruteforce_domain(params: ModelParams, N: int) -> float:
    delta = params.beta / N
    # Gaussian marginal width when the harmonic form is positive definite
    width = 0.0
    try:
        d, _, _ = _diag(params, N)
        width = math.sqrt(float(np.max((delta / params.c) * _inverse_diagonal(d))))
    except NotPositiveDefiniteError:
        width = 0.0
    gauss_cut = 9.5 * width
    # quartic confinement: single-site exponent a Delta x^4 + min(b,0) Delta x^2 >= 45
    a = params.a
    quartic_cut = 0.0
    if a > 0:
        bb = min(params.b, 0.0) * delta
        # solve a Delta x^4 + bb x^2 = 45 for x^2
        aa = a * delta
        x2 = (-bb + math.sqrt(bb * bb + 4 * aa * 45.0)) / (2 * aa)
        quartic_cut = math.sqrt(x2)
    if gauss_cut > 0 and quartic_cut > 0:
        return min(gauss_cut, quartic_cut) if params.b >= 0 else max(gauss_cut, quartic_cut)
    return max(gauss_cut, quartic_cut)


def _chain_integral(params, N, x_star, n_nodes):
    """Nested Gauss-Legendre integration of the slice chain on [-x*, x*]^N."""
    nodes, weights = np.polynomial.legendre.leggauss(n_nodes)
    x = nodes * x_star
    w = weights * x_star
    delta = params.beta / N
    norm = -0.5 * math.log(2 * math.pi * delta / params.c)
    # first slice couples to phi_0 = 0
    logv = _slice_log_kernel(params, delta, 0.0, x) + norm
    shift = float(np.max(logv))
    v = np.exp(logv - shift) * w
    log_scale = shift
    if N > 1:
        K = _slice_log_kernel(params, delta, x[:, None], x[None, :]) + norm
        kshift = float(np.max(K))
        Kmat = np.exp(K - kshift)
        for _ in range(N - 1):
            v = (v @ Kmat) * w
            s = float(np.max(v))
            v /= s
            log_scale += kshift + math.log(s)
    return math.exp(log_scale) * float(np.sum(v))


def zn_bruteforce(params: ModelParams, N: int, rtol: float = 1e-10) -> OracleResult:
    """Direct numerical integration of the N-slice integral, ``N <= 3``.

    The integral over each slice variable is a composite Gauss-Legendre rule
    on ``[-x*, x*]``; because the integrand is a chain of two-slice factors
    the nested integration reduces to repeated matrix-vector products.  The
    node count doubles until successive results agree to ``rtol`` and the
    domain is then doubled once as a truncation check.
    """
    if N not in (1, 2, 3):
        raise DomainError("brute-force quadrature is limited to N <= 3")
    if not params.a > 0:
        raise DomainError("brute-force oracle needs a > 0")
    if N == 1:
        delta = params.beta
        eps = params.b * delta * delta / params.c
        r = integrate_i1(params.a * delta, (params.c / delta) * (0.5 + eps), 0.0)
        f = (2 * math.pi * delta / params.c) ** -0.5
        return OracleResult(f * r.value, f * r.error_estimate, r.cost)
    x_star = _bruteforce_domain(params, N)
    n = 64
    prev = _chain_integral(params, N, x_star, n)
    cost = n ** N
    while True:
        n *= 2
        cur = _chain_integral(params, N, x_star, n)
        cost += n ** N
        if abs(cur - prev) <= rtol * abs(cur) or n >= 2048:
            break
        prev = cur
    wide = _chain_integral(params, N, 2 * x_star, 2 * n if n < 2048 else n)
    err = max(abs(cur - prev), abs(wide - cur))
    return OracleResult(cur, err, cost)


# ---------------------------------------------------------------------------
# Monte Carlo

def _mc_batch(chol_t, scale, a, delta, n, seed_seq):
    rng = np.random.Generator(np.random.Philox(seed_seq))
    z = rng.standard_normal((chol_t.shape[0], n))
    # T = L L^T; u = L^{-T} z has covariance T^{-1}
    from scipy.linalg import solve_triangular
    u = solve_triangular(chol_t.T, z, lower=False)
    phi = scale * u
    return np.exp(-a * delta * np.sum(phi ** 4, axis=0))


def zn_montecarlo(params: ModelParams, N: int, samples: int, seed: int,
                  batches: int = 32, workers: int = 1) -> OracleResult:
    """Importance-sampled N-slice value with the exact Gaussian part as proposal.

    The estimate is ``zn_gaussian(b) * mean(exp(-a Delta sum phi^4))`` with
    ``phi`` drawn from the harmonic slice measure.  Samples are split into
    ``batches`` equal batches, each with its own Philox stream spawned from
    ``seed``; the error estimate is the standard error of the batch means.
    The result does not depend on ``workers``.
    """
    if samples < 10_000:
        raise ValueError("samples must be >= 1e4")
    if params.a < 0:
        raise DomainError("a must be >= 0")
    harmonic = params.replace(a=0.0)
    z_gauss = zn_gaussian(harmonic, N)
    if params.a == 0:
        return OracleResult(z_gauss, 0.0, 0)
    d, delta, _ = _diag(params, N)
    T = np.diag(d) - np.diag(np.ones(N - 1), 1) - np.diag(np.ones(N - 1), -1)
    try:
        L = np.linalg.cholesky(T)
    except np.linalg.LinAlgError:
        _pivots(d)  # raises with the failing index
        raise
    scale = math.sqrt(delta / params.c)
    per = samples // batches
    seeds = np.random.SeedSequence(seed).spawn(batches)
    job = lambda s: float(np.mean(_mc_batch(L, scale, params.a, delta, per, s)))
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            means = list(ex.map(job, seeds))
    else:
        means = [job(s) for s in seeds]
    means = np.array(means)
    mean = float(np.mean(means))
    se = float(np.std(means, ddof=1) / math.sqrt(batches))
    return OracleResult(z_gauss * mean, z_gauss * se, per * batches)
