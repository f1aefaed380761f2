"""Special functions: Pochhammer symbols, parabolic cylinder functions,
the Poincare expansion of the scaled cylinder function with its remainder
bound, a 1F2 series and a few asymptotic helpers.

Parabolic cylinder values come from mpmath at 30 significant digits.  The
scaled function

    Dsc(m, z) = z**(m + 1/2) * exp(z**2 / 4) * D_{-m-1/2}(z)

is evaluated through Tricomi's confluent function,

    Dsc(m, z) = (z / sqrt 2)**(m + 1/2) * U((m + 1/2) / 2, 1/2, z**2 / 2),

so the Gaussian factor exp(z**2/4) cancels analytically and is never formed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction

import mpmath as mp

from .errors import DomainError, PCFRangeError

#: working precision (decimal digits) for all mpmath evaluations
WORK_DPS = 30

_LOG_DBL_MAX = math.log(1.7976931348623157e308)
_LOG_DBL_MIN_NORMAL = math.log(2.2250738585072014e-308)


def _check_real(*values):
    for v in values:
        if isinstance(v, float) and math.isnan(v):
            raise ValueError("NaN input rejected")


# ---------------------------------------------------------------------------
# Pochhammer symbol

def log_pochhammer(x, n: int):
    """Return ``(log|(x)_n|, sign)`` of the rising factorial.

    A zero product is reported as ``(-inf, 0)``.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return 0.0, 1
    x = float(x)
    _check_real(x)
    if x <= 0 and x == math.floor(x):
        # non-positive integer start: product hits zero if the range crosses 0
        if x + n - 1 >= 0:
            return -math.inf, 0
        # all factors negative integers: |(x)_n| = (-x)! / (-x-n)!
        k = int(-x)
        return math.lgamma(k + 1) - math.lgamma(k - n + 1), (-1) ** n
    sign = 1
    # negative factors are those x + j < 0, j = 0..n-1
    if x < 0:
        n_neg = min(n, int(math.ceil(-x)))
        if n_neg % 2:
            sign = -1
    return _lgamma_abs(x + n) - _lgamma_abs(x), sign


def _lgamma_abs(x: float) -> float:
    return math.lgamma(x)


def pochhammer(x, n: int):
    """Rising factorial ``x (x+1) ... (x+n-1)``.

    Exact for ``int`` or ``Fraction`` input.  For floats a direct product is
    used for short ranges and a log-gamma difference otherwise; a result
    beyond double range comes back as ``inf`` with the correct sign.

    Examples
    --------
    >>> pochhammer(3, 4)
    360
    >>> pochhammer(Fraction(1, 2), 2)
    Fraction(3, 4)
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if isinstance(x, (int, Fraction)):
        out = Fraction(1) if isinstance(x, Fraction) else 1
        for j in range(n):
            out *= x + j
        return out
    x = float(x)
    _check_real(x)
    if n <= 32:
        out = 1.0
        for j in range(n):
            out *= x + j
        if math.isfinite(out):
            return out
    la, s = log_pochhammer(x, n)
    if s == 0:
        return 0.0
    if la > _LOG_DBL_MAX:
        return math.copysign(math.inf, s)
    return s * math.exp(la)


# ---------------------------------------------------------------------------
# Parabolic cylinder functions

def _mp_pcfd(nu, z):
    with mp.workdps(WORK_DPS):
        return mp.pcfd(mp.mpf(nu), mp.mpf(z))


def pcf_d_log(nu: float, z: float):
    """``(log|D_nu(z)|, sign)``, usable where the value leaves double range."""
    _check_real(nu, z)
    with mp.workdps(WORK_DPS):
        v = _mp_pcfd(nu, z)
        if v == 0:
            return -math.inf, 0
        return float(mp.log(abs(v))), (1 if v > 0 else -1)


def pcf_d(nu: float, z: float) -> float:
    """Parabolic cylinder function D_nu(z) for real order and argument.

    Raises
    ------
    ValueError
        NaN input.
    PCFRangeError
        Exact value overflows a double or falls below the normal range.
        The exception carries ``log_abs`` and ``sign`` of the true value.
    """
    _check_real(nu, z)
    with mp.workdps(WORK_DPS):
        v = _mp_pcfd(nu, z)
        if v == 0:
            return 0.0
        la = float(mp.log(abs(v)))
        s = 1 if v > 0 else -1
    if la > _LOG_DBL_MAX:
        raise PCFRangeError(la, s, f"D_{nu}({z}) overflows: exp({la:.6g})")
    if la < _LOG_DBL_MIN_NORMAL:
        raise PCFRangeError(la, s, f"D_{nu}({z}) underflows: exp({la:.6g})")
    return float(v)


def pcf_scaled_mp(m, z, dps: int = WORK_DPS):
    """Scaled cylinder function as an mpmath number at ``dps`` digits."""
    with mp.workdps(dps):
        m = mp.mpf(m)
        z = mp.mpf(z)
        return (z / mp.sqrt(2)) ** (m + 0.5) * mp.hyperu((m + 0.5) / 2, 0.5, z * z / 2)


def _log_pcf_scaled_quad(mm, zz):
    """``log Dsc`` from ``Dsc = z^nu / Gamma(nu) int_0^inf s^(nu-1) exp(-s^2/2 - z s) ds``, ``nu = m + 1/2``.

    The integrand peaks at ``s* = (sqrt(z^2 + 4(nu-1)) - z) / 2``, which is
    used to split the range.  Serves orders where ``hyperu`` gives up.
    """
    nu = mm + mp.mpf(0.5)
    # below nu = 1 the integrand decreases monotonically; any positive split point serves
    s_star = (mp.sqrt(zz * zz + 4 * (nu - 1)) - zz) / 2 if nu > 1 else mp.mpf(1)
    peak = (nu - 1) * mp.log(s_star) - s_star * s_star / 2 - zz * s_star
    f = lambda s: mp.exp((nu - 1) * mp.log(s) - s * s / 2 - zz * s - peak) if s > 0 else mp.mpf(0)
    integral = mp.quad(f, [0, s_star / 2, s_star, 2 * s_star, mp.inf])
    return nu * mp.log(zz) + peak + mp.log(integral) - mp.loggamma(nu)


@lru_cache(maxsize=262144)
def _log_pcf_scaled_cached(m: float, z: float) -> float:
    with mp.workdps(WORK_DPS):
        mm = mp.mpf(m)
        zz = mp.mpf(z)
        try:
            u = mp.hyperu((mm + 0.5) / 2, 0.5, zz * zz / 2)
        except (ValueError, mp.libmp.NoConvergence):
            return float(_log_pcf_scaled_quad(mm, zz))
        return float((mm + 0.5) * mp.log(zz / mp.sqrt(2)) + mp.log(u))


def log_pcf_scaled(m: float, z: float) -> float:
    """Natural log of the scaled cylinder function ``Dsc(m, z)`` (always positive)."""
    _check_real(m, z)
    if not z > 0:
        raise DomainError(f"scaled cylinder function needs z > 0, got {z}")
    if m < 0:
        raise DomainError(f"order parameter m must be >= 0, got {m}")
    return _log_pcf_scaled_cached(float(m), float(z))


def pcf_scaled(m: float, z: float) -> float:
    """``z**(m+1/2) exp(z**2/4) D_{-m-1/2}(z)`` for ``m >= 0``, ``z > 0``.

    Tends to 1 as ``z`` grows at fixed ``m``; decreases in ``m`` at fixed ``z``.
    """
    return math.exp(log_pcf_scaled(m, z))


# ---------------------------------------------------------------------------
# Hypergeometric helpers

def hyp1f2(a1: float, b1: float, b2: float, x: float) -> float:
    """Generalised hypergeometric series 1F2(a1; b1, b2; x).

    The series is entire; it is summed in extended precision (digits grow with
    sqrt|x| to absorb the cancellation for negative ``x``) until the next term
    is below 1e-14 of the partial sum.
    """
    _check_real(a1, b1, b2, x)
    for b in (b1, b2):
        if b <= 0 and b == math.floor(b):
            raise DomainError(f"lower parameter {b} is a pole of the series")
    if x == 0:
        return 1.0
    dps = 25 + int(0.9 * math.sqrt(abs(x)))
    with mp.workdps(dps):
        a1m, b1m, b2m, xm = mp.mpf(a1), mp.mpf(b1), mp.mpf(b2), mp.mpf(x)
        term = mp.mpf(1)
        total = mp.mpf(1)
        k = 0
        small_run = 0
        while True:
            term *= (a1m + k) * xm / ((b1m + k) * (b2m + k) * (k + 1))
            total += term
            k += 1
            if term == 0:
                break
            # require two consecutive negligible terms once past the peak
            if abs(term) < mp.mpf(10) ** -16 * abs(total) and k > abs(x) ** 0.5:
                small_run += 1
                if small_run >= 2:
                    break
            else:
                small_run = 0
            if k > 100000:
                raise ArithmeticError("1F2 series failed to settle")
        return float(total)


def _hyp2f1(a, b, c, x):
    with mp.workdps(WORK_DPS):
        return mp.hyp2f1(a, b, c, x)


# ---------------------------------------------------------------------------
# Poincare expansion with remainder bound

@dataclass(frozen=True)
class PoincareResult:
    """Truncated asymptotic sum of the scaled cylinder function.

    Attributes
    ----------
    value : float
        Sum of the terms j = 0..order_used.
    bound : float
        Upper bound on ``|Dsc - value|``; ``inf`` outside ``2 sqrt(m) <= z``.
    order_used : int
    """

    value: float
    bound: float
    order_used: int


def poincare_term(m: float, z: float, j: int) -> float:
    """Term ``(-1)^j (m+1/2)_{2j} / (j! (2 z^2)^j)`` of the expansion."""
    la, s = log_pochhammer(m + 0.5, 2 * j)
    if s == 0:
        return 0.0
    lt = la - math.lgamma(j + 1) - j * math.log(2 * z * z)
    return (-1) ** j * s * math.exp(lt)


def poincare_sum(m: float, z: float, J: int) -> float:
    """Partial sum over j = 0..J; ``J = -1`` gives the empty sum 0."""
    return math.fsum(poincare_term(m, z, j) for j in range(J + 1))


def temme_remainder_bound(m: float, z: float, J: int) -> float:
    """Remainder bound for the expansion truncated after the term ``j = J``.

    Uses Gauss hypergeometric factors 2F1(J/2, 1/2; J/2 + 1; x) and
    2F1(1/2, 1/2; 3/2; x) with ``x = 1 - m^2/z^2``.  Returns ``inf`` when
    ``2 sqrt(m) > z``.
    """
    if J < 1:
        raise ValueError("remainder bound needs J >= 1")
    if not z > 0 or m < 0:
        raise DomainError("bound needs m >= 0 and z > 0")
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
        b = (2 * z2 / den) * mp.rf(mm + 0.5, 2 * J) / (mp.factorial(J - 1) * (2 * z2) ** J) \
            * f1 * mp.exp(4 * theta / den * f2)
        return float(b)


def poincare_expand(m: float, z: float, J: int) -> PoincareResult:
    """Truncated Poincare expansion of ``Dsc(m, z)`` with its remainder bound.

    Parameters
    ----------
    m : float
        Order parameter, ``m >= 0``.
    z : float
        Argument, ``z > 0``.
    J : int
        Last retained term index, ``J >= 1``.
    """
    _check_real(m, z)
    if J < 1:
        raise ValueError("J must be >= 1 (the remainder bound is undefined for J = 0)")
    if not z > 0:
        raise DomainError("z must be positive")
    if m < 0:
        raise DomainError("m must be non-negative")
    return PoincareResult(poincare_sum(m, z, J), temme_remainder_bound(m, z, J), J)


# ---------------------------------------------------------------------------
# Shift summation identity

def shift_identity_check(nu: float, x: float, t: float, terms: int):
    """Both sides of the order-shift summation identity.

    lhs = exp(x^2/4) * sum_{k < terms} (nu)_k / k! * t^k * D_{-nu-k}(x)
    rhs = exp((x-t)^2/4) * D_{-nu}(x - t)

    Returns
    -------
    (float, float)
    """
    _check_real(nu, x, t)
    if terms < 1:
        raise ValueError("need at least one term")
    with mp.workdps(WORK_DPS):
        nu_m, x_m, t_m = mp.mpf(nu), mp.mpf(x), mp.mpf(t)
        coef = mp.mpf(1)
        acc = mp.mpf(0)
        for k in range(terms):
            acc += coef * mp.pcfd(-nu_m - k, x_m)
            coef *= (nu_m + k) * t_m / (k + 1)
        lhs = mp.exp(x_m * x_m / 4) * acc
        rhs = mp.exp((x_m - t_m) ** 2 / 4) * mp.pcfd(-nu_m, x_m - t_m)
        return float(lhs), float(rhs)


# ---------------------------------------------------------------------------
# Uniform (large order and argument) exponent and large-order asymptotics

def temme_exponent(a: float, z: float):
    """Exponent data of the uniform expansion of ``Dsc(a, z)``.

    Returns ``(lam, w0, A)`` with ``lam = a/z^2``,
    ``w0 = (sqrt(1 + 4 lam) - 1)/2`` and
    ``A = w0^2/2 + w0 - lam - lam ln w0 + lam ln lam``; at ``lam = 0`` the
    logarithmic terms take their limit 0.  The leading magnitude is
    ``exp(-A z^2) (1 + 4 lam)^(-1/4)``.
    """
    _check_real(a, z)
    if not z > 0:
        raise DomainError("z must be positive")
    if a < 0:
        raise DomainError("a must be non-negative")
    lam = a / (z * z)
    if lam == 0.0:
        return 0.0, 0.0, 0.0
    w0 = 2.0 * lam / (1.0 + math.sqrt(1.0 + 4.0 * lam))
    big_a = 0.5 * w0 * w0 + w0 - lam - lam * math.log(w0 / lam)
    return lam, w0, big_a


def temme_leading_magnitude(a: float, z: float) -> float:
    """``exp(-A z^2) (1 + 4 lam)^(-1/4)`` from :func:`temme_exponent`."""
    lam, _, big_a = temme_exponent(a, z)
    return math.exp(-big_a * z * z) * (1.0 + 4.0 * lam) ** -0.25


def large_order_log_asymptotic(nu: float, z: float) -> float:
    """Log of :func:`large_order_asymptotic`."""
    _check_real(nu, z)
    if not nu < 0:
        raise DomainError("large-order form needs nu < 0")
    if not abs(z) < math.sqrt(-nu):
        raise DomainError("large-order form needs |z| < sqrt(-nu)")
    return -0.5 * math.log(2.0) + 0.5 * nu * (math.log(-nu) - 1.0) - math.sqrt(-nu) * z


def large_order_asymptotic(nu: float, z: float) -> float:
    """Leading large-order behaviour of D_nu(z) for ``nu -> -inf``.

    ``D_nu(z) ~ 2^{-1/2} exp[(nu/2)(ln(-nu) - 1) - sqrt(-nu) z]``, without
    correction factors.
    """
    la = large_order_log_asymptotic(nu, z)
    if la > _LOG_DBL_MAX:
        raise PCFRangeError(la, 1)
    return math.exp(la)
