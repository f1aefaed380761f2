"""Leading-part machinery for the sliced integral.

Notation: ``eps = b Delta^2 / c``, ``A = 1 / (2 (1 + eps))``, the iterates
``omega_i`` of :mod:`anharmonic.contfrac` and the scaled denominators
``Q_n``.  The table entries ``(Lam)_p^{2mu}`` obey

    (1)_i^{2j}     = a_i^{2j} / omega_0^{2j}
    (Lam)_p^{2mu}  = sum_j C(mu, j) omega_{Lam-1}^{-(2mu-2j)}
                     sum_i (A^2 / (omega_{Lam-2} omega_{Lam-1}))^i
                           (Lam-1)_i^{2j} a_p^{2mu-2j+i}

with ``a_i^j = C(j, i) (1/2)_j / (1/2)_i``.  The leading part of the
N-slice integral is

    Z_N^cut = prod_{i=0}^{N-1} [2 (1 + eps) omega_i]^{-1/2}
              * sum_{mu <= J} (-1)^mu / (mu! (2 z^2)^mu) (N)_0^{2mu}.

Three numeric policies are offered: ``"standard"`` (double), ``"extended"``
(mpmath, 32 digits) and ``"exact"`` (``Fraction``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product as iproduct
from math import comb

import mpmath as mp
import numpy as np

from .contfrac import omega_sequence
from .errors import BranchPoleError, DomainError
from .slicing import ModelParams, SliceGrid

PRECISIONS = ("standard", "extended", "exact")
EXTENDED_DPS = 32


# ---------------------------------------------------------------------------
# numeric policy helpers

class _Policy:
    def __init__(self, precision: str):
        if precision not in PRECISIONS:
            raise ValueError(f"precision must be one of {PRECISIONS}")
        self.name = precision

    def cast(self, x):
        if self.name == "exact":
            return Fraction(x)
        if self.name == "extended":
            if isinstance(x, Fraction):
                return mp.mpf(x.numerator) / x.denominator
            return mp.mpf(x)
        return float(x)

    def context(self):
        if self.name == "extended":
            return mp.workdps(EXTENDED_DPS)
        return _null()

    def out(self, x):
        return x if self.name == "exact" else float(x)


class _null:
    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False


# ---------------------------------------------------------------------------
# a-coefficients

@lru_cache(maxsize=None)
def a_coeff(j: int, i: int) -> Fraction:
    """``a_i^j = C(j, i) (1/2)_j / (1/2)_i``, zero outside ``0 <= i <= j``.

    Equivalent integer form ``(2j)! 4^(i-j) / ((j-i)! (2i)!)``.
    """
    if i < 0 or i > j or j < 0:
        return Fraction(0)
    return Fraction(math.factorial(2 * j) * 4 ** i,
                    math.factorial(j - i) * math.factorial(2 * i) * 4 ** j)


@lru_cache(maxsize=None)
def a_coeff_recurrence(j: int, i: int) -> Fraction:
    """Same numbers from ``a_i^k = (k - 1/2 + i) a_i^{k-1} + a_{i-1}^{k-1}``, ``a_0^0 = 1``."""
    if i < 0 or i > j or j < 0:
        return Fraction(0)
    if j == 0:
        return Fraction(1)
    return (j - Fraction(1, 2) + i) * a_coeff_recurrence(j - 1, i) + a_coeff_recurrence(j - 1, i - 1)


# ---------------------------------------------------------------------------
# the (Lam)_p^{2mu} table

@dataclass
class LambdaTable:
    """Entries ``(Lam)_p^{2mu}`` for ``1 <= Lam <= lam_max``, ``mu <= mu_max``."""

    entries: dict
    eps: object
    lam_max: int
    mu_max: int
    precision: str
    omegas: list = field(repr=False, default_factory=list)

    def __getitem__(self, key):
        return self.entries[key]

    def final(self, mu: int, Lam: int | None = None):
        """``(Lam)_0^{2mu}``, by default at ``Lam = lam_max``."""
        return self.entries[(self.lam_max if Lam is None else Lam, mu, 0)]


def lambda_table_eps(eps, lam_max: int, mu_max: int, precision: str = "standard") -> LambdaTable:
    """Build the table for a given ``eps`` by direct recurrence.

    ``eps`` may be a float, a ``Fraction`` (for ``"exact"``) or anything the
    chosen policy can cast.
    """
    if lam_max < 1 or mu_max < 0:
        raise ValueError("need lam_max >= 1 and mu_max >= 0")
    pol = _Policy(precision)
    with pol.context():
        e = pol.cast(eps)
        one = pol.cast(1)
        half = pol.cast(Fraction(1, 2))
        if one + e <= 0 or half + e <= 0:
            raise DomainError("1 + eps and 1/2 + eps must be positive")
        A = one / (2 * (one + e))
        w = omega_sequence((half + e) / (one + e), A, max(lam_max - 1, 0))
        a2 = A * A
        acf = {}

        def ac(j, i):
            key = (j, i)
            if key not in acf:
                acf[key] = pol.cast(a_coeff(j, i))
            return acf[key]

        tab = {}
        for j in range(mu_max + 1):
            for i in range(2 * j + 1):
                tab[(1, j, i)] = ac(2 * j, i) / w[0] ** (2 * j)
        for L in range(2, lam_max + 1):
            wl1 = w[L - 1]
            r = a2 / (w[L - 2] * wl1)
            for mu in range(mu_max + 1):
                for p in range(2 * mu + 1):
                    s = pol.cast(0)
                    for j in range(mu + 1):
                        inner = pol.cast(0)
                        for i in range(max(0, p - 2 * mu + 2 * j), 2 * j + 1):
                            inner += r ** i * tab[(L - 1, j, i)] * ac(2 * mu - 2 * j + i, p)
                        s += comb(mu, j) * inner / wl1 ** (2 * mu - 2 * j)
                    tab[(L, mu, p)] = s
        if precision == "extended":
            entries = {k: v for k, v in tab.items()}
        else:
            entries = tab
        return LambdaTable(entries, e, lam_max, mu_max, precision, list(w))


def lambda_table(grid: SliceGrid, lam_max: int, mu_max: int, precision: str = "standard") -> LambdaTable:
    """Table for the slice grid ``grid`` (uses ``grid.eps``)."""
    eps = Fraction(grid.eps) if precision == "exact" else grid.eps
    return lambda_table_eps(eps, lam_max, mu_max, precision)


@lru_cache(maxsize=8)
def _batch_kernel(mu_max: int):
    M = mu_max
    K = np.zeros((M + 1, M + 1, 2 * M + 1, 2 * M + 1))
    W = np.zeros((M + 1, M + 1))
    for mu in range(M + 1):
        for j in range(mu + 1):
            W[mu, j] = comb(mu, j)
            for i in range(2 * j + 1):
                for p in range(2 * mu + 1):
                    K[mu, j, i, p] = float(a_coeff(2 * mu - 2 * j + i, p))
    return K, W


def lambda_final_batch(eps: np.ndarray, Lam: int, mu_max: int) -> np.ndarray:
    """``(Lam)_0^{2mu}`` for an array of ``eps`` values at once (double precision).

    Returns an array of shape ``(mu_max + 1,) + eps.shape``.
    """
    eps = np.asarray(eps, float)
    shape = eps.shape
    e = eps.ravel()
    if np.any(1 + e <= 0) or np.any(0.5 + e <= 0):
        raise DomainError("1 + eps and 1/2 + eps must be positive")
    M = mu_max
    K, W = _batch_kernel(M)
    A = 1.0 / (2.0 * (1.0 + e))
    a2 = A * A
    w_prev = (0.5 + e) / (1.0 + e)
    old = np.zeros((M + 1, 2 * M + 1, e.size))
    for j in range(M + 1):
        for i in range(2 * j + 1):
            old[j, i] = float(a_coeff(2 * j, i)) / w_prev ** (2 * j)
    mu_idx = np.arange(M + 1)
    j_idx = np.arange(M + 1)
    expo = 2 * mu_idx[:, None] - 2 * j_idx[None, :]          # (mu, j)
    expo = np.where(expo >= 0, expo, 0)
    i_idx = np.arange(2 * M + 1)
    w_cur = w_prev
    for L in range(2, Lam + 1):
        if np.any(w_prev == 0):
            raise DomainError("omega iterate vanished")
        w_cur = 1.0 - a2 / w_prev                             # omega_{L-1}
        r = a2 / (w_prev * w_cur)
        wpow = w_cur[None, None, :] ** (-expo[:, :, None])     # (mu, j, b)
        rpow = r[None, :] ** i_idx[:, None]                    # (i, b)
        X = W[:, :, None, None] * wpow[:, :, None, :] * rpow[None, None, :, :] * old[None, :, :, :]
        old = np.einsum("mjib,mjip->mpb", X, K)
        w_prev = w_cur
    return old[:, 0, :].reshape((M + 1,) + shape)


# ---------------------------------------------------------------------------
# D_xi operator on (Laurent) polynomials

def _d_xi_factor(n: int, times: int):
    """D_xi^times applied to xi^n gives factor * xi^(n - 2 times)."""
    f = Fraction(1)
    for _ in range(times):
        f *= n * (n - 1) * (n - Fraction(1, 2)) * (n - Fraction(3, 2))
        n -= 2
    return f


def d_xi_apply(poly: dict, times: int = 1) -> dict:
    """Apply ``D = 3/4 d^2 + 3 xi d^3 + xi^2 d^4`` ``times`` times.

    ``poly`` maps integer exponents (negative allowed) to coefficients.  On a
    monomial ``D xi^n = n (n-1) (n-1/2) (n-3/2) xi^(n-2)``.

    Examples
    --------
    >>> d_xi_apply({2: 1})
    {0: Fraction(3, 2)}
    """
    out = {}
    for n, c in poly.items():
        f = _d_xi_factor(n, times)
        if f != 0:
            k = n - 2 * times
            out[k] = out.get(k, 0) + c * f
    return {k: v for k, v in out.items() if v != 0}


def d_xi_apply_multi(poly: dict, var: int, times: int = 1) -> dict:
    """:func:`d_xi_apply` acting on variable ``var`` of a multivariate polynomial.

    ``poly`` maps exponent tuples to coefficients.
    """
    out = {}
    for e, c in poly.items():
        f = _d_xi_factor(e[var], times)
        if f != 0:
            k = e[:var] + (e[var] - 2 * times,) + e[var + 1:]
            out[k] = out.get(k, 0) + c * f
    return {k: v for k, v in out.items() if v != 0}


def poly_eval_at_one(poly: dict):
    return sum(poly.values())


# ---------------------------------------------------------------------------
# triangular matrices

@dataclass
class TriMatrix:
    """Dense storage of one of the structured matrices.

    ``kind`` is ``"A"`` (lower, ``(2d+1) x (2d+1)``), ``"C"`` (``(2d+1) x
    (d+1)``, nonzero for ``row <= 2 col``), ``"M"`` (upper, ``(d+1) x
    (d+1)``) or ``"P"`` (projector on column ``d``).
    """

    kind: str
    d: int
    data: list

    @property
    def shape(self):
        return len(self.data), len(self.data[0]) if self.data else 0

    def __matmul__(self, other):
        return _matmul(self.data, other.data if isinstance(other, TriMatrix) else other)


def _matmul(x, y):
    n, k, m = len(x), len(y), len(y[0])
    return [[sum((x[r][t] * y[t][c] for t in range(k)), 0 * x[0][0]) for c in range(m)] for r in range(n)]


def q_values(eps, n: int, precision: str = "exact"):
    """``A`` and ``Q_0..Q_n`` for ``eps`` in the chosen numeric policy."""
    pol = _Policy(precision)
    with pol.context():
        e = pol.cast(eps)
        one = pol.cast(1)
        A = one / (2 * (one + e))
        B = e / (2 * (one + e))
        q = [2 * one, one + 2 * B]
        while len(q) < n + 1:
            q.append(q[-1] - A * A * q[-2])
        return A, [q[i] / A ** i for i in range(n + 1)]


def matrix_build(kind: str, d: int, Q, Lam: int, A, table: LambdaTable | None = None) -> TriMatrix:
    """Build the step-``Lam`` matrix of the given kind.

    The column recursion reads ``C(Lam)[:, d] = A^d(Lam) (C(Lam-1) M^d(Lam))[:, d]``
    with

    * ``A^d(Lam)[p, j] = a^{2d-j}_{2d-p} / (A Q_Lam Q_{Lam-1})^{p-j}``,
    * ``M^d(Lam)[l, k] = C(k, l) Q_{Lam-1}^{4(k-l)}``,
    * ``C(Lam)[p, l] = (A Q_Lam Q_{Lam-1})^{2l-p} (Lam)^{2l}_{2l-p}``; at
      ``Lam = 1`` this is ``Q_0^{4l} a^{2l}_{2l-p} / (A Q_1 Q_0)^p``.
    """
    zero = 0 * A
    if kind == "A":
        t = 1 / (A * Q[Lam] * Q[Lam - 1])
        n = 2 * d + 1
        data = [[(a_coeff(2 * d - j, 2 * d - p) * t ** (p - j) if j <= p else zero) for j in range(n)]
                for p in range(n)]
        return TriMatrix("A", d, _cast_rows(data, A))
    if kind == "M":
        q4 = Q[Lam - 1] ** 4
        data = [[(comb(k, l) * q4 ** (k - l) if k >= l else zero) for k in range(d + 1)] for l in range(d + 1)]
        return TriMatrix("M", d, data)
    if kind == "C":
        data = [[zero] * (d + 1) for _ in range(2 * d + 1)]
        for l in range(d + 1):
            for p in range(2 * l + 1):
                if Lam == 1:
                    data[p][l] = Q[0] ** (4 * l) * a_coeff(2 * l, 2 * l - p) / (A * Q[1] * Q[0]) ** p
                else:
                    if table is None:
                        raise ValueError("C matrix for Lam > 1 needs a LambdaTable")
                    data[p][l] = (A * Q[Lam] * Q[Lam - 1]) ** (2 * l - p) * table[(Lam, l, 2 * l - p)]
        return TriMatrix("C", d, _cast_rows(data, A))
    if kind == "P":
        data = [[(1 if (r == d and c == d) else 0) for c in range(d + 1)] for r in range(d + 1)]
        return TriMatrix("P", d, data)
    raise ValueError(f"unknown matrix kind {kind!r}")


def _cast_rows(data, like):
    if isinstance(like, Fraction):
        return [[Fraction(v) for v in row] for row in data]
    if isinstance(like, mp.mpf):
        return [[(mp.mpf(v.numerator) / v.denominator if isinstance(v, Fraction) else v) for v in row]
                for row in data]
    return [[float(v) for v in row] for row in data]


def c_matrix_chain(eps, Lam: int, mu: int, precision: str = "exact"):
    """``{C(Lam)}_{2mu, mu} = (Lam)_0^{2mu}`` by explicit matrix products."""
    pol = _Policy(precision)
    with pol.context():
        A, Q = q_values(eps, Lam, precision)
        C = matrix_build("C", mu, Q, 1, A).data
        for L in range(2, Lam + 1):
            new = [[0 * A] * (mu + 1) for _ in range(2 * mu + 1)]
            for d in range(mu + 1):
                Md = matrix_build("M", d, Q, L, A)
                Ad = matrix_build("A", d, Q, L, A)
                sub = [row[: d + 1] for row in C[: 2 * d + 1]]
                col = _matmul(sub, Md.data)
                col_d = [[row[d]] for row in col]
                res = _matmul(Ad.data, col_d)
                for p in range(2 * d + 1):
                    new[p][d] = res[p][0]
            C = new
        return pol.out(C[2 * mu][mu])


# ---------------------------------------------------------------------------
# closed-form nested sum

def _chains(mu: int, Lam: int):
    """Column chains ``c_1 <= c_2 <= ... <= c_Lam = mu``."""
    def rec(level, upper):
        if level == 0:
            yield ()
            return
        for c in range(upper + 1):
            for rest in rec(level - 1, c):
                yield rest + (c,)
    for head in rec(Lam - 1, mu):
        yield head + (mu,)


def _poly_power(terms: list, n: int, nvar: int):
    """Expand ``(sum of monomials)^n``; ``terms`` holds (exponent tuple, coefficient)."""
    out = {tuple([0] * nvar): 1}
    for _ in range(n):
        nxt = {}
        for e1, c1 in out.items():
            for e2, c2 in terms:
                k = tuple(x + y for x, y in zip(e1, e2))
                nxt[k] = nxt.get(k, 0) + c1 * c2
        out = nxt
    return out


def c_matrix_closed_form(eps, Lam: int, mu: int, precision: str = "exact"):
    """``{C(Lam)^{2mu}}_{2mu,2mu}`` from the nested-sum closed form.

    Sums over column chains ``c_1 <= ... <= c_Lam = mu``; the product of the
    lower-triangular step matrices is expressed through the auxiliary
    variables ``xi_2..xi_{Lam-1}`` and the operator ``D_xi``:

        prod_A(p <- j) = 2^{-2(p-j)} (4 c_2 - 2j)! / ((4 mu - 2p)! (p-j)!)
                         * 2^{4 (mu - c_2)}
                         * prod_m D_{xi_m}^{c_{m+1} - c_m}
                           [ prod_m xi_m^{2 c_{m+1} - p}
                             (sum_l (xi_2 ... xi_{l-1}) / (A Q_l Q_{l-1}))^{p-j} ] at xi = 1

    with ``p = 2 mu``.  The column factors are
    ``prod_l C(c_l, c_{l-1}) Q_{l-1}^{4 (c_l - c_{l-1})}`` and the base entry
    ``Q_0^{4 c_1} a^{2 c_1}_{2 c_1 - j} / (A Q_1 Q_0)^j``.
    """
    if mu > 3:
        raise DomainError("closed-form path limited to mu <= 3")
    if Lam < 1:
        raise ValueError("Lam must be >= 1")
    pol = _Policy(precision)
    with pol.context():
        A, Q = q_values(eps, Lam, precision)
        if mu == 0:
            return pol.out(pol.cast(1))
        cast = pol.cast
        T = [None] + [1 / (A * Q[l] * Q[l - 1]) for l in range(1, Lam + 1)]
        p = 2 * mu
        if Lam == 1:
            return pol.out(Q[0] ** (4 * mu) * cast(a_coeff(2 * mu, 0)) * T[1] ** p)
        nvar = Lam - 2
        # P = sum_{l=2}^{Lam} T_l xi_2 ... xi_{l-1}
        terms = []
        for l in range(2, Lam + 1):
            e = tuple(1 if 2 <= m + 2 <= l - 1 else 0 for m in range(nvar))
            terms.append((e, T[l]))
        powers = {}
        total = cast(0)
        for chain in _chains(mu, Lam):
            c = (None,) + chain               # c[1..Lam]
            col = cast(1)
            for l in range(2, Lam + 1):
                col *= comb(c[l], c[l - 1]) * Q[l - 1] ** (4 * (c[l] - c[l - 1]))
            lam = c[1]
            for j in range(2 * lam + 1):
                base = Q[0] ** (4 * lam) * cast(a_coeff(2 * lam, 2 * lam - j)) * T[1] ** j
                n = p - j
                if n not in powers:
                    powers[n] = _poly_power(terms, n, nvar)
                poly = {tuple(e[m] + 2 * c[m + 3] - p for m in range(nvar)): v
                        for e, v in powers[n].items()}
                for m in range(nvar):
                    poly = d_xi_apply_multi(poly, m, c[m + 3] - c[m + 2])
                deriv = poly_eval_at_one(poly)
                pref = Fraction(math.factorial(4 * c[2] - 2 * j),
                                math.factorial(4 * mu - 2 * p) * math.factorial(p - j)) \
                    * Fraction(2) ** (-2 * (p - j)) * Fraction(2) ** (4 * (mu - c[2]))
                total += cast(pref) * deriv * base * col
        return pol.out(total)


# ---------------------------------------------------------------------------
# J function and the mu = 1 illustration

def gen_binom(x, k: int):
    """Generalised binomial ``C(x, k)`` for integer ``k`` (zero for ``k < 0``)."""
    if k < 0:
        return Fraction(0)
    x = Fraction(x)
    out = Fraction(1)
    for t in range(k):
        out *= (x - t) / (t + 1)
    return out


def _fact_or_pole(n: int):
    """``n!`` for ``n >= 0``; ``None`` marks a pole (negative integer)."""
    return math.factorial(n) if n >= 0 else None


def j_function(l: int, MIN: int, n: int, i_j: int, ratio):
    """``sum_{p=l}^{MIN} C(2i-l, p-l) C(2i-1/2, 2i-p) n! (2i-p)! / (n-2i-p)! * ratio^p``.

    A term whose factorials include a negative argument in the denominator is
    zero (reciprocal-gamma convention); a pole in the numerator (``2i - p <
    0``) also drops the term since its binomial ``C(2i-1/2, 2i-p)`` vanishes.
    """
    if l > MIN:
        return 0
    total = 0
    for p in range(l, MIN + 1):
        den = _fact_or_pole(n - 2 * i_j - p)
        num = _fact_or_pole(2 * i_j - p)
        if den is None or num is None:
            continue
        coef = gen_binom(2 * i_j - l, p - l) * gen_binom(Fraction(4 * i_j - 1, 2), 2 * i_j - p) \
            * Fraction(math.factorial(n) * num, den)
        total += coef * (ratio ** p if p else 1)
    return total


def mu1_illustration(eps: float, Lam: int) -> float:
    """``(1/2) sum_{k=2}^{Lam} Q_k^4 b_k^2 J(0, 0; 2, 1; b_k/b_{k-1})`` with discrete ``Q``, ``b``."""
    A, Q = q_values(eps, Lam, "standard")
    inv = [1.0 / (Q[k + 1] * Q[k]) for k in range(Lam)]
    # b_k = sum_{i=k}^{Lam-1} inv[i]
    b = [0.0] * (Lam + 1)
    for k in range(Lam - 1, -1, -1):
        b[k] = b[k + 1] + inv[k]
    total = 0.0
    for k in range(2, Lam + 1):
        r = b[k] / b[k - 1] if b[k - 1] else 0.0
        total += Q[k] ** 4 * b[k] ** 2 * float(j_function(0, 0, 2, 1, r))
    return 0.5 * total


# ---------------------------------------------------------------------------
# S_Lam and the truncated leading part

def s_lambda(grid: SliceGrid, Lam: int, J: int, precision: str = "standard"):
    """Partial asymptotic sum ``S_Lam = sum_{mu <= J} (-1)^mu (Lam)_0^{2mu} / (mu! (2 z^2)^mu)``.

    Returns ``(value, first_omitted_magnitude)``.
    """
    if J < 0:
        raise ValueError("J must be >= 0")
    if not math.isfinite(grid.z):
        raise DomainError("S needs a > 0")
    tab = lambda_table(grid, Lam, J + 1, precision)
    pol = _Policy(precision)
    with pol.context():
        x = 1 / (2 * pol.cast(grid.z) ** 2)
        terms = [(-1) ** mu * x ** mu / math.factorial(mu) * tab.final(mu) for mu in range(J + 2)]
        val = sum(terms[: J + 1])
        return float(val), float(abs(terms[J + 1]))


def gaussian_prefactor(grid: SliceGrid, N: int | None = None) -> float:
    """``prod_{i=0}^{N-1} [2 (1 + eps) omega_i]^{-1/2}`` (the harmonic value)."""
    N = grid.N if N is None else N
    w = omega_sequence(grid.omega0, grid.A, N - 1)
    return math.exp(-0.5 * sum(math.log(2.0 * (1.0 + grid.eps) * wi) for wi in w))


def z_cut(grid: SliceGrid, J: int, precision: str = "standard"):
    """Leading part ``Z_N^cut`` and the first-omitted-term proxy, both scaled by the prefactor."""
    pre = gaussian_prefactor(grid)
    s, proxy = s_lambda(grid, grid.N, J, precision)
    return pre * s, pre * proxy


# ---------------------------------------------------------------------------
# large-mu tail term

def _tanh_over_gamma(params: ModelParams, tau: float) -> float:
    b, c = params.b, params.c
    if b == 0:
        return tau
    if b > 0:
        g = math.sqrt(2 * b / c)
        return math.tanh(g * tau) / g
    g = math.sqrt(-2 * b / c)
    if g * tau >= math.pi / 2:
        raise BranchPoleError(f"tan branch pole: gamma*tau = {g * tau} >= pi/2")
    return math.tan(g * tau) / g


def _log_abs_tail_term(params: ModelParams, delta: float, tau: float, mu: int) -> float:
    """``log |divergent_tail_term|``; ``-inf`` when the term vanishes."""
    if mu == 0:
        return 0.0
    t = _tanh_over_gamma(params, tau)
    if params.a == 0 or t == 0:
        return -math.inf
    lp = math.lgamma(0.5 + 2 * mu) - math.lgamma(0.5)
    return (mu * math.log(params.a) - math.lgamma(mu + 1) - 2 * mu * math.log(params.c)
            + mu * math.log(2 * delta) + lp + 2 * mu * math.log(abs(t)))


def divergent_tail_term(params: ModelParams, delta: float, tau: float, mu: int) -> float:
    """Leading large-``mu`` term of the expansion of ``S``.

    ``(-1)^mu a^mu / (mu! c^{2mu}) Delta^mu 2^mu (1/2)_{2mu} (tanh(g tau)/g)^{2mu}``.
    """
    if mu < 0:
        raise ValueError("mu must be >= 0")
    la = _log_abs_tail_term(params, delta, tau, mu)
    return 0.0 if la == -math.inf else (-1) ** mu * math.exp(la)


def suggest_truncation_order(params: ModelParams, delta: float, tau: float, mu_max: int = 100_000) -> int:
    """Index of the smallest-magnitude tail term (smallest-term rule).

    Magnitudes are compared as logarithms since the terms near the minimum
    underflow for small ``delta``.
    """
    best, best_mu = math.inf, 0
    prev = math.inf
    for mu in range(mu_max + 1):
        v = _log_abs_tail_term(params, delta, tau, mu)
        if v < best:
            best, best_mu = v, mu
        if v > prev and mu > best_mu + 2:
            break
        prev = v
    return best_mu
