"""Cross-oracle acceptance checks shared by the CLI and the test suite.

Each ``check_<k>`` returns a :class:`CheckResult`.  ``scale`` multiplies
every numeric tolerance (``scale = 0`` turns every check into a negative
control); ``quick`` trims sample counts where that keeps the check
meaningful.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import contfrac, continuum, ggy, oracles, recurrence, remainders, slicing, specfun  # noqa: F401
from .slicing import ModelParams, build_grid


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str
    elapsed: float = 0.0

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.number:2d} {self.name}: {self.detail} ({self.elapsed:.1f} s)"


def _timed(fn):
    def wrapper(scale: float = 1.0, quick: bool = False) -> CheckResult:
        t0 = time.perf_counter()
        res = fn(scale, quick)
        res.elapsed = time.perf_counter() - t0
        return res
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


# ---------------------------------------------------------------------------

@_timed
def check_1(scale, quick):
    """One-dimensional series against adaptive quadrature."""
    rng = np.random.default_rng(101)
    worst = 0.0
    t0 = time.perf_counter()
    for _ in range(25):
        A, B, C = rng.uniform(0.1, 2), rng.uniform(-1, 2), rng.uniform(0, 2)
        ref = oracles.integrate_i1(A, B, C).value
        worst = max(worst, abs(oracles.i1_series(A, B, C, 120) - ref) / abs(ref))
    runtime = time.perf_counter() - t0
    ok = worst < 1e-8 * scale and runtime < 10.0
    return CheckResult(1, "1-D series vs quadrature", ok, f"max rel {worst:.2e}, runtime {runtime:.1f} s")


PARAM_SETS_2 = [
    (0.1, 1.0, 1.0, 1.0), (0.5, 0.0, 1.0, 1.0), (1.0, 2.0, 0.5, 1.0), (0.05, 0.5, 2.0, 2.0),
    (0.2, -0.2, 1.0, 1.0), (1.0, 1.0, 1.0, 0.5), (0.3, 3.0, 1.5, 1.5), (0.01, 1.0, 1.0, 1.0),
    (2.0, 0.5, 1.0, 0.8), (0.1, 5.0, 0.5, 1.0),
]


@_timed
def check_2(scale, quick):
    """Truncated multi-index sum against the brute-force N-dimensional integral."""
    sets = PARAM_SETS_2[:3] if quick else PARAM_SETS_2
    worst = 0.0
    t0 = time.perf_counter()
    for p in sets:
        P = ModelParams(*p)
        for N in (1, 2, 3):
            ref = oracles.zn_bruteforce(P, N).value
            val = slicing.zn_multisum(build_grid(P, N), 40)
            worst = max(worst, abs(val - ref) / abs(ref))
    runtime = time.perf_counter() - t0
    ok = worst < 1e-6 * scale and runtime < 300
    return CheckResult(2, "N-slice exactness", ok, f"{len(sets)} sets, max rel {worst:.2e}")


@_timed
def check_3(scale, quick):
    """Harmonic chain: N -> inf limit, O(Delta) rate, and z_beta at a = 0."""
    P = ModelParams(0.0, 1.0, 1.0, 1.0)
    exact = math.cosh(math.sqrt(2.0)) ** -0.5
    Ns = [2 ** k for k in range(1, 13)]
    vals = [oracles.zn_gaussian(P, N) for N in Ns]
    errs = [abs(v - exact) for v in vals]
    order = math.log2(errs[-2] / errs[-1])
    extrap, _ = oracles.richardson(vals[-3:], [1.0 / N for N in Ns[-3:]], (1, 2))
    z_cf = ggy.z_beta(P, 3, "closed-form")
    z_ode = ggy.z_beta(P, 3, "direct-ode")
    e_lim = abs(extrap - exact)
    e_z = max(abs(z_cf - exact), abs(z_ode - exact))
    ok = abs(order - 1.0) < 0.1 * scale and e_lim < 1e-6 * scale and e_z < 1e-10 * scale
    return CheckResult(3, "harmonic chain", ok,
                       f"order {order:.3f}, extrapolation err {e_lim:.1e}, z_beta err {e_z:.1e}")


@_timed
def check_4(scale, quick):
    """First-order coupling response against the mu = 1 closed form."""
    worst = 0.0
    for b, c, beta in ((1, 1, 1), (5, 0.5, 1), (0, 1, 1)):
        P = ModelParams(0.0, b, c, beta)
        lhs = oracles.coupling_derivative(P, 512) * c * c
        rhs = continuum.continuum_c2(P, beta)
        worst = max(worst, abs(lhs / rhs - 1))
    exact_b0 = continuum.continuum_c2(ModelParams(0.0, 0.0, 1.0, 1.0), 1.0) == 1.0
    ok = worst < 0.01 * scale and exact_b0
    return CheckResult(4, "mu=1 term end-to-end", ok, f"max rel {worst:.2e}, b=0 exact: {exact_b0}")


@_timed
def check_5(scale, quick):
    """Recurrence, matrix chain and nested closed form agree exactly."""
    eps_list = [Fraction(1, 7), Fraction(-1, 10), Fraction(build_grid(ModelParams(0.1, 1, 1, 1), 6).eps)]
    lam_max = 4 if quick else 6
    bad = 0
    count = 0
    for eps in eps_list:
        tab = recurrence.lambda_table_eps(eps, lam_max, 3, "exact")
        for L in range(1, lam_max + 1):
            for mu in range(4):
                ref = tab.final(mu, L)
                count += 1
                if recurrence.c_matrix_closed_form(eps, L, mu) != ref or recurrence.c_matrix_chain(eps, L, mu) != ref:
                    bad += 1
    ok = bad == 0
    return CheckResult(5, "recurrence/closed-form equivalence", ok, f"{count - bad}/{count} exact matches")


@_timed
def check_6(scale, quick):
    """Continued-fraction identities and closed form vs iteration."""
    worst = 0.0
    exact_ok = True
    for b in (-0.5, 0.0, 1e-12, 1.0, 5.0):
        g = build_grid(ModelParams(0.1, b, 1.0, 1.0), 4)
        A, B = g.A, g.B
        st = contfrac.convergent_state(B, A)
        p, q = contfrac.convergents_exact(Fraction(B), Fraction(A), 200)
        exact_ok &= all(p[n] == q[n + 1] for n in range(201))
        # the reference iteration runs in exact rationals: in double precision
        # it loses digits near the poles of the oscillating (b < 0) branch
        a2 = Fraction(A) ** 2
        w = Fraction(g.omega0)
        for n in range(201):
            if n:
                w = 1 - a2 / w
            pc, qc, wc = contfrac.convergent_closed_form(B, A, n)
            wf = float(w)
            worst = max(worst, abs(wc - wf) / max(1.0, abs(wf)),
                        abs(pc - contfrac.q_closed(st, n + 1)) / max(1e-300, abs(pc)))
    ok = exact_ok and worst < 1e-12 * scale
    return CheckResult(6, "continued-fraction identities", ok, f"p_n=q_(n+1) exact: {exact_ok}, max rel {worst:.1e}")


@_timed
def check_7(scale, quick):
    """Remainder bound of the Poincare expansion is never violated."""
    rng = np.random.default_rng(707)
    trials = 100 if quick else 500
    viol = 0
    worst = 0.0
    for _ in range(trials):
        m = float(rng.uniform(0, 30))
        z = float(rng.uniform(2 * math.sqrt(m), 2 * math.sqrt(m) + 30))
        z = max(z, 1e-3)
        J = int(rng.integers(1, 8))
        err = abs(specfun.pcf_scaled(m, z) - specfun.poincare_sum(m, z, J))
        bound = specfun.temme_remainder_bound(m, z, J) * scale
        if not err <= bound:
            viol += 1
        if bound > 0:
            worst = max(worst, err / bound)
    return CheckResult(7, "Poincare bound soundness", viol == 0,
                       f"{viol}/{trials} violations, worst err/bound {worst:.3f}")


@_timed
def check_8(scale, quick):
    """Order-shift summation identity."""
    rng = np.random.default_rng(808)
    worst = 0.0
    for _ in range(50):
        nu, x, t = rng.uniform(0.1, 5), rng.uniform(-2, 5), rng.uniform(-1, 1)
        lhs, rhs = specfun.shift_identity_check(nu, x, t, 80)
        worst = max(worst, abs(lhs - rhs) / abs(rhs))
    ok = worst < 1e-9 * scale
    return CheckResult(8, "shift identity", ok, f"max rel residual {worst:.1e}")


@_timed
def check_9(scale, quick):
    """Direct ODE vs closed form, and fourth-order step convergence."""
    worst = 0.0
    grid = [(a, b, c, beta) for a in (0, 0.05, 0.1) for b in (0.5, 1, 5) for c in (0.5, 1) for beta in (0.5, 1)]
    for p in grid:
        P = ModelParams(*p)
        worst = max(worst, abs(ggy.z_beta(P, 3, "direct-ode") - ggy.z_beta(P, 3, "closed-form")))
    P = ModelParams(0.0, 1.0, 1.0, 1.0)
    exact = math.cosh(math.sqrt(2.0))
    ns = [8, 16, 32, 64]
    errs = [abs(ggy.solve_ggy(P, lambda t: (1.0, 0.0, 0.0), 1.0, h=1.0 / n, tol=1.0).F_values[-1] - exact)
            for n in ns]
    slope = np.polyfit(np.log(1.0 / np.array(ns)), np.log(errs), 1)[0]
    ok = worst < 1e-6 * scale and abs(slope - 4.0) <= 0.2 * scale
    return CheckResult(9, "method agreement", ok, f"{len(grid)} points, max diff {worst:.1e}, order {slope:.2f}")


@_timed
def check_10(scale, quick):
    """Remainder decay certification and its negative control."""
    P = ModelParams(0.1, 1.0, 1.0, 1.0)
    Ns = [8, 16, 32, 64]
    good = remainders.certify_decay(P, Ns, J=2, n=2)
    bad = remainders.certify_decay(P, Ns, J=0, n=2)
    ok = good.certified and not bad.certified
    return CheckResult(10, "remainder certification", ok,
                       f"theta(J=2)={good.theta:.2f}, theta(J=0)={bad.theta:.2f}")


@_timed
def check_11(scale, quick):
    """First quartic correction with clamped ends: bridge oracle and large-gamma asymptote."""
    worst = 0.0
    Ns = [64, 128, 256] if quick else [128, 256, 512]
    for b, c, beta in ((1.0, 1.0, 1.0), (5.0, 0.5, 1.0)):
        P0 = ModelParams(0.0, b, c, beta)
        oracle, _ = oracles.extrapolate_in_n(lambda N: oracles.bridge_coupling_derivative(P0, N), Ns)
        slope = 1.0 - ggy.moeler_correction(P0.replace(a=1.0), beta)
        worst = max(worst, abs(slope / oracle - 1))
    P = ModelParams(0.1, 2.0, 1.0, 1.0)
    g = continuum.gamma_of(P)[1]
    beta20 = 20.0 / g
    asym = abs(ggy.moeler_correction(P, beta20) - ggy.moeler_asymptote(P, beta20))
    ok = worst < 0.01 * scale and asym < 1e-6 * scale
    return CheckResult(11, "clamped-end correction", ok,
                       f"oracle rel diff {worst:.3f}, asymptote diff {asym:.1e}")


@_timed
def check_12(scale, quick):
    """Figure data: determinism, monotonicity in a, and the a = 0 limit."""
    from .cli import figure_rows, write_csv
    import io
    outs = []
    for which in (1, 2):
        a1 = io.StringIO()
        a2 = io.StringIO()
        rows = figure_rows(which)
        write_csv(a1, rows)
        write_csv(a2, figure_rows(which))
        outs.append(a1.getvalue() == a2.getvalue() and len(rows) == 200)
    deterministic = all(outs)
    decreasing = True
    for b in np.linspace(1.0, 10.0, 7):
        s = [continuum.s_continuum(ModelParams(a, float(b), 0.5, 1.0), 1.0, 3) for a in (0.05, 0.1, 0.15)]
        decreasing &= s[0] > s[1] > s[2]
    zero = all(v == 0.0 for _, v in figure_rows(2, a=0.0))
    ok = deterministic and decreasing and zero
    return CheckResult(12, "figure emission", ok,
                       f"deterministic {deterministic}, S decreasing in a {decreasing}, a=0 vanishes {zero}")


CHECKS = [check_1, check_2, check_3, check_4, check_5, check_6,
          check_7, check_8, check_9, check_10, check_11, check_12]


def run_suite(suite: str = "quick", scale: float = 1.0, report=print):
    """Run all checks without stopping at failures; returns the results."""
    if suite not in ("quick", "full"):
        raise ValueError("suite must be 'quick' or 'full'")
    results = []
    for chk in CHECKS:
        try:
            res = chk(scale, suite == "quick")
        except Exception as exc:  # a crash counts as a failure and the suite goes on
            num = CHECKS.index(chk) + 1
            res = CheckResult(num, chk.__name__, False, f"error: {type(exc).__name__}: {exc}")
        results.append(res)
        if report is not None:
            report(res.line())
    return results
