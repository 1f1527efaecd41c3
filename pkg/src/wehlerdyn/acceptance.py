"""The acceptance suite: thirteen end-to-end checks on exact identities and oracles.

Each criterion returns a :class:`CriterionResult` holding named boolean
checks and some measured values.  A criterion passes when every check
holds and it finished within its time limit.  ``AcceptanceConfig.tol``
overrides every floating-point tolerance (``0`` turns them all into
exact comparisons), and ``AcceptanceConfig.involutions`` replaces the
involution matrices, so both negative controls run through the same code.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .corpus import load_bundled, named_rng, random_generic_surface, random_orbit8_surface
from .errors import WehlerDynError
from .heights import cyclic_canonical_height, growth_estimate_lambda, StationaryHeight
from .kummer import (
    QuadOrder,
    TorusAut,
    chart_atlas,
    exceptional_fixed_points,
    fixed_points_bruteforce,
    hirzebruch_jung,
    invariant_factors,
    torus_fixed_count,
)
from .nsgeom import (
    Isometry,
    MeasureSpec,
    classify_isometry,
    dominant_eigen,
    invariant_curve_degree_bound,
    invariant_plane,
    non_cyclotomic_part,
    parabolic_fixed_line,
    periodic_curve_degree_bound,
    restriction_scalar,
    stationary_operator,
    wehler_ns_rep,
    word_matrix,
)
from .numcore import ZERO, Matrix, Polynomial, charpoly, kernel_basis, primitive_integer_vector
from .orbits import apply_group_word, brute_force_census, fp_orbit_partition, fp_point_census, orbit_closure
from .wehler import BiQuadraticCurve, SurfacePoint, fiber_discriminant, period2_test


@dataclass
class AcceptanceConfig:
    seed: int = 0
    tol: float | None = None          # None: each criterion's own tolerance
    workers: int = 1
    involutions: Sequence | None = None
    only: Sequence[int] | None = None

    def tolerance(self, default: float) -> float:
        return default if self.tol is None else self.tol


@dataclass
class CriterionResult:
    number: int
    title: str
    checks: dict
    values: dict = field(default_factory=dict)
    seconds: float = 0.0
    limit: float = math.inf
    error: str | None = None

    @property
    def passed(self) -> bool:
        return self.error is None and all(self.checks.values()) and self.seconds <= self.limit

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        failed = [k for k, v in self.checks.items() if not v]
        extra = ""
        if self.error:
            extra = f" error: {self.error}"
        elif failed:
            extra = f" failed checks: {', '.join(failed)}"
        elif self.seconds > self.limit:
            extra = f" over time limit ({self.seconds:.1f}s > {self.limit:g}s)"
        return f"[{status}] criterion {self.number:2d}: {self.title}{extra}"

    def to_json(self, timing: bool = False) -> dict:
        out = {"criterion": self.number, "title": self.title, "passed": self.passed,
               "checks": self.checks, "values": self.values}
        if self.error:
            out["error"] = self.error
        if timing:
            out["seconds"] = round(self.seconds, 3)
            out["limit_seconds"] = self.limit
        return out


_REGISTRY: list[tuple[int, str, float, Callable]] = []


def criterion(number: int, title: str, limit: float):
    def deco(fn):
        _REGISTRY.append((number, title, limit, fn))
        return fn
    return deco


def _rep(cfg: AcceptanceConfig):
    return wehler_ns_rep(cfg.involutions)


# ---------------------------------------------------------------------------

@criterion(1, "spectral data of the word (3,2,1)", 1.0)
def spectral_data(cfg: AcceptanceConfig, values: dict) -> dict:
    rep = _rep(cfg)
    g = word_matrix((3, 2, 1), rep)
    cp = charpoly(g.m)
    expected = Polynomial([1, 1]) * Polynomial([1, -18, 1])
    t = classify_isometry(g)
    lam_exact = 9 + 4 * math.sqrt(5)
    values["lambda"] = t.lam
    values["charpoly"] = [int(c) for c in reversed(cp.coeffs)]
    kern = kernel_basis(g.m + Matrix.identity(3))
    vec = primitive_integer_vector(kern[0]) if len(kern) == 1 else None
    return {
        "charpoly": cp == expected,
        "lambda": t.lam is not None and abs(t.lam - lam_exact) <= cfg.tolerance(1e-10),
        "minus_one_eigenvector": vec is not None and vec in ((1, -3, 1), (-1, 3, -1)),
        "self_intersection_20": rep.form.pair((1, 2, 1), (1, 2, 1)) == 20,
    }


@criterion(2, "parabolic structure of the word (2,1)", 1.0)
def parabolic_structure(cfg: AcceptanceConfig, values: dict) -> dict:
    rep = _rep(cfg)
    g = word_matrix((2, 1), rep)
    N = g.m - Matrix.identity(3)
    zero = Matrix.zeros(3)
    n = 1000
    v = (g.m ** n) @ (1, 1, 1)
    scaled = [Fraction(x, n * n) for x in v]
    line = parabolic_fixed_line(g)
    # distance from M^n u / n^2 to the closest multiple of c3
    off_line = max(abs(float(scaled[0])), abs(float(scaled[1])))
    values["scaled_vector"] = [float(x) for x in scaled]
    values["off_line_distance"] = off_line
    values["fixed_line"] = list(line)
    return {
        "unipotent_order_3": N @ N != zero and N @ N @ N == zero,
        "fixed_line_is_c3": line == (0, 0, 1),
        "positive_multiple": scaled[2] > 0,
        "converges_within_tol": off_line <= cfg.tolerance(1e-8),
    }


@criterion(3, "orbit of size 8 and budget-exceeded negative control", 60.0)
def orbit_eight(cfg: AcceptanceConfig, values: dict) -> dict:
    origin = SurfacePoint(ZERO, ZERO, ZERO)
    rng = named_rng("accept-orbit8", cfg.seed)
    sizes = []
    for _ in range(100):
        S = random_orbit8_surface(rng)
        r = orbit_closure(S, origin, 100)
        sizes.append(r.size if r.is_finite else None)
    rng = named_rng("accept-generic", cfg.seed)
    tags = []
    for _ in range(20):
        S, pts = random_generic_surface(rng)
        tags.append(orbit_closure(S, rng.choice(pts), 10**4).tag)
    values["orbit8_sizes"] = sorted(set(s for s in sizes if s is not None))
    values["control_tags"] = sorted(set(tags))
    return {
        "all_finite_size_8": all(s == 8 for s in sizes),
        "controls_exceed_budget": all(t == "BudgetExceeded" for t in tags),
    }


@criterion(4, "period-2 criterion holds iff alpha = 0", 10.0)
def period_two(cfg: AcceptanceConfig, values: dict) -> dict:
    rng = named_rng("accept-period2", cfg.seed)
    ok_zero = ok_nonzero = True
    # beta, gamma nonzero: otherwise alpha = 0 puts a line at infinity on the curve
    def nonzero():
        return Fraction(rng.choice([-1, 1]) * rng.randint(1, 9), rng.randint(1, 5))

    for _ in range(50):
        beta, gamma, eps, alpha = nonzero(), nonzero(), nonzero(), nonzero()
        delta = Fraction(rng.randint(-9, 9), rng.randint(1, 5))
        ok_zero &= period2_test(BiQuadraticCurve.normal_form(0, beta, gamma, delta, eps))[0]
        ok_nonzero &= not period2_test(BiQuadraticCurve.normal_form(alpha, beta, gamma, delta, eps))[0]
    return {"true_when_alpha_zero": ok_zero, "false_when_alpha_nonzero": ok_nonzero}


def _discriminant_oracle(curve: BiQuadraticCurve) -> tuple:
    """Expand ``B(y)^2 - 4 A(y) C(y)`` from the raw coefficients of the curve."""
    A = Polynomial([curve.coeff(2, k) for k in range(3)])
    B = Polynomial([curve.coeff(1, k) for k in range(3)])
    C = Polynomial([curve.coeff(0, k) for k in range(3)])
    disc = B * B - Polynomial([4]) * A * C
    coeffs = list(disc.coeffs) + [0] * (5 - len(disc.coeffs))
    return tuple(reversed(coeffs))


@criterion(5, "fiber discriminant formulas", 10.0)
def discriminant(cfg: AcceptanceConfig, values: dict) -> dict:
    rng = named_rng("accept-discriminant", cfg.seed)
    closed = oracle = True
    for _ in range(1000):
        a, b, c, d, e = (Fraction(rng.randint(-50, 50), rng.randint(1, 20)) for _ in range(5))
        curve = BiQuadraticCurve.normal_form(a, b, c, d, e)
        disc = fiber_discriminant(curve)
        closed &= disc[1] == 2 * c * d - 4 * a * e and disc[4] == e * e
        oracle &= disc == _discriminant_oracle(curve)
    return {"closed_forms_b_e": closed, "symbolic_oracle": oracle}


def _nonperiodic_points(S, pts, rng, count: int) -> list:
    pts = list(pts)
    rng.shuffle(pts)
    out = []
    for p in pts:
        if not orbit_closure(S, p, 64).is_finite:
            out.append(p)
        if len(out) == count:
            break
    return out


@criterion(6, "height growth ratio near lambda", 600.0)
def height_growth(cfg: AcceptanceConfig, values: dict) -> dict:
    S, pts = load_bundled("sample")
    chosen = _nonperiodic_points(S, pts, named_rng("accept-growth", cfg.seed), 5)
    target = 17.944
    ratios = [growth_estimate_lambda(S, (3, 2, 1), p, 5) for p in chosen]
    values["ratios"] = ratios
    rel = cfg.tolerance(0.15)
    return {
        "five_points": len(chosen) == 5,
        "within_15_percent": all(abs(r - target) <= rel * target for r in ratios),
    }


@criterion(7, "cyclic canonical heights vanish on the orbit and are equivariant", 600.0)
def canonical_heights(cfg: AcceptanceConfig, values: dict) -> dict:
    rep = _rep(cfg)
    f = (3, 2, 1)
    lam = classify_isometry(word_matrix(f, rep)).lam
    S8, orbit = load_bundled("orbit8")
    vanish = True
    worst_err = 0.0
    for p in orbit:
        for sign in (1, -1):
            h = cyclic_canonical_height(S8, f, sign, p, 8, rep)
            worst_err = max(worst_err, h.error)
            vanish &= abs(h.value) <= h.error and h.error < cfg.tolerance(1e-6)
    S, pts = load_bundled("sample")
    chosen = _nonperiodic_points(S, pts, named_rng("accept-equivariance", cfg.seed), 5)
    equi = len(chosen) == 5
    gaps = []
    for p in chosen:
        hx = cyclic_canonical_height(S, f, 1, p, 4, rep)
        fx = apply_group_word(S, f, p)
        hfx = cyclic_canonical_height(S, f, 1, fx, 4, rep)
        gap = abs(hfx.value - lam * hx.value)
        gaps.append(gap)
        equi &= gap <= hfx.error + lam * hx.error
    values["orbit_max_error"] = worst_err
    values["equivariance_gaps"] = gaps
    return {"zero_on_orbit": vanish, "equivariance": equi}


def _seeded_measure(rng, support) -> MeasureSpec:
    q = Fraction(rng.randint(1, 7), 8)
    return MeasureSpec(tuple(support), (q, 1 - q))


@criterion(8, "stationary height relation and vanishing on the orbit", 600.0)
def stationary(cfg: AcceptanceConfig, values: dict) -> dict:
    rep = _rep(cfg)
    rng = named_rng("accept-stationary", cfg.seed)
    nu = _seeded_measure(rng, [(1, 2), (2, 3)])
    w, alpha = dominant_eigen(stationary_operator(nu, rep), rep.form)
    depth = 6
    S, pts = load_bundled("sample")
    x = _nonperiodic_points(S, pts, rng, 1)[0]
    sh = StationaryHeight(S, nu, w, alpha)
    residual, bound = sh.residual(x, depth)
    S8, orbit = load_bundled("orbit8")
    sh8 = StationaryHeight(S8, nu, w, alpha)
    vanish = True
    for p in orbit:
        h = sh8.value(p, depth)
        vanish &= abs(h.value) <= h.error
    values.update({"weights": [str(q) for q in nu.weights], "alpha": alpha,
                   "residual": residual, "bound": bound})
    return {"residual_within_error": residual <= bound, "zero_on_orbit": vanish}


@criterion(9, "stationary operator eigendata and the restriction scalar", 1.0)
def perron_frobenius(cfg: AcceptanceConfig, values: dict) -> dict:
    rep = _rep(cfg)
    nu = MeasureSpec.uniform([(2, 1), (3, 2)])
    w, alpha = dominant_eigen(stationary_operator(nu, rep), rep.form)
    g = word_matrix((3, 2, 1), rep)
    sym = MeasureSpec.uniform([g, Isometry(g.m.inverse(), rep.form)])
    scalar = restriction_scalar(stationary_operator(sym), invariant_plane(g))
    quad = non_cyclotomic_part(charpoly(g.m))
    values.update({"alpha": alpha, "w": list(w.coeffs), "restriction_scalar": str(scalar)})
    return {
        "gap_alpha_gt_1": alpha > 1,
        "unit_class": abs(rep.form.square(w.as_array()) - 1) <= cfg.tolerance(1e-9),
        "alpha_is_9": scalar == 9,
        # lambda + 1/lambda is minus the middle coefficient of t^2 - 18 t + 1
        "trace_relation": quad.degree == 2 and 2 * scalar == -quad.coeffs[1] / quad.coeffs[2],
    }


_DEGREE_TABLE = (
    # (kind, args, exact value)
    ("invariant", (1, 3, 0), 2 ** 54),
    ("invariant", (2, 3, 0), 2 ** 110),
    ("invariant", (1, 3, 1), 2 ** 55),
    ("invariant", (1, 4, 0), 2 ** 55),
    ("invariant", (1, 6, 3), 2 ** 58),
    ("invariant", (4, 3, 0), 2 ** 166),
    ("periodic", (1.0, 3, 0, True), 2),
    ("periodic", (1.0, 3, 0, False), 2),
    ("periodic", (1.0, 4, 1, False), 8),
    ("periodic", (0.5, 5, 1, False), 24),
)


@criterion(10, "degree bound evaluators", 1.0)
def degree_bounds(cfg: AcceptanceConfig, values: dict) -> dict:
    out = []
    for kind, args, exact in _DEGREE_TABLE:
        got = (invariant_curve_degree_bound(*args) if kind == "invariant"
               else periodic_curve_degree_bound(*args))
        out.append(math.isclose(got, exact, rel_tol=cfg.tolerance(1e-12)) or got == exact)
    values["rows"] = len(out)
    return {f"row_{i + 1}": ok for i, ok in enumerate(out)}


@criterion(11, "fixed points of torus automorphisms", 10.0)
def torus_counts(cfg: AcceptanceConfig, values: dict) -> dict:
    f = TorusAut(QuadOrder.Z2, ((2, 1), (1, 1)))
    counts = [torus_fixed_count(f, n) for n in (1, 2, 3)]
    brute = fixed_points_bruteforce(f, 2, 5)
    factors3 = invariant_factors(f, 3)
    values.update({"counts": counts, "bruteforce_f2": len(brute), "smith_f3": factors3})
    return {
        "fix_f_is_1": counts[0] == 1,
        "fix_f2_is_25": counts[1] == 25 and len(brute) == 25,
        "fix_f3_is_256": counts[2] == 256 and math.prod(factors3) == 256,
    }


@criterion(12, "chart atlas of the (1/5)(1,2) resolution", 1.0)
def atlas(cfg: AcceptanceConfig, values: dict) -> dict:
    a = chart_atlas()         # raises on any inconsistent relation or transition
    u = a.quotient
    w2_in_v0 = a.transitions[(0, 2)] @ (0, 1)
    exps = {tuple(c.v) for c in a.charts} | {tuple(c.w) for c in a.charts}
    fixed = exceptional_fixed_points(a, 2.0, 0.5)
    return {
        "u0u2_eq_u1sq": tuple(x + y for x, y in zip(u[0], u[2])) == tuple(2 * x for x in u[1]),
        "u1u3_eq_u2cube": tuple(x + y for x, y in zip(u[1], u[3])) == tuple(3 * x for x in u[2]),
        "w2_is_v0sq_w0_5": tuple(w2_in_v0) == (2, 5),
        "multipliers": {(-2, 1), (-1, 3), (5, 0)} <= exps,
        "hj_5_2": hirzebruch_jung((5, 2)) == [3, 2],
        "hj_2_1": hirzebruch_jung((2, 1)) == [2],
        "two_fixed_points_per_curve": all(c["count"] == 2 for c in fixed),
    }


@criterion(13, "finite-field census against brute force", 60.0)
def census(cfg: AcceptanceConfig, values: dict) -> dict:
    agree = sums = identical = True
    sizes = {}
    for i in range(1, 6):
        S, _ = load_bundled(f"census{i}")
        for p in (3, 5, 7):
            Sp = S.reduce_mod(p)
            pts = fp_point_census(Sp, workers=1)
            agree &= pts == brute_force_census(Sp)
            part = fp_orbit_partition(Sp, workers=1, census=pts)
            total = sum(s * c for s, c in part.histogram.items()) + len(part.quarantined)
            sums &= total == part.census_size == len(pts)
            many = fp_orbit_partition(Sp, workers=max(8, cfg.workers))
            identical &= (json.dumps(part.to_json()) == json.dumps(many.to_json())
                          and part.to_csv() == many.to_csv())
            sizes[f"census{i}/F{p}"] = len(pts)
    values["census_sizes"] = sizes
    return {"matches_brute_force": agree, "partition_sums": sums, "worker_independent": identical}


# ---------------------------------------------------------------------------

def criteria() -> list[tuple[int, str, float]]:
    return [(n, t, lim) for n, t, lim, _ in sorted(_REGISTRY)]


def run_criterion(number: int, cfg: AcceptanceConfig | None = None) -> CriterionResult:
    cfg = cfg or AcceptanceConfig()
    for n, title, limit, fn in _REGISTRY:
        if n == number:
            values: dict = {}
            start = time.perf_counter()
            try:
                checks = fn(cfg, values)
                err = None
            except (WehlerDynError, ArithmeticError, ValueError) as exc:
                checks, err = {}, f"{type(exc).__name__}: {exc}"
            elapsed = time.perf_counter() - start
            return CriterionResult(n, title, checks, values, elapsed, limit, err)
    raise KeyError(f"no criterion {number}")


def run_acceptance(cfg: AcceptanceConfig | None = None) -> list[CriterionResult]:
    cfg = cfg or AcceptanceConfig()
    wanted = set(cfg.only) if cfg.only else None
    return [run_criterion(n, cfg) for n, _, _ in criteria() if wanted is None or n in wanted]


def summary(results: Sequence[CriterionResult], timing: bool = False) -> dict:
    return {
        "passed": sum(r.passed for r in results),
        "failed": sum(not r.passed for r in results),
        "criteria": [r.to_json(timing) for r in results],
    }
