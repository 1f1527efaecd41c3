"""Torus automorphisms, torsion orbits, Kummer types and the type-(1/5)(1,2) chart atlas.

A two-dimensional torus is handled through its lattice only: ``Lambda`` is
identified with ``Z^4`` and an affine automorphism ``z -> L z + t`` with an
integer 4x4 matrix and a torsion translation.  Over the generic lattice
factor (``Z2``) a 2x2 integer matrix ``M`` acts on ``Lambda_0 + Lambda_0``
through ``M (x) I_2``; over ``Z[i]`` and ``Z[w]`` each entry is replaced by
its regular representation on the basis ``(1, g)``.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import LevelOverflow
from .numcore import Matrix
from .orbits import OrbitResult


# ---------------------------------------------------------------------------
# Quadratic orders and torus automorphisms
# ---------------------------------------------------------------------------

class QuadOrder(enum.Enum):
    Z2 = "Z2"
    GaussianZi = "Zi"
    EisensteinZw = "Zw"

    @classmethod
    def parse(cls, text: str) -> "QuadOrder":
        aliases = {"z2": cls.Z2, "zi": cls.GaussianZi, "gaussianzi": cls.GaussianZi,
                   "zw": cls.EisensteinZw, "eisensteinzw": cls.EisensteinZw}
        try:
            return aliases[text.strip().lower()]
        except KeyError:
            raise ValueError(f"unknown order {text!r}; use Z2, Zi or Zw") from None

    @property
    def generator_matrix(self) -> tuple[tuple[int, int], tuple[int, int]] | None:
        """Multiplication by ``g`` on the basis ``(1, g)``."""
        if self is QuadOrder.GaussianZi:      # i^2 = -1
            return ((0, -1), (1, 0))
        if self is QuadOrder.EisensteinZw:    # w^2 = -w - 1
            return ((0, -1), (1, -1))
        return None

    def regular(self, elem) -> list[list[int]]:
        """2x2 integer matrix of multiplication by ``a + b g``."""
        a, b = (elem, 0) if isinstance(elem, int) else elem
        G = self.generator_matrix
        if G is None:
            if b:
                raise ValueError("Z2 entries are plain integers")
            return [[a, 0], [0, a]]
        return [[a + b * G[0][0], b * G[0][1]], [b * G[1][0], a + b * G[1][1]]]

    def unit_orders(self) -> set[int]:
        """Orders of the roots of unity in the order (the possible homotheties)."""
        return {QuadOrder.Z2: {1, 2}, QuadOrder.GaussianZi: {1, 2, 4},
                QuadOrder.EisensteinZw: {1, 2, 3, 6}}[self]


@dataclass(frozen=True)
class TorsionPoint:
    """The point ``coords / level`` of ``R^4 / Z^4``, with minimal level."""

    level: int
    coords: tuple[int, int, int, int]

    def __post_init__(self):
        N = int(self.level)
        if N < 1:
            raise ValueError("level must be positive")
        c = tuple(int(x) % N for x in self.coords)
        if len(c) != 4:
            raise ValueError("torsion points live in a rank-4 lattice")
        g = math.gcd(N, *c)
        object.__setattr__(self, "level", N // g)
        object.__setattr__(self, "coords", tuple(x // g for x in c))

    @classmethod
    def zero(cls) -> "TorsionPoint":
        return cls(1, (0, 0, 0, 0))

    @classmethod
    def from_fractions(cls, v: Sequence) -> "TorsionPoint":
        fr = [Fraction(x) for x in v]
        N = 1
        for x in fr:
            N = N * x.denominator // math.gcd(N, x.denominator)
        return cls(N, tuple(int(x * N) for x in fr))

    def as_fractions(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(c, self.level) for c in self.coords)

    def to_json(self) -> dict:
        return {"level": self.level, "coords": list(self.coords)}


@dataclass(frozen=True)
class TorusAut:
    """Affine automorphism ``z -> m z + t`` of a two-dimensional torus."""

    order: QuadOrder
    m: tuple
    t: TorsionPoint = TorsionPoint(1, (0, 0, 0, 0))

    def __post_init__(self):
        m = tuple(tuple(row) for row in self.m)
        if len(m) != 2 or any(len(r) != 2 for r in m):
            raise ValueError("m must be a 2x2 matrix over the order")
        object.__setattr__(self, "m", m)
        if abs(self.as_real.det()) != 1:
            raise ValueError("the linear part is not invertible over Z")

    @property
    def as_real(self) -> Matrix:
        rows = [[0] * 4 for _ in range(4)]
        for i, j in itertools.product(range(2), range(2)):
            block = self.order.regular(self.m[i][j])
            for a, b in itertools.product(range(2), range(2)):
                rows[2 * i + a][2 * j + b] = block[a][b]
        return Matrix(rows)

    def power(self, n: int) -> tuple[Matrix, tuple[Fraction, ...]]:
        """Linear part and translation of ``f^n`` (``n >= 0``)."""
        L = self.as_real
        lin = Matrix.identity(4)
        t = self.t.as_fractions()
        trans = (Fraction(0),) * 4
        for _ in range(n):
            trans = tuple(a + b for a, b in zip(L @ trans, t))
            lin = L @ lin
        return lin, trans

    def apply(self, z: TorsionPoint) -> TorsionPoint:
        L = self.as_real
        N = z.level * self.t.level // math.gcd(z.level, self.t.level)
        zc = [c * (N // z.level) for c in z.coords]
        tc = [c * (N // self.t.level) for c in self.t.coords]
        return TorsionPoint(N, tuple(a + b for a, b in zip(L @ zc, tc)))


# ---------------------------------------------------------------------------
# Smith normal form and fixed points
# ---------------------------------------------------------------------------

def smith_normal_form(A: Matrix) -> tuple[list[int], Matrix, Matrix]:
    """``(diag, U, V)`` with ``U A V = diag`` and ``U, V`` unimodular.

    ``diag`` lists the invariant factors ``d_1 | d_2 | ...`` followed by
    zeros.
    """
    n, m = A.shape
    a = [list(r) for r in A.rows]
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    V = [[int(i == j) for j in range(m)] for i in range(m)]

    def swap_rows(M, i, j):
        M[i], M[j] = M[j], M[i]

    def swap_cols(M, i, j):
        for row in M:
            row[i], row[j] = row[j], row[i]

    for k in range(min(n, m)):
        while True:
            entries = [(abs(a[i][j]), i, j) for i in range(k, n) for j in range(k, m) if a[i][j]]
            if not entries:
                diag = [a[i][i] for i in range(min(n, m))]
                return _finish_snf(diag, U, V)
            _, pi, pj = min(entries)
            swap_rows(a, k, pi)
            swap_rows(U, k, pi)
            swap_cols(a, k, pj)
            swap_cols(V, k, pj)
            done = True
            for i in range(k + 1, n):
                q = a[i][k] // a[k][k]
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[k])]
                    U[i] = [x - q * y for x, y in zip(U[i], U[k])]
                if a[i][k]:
                    done = False
            for j in range(k + 1, m):
                q = a[k][j] // a[k][k]
                if q:
                    for row in a:
                        row[j] -= q * row[k]
                    for row in V:
                        row[j] -= q * row[k]
                if a[k][j]:
                    done = False
            if not done:
                continue
            # divisibility: fold any offending row into row k
            bad = next(((i, j) for i in range(k + 1, n) for j in range(k + 1, m)
                        if a[i][j] % a[k][k]), None)
            if bad is None:
                break
            i = bad[0]
            a[k] = [x + y for x, y in zip(a[k], a[i])]
            U[k] = [x + y for x, y in zip(U[k], U[i])]
    diag = [a[i][i] for i in range(min(n, m))]
    return _finish_snf(diag, U, V)


def _finish_snf(diag, U, V):
    # make the diagonal nonnegative by flipping rows of U
    for i, d in enumerate(diag):
        if d < 0:
            diag[i] = -d
            U[i] = [-x for x in U[i]]
    return diag, Matrix(U), Matrix(V)


class _Infinite:
    def __repr__(self) -> str:
        return "InfiniteFixedLocus"

    def to_json(self) -> str:
        return "InfiniteFixedLocus"


InfiniteFixedLocus = _Infinite()


def torus_fixed_count(f: TorusAut, n: int = 1):
    """Number of fixed points of ``f^n``, or :data:`InfiniteFixedLocus`.

    Fixed points solve ``(L^n - I) z = -t_n`` modulo ``Z^4``.  With
    ``det(L^n - I) != 0`` there are exactly ``|det|`` solutions whatever the
    translation; otherwise the Smith form decides between an empty set
    (count 0) and a positive-dimensional fixed locus.
    """
    if n < 1:
        raise ValueError("n must be positive")
    lin, trans = f.power(n)
    D = lin - Matrix.identity(4)
    det = D.det()
    if det != 0:
        return abs(det)
    diag, U, _ = smith_normal_form(D)
    rhs = U @ tuple(-x for x in trans)
    for d, r in zip(diag, rhs):
        if d == 0 and Fraction(r).denominator != 1:
            return 0
    return InfiniteFixedLocus


def invariant_factors(f: TorusAut, n: int = 1) -> list[int]:
    lin, _ = f.power(n)
    return smith_normal_form(lin - Matrix.identity(4))[0]


def fixed_points_bruteforce(f: TorusAut, n: int, level: int) -> list[TorsionPoint]:
    """All fixed points of ``f^n`` among the ``level``-torsion points (oracle).

    With ``N`` a common denominator of ``1/level`` and the translation, the
    point ``c/level`` is fixed iff ``(L - I) c (N/level) + N t`` vanishes
    modulo ``N``; the test runs on the whole grid at once.
    """
    lin, trans = f.power(n)
    N = level
    for x in trans:
        N = N * x.denominator // math.gcd(N, x.denominator)
    D = lin - Matrix.identity(4)
    # reduced entries keep the int64 products small
    Dm = np.array([[int(x) % N for x in row] for row in D.rows], dtype=np.int64)
    shift = np.array([int(x * N) % N for x in trans], dtype=np.int64)
    grid = np.indices((level,) * 4).reshape(4, -1).T.astype(np.int64)
    vals = (grid * (N // level)) % N @ Dm.T % N
    hit = np.all((vals + shift) % N == 0, axis=1)
    return [TorsionPoint(level, tuple(int(v) for v in c)) for c in grid[hit]]


def lefschetz_count(f: TorusAut, n: int) -> float:
    """``|prod(mu^n - 1)|`` over the eigenvalues of the real 4x4 matrix."""
    mu = np.linalg.eigvals(f.as_real.to_float())
    return float(abs(np.prod(mu ** n - 1)))


def torsion_orbit(gens: Sequence[TorusAut], start: TorsionPoint, budget: int = 10**6,
                  max_level: int = 10**6) -> OrbitResult:
    """Closure of a torsion point under the generators (breadth first)."""
    N = start.level
    for g in gens:
        N = N * g.t.level // math.gcd(N, g.t.level)
    if N > max_level:
        raise LevelOverflow(f"common level {N} exceeds {max_level}")
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for z in frontier:
            for g in gens:
                w = g.apply(z)
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
                    if len(seen) > budget:
                        return OrbitResult("BudgetExceeded", visited=len(seen), frontier=len(nxt))
        frontier = nxt
    points = tuple(sorted(seen, key=lambda p: (p.level, p.coords)))
    for z in points:
        for g in gens:
            if g.apply(z) not in seen:
                raise AssertionError("torsion orbit is not closed")
    return OrbitResult("Finite", points=points, visited=len(points))


# ---------------------------------------------------------------------------
# Kummer types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KummerVerdict:
    tag: str                 # "Valid", "ExcludedNonHomothety" or "Invalid"
    case: int | None = None

    def to_json(self) -> dict:
        return {"verdict": self.tag, "case": self.case}


_HOMOTHETY_CASES = {
    (QuadOrder.GaussianZi, 4): 3,
    (QuadOrder.EisensteinZw, 3): 4,
    (QuadOrder.EisensteinZw, 6): 5,
}
EXCLUDED_TAG = "ExcludedNonHomothety"


def kummer_type_validate(order: QuadOrder, g_order: int,
                         weights: tuple[int, int] | None = None) -> KummerVerdict:
    """Which of the cyclic quotient types ``(order, |G|)`` can occur.

    Orders 1 and 2 are the blown-up abelian and classical Kummer cases;
    orders 4 over ``Z[i]`` and 3, 6 over ``Z[w]`` are homotheties.  The
    order-5 and order-10 actions on the ``Z[zeta_5]`` torus are not
    homotheties and are excluded for non-elementary groups.  ``weights``
    optionally gives the exponents ``(a, b)`` of the generator
    ``(zeta^a x, zeta^b y)`` with ``zeta`` a primitive ``g_order``-th root.
    """
    if g_order < 1:
        raise ValueError("g_order must be positive")
    if weights is not None and weights[0] % g_order != weights[1] % g_order:
        if g_order in (5, 10):
            return KummerVerdict(EXCLUDED_TAG)
        return KummerVerdict("Invalid")
    if g_order == 1:
        return KummerVerdict("Valid", 1)
    if g_order == 2:
        return KummerVerdict("Valid", 2)
    case = _HOMOTHETY_CASES.get((order, g_order))
    if case is not None:
        return KummerVerdict("Valid", case)
    if g_order in (5, 10) and weights is None:
        return KummerVerdict(EXCLUDED_TAG)
    return KummerVerdict("Invalid")


# ---------------------------------------------------------------------------
# Cyclic quotient singularities and the chart atlas
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CyclicSingularity:
    n: int
    q: int

    def __post_init__(self):
        if not (0 < self.q < self.n) or math.gcd(self.n, self.q) != 1:
            raise ValueError("need 0 < q < n with gcd(n, q) = 1")


def hirzebruch_jung(s: CyclicSingularity | tuple[int, int]) -> list[int]:
    """``n/q = b1 - 1/(b2 - 1/(...))`` with every ``b_i >= 2``."""
    if not isinstance(s, CyclicSingularity):
        s = CyclicSingularity(*s)
    n, q = s.n, s.q
    out = []
    while q:
        b = -(-n // q)
        out.append(b)
        n, q = q, b * q - n
    return out


def continued_fraction_value(bs: Sequence[int]) -> Fraction:
    val = Fraction(bs[-1])
    for b in reversed(bs[:-1]):
        val = b - 1 / val
    return val


@dataclass(frozen=True)
class Multiplier:
    """``alpha^a beta^b``, the factor by which ``(x, y) -> (alpha x, beta y)`` scales ``x^a y^b``."""

    a: int
    b: int

    def value(self, abs_alpha: float, abs_beta: float) -> float:
        return abs_alpha ** self.a * abs_beta ** self.b

    def classify(self, abs_alpha: float, abs_beta: float) -> str:
        v = self.value(abs_alpha, abs_beta)
        if math.isclose(v, 1.0):
            return "neutral"
        return "contracting" if v < 1 else "expanding"


def equivariant_multiplier(coord_exps: tuple[int, int]) -> Multiplier:
    """A monomial ``x^a y^b`` is multiplied by ``alpha^a beta^b``."""
    a, b = coord_exps
    return Multiplier(int(a), int(b))


@dataclass(frozen=True)
class Chart:
    name: str
    v: tuple[int, int]      # (x, y)-exponents of the first coordinate
    w: tuple[int, int]      # (x, y)-exponents of the second coordinate

    @property
    def matrix(self) -> Matrix:
        return Matrix([[self.v[0], self.w[0]], [self.v[1], self.w[1]]])


@dataclass(frozen=True)
class ChartAtlas:
    charts: tuple[Chart, ...]
    transitions: dict            # (i, j) -> exponent matrix: columns give V_j coords in V_i exponents
    quotient: tuple[tuple[int, int], ...]
    quotient_in_charts: dict     # (u index, chart index) -> exponents in that chart
    curves: tuple[dict, ...]

    def to_json(self) -> dict:
        return {
            "charts": {c.name: {"v": list(c.v), "w": list(c.w)} for c in self.charts},
            "transitions": {f"V{i}->V{j}": m.tolist() for (i, j), m in self.transitions.items()},
            "quotient": [list(u) for u in self.quotient],
            "relations": ["u0*u2 = u1^2", "u1*u3 = u2^3"],
            "curves": list(self.curves),
        }


# (x, y)-exponents of the chart coordinates on C^2 / G for G = <(z x, z^2 y)>, z^5 = 1
_CHARTS = (
    Chart("V0", (5, 0), (-2, 1)),    # v0 = x^5,   w0 = y/x^2
    Chart("V1", (2, -1), (-1, 3)),   # v1 = x^2/y, w1 = y^3/x
    Chart("V2", (1, -3), (0, 5)),    # v2 = x/y^3, w2 = y^5
)
_QUOTIENT = ((5, 0), (3, 1), (1, 2), (0, 5))
# expressions of u0..u3 in each chart, as exponents of (v_i, w_i)
_QUOTIENT_TABLE = {
    0: ((1, 0), (3, 1), (5, 3)),
    1: ((1, 1), (2, 1), (3, 2)),
    2: ((1, 2), (1, 1), (1, 1)),
    3: ((2, 5), (1, 2), (0, 1)),
}
# exceptional curves: (chart index, coordinate along the curve, coordinate transverse)
_CURVES = (
    ("E1", -3, ((0, "w", "v"), (1, "v", "w"))),
    ("E2", -2, ((1, "w", "v"), (2, "v", "w"))),
)


def _integral_inverse_times(A: Matrix, B: Matrix) -> Matrix:
    M = A.inverse() @ B
    if not M.is_integral:
        raise AssertionError("chart transition is not a monomial map")
    return M


def chart_atlas() -> ChartAtlas:
    """Charts of the minimal resolution of ``(1/5)(1, 2)``, verified on construction.

    Transition ``V_i -> V_j`` is the exponent matrix whose columns express
    ``v_j, w_j`` in the exponents of ``v_i, w_i``.  Every transition must be
    unimodular, compositions must agree with direct transitions, the
    quotient monomials must satisfy ``u0 + u2 = 2 u1`` and
    ``u1 + u3 = 3 u2`` and each tabulated chart expression of ``u_k`` must
    reproduce it.
    """
    charts = _CHARTS
    trans = {}
    for i, j in itertools.permutations(range(3), 2):
        trans[(i, j)] = _integral_inverse_times(charts[i].matrix, charts[j].matrix)
        if abs(trans[(i, j)].det()) != 1:
            raise AssertionError(f"transition V{i}->V{j} is not unimodular")
    if trans[(0, 1)] @ trans[(1, 2)] != trans[(0, 2)]:
        raise AssertionError("composed transition differs from the direct one")
    u = _QUOTIENT
    if tuple(a + b for a, b in zip(u[0], u[2])) != tuple(2 * x for x in u[1]):
        raise AssertionError("u0 u2 = u1^2 fails")
    if tuple(a + b for a, b in zip(u[1], u[3])) != tuple(3 * x for x in u[2]):
        raise AssertionError("u1 u3 = u2^3 fails")
    table = {}
    for k, per_chart in _QUOTIENT_TABLE.items():
        for c, exps in enumerate(per_chart):
            if charts[c].matrix @ exps != u[k]:
                raise AssertionError(f"u{k} in chart V{c} does not match")
            table[(k, c)] = exps
    curves = []
    for name, self_int, points in _CURVES:
        fixed = []
        for c, along, across in points:
            ch = charts[c]
            fixed.append({
                "chart": ch.name,
                "tangent": list(getattr(ch, along)),
                "transverse": list(getattr(ch, across)),
            })
        curves.append({"name": name, "self_intersection": self_int, "fixed_points": fixed})
    hj = hirzebruch_jung((5, 2))
    if [-c["self_intersection"] for c in curves] != hj:
        raise AssertionError("curve self-intersections disagree with the continued fraction")
    return ChartAtlas(charts, trans, u, table, tuple(curves))


def exceptional_fixed_points(atlas: ChartAtlas, abs_alpha: float, abs_beta: float) -> list[dict]:
    """Fixed points of ``(x, y) -> (alpha x, beta y)`` on each exceptional curve.

    Each curve carries two fixed points (the chart origins it passes
    through).  A fixed point is a saddle when its tangent and transverse
    multipliers lie on opposite sides of 1.
    """
    if not abs_alpha > 1 > abs_beta:
        raise ValueError("need |alpha| > 1 > |beta|")
    report = []
    for curve in atlas.curves:
        pts = []
        for fp in curve["fixed_points"]:
            tan = equivariant_multiplier(fp["tangent"])
            tr = equivariant_multiplier(fp["transverse"])
            tv, sv = tan.value(abs_alpha, abs_beta), tr.value(abs_alpha, abs_beta)
            pts.append({
                "chart": fp["chart"],
                "tangent_exponents": [tan.a, tan.b],
                "tangent_multiplier": tv,
                "transverse_exponents": [tr.a, tr.b],
                "transverse_multiplier": sv,
                "saddle": (tv < 1 < sv) or (sv < 1 < tv),
            })
        report.append({"curve": curve["name"], "count": len(pts), "fixed_points": pts})
    return report
