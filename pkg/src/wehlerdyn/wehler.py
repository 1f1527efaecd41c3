"""Wehler surfaces of degree (2,2,2) in P^1 x P^1 x P^1 and their involutions.

A surface is stored by its 27 coefficients ``A_ijk`` (exponent of x, y, z).
Points are triples of canonical :class:`~wehlerdyn.numcore.ProjPoint1`;
``[a:b]`` stands for the affine value ``a/b``, so the homogenization used
throughout is::

    P^(x0,x1,y0,y1,z0,z1) = sum A_ijk x1^i x0^(2-i) y1^j y0^(2-j) z1^k z0^(2-k)

with ``x1 = a`` and ``x0 = b``.  The involution ``sigma_i`` swaps the two
roots of the quadratic obtained by freezing the other two coordinates.
"""

from __future__ import annotations

import enum
import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import gmpy2

from .errors import (
    BadReduction,
    ContainedFiber,
    DegenerateFiber,
    FieldMismatch,
    NormalFormRequired,
    NotOnFiber,
    SingularAtV,
)
from .numcore import (
    INFINITY,
    ZERO,
    Matrix,
    Polynomial,
    ProjPoint1,
    as_rational,
    check_prime,
    normalize_proj,
    normalize_proj_fp,
)

Exponent = tuple[int, int, int]
ALL_EXPONENTS: tuple[Exponent, ...] = tuple(itertools.product(range(3), repeat=3))
CORNER_EXPONENTS: tuple[Exponent, ...] = tuple(itertools.product((0, 2), repeat=3))


# ---------------------------------------------------------------------------
# Surfaces and points
# ---------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class SurfacePoint:
    x: ProjPoint1
    y: ProjPoint1
    z: ProjPoint1
    p: int | None = None

    def __getitem__(self, axis: int) -> ProjPoint1:
        """Coordinate on ``axis`` (1, 2 or 3)."""
        return (self.x, self.y, self.z)[axis - 1]

    @property
    def coords(self) -> tuple[ProjPoint1, ProjPoint1, ProjPoint1]:
        return (self.x, self.y, self.z)

    def replace(self, axis: int, value: ProjPoint1) -> "SurfacePoint":
        c = list(self.coords)
        c[axis - 1] = value
        return SurfacePoint(*c, p=self.p)

    def sort_key(self) -> tuple:
        return (self.x.a, self.x.b, self.y.a, self.y.b, self.z.a, self.z.b)

    def to_json(self) -> list[list[int]]:
        return [[c.a, c.b] for c in self.coords]

    def __str__(self) -> str:
        return f"({self.x}, {self.y}, {self.z})"


def make_point(coords: Sequence, p: int | None = None) -> SurfacePoint:
    """Build a point from three ``(a, b)`` pairs, rationals or ``None`` (infinity)."""
    out = []
    for c in coords:
        if isinstance(c, ProjPoint1):
            a, b = c.a, c.b
        elif c is None:
            a, b = 1, 0
        elif isinstance(c, (tuple, list)):
            a, b = c
        else:
            q = as_rational(c)
            a, b = q.numerator, q.denominator
        out.append(normalize_proj(a, b) if p is None else normalize_proj_fp(a, b, p))
    return SurfacePoint(*out, p=p)


@dataclass(frozen=True)
class WehlerSurface:
    """A (2,2,2) surface over Q (``p is None``) or over ``F_p``.

    ``coeffs`` maps exponent triples to exact rationals; absent triples are
    zero.  Over ``F_p`` the coefficients are integers in ``[0, p)``.
    """

    coeffs: Mapping[Exponent, Fraction]
    p: int | None = None
    name: str = ""
    _grid: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        clean: dict[Exponent, Fraction] = {}
        for exp, c in self.coeffs.items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != 3 or any(e not in (0, 1, 2) for e in exp):
                raise ValueError(f"exponent triple {exp} outside {{0,1,2}}^3")
            c = as_rational(c)
            if self.p is not None:
                c = Fraction(c.numerator * pow(c.denominator, -1, self.p) % self.p)
            if c != 0:
                clean[exp] = c
        if not clean:
            raise ValueError("a Wehler surface needs a nonzero coefficient")
        if self.p is not None:
            check_prime(self.p)
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))
        object.__setattr__(self, "_grid", self._integer_grid())

    def _integer_grid(self) -> tuple:
        # integer multiple of the equation, indexed grid[i][j][k]
        if self.p is None:
            lcm = 1
            for c in self.coeffs.values():
                lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
            scaled = {e: int(c * lcm) for e, c in self.coeffs.items()}
        else:
            scaled = {e: int(c) for e, c in self.coeffs.items()}
        return tuple(tuple(tuple(scaled.get((i, j, k), 0) for k in range(3))
                           for j in range(3)) for i in range(3))

    @property
    def field_tag(self) -> str:
        return "Q" if self.p is None else f"F_{self.p}"

    def coeff(self, i: int, j: int, k: int) -> Fraction:
        return self.coeffs.get((i, j, k), Fraction(0))

    def integer_coeff(self, i: int, j: int, k: int) -> int:
        return self._grid[i][j][k]

    def reduce_mod(self, p: int) -> "WehlerSurface":
        """Reduction modulo ``p`` of the primitive integral equation."""
        if self.p is not None:
            raise FieldMismatch("surface is already over a finite field")
        check_prime(p)
        ints = {(i, j, k): self._grid[i][j][k] for (i, j, k) in ALL_EXPONENTS}
        g = 0
        for v in ints.values():
            g = math.gcd(g, v)
        reduced = {e: (v // g) % p for e, v in ints.items() if (v // g) % p}
        if not reduced:
            raise BadReduction(f"every coefficient vanishes modulo {p}")
        return WehlerSurface(reduced, p=p, name=f"{self.name} mod {p}".strip())

    def fiber_quadratic(self, axis: int, pt: SurfacePoint | Sequence[ProjPoint1]) -> tuple[int, int, int]:
        """Coefficients ``(A, B, C)`` of the quadratic in coordinate ``axis``.

        The other two coordinates are taken from ``pt``; the coordinate on
        ``axis`` itself is ignored.  Values are integers (reduced mod ``p``
        over a finite field).
        """
        coords = pt.coords if isinstance(pt, SurfacePoint) else tuple(pt)
        return _fiber_coeffs(self._grid, axis, coords, self.p)

    def is_coordinate_symmetric(self) -> bool:
        return all(self.coeff(*e) == self.coeff(*perm)
                   for e in ALL_EXPONENTS for perm in itertools.permutations(e))


def _monomials(pt: ProjPoint1, big: bool):
    a, b = (gmpy2.mpz(pt.a), gmpy2.mpz(pt.b)) if big else (int(pt.a), int(pt.b))
    # index j: a^j b^(2-j)
    return (b * b, a * b, a * a)


_BIG_BITS = 256


def _fiber_coeffs(grid, axis: int, coords, p: int | None) -> tuple[int, int, int]:
    others = [c for n, c in enumerate(coords, start=1) if n != axis]
    big = p is None and max(max(abs(c.a), c.b).bit_length() for c in others) > _BIG_BITS
    A, B, C = _fiber_coeffs_from(grid, axis, _monomials(others[0], big), _monomials(others[1], big))
    if p is not None:
        return int(A) % p, int(B) % p, int(C) % p
    return (A, B, C) if big else (int(A), int(B), int(C))


def coordinate_monomials(c: ProjPoint1):
    """``(b^2, ab, a^2)``, as gmpy2 integers for large coordinates."""
    return _monomials(c, max(abs(c.a), c.b).bit_length() > _BIG_BITS)


def _fiber_coeffs_from(grid, axis: int, U, V, powers=(2, 1, 0)) -> tuple:
    """Fiber quadratic from the monomials of the two other coordinates (in axis order).

    ``powers`` selects which coefficients to build (2 for ``A``, 1 for
    ``B``, 0 for ``C``).  Each costs three big products: the inner sums over
    ``V`` only multiply by small surface coefficients.
    """
    out = []
    for e in powers:
        acc = 0
        for j in range(3):
            inner = 0
            for k in range(3):
                if axis == 1:
                    c = grid[e][j][k]
                elif axis == 2:
                    c = grid[j][e][k]
                else:
                    c = grid[j][k][e]
                if c:
                    inner += c * V[k]
            if inner:
                acc += U[j] * inner
        out.append(acc)
    return tuple(out)


def _check_field(S: WehlerSurface, pt) -> tuple[ProjPoint1, ProjPoint1, ProjPoint1]:
    if isinstance(pt, SurfacePoint):
        if pt.p != S.p:
            raise FieldMismatch(f"point over {pt.p or 'Q'}, surface over {S.field_tag}")
        return pt.coords
    coords = tuple(pt)
    if S.p is not None and any(not (0 <= c.a < S.p and c.b in (0, 1)) for c in coords):
        raise FieldMismatch("coordinates are not canonical F_p representatives")
    return coords


def eval_surface(S: WehlerSurface, pt) -> Fraction | int:
    """Value of the homogenized equation at the given representatives.

    Over Q the exact rational coefficients are used; over ``F_p`` the value
    is an integer in ``[0, p)``.  Only the zero/nonzero verdict is
    independent of the representatives.
    """
    coords = _check_field(S, pt)
    mons = [_monomials(c, big=False) for c in coords]
    total = 0
    for (i, j, k), c in S.coeffs.items():
        total += c * mons[0][i] * mons[1][j] * mons[2][k]
    if S.p is not None:
        return int(total) % S.p
    return total


def on_surface(S: WehlerSurface, pt) -> bool:
    coords = _check_field(S, pt)
    A, B, C = _fiber_coeffs(S._grid, 1, coords, S.p)
    x = coords[0]
    val = A * x.a * x.a + B * x.a * x.b + C * x.b * x.b
    return (val % S.p if S.p is not None else val) == 0


# ---------------------------------------------------------------------------
# Vieta involutions
# ---------------------------------------------------------------------------

def _partner(A: int, B: int, C: int, root: ProjPoint1, p: int | None) -> ProjPoint1:
    x0, w0 = root.a, root.b
    if p is None and x0 and w0:
        # product of the roots: x0 | C and w0 | A exactly for a genuine root,
        # which strips most of the common factor before the gcd
        if isinstance(C, gmpy2.mpz) or isinstance(A, gmpy2.mpz):
            u, v = gmpy2.divexact(gmpy2.mpz(C), x0), gmpy2.divexact(gmpy2.mpz(A), w0)
        else:
            u, v = C // x0, A // w0
        if u or v:
            return normalize_proj(u, v)
    # other root from the sum of roots, in the chart W != 0
    u, v = -(A * x0 + B * w0), A * w0
    if p is not None:
        u, v = u % p, v % p
    if u == 0 and v == 0:
        # same, in the chart X != 0 (covers A = 0 with the root at infinity)
        u, v = C * x0, -(C * w0 + B * x0)
        if p is not None:
            u, v = u % p, v % p
        if u == 0 and v == 0:
            return root
    return normalize_proj(u, v) if p is None else normalize_proj_fp(u, v, p)


def vieta_partner(A, B, C, root: ProjPoint1, p: int | None = None) -> ProjPoint1:
    """The other root of ``A X^2 + B XW + C W^2`` given one root ``root``.

    A double root is returned unchanged.  ``p`` selects arithmetic modulo a
    prime; otherwise ``A``, ``B``, ``C`` are integers or rationals.
    """
    A, B, C = _integral_triple(A, B, C, p)
    if A == 0 and B == 0 and C == 0:
        raise DegenerateFiber("the fiber quadratic vanishes identically")
    val = A * root.a * root.a + B * root.a * root.b + C * root.b * root.b
    if (val % p if p is not None else val) != 0:
        raise NotOnFiber(f"{root} is not a root of ({A}, {B}, {C})")
    return _partner(A, B, C, root, p)


def _integral_triple(A, B, C, p):
    vals = [x.value if hasattr(x, "value") else x for x in (A, B, C)]
    if p is not None:
        return tuple(int(v) % p for v in vals)
    fr = [as_rational(v) for v in vals]
    lcm = 1
    for f in fr:
        lcm = lcm * f.denominator // math.gcd(lcm, f.denominator)
    return tuple(int(f * lcm) for f in fr)


def sigma(S: WehlerSurface, axis: int, pt: SurfacePoint, check: bool = True) -> SurfacePoint:
    """Apply the involution ``sigma_axis`` to a point of ``S``.

    The two other coordinates are kept; the coordinate on ``axis`` is
    replaced by its Vieta partner in the fiber.  ``check=False`` skips the
    on-surface test (used by the big-integer height pipelines).
    """
    if axis not in (1, 2, 3):
        raise ValueError("axis must be 1, 2 or 3")
    coords = _check_field(S, pt)
    A, B, C = _fiber_coeffs(S._grid, axis, coords, S.p)
    if A == 0 and B == 0 and C == 0:
        raise ContainedFiber(f"S contains the fiber of sigma_{axis} through {pt}")
    root = coords[axis - 1]
    if check:
        val = A * root.a * root.a + B * root.a * root.b + C * root.b * root.b
        if (val % S.p if S.p is not None else val) != 0:
            raise NotOnFiber(f"{pt} does not lie on {S.name or 'the surface'}")
    return pt.replace(axis, _partner(A, B, C, root, S.p))


def apply_word(S: WehlerSurface, word: Iterable[int], pt: SurfacePoint,
               check: bool = False) -> SurfacePoint:
    """Apply a word ``(i_n, ..., i_1)``: the rightmost involution acts first."""
    for axis in reversed(tuple(word)):
        pt = sigma(S, axis, pt, check=check)
    return pt


def no_contained_fiber_heuristic(S: WehlerSurface, samples: int = 64, seed: int = 0) -> bool:
    """Probabilistic guard: no sampled fiber is contained in ``S``.

    Draws ``samples`` random fibers for each projection and checks that the
    fiber quadratic is not identically zero.  Passing is evidence, not a
    proof, that ``S`` lies in the open set where all three involutions are
    defined everywhere.
    """
    rng = random.Random(f"wehlerdyn-fiber-guard-v1:{seed}")
    for _ in range(samples):
        for axis in (1, 2, 3):
            coords = []
            for _ in range(3):
                if S.p is None:
                    coords.append(normalize_proj(rng.randint(-50, 50), rng.randint(1, 50)))
                else:
                    coords.append(normalize_proj_fp(rng.randrange(S.p), 1, S.p))
            if _fiber_coeffs(S._grid, axis, coords, S.p) == (0, 0, 0):
                return False
    return True


def _sylvester22(p: Sequence, q: Sequence) -> int:
    """Resultant of two binary quadratics of formal degree 2 (coefficients low to high)."""
    p0, p1, p2 = p
    q0, q1, q2 = q
    return (p2 * q0 - p0 * q2) ** 2 - (p2 * q1 - p1 * q2) * (p1 * q0 - p0 * q1)


def _interpolate(xs: Sequence[int], ys: Sequence[int]) -> list[Fraction]:
    coeffs = [Fraction(0)] * len(xs)
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        if not yi:
            continue
        basis = Polynomial([1])
        denom = 1
        for j, xj in enumerate(xs):
            if j != i:
                basis = basis * Polynomial([-xj, 1])
                denom *= xi - xj
        for d, c in enumerate(basis.coeffs):
            coeffs[d] += Fraction(yi * c, denom)
    return coeffs


def _coefficient_resultants(S: WehlerSurface, axis: int) -> list[list[Fraction]]:
    """Pairwise resultants (in the first free coordinate) of the fiber-quadratic coefficients.

    Each is a binary form of formal degree 8 in the second free coordinate,
    built by interpolation and listed from low to high degree.
    """
    xs = list(range(-4, 5))
    res = []
    for a, b in ((0, 1), (0, 2), (1, 2)):
        ys = []
        for v in xs:
            fa = [_coeff_form_at(S._grid, axis, a, w, v) for w in (0, 1, 2)]
            fb = [_coeff_form_at(S._grid, axis, b, w, v) for w in (0, 1, 2)]
            ys.append(_sylvester22(fa, fb))
        res.append(_interpolate(xs, ys))
    return res


def fiber_containment_free(S: WehlerSurface) -> bool:
    """Exact certificate that no fiber of any projection lies on ``S``.

    For each axis the three coefficients of the fiber quadratic are binary
    forms in the remaining coordinates.  A contained fiber is a common zero
    of all three, so it forces a common root on P^1 of their pairwise
    resultants.  Returns ``True`` only when no such common root exists; a
    ``False`` may be a false alarm.
    """
    if S.p is not None:
        raise FieldMismatch("the certificate is implemented over Q only")
    return not any(_binary_forms_common_root(_coefficient_resultants(S, axis))
                   for axis in (1, 2, 3))


def _binary_resultant(f: Sequence, g: Sequence) -> int:
    """Resultant of two integral binary forms of formal degrees ``len - 1``."""
    m, n = len(f) - 1, len(g) - 1
    fr, gr = [int(c) for c in reversed(f)], [int(c) for c in reversed(g)]
    rows = [[0] * i + fr + [0] * (n - 1 - i) for i in range(n)]
    rows += [[0] * i + gr + [0] * (m - 1 - i) for i in range(m)]
    return int(Matrix(rows).det())


def fiber_content_bound(S: WehlerSurface, axis: int) -> int:
    """A positive integer divisible by ``gcd(A, B, C)`` at every point, or 0.

    At reduced coordinates the content of the fiber quadratic divides each
    pairwise resultant of its coefficients, and the gcd of two such values
    divides the resultant of the two forms.  Returns 0 when every such
    resultant vanishes (no bound available).
    """
    forms = _coefficient_resultants(S, axis)
    if any(Fraction(c).denominator != 1 for f in forms for c in f):
        raise AssertionError("interpolated resultant is not integral")
    D = 0
    for i, j in ((0, 1), (0, 2), (1, 2)):
        D = math.gcd(D, _binary_resultant(forms[i], forms[j]))
    return abs(D)


def _coeff_form_at(grid, axis: int, e: int, j: int, v: int) -> int:
    """Coefficient of ``u^j`` in the ``t^e`` coefficient, at second free coordinate ``v``."""
    idx = [0, 0, 0]
    idx[axis - 1] = e
    free = [n for n in range(3) if n != axis - 1]
    acc = 0
    for k in range(3):
        idx[free[0]], idx[free[1]] = j, k
        acc += grid[idx[0]][idx[1]][idx[2]] * v ** k
    return acc


# ---------------------------------------------------------------------------
# Orbit-8 family
# ---------------------------------------------------------------------------

FREE_EXPONENTS: tuple[Exponent, ...] = tuple(e for e in ALL_EXPONENTS if e not in CORNER_EXPONENTS)

V_POINTS: tuple[SurfacePoint, ...] = tuple(
    SurfacePoint(*(INFINITY if e == 2 else ZERO for e in corner)) for corner in CORNER_EXPONENTS
)


def corner_guard_triples(corner: Exponent) -> tuple[Exponent, Exponent, Exponent]:
    """Exponents of the three linear terms of the local equation at a corner of V.

    A corner is given by its exponent pattern in ``{0, 2}^3`` (2 means the
    coordinate is infinity); the tangent terms move one index to 1.
    """
    out = []
    for axis in range(3):
        e = list(corner)
        e[axis] = 1
        out.append(tuple(e))
    return tuple(out)


def orbit8_family(free: Mapping[Exponent, object], name: str = "orbit8") -> WehlerSurface:
    """Surface through ``V = {0, inf}^3`` with the given free coefficients.

    The eight coefficients indexed by ``{0, 2}^3`` are forced to zero; every
    corner of V must keep a nonzero linear term, otherwise the surface is
    singular there and :class:`SingularAtV` is raised.
    """
    coeffs = {}
    for exp, c in free.items():
        exp = tuple(exp)
        c = as_rational(c)
        if exp in CORNER_EXPONENTS:
            if c != 0:
                raise ValueError(f"A{exp} is forced to vanish for V to lie on the surface")
            continue
        coeffs[exp] = c
    for corner in CORNER_EXPONENTS:
        if all(coeffs.get(t, 0) == 0 for t in corner_guard_triples(corner)):
            raise SingularAtV(f"the corner {corner} of V is a singular point")
    return WehlerSurface(coeffs, name=name)


# ---------------------------------------------------------------------------
# (2,2) curves
# ---------------------------------------------------------------------------

class Smoothness(enum.Enum):
    SMOOTH = "Smooth"
    SINGULAR_AFFINE = "SingularAffine"
    SINGULAR_AT_INFINITY = "SingularAtInfinity"
    UNDETERMINED = "Undetermined"


@dataclass(frozen=True)
class BiQuadraticCurve:
    """A curve of bidegree (2,2) in P^1 x P^1, ``coeffs[(i, j)]`` for ``x^i y^j``."""

    coeffs: Mapping[tuple[int, int], Fraction]

    def __post_init__(self):
        clean = {}
        for (i, j), c in self.coeffs.items():
            if i not in (0, 1, 2) or j not in (0, 1, 2):
                raise ValueError(f"exponent {(i, j)} outside {{0,1,2}}^2")
            c = as_rational(c)
            if c:
                clean[(i, j)] = c
        if not clean:
            raise ValueError("all coefficients vanish")
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))

    @classmethod
    def normal_form(cls, alpha, beta, gamma, delta, eps) -> "BiQuadraticCurve":
        """``alpha x^2y^2 + beta x^2y + gamma xy^2 + delta xy + eps (x + y)``."""
        return cls({(2, 2): alpha, (2, 1): beta, (1, 2): gamma, (1, 1): delta,
                    (1, 0): eps, (0, 1): eps})

    def coeff(self, i: int, j: int) -> Fraction:
        return self.coeffs.get((i, j), Fraction(0))

    @property
    def normal_params(self) -> tuple[Fraction, ...] | None:
        if any(self.coeff(*e) for e in ((2, 0), (0, 2), (0, 0))):
            return None
        if self.coeff(1, 0) != self.coeff(0, 1):
            return None
        return (self.coeff(2, 2), self.coeff(2, 1), self.coeff(1, 2),
                self.coeff(1, 1), self.coeff(1, 0))

    def fiber_quadratic(self, axis: int, other: ProjPoint1) -> tuple[Fraction, Fraction, Fraction]:
        """Quadratic in coordinate ``axis`` (1 = x, 2 = y) with the other coordinate fixed."""
        mons = _monomials(other, big=False)
        out = []
        for e in (2, 1, 0):
            if axis == 1:
                out.append(sum(self.coeff(e, j) * mons[j] for j in range(3)))
            else:
                out.append(sum(self.coeff(i, e) * mons[i] for i in range(3)))
        return tuple(out)

    def contains(self, pt: tuple[ProjPoint1, ProjPoint1]) -> bool:
        A, B, C = self.fiber_quadratic(1, pt[1])
        x = pt[0]
        return A * x.a * x.a + B * x.a * x.b + C * x.b * x.b == 0


def _require_normal_form(curve: BiQuadraticCurve) -> tuple[Fraction, ...]:
    params = curve.normal_params
    if params is None:
        raise NormalFormRequired("curve is not in the five-parameter normal form")
    return params


def curve_sigma(curve: BiQuadraticCurve, axis: int,
                pt: tuple[ProjPoint1, ProjPoint1]) -> tuple[ProjPoint1, ProjPoint1]:
    """Involution of the curve changing coordinate ``axis`` (1 = x, 2 = y)."""
    other = pt[1] if axis == 1 else pt[0]
    A, B, C = _integral_triple(*curve.fiber_quadratic(axis, other), None)
    if A == 0 and B == 0 and C == 0:
        raise DegenerateFiber(f"the curve contains the fiber through {other}")
    new = vieta_partner(A, B, C, pt[axis - 1])
    return (new, pt[1]) if axis == 1 else (pt[0], new)


def curve_translation(curve: BiQuadraticCurve,
                      pt: tuple[ProjPoint1, ProjPoint1]) -> tuple[ProjPoint1, ProjPoint1]:
    """``f = sigma_1 o sigma_2`` on the curve (``sigma_2`` first)."""
    return curve_sigma(curve, 1, curve_sigma(curve, 2, pt))


def period2_test(curve: BiQuadraticCurve) -> tuple[bool, tuple[ProjPoint1, ProjPoint1]]:
    """Whether ``f^2`` fixes ``(0, inf)``, together with ``f^2(0, inf)``."""
    params = _require_normal_form(curve)
    if params[4] == 0:
        raise NormalFormRequired("epsilon must be nonzero")
    start = (ZERO, INFINITY)
    image = curve_translation(curve, curve_translation(curve, start))
    return image == start, image


def fiber_discriminant(curve: BiQuadraticCurve) -> tuple[Fraction, ...]:
    """Coefficients ``(a, b, c, d, e)`` of the discriminant in x, a quartic in y.

    The curve is read as ``(alpha y^2 + beta y) x^2 + (gamma y^2 + delta y
    + eps) x + eps y`` and the discriminant is
    ``(gamma y^2 + delta y + eps)^2 - 4 (alpha y^2 + beta y) eps y``.
    """
    alpha, beta, gamma, delta, eps = _require_normal_form(curve)
    return (
        gamma * gamma,
        2 * gamma * delta - 4 * alpha * eps,
        delta * delta + 2 * gamma * eps - 4 * beta * eps,
        2 * delta * eps,
        eps * eps,
    )


def _singular_at_infinity(curve: BiQuadraticCurve) -> bool:
    """Exact test for a singular point with ``x = inf`` or ``y = inf``.

    At ``x = inf`` the local equation is ``g0(y) + x0 g1(y) + x0^2 g2(y)``
    and a singular point is a common root of ``g0``, ``g1`` and both
    partials of the binary form ``g0``.  Same for ``y = inf``.
    """
    for axis in (1, 2):
        def c(e, f):
            return curve.coeff(e, f) if axis == 1 else curve.coeff(f, e)
        g0 = [c(2, j) for j in range(3)]
        g1 = [c(1, j) for j in range(3)]
        d1 = [g0[1], 2 * g0[2]]
        d0 = [2 * g0[0], g0[1]]
        if _binary_forms_common_root([g0, g1, d1, d0]):
            return True
    return False


def _binary_forms_common_root(forms: list[list[Fraction]]) -> bool:
    """Common root on P^1 of binary forms given with their own degrees."""
    forms = [f for f in forms if any(f)]
    if not forms:
        return True
    # root at infinity: the top-degree coefficient of every form vanishes
    if all(f[-1] == 0 for f in forms):
        return True
    g = Polynomial(forms[0])
    for f in forms[1:]:
        g = g.gcd(Polynomial(f))
        if g.degree <= 0:
            return False
    return g.degree > 0


def _affine_singular_points(curve: BiQuadraticCurve) -> list[tuple[Fraction, Fraction]]:
    """Rational affine singular points lying over rational multiple roots of the discriminant."""
    disc = Polynomial(reversed(fiber_discriminant(curve)))
    if disc.is_zero:
        return []
    multiple = disc.gcd(disc.derivative())
    found = []
    for y in multiple.rational_roots() if multiple.degree > 0 else []:
        A, B, C = curve.fiber_quadratic(1, normalize_proj(y.numerator, y.denominator))
        candidates = []
        if A != 0:
            candidates.append(-B / (2 * A))
        elif B != 0:
            candidates.append(-C / B)
        for x in candidates:
            if _is_affine_singular(curve, x, y):
                found.append((x, y))
    return found


def _is_affine_singular(curve: BiQuadraticCurve, x: Fraction, y: Fraction) -> bool:
    P = sum(c * x**i * y**j for (i, j), c in curve.coeffs.items())
    Px = sum(c * i * x**(i - 1) * y**j for (i, j), c in curve.coeffs.items() if i)
    Py = sum(c * j * x**i * y**(j - 1) for (i, j), c in curve.coeffs.items() if j)
    return P == 0 and Px == 0 and Py == 0


def smooth_biquadratic_check(curve: BiQuadraticCurve) -> Smoothness:
    """Smoothness verdict for a curve in normal form with ``eps != 0``.

    Points at infinity are decided exactly.  In the affine chart a
    squarefree discriminant certifies smoothness; a multiple root yields
    ``SingularAffine`` only when a rational singular point is exhibited and
    ``Undetermined`` otherwise.
    """
    alpha, beta, gamma, delta, eps = _require_normal_form(curve)
    if eps == 0:
        raise NormalFormRequired("epsilon must be nonzero")
    if alpha == beta == gamma == 0 or _singular_at_infinity(curve):
        return Smoothness.SINGULAR_AT_INFINITY
    disc = Polynomial(reversed(fiber_discriminant(curve)))
    if disc.is_squarefree():
        return Smoothness.SMOOTH
    if _affine_singular_points(curve):
        return Smoothness.SINGULAR_AFFINE
    return Smoothness.UNDETERMINED
