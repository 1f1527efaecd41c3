"""Exact numeric substrate.

Big rationals are :class:`fractions.Fraction`; projective points, finite
field helpers, exact polynomials and matrices live here, together with a
spectral radius routine that returns a certified error bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Union

import gmpy2
import mpmath

from .errors import DegenerateFiber, NonConvergence, ZeroVector

Rational = Fraction
Exact = Union[int, Fraction]

MAX_PRIME = 2**31


def as_rational(value) -> Fraction:
    """Coerce an int, Fraction or decimal string (``"3/4"`` allowed)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, gmpy2.mpz)):
        return Fraction(int(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


# ---------------------------------------------------------------------------
# Projective line
# ---------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class ProjPoint1:
    """A point ``[a:b]`` of the projective line in canonical form.

    Over the rationals ``gcd(a, b) = 1`` and ``b > 0``, or ``[1:0]`` for the
    point at infinity.  Over ``F_p`` the representative is ``[a:1]`` with
    ``0 <= a < p`` or ``[1:0]``.  Equal points therefore compare equal
    field by field and can be used as dictionary keys.
    """

    a: int
    b: int

    @property
    def is_infinity(self) -> bool:
        return self.b == 0

    def affine(self) -> Fraction | None:
        """The affine coordinate ``a/b``, or ``None`` at infinity."""
        if self.b == 0:
            return None
        return Fraction(self.a, self.b)

    def __str__(self) -> str:
        return f"[{self.a}:{self.b}]"


INFINITY = ProjPoint1(1, 0)
ZERO = ProjPoint1(0, 1)


_MPZ_BITS = 2000


def normalize_proj(a: int, b: int) -> ProjPoint1:
    """Canonical point ``[a:b]``.

    Coordinates above a few thousand bits are kept as ``gmpy2.mpz`` (they
    compare and hash like ints); CPython's own long division is quadratic
    and would dominate the height pipelines.
    """
    if isinstance(a, gmpy2.mpz) or isinstance(b, gmpy2.mpz) \
            or max(abs(a), abs(b)).bit_length() > _MPZ_BITS:
        a, b = gmpy2.mpz(a), gmpy2.mpz(b)
        if a == 0 and b == 0:
            raise ZeroVector("(0, 0) is not a point of P^1")
        if b == 0:
            return INFINITY
        if a == 0:
            return ZERO
        g = gmpy2.gcd(a, b)
        if g != 1:
            a = gmpy2.divexact(a, g)
            b = gmpy2.divexact(b, g)
        if b < 0:
            a, b = -a, -b
        if max(abs(a), b).bit_length() <= _MPZ_BITS:
            return ProjPoint1(int(a), int(b))
        return ProjPoint1(a, b)
    a, b = int(a), int(b)
    if a == 0 and b == 0:
        raise ZeroVector("(0, 0) is not a point of P^1")
    if b == 0:
        return INFINITY
    if a == 0:
        return ZERO
    g = math.gcd(a, b)
    if g != 1:
        a //= g
        b //= g
    if b < 0:
        a, b = -a, -b
    return ProjPoint1(a, b)


def log_abs(n) -> float:
    """``log |n|`` for integers of any size (``n != 0``)."""
    n = abs(n)
    bits = n.bit_length()
    if bits < 1000:
        return math.log(int(n))
    shift = bits - 64
    return math.log(int(n >> shift)) + shift * math.log(2)


def normalize_proj_bounded(a: int, b: int, bound: int) -> ProjPoint1:
    """Canonical ``[a:b]`` when ``gcd(a, b)`` is known to divide ``bound``.

    Reducing ``a`` modulo ``bound`` first replaces the big-integer gcd by a
    linear-time remainder.  ``bound = 0`` means no bound is known.
    """
    if not bound or a == 0 or b == 0:
        return normalize_proj(a, b)
    g = math.gcd(bound, int(a % bound))
    if g > 1:
        g = math.gcd(g, int(b % g))
    if g > 1:
        big = isinstance(a, gmpy2.mpz) or isinstance(b, gmpy2.mpz)
        a, b = (gmpy2.divexact(a, g), gmpy2.divexact(b, g)) if big else (a // g, b // g)
    if b < 0:
        a, b = -a, -b
    if isinstance(a, gmpy2.mpz) and max(abs(a), b).bit_length() <= _MPZ_BITS:
        a, b = int(a), int(b)
    elif not isinstance(a, gmpy2.mpz) and max(abs(a), abs(b)).bit_length() > _MPZ_BITS:
        a, b = gmpy2.mpz(a), gmpy2.mpz(b)
    return ProjPoint1(a, b)


def normalize_proj_fp(a: int, b: int, p: int) -> ProjPoint1:
    a %= p
    b %= p
    if a == 0 and b == 0:
        raise ZeroVector("(0, 0) is not a point of P^1(F_p)")
    if b == 0:
        return INFINITY
    return ProjPoint1(a * pow(b, -1, p) % p, 1)


def proj_line_fp(p: int) -> list[ProjPoint1]:
    """All ``p + 1`` points of ``P^1(F_p)``, finite points first."""
    return [ProjPoint1(a, 1) for a in range(p)] + [INFINITY]


# ---------------------------------------------------------------------------
# Finite fields
# ---------------------------------------------------------------------------

def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return bool(gmpy2.is_prime(n, 50))


def check_prime(p: int) -> int:
    p = int(p)
    if not is_prime(p) or p >= MAX_PRIME:
        raise ValueError(f"{p} is not a prime below 2^31")
    return p


@dataclass(frozen=True)
class FpElem:
    value: int
    p: int

    def __post_init__(self):
        object.__setattr__(self, "value", self.value % self.p)

    def _coerce(self, other) -> int:
        if isinstance(other, FpElem):
            if other.p != self.p:
                raise ValueError("elements of different prime fields")
            return other.value
        return int(other)

    def __add__(self, other):
        return FpElem(self.value + self._coerce(other), self.p)

    __radd__ = __add__

    def __sub__(self, other):
        return FpElem(self.value - self._coerce(other), self.p)

    def __rsub__(self, other):
        return FpElem(self._coerce(other) - self.value, self.p)

    def __mul__(self, other):
        return FpElem(self.value * self._coerce(other), self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return FpElem(-self.value, self.p)

    def inverse(self) -> "FpElem":
        if self.value == 0:
            raise ZeroDivisionError("0 has no inverse in F_p")
        return FpElem(pow(self.value, -1, self.p), self.p)

    def __truediv__(self, other):
        return self * FpElem(self._coerce(other), self.p).inverse()

    def __int__(self) -> int:
        return self.value

    def __bool__(self) -> bool:
        return self.value != 0


@lru_cache(maxsize=None)
def smallest_nonresidue(p: int) -> int:
    for c in range(2, p):
        if pow(c, (p - 1) // 2, p) == p - 1:
            return c
    raise ValueError(f"no quadratic non-residue mod {p}")


def legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def sqrt_mod(a: int, p: int) -> int | None:
    """Square root of ``a`` modulo an odd prime ``p`` (Tonelli-Shanks).

    The non-residue is always the smallest one, so the root returned is
    reproducible.  Returns the smaller of the two roots, or ``None`` when
    ``a`` is a non-residue.
    """
    a %= p
    if a == 0:
        return 0
    if p == 2:
        return a
    if legendre(a, p) != 1:
        return None
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    if s == 1:
        r = pow(a, (p + 1) // 4, p)
        return min(r, p - r)
    z = smallest_nonresidue(p)
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return min(r, p - r)


def _fp_value(x, p: int) -> int:
    return x.value if isinstance(x, FpElem) else int(x) % p


def quad_roots_fp(A, B, C, p: int | None = None) -> dict[ProjPoint1, int]:
    """Roots of ``A X^2 + B XW + C W^2`` on ``P^1(F_p)`` with multiplicities.

    ``A``, ``B``, ``C`` may be :class:`FpElem` (then ``p`` is read off them)
    or plain integers together with ``p``.  The result maps each root to its
    multiplicity and is ordered by the canonical point order.
    """
    if p is None:
        p = next(x.p for x in (A, B, C) if isinstance(x, FpElem))
    A, B, C = (_fp_value(x, p) for x in (A, B, C))
    if A == 0 and B == 0 and C == 0:
        raise DegenerateFiber("A = B = C = 0: every point of P^1 is a root")

    roots: dict[ProjPoint1, int] = {}
    if A == 0:
        # W * (B X + C W)
        if B == 0:
            roots[INFINITY] = 2
        else:
            roots[INFINITY] = 1
            finite = normalize_proj_fp(-C, B, p)
            roots[finite] = roots.get(finite, 0) + 1
    elif p == 2:
        found = [x for x in range(2) if (A * x * x + B * x + C) % 2 == 0]
        if len(found) == 1:
            # x^2 + x + 1 has no roots; a single root here is a double one
            roots[ProjPoint1(found[0], 1)] = 2
        for x in found if len(found) == 2 else []:
            roots[ProjPoint1(x, 1)] = 1
    else:
        disc = (B * B - 4 * A * C) % p
        inv2a = pow(2 * A, -1, p)
        if disc == 0:
            roots[ProjPoint1((-B * inv2a) % p, 1)] = 2
        else:
            s = sqrt_mod(disc, p)
            if s is not None:
                for r in ((-B + s) * inv2a % p, (-B - s) * inv2a % p):
                    roots[ProjPoint1(r, 1)] = 1
    return dict(sorted(roots.items()))


# ---------------------------------------------------------------------------
# Polynomials
# ---------------------------------------------------------------------------

def _trim(coeffs: Iterable[Exact]) -> tuple:
    out = list(coeffs)
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


@dataclass(frozen=True)
class Polynomial:
    """Exact univariate polynomial, coefficients lowest degree first.

    Coefficients are ints (an ``IntPolynomial``) or Fractions.  The zero
    polynomial has an empty coefficient tuple.
    """

    coeffs: tuple

    def __init__(self, coeffs: Iterable[Exact]):
        normalized = []
        for c in coeffs:
            c = as_rational(c) if not isinstance(c, int) else c
            if isinstance(c, Fraction) and c.denominator == 1:
                c = c.numerator
            normalized.append(c)
        object.__setattr__(self, "coeffs", _trim(normalized))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> Exact:
        return self.coeffs[-1] if self.coeffs else 0

    @property
    def is_integral(self) -> bool:
        return all(isinstance(c, int) for c in self.coeffs)

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.coeffs == other.coeffs
        if isinstance(other, (list, tuple)):
            return self.coeffs == _trim(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return Polynomial(x + y for x, y in zip(a, b))

    def __neg__(self) -> "Polynomial":
        return Polynomial(-c for c in self.coeffs)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other) -> "Polynomial":
        if not isinstance(other, Polynomial):
            return Polynomial(c * other for c in self.coeffs)
        if self.is_zero or other.is_zero:
            return Polynomial(())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return Polynomial(out)

    __rmul__ = __mul__

    def derivative(self) -> "Polynomial":
        return Polynomial(i * c for i, c in enumerate(self.coeffs) if i)

    def divmod(self, other: "Polynomial") -> tuple["Polynomial", "Polynomial"]:
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        rem = [Fraction(c) for c in self.coeffs]
        q = [Fraction(0)] * max(len(rem) - other.degree, 1)
        lead = Fraction(other.leading)
        while len(rem) - 1 >= other.degree and any(rem):
            shift = len(rem) - 1 - other.degree
            coef = rem[-1] / lead
            q[shift] = coef
            for i, c in enumerate(other.coeffs):
                rem[i + shift] -= coef * c
            rem.pop()
            while rem and rem[-1] == 0:
                rem.pop()
        return Polynomial(q), Polynomial(rem)

    def monic(self) -> "Polynomial":
        lead = Fraction(self.leading)
        return Polynomial(Fraction(c) / lead for c in self.coeffs)

    def gcd(self, other: "Polynomial") -> "Polynomial":
        """Monic gcd over the rationals (zero if both are zero)."""
        a, b = self, other
        while not b.is_zero:
            a, b = b, a.divmod(b)[1]
        return a.monic() if not a.is_zero else a

    def is_squarefree(self) -> bool:
        if self.degree <= 0:
            return not self.is_zero
        return self.gcd(self.derivative()).degree == 0

    def squarefree_part(self) -> "Polynomial":
        g = self.gcd(self.derivative())
        return self.divmod(g)[0].monic() if g.degree > 0 else self.monic()

    def rational_roots(self) -> list[Fraction]:
        """All distinct rational roots (rational root theorem on the primitive part)."""
        if self.is_zero:
            raise ValueError("the zero polynomial has every number as a root")
        coeffs = [Fraction(c) for c in self.coeffs]
        roots = set()
        while coeffs and coeffs[0] == 0:
            roots.add(Fraction(0))
            coeffs.pop(0)
        if len(coeffs) <= 1:
            return sorted(roots)
        lcm = 1
        for c in coeffs:
            lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
        ints = [int(c * lcm) for c in coeffs]
        reduced = Polynomial(ints)
        for p_ in _divisors(abs(ints[0])):
            for q_ in _divisors(abs(ints[-1])):
                for sign in (1, -1):
                    r = Fraction(sign * p_, q_)
                    if reduced(r) == 0:
                        roots.add(r)
        return sorted(roots)

    def __repr__(self) -> str:
        return f"Polynomial({list(self.coeffs)})"


IntPolynomial = Polynomial


def _divisors(n: int) -> list[int]:
    if n == 0:
        return [0]
    small, large = [], []
    i = 1
    while i * i <= n:
        if n % i == 0:
            small.append(i)
            if i * i != n:
                large.append(n // i)
        i += 1
    return small + large[::-1]


@lru_cache(maxsize=None)
def cyclotomic(n: int) -> Polynomial:
    """The n-th cyclotomic polynomial."""
    poly = Polynomial([-1] + [0] * (n - 1) + [1])
    for d in range(1, n):
        if n % d == 0:
            poly = poly.divmod(cyclotomic(d))[0]
    return poly


def _max_cyclotomic_index(degree: int) -> int:
    # phi(n) >= sqrt(n / 2), so phi(n) <= degree forces n <= 2 degree^2
    return max(2, 2 * degree * degree)


def cyclotomic_factorization(poly: Polynomial) -> list[int] | None:
    """Indices ``n`` (with repetition) such that ``poly = prod Phi_n``.

    Returns ``None`` when ``poly`` is not a product of cyclotomic
    polynomials.  ``poly`` must be monic with integer coefficients.
    """
    if poly.is_zero or poly.leading != 1 or not poly.is_integral:
        return None
    rest, indices = poly, []
    bound = _max_cyclotomic_index(poly.degree)
    n = 1
    while rest.degree > 0 and n <= bound:
        q, r = rest.divmod(cyclotomic(n))
        if r.is_zero:
            indices.append(n)
            rest = q
        else:
            n += 1
    if rest.degree != 0 or rest.leading != 1:
        return None
    return indices


# ---------------------------------------------------------------------------
# Sturm sequences and certified real roots
# ---------------------------------------------------------------------------

def sturm_sequence(poly: Polynomial) -> list[Polynomial]:
    seq = [poly, poly.derivative()]
    while not seq[-1].is_zero and seq[-1].degree > 0:
        seq.append(-(seq[-2].divmod(seq[-1])[1]))
    if seq[-1].is_zero:
        seq.pop()
    return seq


def _sign_changes(values: Sequence) -> int:
    signs = [v > 0 for v in values if v != 0]
    return sum(1 for s, t in zip(signs, signs[1:]) if s != t)


def count_real_roots(seq: list[Polynomial], lo: Fraction, hi: Fraction) -> int:
    """Distinct real roots in the half-open interval ``(lo, hi]``."""
    return _sign_changes([p(lo) for p in seq]) - _sign_changes([p(hi) for p in seq])


def root_bound(poly: Polynomial) -> Fraction:
    """Cauchy bound: every complex root has modulus below this value."""
    lead = abs(Fraction(poly.leading))
    return 1 + max((abs(Fraction(c)) / lead for c in poly.coeffs[:-1]), default=0)


def isolate_real_root(poly: Polynomial, approx: float, tol: Fraction,
                      max_iter: int = 400) -> tuple[Fraction, Fraction]:
    """Exact interval ``(lo, hi]`` of width ``<= tol`` around one real root.

    The starting interval is grown around ``approx`` until it holds exactly
    one distinct root, then halved by Sturm counts.
    """
    seq = sturm_sequence(poly.squarefree_part())
    center = Fraction(approx).limit_denominator(10**12)
    radius = Fraction(1, 2**20)
    bound = root_bound(poly)
    for _ in range(max_iter):
        lo, hi = center - radius, center + radius
        n = count_real_roots(seq, lo, hi)
        if n == 1:
            break
        if n == 0:
            radius *= 2
            if radius > 2 * bound:
                raise NonConvergence(f"no real root near {approx}")
        else:
            radius /= 2
    else:
        raise NonConvergence(f"could not isolate a real root near {approx}")
    for _ in range(max_iter):
        if hi - lo <= tol:
            return lo, hi
        mid = (lo + hi) / 2
        if count_real_roots(seq, lo, mid) == 1:
            hi = mid
        else:
            lo = mid
    raise NonConvergence("bisection budget exhausted")


def _mp_roots(poly: Polynomial, dps: int):
    with mpmath.workdps(dps):
        coeffs = [mpmath.mpf(Fraction(c).numerator) / Fraction(c).denominator
                  for c in reversed(poly.coeffs)]
        roots = mpmath.polyroots(coeffs, maxsteps=400, extraprec=4 * dps)
        n = poly.degree
        dpoly = poly.derivative()
        out = []
        for z in roots:
            num = abs(mpmath.polyval(coeffs, z))
            den = abs(mpmath.polyval(
                [mpmath.mpf(Fraction(c).numerator) / Fraction(c).denominator
                 for c in reversed(dpoly.coeffs)], z))
            # a disc of radius n|p(z)/p'(z)| about z always holds a root
            radius = n * num / den if den != 0 else mpmath.inf
            out.append((complex(z), float(radius)))
        return out


def spectral_radius(M: "Matrix", tol: float = 1e-12,
                    max_rounds: int = 6) -> tuple[float, float]:
    """Spectral radius with a certified error bound.

    Returns ``(radius, error)`` with ``error <= tol``.  A characteristic
    polynomial made of cyclotomic factors gives ``(1.0, 0.0)`` exactly.  A
    real dominant root is enclosed by Sturm bisection on exact rationals;
    a complex dominant pair is bounded by the a posteriori disc
    ``n |p(z)/p'(z)|``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    cp = charpoly(M)
    if cp.is_integral and cyclotomic_factorization(cp) is not None:
        return 1.0, 0.0
    dps = 30
    for _ in range(max_rounds):
        roots = _mp_roots(cp, dps)
        best_z, best_r = max(roots, key=lambda zr: abs(zr[0]))
        if best_r <= tol / 4:
            break
        dps *= 2
    else:
        raise NonConvergence("root refinement did not reach the requested tolerance")
    modulus = abs(best_z)
    if abs(best_z.imag) <= max(best_r, 1e-12 * max(1.0, modulus)):
        sqf = cp.squarefree_part()
        try:
            lo, hi = isolate_real_root(sqf, best_z.real, Fraction(tol))
        except NonConvergence:
            lo = hi = None
        if lo is not None:
            exact = abs((lo + hi) / 2)
            radius = float(exact)
            return radius, float((hi - lo) / 2 + abs(Fraction(radius) - exact))
    return float(modulus), float(best_r)


# ---------------------------------------------------------------------------
# Exact matrices
# ---------------------------------------------------------------------------

class Matrix:
    """Square or rectangular matrix with exact (int or Fraction) entries.

    Immutable; entries are stored as a tuple of row tuples so matrices can
    be hashed and compared.
    """

    __slots__ = ("rows",)

    def __init__(self, rows: Iterable[Iterable[Exact]]):
        norm = []
        for row in rows:
            r = []
            for x in row:
                if isinstance(x, Fraction):
                    x = x.numerator if x.denominator == 1 else x
                elif not isinstance(x, int):
                    x = as_rational(x) if isinstance(x, str) else int(x)
                r.append(x)
            norm.append(tuple(r))
        if len({len(r) for r in norm}) > 1:
            raise ValueError("ragged matrix")
        object.__setattr__(self, "rows", tuple(norm))

    def __setattr__(self, key, value):
        raise AttributeError("Matrix is immutable")

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, n: int, m: int | None = None) -> "Matrix":
        return cls([[0] * (n if m is None else m) for _ in range(n)])

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.rows[0]) if self.rows else 0

    @property
    def n(self) -> int:
        return len(self.rows)

    @property
    def is_integral(self) -> bool:
        return all(isinstance(x, int) for row in self.rows for x in row)

    def __getitem__(self, idx):
        i, j = idx
        return self.rows[i][j]

    def __eq__(self, other) -> bool:
        if isinstance(other, Matrix):
            return self.rows == other.rows
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.rows)

    def __repr__(self) -> str:
        return f"Matrix({[list(r) for r in self.rows]})"

    def tolist(self) -> list[list]:
        return [list(r) for r in self.rows]

    @property
    def T(self) -> "Matrix":
        return Matrix(zip(*self.rows))

    def __add__(self, other: "Matrix") -> "Matrix":
        return Matrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other: "Matrix") -> "Matrix":
        return Matrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self) -> "Matrix":
        return Matrix([[-a for a in r] for r in self.rows])

    def scale(self, c: Exact) -> "Matrix":
        return Matrix([[c * a for a in r] for r in self.rows])

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            cols = list(zip(*other.rows))
            return Matrix([[sum(a * b for a, b in zip(r, c)) for c in cols] for r in self.rows])
        # vector
        return tuple(sum(a * b for a, b in zip(r, other)) for r in self.rows)

    def __pow__(self, k: int) -> "Matrix":
        if k < 0:
            return self.inverse() ** (-k)
        result, base = Matrix.identity(self.n), self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def trace(self) -> Exact:
        return sum(self.rows[i][i] for i in range(self.n))

    def det(self) -> Exact:
        """Determinant by fraction-free Bareiss elimination."""
        n = self.n
        if n == 0:
            return 1
        if not self.is_integral:
            return _det_fraction(self)
        a = [list(r) for r in self.rows]
        sign, prev = 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
                if swap is None:
                    return 0
                a[k], a[swap] = a[swap], a[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1]

    def inverse(self) -> "Matrix":
        n = self.n
        aug = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)]
               for i, r in enumerate(self.rows)]
        for col in range(n):
            piv = next((i for i in range(col, n) if aug[i][col] != 0), None)
            if piv is None:
                raise ZeroDivisionError("singular matrix")
            aug[col], aug[piv] = aug[piv], aug[col]
            inv = 1 / aug[col][col]
            aug[col] = [x * inv for x in aug[col]]
            for i in range(n):
                if i != col and aug[i][col] != 0:
                    f = aug[i][col]
                    aug[i] = [x - f * y for x, y in zip(aug[i], aug[col])]
        return Matrix([r[n:] for r in aug])

    def to_float(self):
        import numpy as np
        return np.array([[float(x) for x in r] for r in self.rows], dtype=float)


IntMatrix = Matrix


def _det_fraction(M: Matrix) -> Fraction:
    n = M.n
    a = [[Fraction(x) for x in r] for r in M.rows]
    det = Fraction(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            det = -det
        det *= a[k][k]
        for i in range(k + 1, n):
            f = a[i][k] / a[k][k]
            a[i] = [x - f * y for x, y in zip(a[i], a[k])]
    return det


def charpoly(M: Matrix) -> Polynomial:
    """``det(tI - M)`` by Faddeev-LeVerrier over the rationals.

    For an integer matrix the result has integer coefficients.
    """
    n = M.n
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    ident = Matrix.identity(n)
    Mk = Matrix.zeros(n)
    c = Fraction(1)
    for k in range(1, n + 1):
        Mk = M @ (Mk + ident.scale(c))
        c = -Fraction(Mk.trace()) / k
        coeffs[n - k] = c
    return Polynomial(coeffs)


def poly_of_matrix(poly: Polynomial, M: Matrix) -> Matrix:
    """Evaluate ``poly(M)`` exactly by Horner's scheme."""
    n = M.n
    acc = Matrix.zeros(n)
    ident = Matrix.identity(n)
    for c in reversed(poly.coeffs):
        acc = acc @ M + ident.scale(c)
    return acc


def kernel_basis(M: Matrix) -> list[tuple[Fraction, ...]]:
    """Basis of the right kernel over Q, via reduced row echelon form."""
    rows = [[Fraction(x) for x in r] for r in M.rows]
    nrows, ncols = M.shape
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fcol in free:
        v = [Fraction(0)] * ncols
        v[fcol] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -rows[i][fcol]
        basis.append(tuple(v))
    return basis


def primitive_integer_vector(v: Sequence[Exact]) -> tuple[int, ...]:
    """Scale a rational vector to a primitive integer vector, first nonzero entry positive."""
    fr = [Fraction(x) for x in v]
    lcm = 1
    for x in fr:
        lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
    ints = [int(x * lcm) for x in fr]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    if g == 0:
        raise ZeroVector("zero vector has no primitive multiple")
    ints = [x // g for x in ints]
    first = next(x for x in ints if x != 0)
    if first < 0:
        ints = [-x for x in ints]
    return tuple(ints)
