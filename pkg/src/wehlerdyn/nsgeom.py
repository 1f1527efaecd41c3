"""Lattices of signature (1, k), their isometries and hyperbolic geometry.

The rank-3 lattice spanned by the fiber classes ``c1, c2, c3`` of a Wehler
surface carries the Gram matrix ``[[0,2,2],[2,0,2],[2,2,0]]``.  The
pullback of ``sigma_1`` sends ``c1`` to ``-c1 + 2 c2 + 2 c3`` and fixes the
other two classes (cyclically for ``sigma_2`` and ``sigma_3``).

Composition convention: the word ``(i_n, ..., i_1)`` is
``sigma_{i_n} o ... o sigma_{i_1}`` and its pullback matrix is
``M_{i_1} M_{i_2} ... M_{i_n}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from .errors import (
    DegenerateAxis,
    InvolutionCheckFailed,
    MixedLattices,
    NoGap,
    NotAnIsometry,
    NotEigenvector,
    NotLoxodromic,
    PreconditionViolated,
    SameFixedLine,
    SignatureError,
)
from .numcore import (
    Matrix,
    Polynomial,
    _max_cyclotomic_index,
    as_rational,
    charpoly,
    cyclotomic,
    cyclotomic_factorization,
    kernel_basis,
    poly_of_matrix,
    primitive_integer_vector,
    spectral_radius,
)
from .orbits import GroupWord, as_word


# ---------------------------------------------------------------------------
# Lattices and isometries
# ---------------------------------------------------------------------------

def _positive_negative_counts(gram: Matrix) -> tuple[int, int, int]:
    # the charpoly of a symmetric matrix is real-rooted, so Descartes' rule is exact
    cp = charpoly(gram).coeffs
    zeros = next(i for i, c in enumerate(cp) if c != 0)
    coeffs = [c for c in cp[zeros:]]
    pos = sum(1 for a, b in zip(coeffs, coeffs[1:]) if (a > 0) != (b > 0))
    n = gram.n
    return pos, n - pos - zeros, zeros


class LatticeForm:
    """Integral symmetric form of signature ``(1, k)``, checked exactly."""

    def __init__(self, gram):
        gram = gram if isinstance(gram, Matrix) else Matrix(gram)
        if gram != gram.T:
            raise SignatureError("Gram matrix is not symmetric")
        pos, neg, zero = _positive_negative_counts(gram)
        if zero or pos != 1:
            raise SignatureError(f"signature ({pos}, {neg}) with {zero} null directions")
        self.gram = gram
        self.dim = gram.n
        self._np = gram.to_float()

    def __eq__(self, other) -> bool:
        return isinstance(other, LatticeForm) and self.gram == other.gram

    def __hash__(self) -> int:
        return hash(self.gram)

    def __repr__(self) -> str:
        return f"LatticeForm({self.gram.tolist()})"

    def pair(self, u, v):
        """``<u|v>``; exact for exact inputs, float otherwise."""
        u = u.coeffs if isinstance(u, RealClass) else u
        v = v.coeffs if isinstance(v, RealClass) else v
        if all(isinstance(x, (int, Fraction)) for x in (*u, *v)):
            Gv = self.gram @ tuple(v)
            return sum(a * b for a, b in zip(u, Gv))
        return float(np.asarray(u, dtype=float) @ self._np @ np.asarray(v, dtype=float))

    def square(self, u):
        return self.pair(u, u)


class Isometry:
    """Integer matrix ``m`` with ``m^T G m = G``."""

    def __init__(self, m, form: LatticeForm, name: str = ""):
        m = m if isinstance(m, Matrix) else Matrix(m)
        if m.shape != (form.dim, form.dim):
            raise NotAnIsometry("dimension mismatch")
        if m.T @ form.gram @ m != form.gram:
            raise NotAnIsometry(f"{name or 'matrix'} does not preserve the form")
        self.m = m
        self.form = form
        self.name = name

    def __matmul__(self, other: "Isometry") -> "Isometry":
        if other.form != self.form:
            raise MixedLattices("isometries of different lattices")
        return Isometry(self.m @ other.m, self.form)

    def __pow__(self, k: int) -> "Isometry":
        return Isometry(self.m ** k, self.form)

    def __eq__(self, other) -> bool:
        return isinstance(other, Isometry) and self.m == other.m and self.form == other.form

    def __hash__(self) -> int:
        return hash(self.m)

    def inverse(self) -> "Isometry":
        return Isometry(self.m.inverse(), self.form)

    def __repr__(self) -> str:
        return f"Isometry({self.m.tolist()})"


@dataclass(frozen=True)
class RealClass:
    """Real class in a lattice basis; ``error`` bounds each coordinate."""

    coeffs: tuple
    error: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(self.coeffs))

    def __add__(self, other: "RealClass") -> "RealClass":
        return RealClass(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)),
                         self.error + other.error)

    def __sub__(self, other: "RealClass") -> "RealClass":
        return RealClass(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)),
                         self.error + other.error)

    def scale(self, c) -> "RealClass":
        return RealClass(tuple(c * a for a in self.coeffs), abs(float(c)) * self.error)

    def as_array(self) -> np.ndarray:
        return np.asarray([float(x) for x in self.coeffs], dtype=float)

    def to_json(self) -> dict:
        return {"coeffs": [float(x) for x in self.coeffs], "error": self.error}


WEHLER_GRAM = Matrix([[0, 2, 2], [2, 0, 2], [2, 2, 0]])
WEHLER_INVOLUTIONS = (
    Matrix([[-1, 0, 0], [2, 1, 0], [2, 0, 1]]),
    Matrix([[1, 2, 0], [0, -1, 0], [0, 2, 1]]),
    Matrix([[1, 0, 2], [0, 1, 2], [0, 0, -1]]),
)
# det(tI - M) for the word (3,2,1) must be (t + 1)(t^2 - 18t + 1)
EXPECTED_CHARPOLY_321 = Polynomial([1, -17, -17, 1])
KAPPA0 = RealClass((1 / math.sqrt(12),) * 3)


@dataclass(frozen=True)
class NSRep:
    form: LatticeForm
    s1: Isometry
    s2: Isometry
    s3: Isometry

    def generator(self, i: int) -> Isometry:
        return (self.s1, self.s2, self.s3)[i - 1]


def verify_involution_data(matrices: Sequence[Matrix], gram: Matrix = WEHLER_GRAM) -> None:
    """Four-point gate on candidate involution matrices.

    Each matrix must square to the identity, preserve ``gram``, and fix the
    two basis vectors other than its own; the word (3,2,1) must have
    characteristic polynomial ``t^3 - 17 t^2 - 17 t + 1``.  Raises
    :class:`InvolutionCheckFailed` on the first violation.
    """
    n = gram.n
    ident = Matrix.identity(n)
    for idx, M in enumerate(matrices):
        if M @ M != ident:
            raise InvolutionCheckFailed(f"M{idx + 1} is not an involution")
        if M.T @ gram @ M != gram:
            raise InvolutionCheckFailed(f"M{idx + 1} does not preserve the form")
        for j in range(n):
            if j != idx:
                e = tuple(int(k == j) for k in range(n))
                if M @ e != e:
                    raise InvolutionCheckFailed(f"M{idx + 1} moves basis vector c{j + 1}")
    product = matrices[0] @ matrices[1] @ matrices[2]
    if charpoly(product) != EXPECTED_CHARPOLY_321:
        raise InvolutionCheckFailed("the word (3,2,1) has the wrong characteristic polynomial")


def wehler_ns_rep(matrices: Sequence | None = None) -> NSRep:
    """The rank-3 lattice and the three involution pullbacks, after the gate."""
    mats = tuple(Matrix(m) if not isinstance(m, Matrix) else m
                 for m in (matrices or WEHLER_INVOLUTIONS))
    verify_involution_data(mats)
    form = LatticeForm(WEHLER_GRAM)
    return NSRep(form, *(Isometry(m, form, name=f"s{i + 1}") for i, m in enumerate(mats)))


def word_matrix(word, rep: NSRep | None = None) -> Isometry:
    """Pullback matrix of a reduced word: ``M_{i_1} ... M_{i_n}``."""
    w = as_word(word)
    rep = rep or wehler_ns_rep()
    m = Matrix.identity(rep.form.dim)
    for letter in reversed(w.letters):
        m = m @ rep.generator(letter).m
    return Isometry(m, rep.form, name=f"word({w})")


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IsometryType:
    kind: str                      # "elliptic", "parabolic" or "loxodromic"
    charpoly: tuple[int, ...]
    order: int | None = None
    lam: float | None = None
    lam_error: float | None = None

    def to_json(self) -> dict:
        # highest degree first, as usually written
        out = {"type": self.kind, "charpoly": [int(c) for c in reversed(self.charpoly)]}
        if self.order is not None:
            out["order"] = self.order
        if self.lam is not None:
            out["lambda"] = self.lam
            out["lambda_error"] = self.lam_error
        return out


def _lcm(values) -> int:
    out = 1
    for v in values:
        out = out * v // math.gcd(out, v)
    return out


def classify_isometry(g: Isometry, tol: float = 1e-12) -> IsometryType:
    """Elliptic, parabolic or loxodromic, decided from exact data.

    A spectral radius certified above 1 gives ``loxodromic``.  Otherwise a
    cyclotomic characteristic polynomial with squarefree minimal polynomial
    gives ``elliptic`` with order the lcm of the cyclotomic indices (and
    ``m^order = I`` is checked); anything else is ``parabolic``.
    """
    cp = charpoly(g.m)
    coeffs = tuple(int(c) for c in cp.coeffs)
    indices = cyclotomic_factorization(cp)
    if indices is None:
        rho, err = spectral_radius(g.m, tol)
        if rho - err > 1:
            return IsometryType("loxodromic", coeffs, lam=rho, lam_error=err)
        # an integral matrix with all eigenvalues on the unit circle has a
        # cyclotomic characteristic polynomial (Kronecker), so this is unreachable
        raise AssertionError("spectral radius not separated from 1")
    ident = Matrix.identity(g.m.n)
    if poly_of_matrix(cp.squarefree_part(), g.m).rows == Matrix.zeros(g.m.n).rows:
        order = _lcm(set(indices))
        if g.m ** order != ident:
            raise AssertionError("elliptic order check failed")
        return IsometryType("elliptic", coeffs, order=order)
    return IsometryType("parabolic", coeffs)


def unipotent_power(g: Isometry) -> int:
    """Smallest ``k`` with ``m^k`` unipotent (for cyclotomic characteristic polynomials)."""
    indices = cyclotomic_factorization(charpoly(g.m))
    if indices is None:
        raise PreconditionViolated("characteristic polynomial is not cyclotomic")
    return _lcm(set(indices))


def is_unipotent(m: Matrix) -> bool:
    n = m.n
    N = m - Matrix.identity(n)
    return N ** n == Matrix.zeros(n)


def parabolic_fixed_line(g: Isometry) -> tuple[int, ...]:
    """Primitive integral generator of the isotropic line fixed by a parabolic."""
    if classify_isometry(g).kind != "parabolic":
        raise PreconditionViolated("isometry is not parabolic")
    k = unipotent_power(g)
    n = g.m.n
    N = g.m ** k - Matrix.identity(n)
    top = N
    while top @ N != Matrix.zeros(n):
        top = top @ N
    col = next(c for c in zip(*top.rows) if any(c))
    v = primitive_integer_vector(col)
    ample = tuple(1 for _ in range(n)) if n == 3 else None
    if ample is not None and g.form.pair(v, ample) < 0:
        v = tuple(-x for x in v)
    return v


def non_cyclotomic_part(cp: Polynomial) -> Polynomial:
    """Divide out every cyclotomic factor."""
    rest = cp
    for n in range(1, _max_cyclotomic_index(cp.degree) + 1):
        phi = cyclotomic(n)
        while rest.degree >= phi.degree:
            q, r = rest.divmod(phi)
            if not r.is_zero:
                break
            rest = q
    return rest


def invariant_plane(g: Isometry) -> list[tuple[Fraction, ...]]:
    """Exact basis of the kernel of the non-cyclotomic factor evaluated at ``m``."""
    part = non_cyclotomic_part(charpoly(g.m))
    return kernel_basis(poly_of_matrix(part, g.m))


def restriction_scalar(P: Matrix, basis: Sequence[Sequence]) -> Fraction | None:
    """The scalar by which ``P`` acts on ``span(basis)``, or ``None`` if not scalar."""
    scalar = None
    for v in basis:
        Pv = P @ tuple(v)
        i = next(k for k, x in enumerate(v) if x != 0)
        c = Fraction(Pv[i]) / Fraction(v[i])
        if any(Fraction(a) != c * Fraction(b) for a, b in zip(Pv, v)):
            return None
        if scalar is not None and c != scalar:
            return None
        scalar = c
    return scalar


# ---------------------------------------------------------------------------
# Eigenvectors and hyperbolic geometry
# ---------------------------------------------------------------------------

def _eigenvector(m: Matrix, mu, dps: int = 60) -> list:
    # column of largest norm of adj(m - mu I), for a simple eigenvalue mu
    n = m.n
    with mpmath.workdps(dps):
        A = mpmath.matrix([[mpmath.mpf(Fraction(x).numerator) / Fraction(x).denominator
                            for x in row] for row in m.rows])
        for i in range(n):
            A[i, i] -= mu
        best, best_norm = None, -1
        for j in range(n):
            col = []
            for i in range(n):
                minor = mpmath.matrix(n - 1, n - 1)
                rows = [r for r in range(n) if r != j]
                cols = [c for c in range(n) if c != i]
                for a, r in enumerate(rows):
                    for b, c in enumerate(cols):
                        minor[a, b] = A[r, c]
                col.append((-1) ** (i + j) * mpmath.det(minor) if n > 1 else mpmath.mpf(1))
            norm = mpmath.norm(mpmath.matrix(col))
            if norm > best_norm:
                best, best_norm = col, norm
        return best


def dominant_eigenvalue(g: Isometry, dps: int = 60):
    """Real eigenvalue of largest modulus (as an mpmath number) of a loxodromic."""
    cp = charpoly(g.m)
    with mpmath.workdps(dps):
        coeffs = [mpmath.mpf(int(c)) for c in reversed(cp.coeffs)]
        roots = mpmath.polyroots(coeffs, maxsteps=400, extraprec=4 * dps)
        mu = max(roots, key=abs)
        return mpmath.re(mu)


def theta_pair(g: Isometry, kappa0: RealClass = KAPPA0,
               dps: int = 60) -> tuple[RealClass, RealClass]:
    """Eigenvectors for ``lambda`` and ``1/lambda``, each paired to 1 with ``kappa0``."""
    t = classify_isometry(g)
    if t.kind != "loxodromic":
        raise NotLoxodromic(f"isometry is {t.kind}")
    form = g.form
    k0 = kappa0.as_array()
    if abs(form.square(k0) - 1) > 1e-9:
        raise PreconditionViolated("kappa0 must have self-intersection 1")
    out = []
    with mpmath.workdps(dps):
        mu = dominant_eigenvalue(g, dps)
        for value in (mu, 1 / mu):
            v = _eigenvector(g.m, value, dps)
            G = form.gram
            k = [mpmath.mpf(x) for x in kappa0.coeffs]
            pairing = sum(v[i] * G[i, j] * k[j] for i in range(form.dim) for j in range(form.dim))
            if pairing == 0:
                raise DegenerateAxis("eigenvector orthogonal to kappa0")
            theta = [x / pairing for x in v]
            # residual of the eigen-equation bounds the coordinate error
            res = max(abs(sum(mpmath.mpf(int(g.m[i, j])) * theta[j] for j in range(form.dim))
                          - value * theta[i]) for i in range(form.dim))
            coeffs = tuple(float(x) for x in theta)
            err = float(res) + 4e-16 * max(abs(c) for c in coeffs) + kappa0.error
            out.append(RealClass(coeffs, err))
    return out[0], out[1]


@dataclass(frozen=True)
class AxisGeometry:
    m_sq: float
    angle: float
    dist: float

    def to_json(self) -> dict:
        return {"m_sq": self.m_sq, "angle": self.angle, "dist": self.dist}


def axis_geometry(theta_plus: RealClass, theta_minus: RealClass, kappa0: RealClass = KAPPA0,
                  form: LatticeForm | None = None, tol: float = 1e-12) -> AxisGeometry:
    """Self-intersection of the axis midpoint, visual angle and distance to ``kappa0``.

    ``m = (theta+ + theta-)/2``; ``angle = 2 asin(sqrt(<m|m>))`` and
    ``dist = acosh(sqrt(2) / sqrt(<theta+|theta->))``.
    """
    form = form or LatticeForm(WEHLER_GRAM)
    tp, tm = theta_plus.as_array(), theta_minus.as_array()
    pm = form.pair(tp, tm)
    if pm <= tol:
        raise DegenerateAxis("<theta+|theta-> is not positive")
    m = (tp + tm) / 2
    m_sq = form.square(m)
    if not (0 < m_sq <= 1 + 1e-9):
        raise PreconditionViolated(f"<m|m> = {m_sq} outside (0, 1]")
    m_sq = min(m_sq, 1.0)
    angle = 2 * math.asin(math.sqrt(m_sq))
    dist = math.acosh(max(1.0, math.sqrt(2) / math.sqrt(pm)))
    return AxisGeometry(m_sq, angle, dist)


def lorenzian_gap(e: RealClass, m: RealClass, kappa0: RealClass = KAPPA0,
                  form: LatticeForm | None = None,
                  tol: float = 1e-9) -> tuple[float, float, bool]:
    """Both sides of ``-<e|e> >= <m|m> / (1 - <m|m>)`` and the verdict.

    Requires ``<e|m> = 0`` and ``<e|kappa0> = 1`` (within ``tol``), a unit
    ``kappa0`` and ``0 < <m|m> < 1``.
    """
    form = form or LatticeForm(WEHLER_GRAM)
    ea, ma, ka = e.as_array(), m.as_array(), kappa0.as_array()
    if abs(form.pair(ea, ma)) > tol:
        raise PreconditionViolated("<e|m> must vanish")
    if abs(form.pair(ea, ka) - 1) > tol:
        raise PreconditionViolated("<e|kappa0> must equal 1")
    if abs(form.square(ka) - 1) > tol:
        raise PreconditionViolated("kappa0 must have self-intersection 1")
    msq = form.square(ma)
    if not (0 < msq < 1):
        raise PreconditionViolated("<m|m> must lie in (0, 1)")
    lhs = -form.square(ea)
    rhs = msq / (1 - msq)
    return lhs, rhs, lhs >= rhs - tol * max(1.0, abs(rhs))


def degree_wrt(g: Isometry, kappa0: RealClass = KAPPA0) -> float:
    """``deg(f) = <kappa0 | f^* kappa0>``."""
    k = kappa0.as_array()
    return float(k @ g.form._np @ (g.m.to_float() @ k))


# ---------------------------------------------------------------------------
# Degree bounds for invariant curves
# ---------------------------------------------------------------------------

def periodic_curve_degree_bound(theta_pairing: float, rho: int, c_X: float,
                                connected: bool) -> float:
    """Bound on the degree of a curve made of periodic components."""
    if theta_pairing <= 0 or rho < 3 or c_X < 0:
        raise PreconditionViolated("need pairing > 0, rho >= 3 and c_X >= 0")
    factor = 1 if connected else rho - 2
    return 2 * factor * (1 + c_X) / theta_pairing


def invariant_curve_degree_bound_log2(deg_f: float, rho: int, c_X: float) -> float:
    if deg_f < 1 or rho < 3 or c_X < 0:
        raise PreconditionViolated("need deg_f >= 1, rho >= 3 and c_X >= 0")
    return 54 + math.log2(rho - 2) + math.log2(1 + c_X) + 56 * math.log2(deg_f)


def invariant_curve_degree_bound(deg_f: float, rho: int, c_X: float) -> float:
    """``2^54 (rho - 2)(1 + c_X) deg_f^56``, evaluated through logarithms."""
    lg = invariant_curve_degree_bound_log2(deg_f, rho, c_X)
    if lg >= 1024:
        return math.inf
    return 2.0 ** lg


# ---------------------------------------------------------------------------
# Stationary operators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MeasureSpec:
    """Finitely supported probability measure on words or isometries."""

    support: tuple
    weights: tuple[Fraction, ...]

    def __post_init__(self):
        support = tuple(s if isinstance(s, Isometry) else as_word(s) for s in self.support)
        weights = tuple(as_rational(w) for w in self.weights)
        if len(support) != len(weights) or not support:
            raise ValueError("support and weights must be nonempty and of equal length")
        if any(w <= 0 for w in weights):
            raise ValueError("weights must be positive")
        if sum(weights) != 1:
            raise ValueError("weights must sum to 1")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def uniform(cls, support) -> "MeasureSpec":
        support = tuple(support)
        return cls(support, (Fraction(1, len(support)),) * len(support))

    def to_json(self) -> dict:
        return {"support": [str(s) if isinstance(s, GroupWord) else s.m.tolist()
                            for s in self.support],
                "weights": [str(w) for w in self.weights]}


def _support_isometries(nu: MeasureSpec, rep: NSRep | None) -> list[Isometry]:
    isos = [s if isinstance(s, Isometry) else word_matrix(s, rep) for s in nu.support]
    if any(i.form != isos[0].form for i in isos):
        raise MixedLattices("support elements act on different lattices")
    return isos


def stationary_operator(nu: MeasureSpec, rep: NSRep | None = None) -> Matrix:
    """Exact ``P = sum nu(f) f^*``."""
    isos = _support_isometries(nu, rep)
    n = isos[0].m.n
    P = Matrix.zeros(n)
    for w, iso in zip(nu.weights, isos):
        P = P + iso.m.scale(w)
    return P


def dominant_eigen(P: Matrix, form: LatticeForm, kappa0: RealClass = KAPPA0,
                   tol: float = 1e-12, max_iter: int = 100000,
                   isotropy_tol: float = 1e-6, gap_tol: float = 1e-6) -> tuple[RealClass, float]:
    """Dominant eigendata ``(w, alpha)`` of a stationary operator.

    Power iteration from ``kappa0`` until the residual ``|Pw - alpha w|``
    drops below ``tol``.  The limit must have positive self-intersection,
    ``alpha > 1``, and the deflated operator must have spectral radius
    clearly below ``alpha``; otherwise :class:`NoGap` is raised.
    """
    Pf = P.to_float()
    v = kappa0.as_array()
    alpha = 0.0
    for _ in range(max_iter):
        Pv = Pf @ v
        alpha = float(np.linalg.norm(Pv) / np.linalg.norm(v))
        if Pv @ v < 0:
            alpha = -alpha
        res = float(np.linalg.norm(Pv - alpha * v) / np.linalg.norm(v))
        v = Pv / np.linalg.norm(Pv)
        if res < tol:
            break
    else:
        raise NoGap(f"power iteration did not converge (residual {res:.3e})")
    k = kappa0.as_array()
    ratio = form.square(v) / form.pair(v, k) ** 2
    if ratio < isotropy_tol:
        raise NoGap("limit vector is (nearly) isotropic; the dominant eigenvector is on the boundary")
    if alpha <= 1:
        raise NoGap(f"dominant eigenvalue {alpha} is not larger than 1")
    # left eigenvector for alpha, then deflate
    vals, vecs = np.linalg.eig(Pf.T)
    u = np.real(vecs[:, int(np.argmin(np.abs(vals - alpha)))])
    if abs(u @ v) < 1e-12:
        raise NoGap("left and right eigenvectors are orthogonal (non-simple eigenvalue)")
    deflated = Pf - alpha * np.outer(v, u) / (u @ v)
    second = float(max(abs(np.linalg.eigvals(deflated))))
    if second >= alpha * (1 - gap_tol):
        raise NoGap(f"second eigenvalue {second:.6g} is not separated from {alpha:.6g}")
    w = v / math.sqrt(form.square(v))
    if form.pair(w, k) < 0:
        w = -w
    err = res / max(alpha - second, 1e-300)
    return RealClass(tuple(float(x) for x in w), err), alpha


def verify_rational_stationary(nu: MeasureSpec, w: Sequence, rep: NSRep | None = None) -> Fraction:
    """Exact check ``P w = alpha w``; returns the rational ``alpha``."""
    P = stationary_operator(nu, rep)
    w = tuple(as_rational(x) for x in w)
    form = _support_isometries(nu, rep)[0].form
    if form.square(w) <= 0:
        raise PreconditionViolated("w must have positive self-intersection")
    Pw = P @ w
    i = next(k for k, x in enumerate(w) if x != 0)
    alpha = Fraction(Pw[i]) / w[i]
    if any(Fraction(a) != alpha * b for a, b in zip(Pw, w)):
        raise NotEigenvector("P w is not a multiple of w")
    return alpha


def pingpong_loxodromic(g: Isometry, h: Isometry, N: int) -> IsometryType:
    """Type of ``g^N h^N`` for two parabolics with distinct fixed lines."""
    if g.form != h.form:
        raise MixedLattices("isometries of different lattices")
    if parabolic_fixed_line(g) == parabolic_fixed_line(h):
        raise SameFixedLine("both parabolics fix the same isotropic line")
    return classify_isometry((g ** N) @ (h ** N))


def pingpong_threshold(g: Isometry, h: Isometry, max_n: int = 64) -> int:
    """Smallest ``N <= max_n`` from which ``g^N h^N`` is loxodromic (checked up to ``max_n``)."""
    for N in range(1, max_n + 1):
        if pingpong_loxodromic(g, h, N).kind == "loxodromic":
            return N
    raise PreconditionViolated(f"no loxodromic product up to N = {max_n}")
