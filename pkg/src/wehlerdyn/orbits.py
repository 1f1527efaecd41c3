"""Group words, exact orbit closure over Q, and finite-field orbit census."""

from __future__ import annotations

import concurrent.futures as cf
from dataclasses import dataclass, field
from typing import Sequence

import gmpy2

from .errors import ContainedFiber, NotOnFiber, ParseError, UnreducedWord
from .numcore import normalize_proj, normalize_proj_bounded, proj_line_fp, quad_roots_fp
from .wehler import (
    SurfacePoint,
    WehlerSurface,
    _fiber_coeffs,
    _fiber_coeffs_from,
    _partner,
    coordinate_monomials,
    fiber_content_bound,
    eval_surface,
    on_surface,
    sigma,
)


# ---------------------------------------------------------------------------
# Words in the free product of three involutions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GroupWord:
    """Reduced word ``(i_n, ..., i_1)``; the rightmost letter acts first."""

    letters: tuple[int, ...] = ()

    def __post_init__(self):
        letters = tuple(int(c) for c in self.letters)
        if any(c not in (1, 2, 3) for c in letters):
            raise ValueError(f"letters must be 1, 2 or 3: {letters}")
        for a, b in zip(letters, letters[1:]):
            if a == b:
                raise UnreducedWord(f"adjacent equal letters in {letters}")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def parse(cls, text: str) -> "GroupWord":
        text = text.strip()
        if not text:
            return cls(())
        try:
            return cls(tuple(int(t) for t in text.replace(" ", "").split(",")))
        except ValueError as exc:
            raise ParseError(f"bad word {text!r}: {exc}") from None

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def inverse(self) -> "GroupWord":
        return GroupWord(tuple(reversed(self.letters)))

    def __mul__(self, other: "GroupWord") -> "GroupWord":
        """Composition ``self o other`` with free reduction."""
        out = list(self.letters)
        for c in other.letters:
            if out and out[-1] == c:
                out.pop()
            else:
                out.append(c)
        return GroupWord(tuple(out))

    def __pow__(self, n: int) -> "GroupWord":
        base = self if n >= 0 else self.inverse()
        out = GroupWord(())
        for _ in range(abs(n)):
            out = base * out
        return out

    def __str__(self) -> str:
        return ",".join(map(str, self.letters))


def as_word(w) -> GroupWord:
    if isinstance(w, GroupWord):
        return w
    if isinstance(w, str):
        return GroupWord.parse(w)
    return GroupWord(tuple(w))


def apply_group_word(S: WehlerSurface, word, pt: SurfacePoint, check: bool = False) -> SurfacePoint:
    for axis in reversed(as_word(word).letters):
        pt = sigma(S, axis, pt, check=check)
    return pt


# ---------------------------------------------------------------------------
# Orbit closure
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OrbitResult:
    """``tag`` is ``"Finite"`` (with ``points``) or ``"BudgetExceeded"``."""

    tag: str
    points: tuple[SurfacePoint, ...] = ()
    visited: int = 0
    frontier: int = 0

    @property
    def is_finite(self) -> bool:
        return self.tag == "Finite"

    @property
    def size(self) -> int:
        return len(self.points)

    def to_json(self) -> dict:
        if self.is_finite:
            return {"tag": self.tag, "size": self.size,
                    "points": [p.to_json() for p in self.points]}
        return {"tag": self.tag, "visited": self.visited, "frontier": self.frontier}


# Two fixed primes for representation-independent fingerprints of points.
_PRINT_PRIMES = (int(gmpy2.next_prime(2**62)), int(gmpy2.next_prime(2**61 + 2**40)))

Raw = tuple  # ((a, b), (c, d), (e, f)), not necessarily reduced


def _coord_print(a, b, P: int):
    bm = int(b % P)
    if bm == 0:
        return None if a % P == 0 else P  # P encodes the point at infinity
    return int(a % P) * pow(bm, -1, P) % P


def _fingerprint(raw: Raw):
    out = []
    for P in _PRINT_PRIMES:
        for a, b in raw:
            v = _coord_print(a, b, P)
            if v is None:
                return None
            out.append(v)
    return tuple(out)


def _update_print(key: tuple, raw: Raw, axis: int):
    # only coordinate ``axis`` changed; reuse the other entries of ``key``
    out = list(key)
    a, b = raw[axis - 1]
    for n, P in enumerate(_PRINT_PRIMES):
        v = _coord_print(a, b, P)
        if v is None:
            return None
        out[3 * n + axis - 1] = v
    return tuple(out)


def _raw_equal(r1: Raw, r2: Raw) -> bool:
    return all(a1 * b2 == a2 * b1 for (a1, b1), (a2, b2) in zip(r1, r2))


def _canonical(raw: Raw) -> SurfacePoint:
    return SurfacePoint(*(normalize_proj(a, b) for a, b in raw))


def _raw_partner(S: WehlerSurface, axis: int, pt: SurfacePoint, mons=None) -> Raw:
    """Image under ``sigma_axis`` without the final gcd reduction.

    ``mons`` optionally holds the monomials of all three coordinates; the
    product formula then needs only ``A`` and ``C``.
    """
    root = pt[axis]
    x0, w0 = root.a, root.b
    pair = None
    if mons is not None and x0 and w0:
        U, V = (m for n, m in enumerate(mons, start=1) if n != axis)
        A, C = _fiber_coeffs_from(S._grid, axis, U, V, powers=(2, 0))
        if isinstance(C, gmpy2.mpz) or isinstance(A, gmpy2.mpz):
            u, v = gmpy2.divexact(gmpy2.mpz(C), x0), gmpy2.divexact(gmpy2.mpz(A), w0)
        else:
            u, v = C // x0, A // w0
        if v < 0:
            u, v = -u, -v
        if v == 0 and u:
            pair = (1, 0)
        elif u == 0 and v:
            pair = (0, 1)
        elif u or v:
            pair = (u, v)
    if pair is None:
        A, B, C = _fiber_coeffs(S._grid, axis, pt.coords, None)
        if A == 0 and B == 0 and C == 0:
            raise ContainedFiber(f"S contains the fiber of sigma_{axis} through {pt}")
        q = _partner(A, B, C, root, None)
        pair = (q.a, q.b)
    coords = [(c.a, c.b) for c in pt.coords]
    coords[axis - 1] = pair
    return tuple(coords)


def orbit_closure(S: WehlerSurface, start: SurfacePoint, budget: int) -> OrbitResult:
    """Breadth-first closure of ``start`` under the three involutions.

    ``budget`` bounds the number of distinct points visited.  Over Q new
    points are stored unreduced and deduplicated through fingerprints
    ``a/b mod P`` for two fixed primes, confirmed by exact
    cross-multiplication.  A point is reduced only when it is expanded, and
    then through :func:`fiber_content_bound`: the common factor left by the
    product formula divides a fixed integer per axis.  Each level is processed in fingerprint order, so the outcome
    and every count in it are reproducible.  A ``Finite`` result is
    re-checked for closure on canonical points.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    if not on_surface(S, start):
        raise NotOnFiber(f"start point {start} is not on the surface")
    if S.p is not None:
        return _orbit_closure_fp(S, start, budget)
    # gcd of a fresh coordinate divides the content of its fiber quadratic,
    # which divides a fixed integer per axis (0 when no bound is available)
    bounds = [fiber_content_bound(S, axis) for axis in (1, 2, 3)]
    raw0 = tuple((c.a, c.b) for c in start.coords)
    fp0 = _fingerprint(raw0)
    table: dict[tuple, list[Raw]] = {fp0: [raw0]}
    count = 1
    expanded: list[SurfacePoint] = []
    # frontier entries: (fingerprint, raw point, axis it was reached by,
    # parent, parent monomials).  Only the coordinate on that axis is
    # unreduced, and applying the same involution again would only lead
    # back to the parent.
    frontier = [(fp0, raw0, 0, start, tuple(coordinate_monomials(c) for c in start.coords))]
    while frontier:
        nxt = []
        for key0, raw, came_by, parent, pmons in frontier:
            if came_by:
                c = normalize_proj_bounded(*raw[came_by - 1], bounds[came_by - 1])
                pt = parent.replace(came_by, c)
                mons = list(pmons)
                mons[came_by - 1] = coordinate_monomials(c)
            else:
                pt, mons = parent, pmons
            expanded.append(pt)
            for axis in (1, 2, 3):
                if axis == came_by:
                    continue
                r = _raw_partner(S, axis, pt, mons)
                key = _update_print(key0, r, axis)
                if key is None:
                    r = tuple((c.a, c.b) for c in _canonical(r).coords)
                    key = _fingerprint(r)
                bucket = table.setdefault(key, [])
                if any(_raw_equal(r, other) for other in bucket):
                    continue
                bucket.append(r)
                count += 1
                nxt.append((key, r, axis, pt, mons))
                if count > budget:
                    return OrbitResult("BudgetExceeded", visited=count,
                                       frontier=len(nxt) + len(frontier))
        frontier = sorted(nxt, key=lambda item: item[0])
    return _finish_closure(S, expanded)


def _orbit_closure_fp(S: WehlerSurface, start: SurfacePoint, budget: int) -> OrbitResult:
    visited = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for pt in frontier:
            for axis in (1, 2, 3):
                q = sigma(S, axis, pt, check=False)
                if q not in visited:
                    visited.add(q)
                    nxt.append(q)
                    if len(visited) > budget:
                        return OrbitResult("BudgetExceeded", visited=len(visited),
                                           frontier=len(nxt) + len(frontier))
        frontier = sorted(nxt, key=SurfacePoint.sort_key)
    return _finish_closure(S, list(visited))


def _finish_closure(S: WehlerSurface, pts: list[SurfacePoint]) -> OrbitResult:
    points = tuple(sorted(pts, key=SurfacePoint.sort_key))
    members = set(points)
    if len(members) != len(points):
        raise AssertionError("duplicate points in orbit closure")
    for pt in points:
        for axis in (1, 2, 3):
            if sigma(S, axis, pt, check=True) not in members:
                raise AssertionError("orbit closure is not closed")
    return OrbitResult("Finite", points=points, visited=len(points))


# ---------------------------------------------------------------------------
# Finite-field census
# ---------------------------------------------------------------------------

def _census_slice(S: WehlerSurface, xs: Sequence) -> list[SurfacePoint]:
    p = S.p
    line = proj_line_fp(p)
    out = []
    for x in xs:
        for y in line:
            A, B, C = _fiber_coeffs(S._grid, 3, (x, y, None), p)
            if A == 0 and B == 0 and C == 0:
                zs = line
            else:
                zs = sorted(quad_roots_fp(A, B, C, p))
            out.extend(SurfacePoint(x, y, z, p=p) for z in zs)
    return out


def _chunks(seq: Sequence, n: int) -> list[Sequence]:
    n = max(1, min(n, len(seq)))
    size = -(-len(seq) // n)
    return [seq[i:i + size] for i in range(0, len(seq), size)]


def _map_slices(fn, S, items, workers: int) -> list:
    chunks = _chunks(items, workers)
    if workers <= 1 or len(chunks) == 1:
        return [fn(S, c) for c in chunks]
    with cf.ProcessPoolExecutor(max_workers=workers) as pool:
        # map preserves submission order, which fixes the merge order
        return list(pool.map(fn, [S] * len(chunks), chunks))


def fp_point_census(S: WehlerSurface, workers: int = 1) -> list[SurfacePoint]:
    """All points of ``S(F_p)`` in canonical order.

    Loops over ``(x, y)`` in ``P^1(F_p)^2`` and solves the fiber quadratic in
    ``z``.  A fiber contained in ``S`` contributes all ``p + 1`` points.
    """
    if S.p is None:
        raise ValueError("census needs a surface over F_p; use reduce_mod first")
    parts = _map_slices(_census_slice, S, proj_line_fp(S.p), workers)
    pts = [pt for part in parts for pt in part]
    return sorted(pts, key=SurfacePoint.sort_key)


def brute_force_census(S: WehlerSurface) -> list[SurfacePoint]:
    """Reference census: test every point of ``P^1(F_p)^3`` (canonical order)."""
    line = proj_line_fp(S.p)
    pts = [SurfacePoint(x, y, z, p=S.p) for x in line for y in line for z in line
           if eval_surface(S, (x, y, z)) == 0]
    return sorted(pts, key=SurfacePoint.sort_key)


@dataclass
class PartitionResult:
    histogram: dict[int, int]
    census_size: int
    quarantined: list[SurfacePoint] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "census_size": self.census_size,
            "histogram": [{"size": s, "count": c} for s, c in self.histogram.items()],
            "quarantined": [p.to_json() for p in self.quarantined],
        }

    def to_csv(self) -> str:
        lines = ["size,count"] + [f"{s},{c}" for s, c in self.histogram.items()]
        return "\n".join(lines) + "\n"


def _edges_slice(S: WehlerSurface, pts: Sequence[SurfacePoint]) -> list[tuple]:
    # per point: three partners, or None where the fiber is contained in S
    out = []
    for pt in pts:
        row = []
        for axis in (1, 2, 3):
            A, B, C = _fiber_coeffs(S._grid, axis, pt.coords, S.p)
            if A == 0 and B == 0 and C == 0:
                row.append(None)
            else:
                row.append(pt.replace(axis, _partner(A, B, C, pt[axis], S.p)))
        out.append(tuple(row))
    return out


def fp_orbit_partition(S: WehlerSurface, workers: int = 1,
                       census: list[SurfacePoint] | None = None) -> PartitionResult:
    """Histogram of orbit sizes of the group generated by the involutions on ``S(F_p)``.

    Points lying on a fiber contained in ``S`` have an undefined involution;
    they are set aside in the quarantine list and the remaining points are
    partitioned along the involution edges between them, so the histogram
    accounts for ``census_size - len(quarantined)`` points.
    """
    pts = census if census is not None else fp_point_census(S, workers)
    index = {pt: n for n, pt in enumerate(pts)}
    parent = list(range(len(pts)))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    rows = [r for part in _map_slices(_edges_slice, S, pts, workers) for r in part]
    bad = {n for n, row in enumerate(rows) if None in row}
    for n, row in enumerate(rows):
        if n in bad:
            continue
        for q in row:
            m = index[q]
            if m in bad:
                continue
            a, b = find(n), find(m)
            if a != b:
                parent[max(a, b)] = min(a, b)
    sizes: dict[int, int] = {}
    for n in range(len(pts)):
        if n not in bad:
            r = find(n)
            sizes[r] = sizes.get(r, 0) + 1
    hist: dict[int, int] = {}
    for s in sizes.values():
        hist[s] = hist.get(s, 0) + 1
    return PartitionResult(dict(sorted(hist.items())), len(pts), [pts[n] for n in sorted(bad)])
