"""Weil heights, cyclic canonical heights and stationary heights over Q.

The height of the fiber class ``c_i`` at a point is the logarithmic height
of its i-th coordinate; a real class ``a1 c1 + a2 c2 + a3 c3`` has height
``a1 h(x) + a2 h(y) + a3 h(z)``.  No bounded corrections are estimated:
limit values come with an explicit (heuristic) geometric tail bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .errors import BranchBudget, HeightOverflow, NotLoxodromic, PeriodicPoint
from .nsgeom import KAPPA0, MeasureSpec, NSRep, RealClass, classify_isometry, theta_pair, word_matrix
from .numcore import ProjPoint1, log_abs
from .orbits import GroupWord, as_word, orbit_closure
from .wehler import SurfacePoint, WehlerSurface, sigma

DEFAULT_DIGIT_BUDGET = 10**7
TAIL_SAFETY = 4.0
_BITS_PER_DIGIT = math.log2(10)


@dataclass(frozen=True)
class HeightValue:
    value: float
    error: float
    history: tuple = field(default=(), compare=False, repr=False)

    def to_json(self) -> dict:
        return {"value": self.value, "error": self.error}


def naive_height(p: ProjPoint1) -> float:
    """``log max(|a|, |b|)`` of the canonical representative."""
    m = max(abs(p.a), abs(p.b))
    return log_abs(m) if m > 1 else 0.0


def class_height(w: Sequence[float] | RealClass, pt: SurfacePoint) -> float:
    coeffs = w.coeffs if isinstance(w, RealClass) else w
    return sum(float(a) * naive_height(c) for a, c in zip(coeffs, pt.coords) if a)


def point_digits(pt: SurfacePoint) -> int:
    bits = max(max(abs(c.a), abs(c.b)).bit_length() for c in pt.coords)
    return int(bits / _BITS_PER_DIGIT) + 1


def _apply(S: WehlerSurface, word: GroupWord, pt: SurfacePoint, digit_budget: int) -> SurfacePoint:
    for axis in reversed(word.letters):
        if point_digits(pt) > digit_budget:
            raise HeightOverflow(f"coordinates exceed {digit_budget} digits")
        pt = sigma(S, axis, pt, check=False)
    return pt


def tail_error(values: Sequence[float], rate: float) -> float:
    """Geometric tail bound from the last two increments of ``r^{-k} h_k``.

    With ``values[k] = h_k`` and growth ``rate``, the increments
    ``|h_k - rate h_{k-1}|`` estimate the bounded defect ``C``; the bound is
    ``TAIL_SAFETY * C * rate^{-n} / (1 - 1/rate)``.
    """
    n = len(values) - 1
    if n < 1:
        return math.inf
    defects = [abs(values[k] - rate * values[k - 1]) for k in range(max(1, n - 1), n + 1)]
    C = TAIL_SAFETY * max(defects)
    return C * rate ** (-n) / (1 - 1 / rate)


def cyclic_canonical_height(S: WehlerSurface, f, sign: int, pt: SurfacePoint, n: int,
                            rep: NSRep | None = None, kappa0: RealClass = KAPPA0,
                            digit_budget: int = DEFAULT_DIGIT_BUDGET) -> HeightValue:
    """``lambda^{-n} h_theta(f^{+-n} pt)`` with its tail bound.

    ``sign = +1`` iterates ``f`` and measures with the eigenvector for
    ``lambda``; ``sign = -1`` iterates ``f^{-1}`` and uses the eigenvector
    for ``1/lambda``.
    """
    if n < 2:
        raise ValueError("need at least two iterations")
    word = as_word(f)
    g = word_matrix(word, rep)
    t = classify_isometry(g)
    if t.kind != "loxodromic":
        raise NotLoxodromic(f"word {word} is {t.kind}")
    lam = t.lam
    theta = theta_pair(g, kappa0)[0 if sign > 0 else 1]
    step = word if sign > 0 else word.inverse()
    heights = [class_height(theta, pt)]
    for _ in range(n):
        pt = _apply(S, step, pt, digit_budget)
        heights.append(class_height(theta, pt))
    value = heights[-1] * lam ** (-n)
    return HeightValue(value, tail_error(heights, lam), tuple(heights))


def canonical_height_pair(S: WehlerSurface, f, pt: SurfacePoint, n: int,
                          digit_budget: int = DEFAULT_DIGIT_BUDGET) -> dict:
    """Both cyclic heights and a verdict, in the height report layout."""
    hp = cyclic_canonical_height(S, f, +1, pt, n, digit_budget=digit_budget)
    hm = cyclic_canonical_height(S, f, -1, pt, n, digit_budget=digit_budget)
    periodic = abs(hp.value + hm.value) <= hp.error + hm.error
    return {
        "point": pt.to_json(),
        "word": list(as_word(f).letters),
        "hplus": hp.to_json(),
        "hminus": hm.to_json(),
        "verdict": "periodic-candidate" if periodic else "positive",
    }


def growth_estimate_lambda(S: WehlerSurface, f, pt: SurfacePoint, n: int,
                           probe_budget: int = 64,
                           digit_budget: int = DEFAULT_DIGIT_BUDGET) -> float:
    """Ratio ``h(f^n pt) / h(f^{n-1} pt)`` for the ample class ``(1,1,1)``."""
    if n < 3:
        raise ValueError("need n >= 3")
    word = as_word(f)
    if orbit_closure(S, pt, probe_budget).is_finite:
        raise PeriodicPoint(f"{pt} has a finite orbit")
    prev = cur = None
    for _ in range(n):
        pt = _apply(S, word, pt, digit_budget)
        prev, cur = cur, class_height((1, 1, 1), pt)
    if not prev:
        raise PeriodicPoint("height vanished along the iteration")
    return cur / prev


class StationaryHeight:
    """Memoized evaluation of ``alpha^{-k} sum nu(word) h_w(word(pt))``.

    ``S_k(x) = sum_f nu(f) S_{k-1}(f x)`` with ``S_0 = h_w``.  Nodes are
    keyed on canonical points, so repeated points (finite orbits) are
    evaluated once.  ``budget`` caps the number of stored nodes.
    """

    def __init__(self, S: WehlerSurface, nu: MeasureSpec, w, alpha: float,
                 budget: int = 10**6, digit_budget: int = DEFAULT_DIGIT_BUDGET):
        if alpha <= 1:
            raise ValueError("alpha must exceed 1")
        self.S = S
        self.words = [as_word(s) for s in nu.support]
        self.weights = [float(x) for x in nu.weights]
        self.w = tuple(float(x) for x in (w.coeffs if isinstance(w, RealClass) else w))
        self.alpha = float(alpha)
        self.budget = budget
        self.digit_budget = digit_budget
        self._levels: dict[SurfacePoint, list[float]] = {}
        self._children: dict[SurfacePoint, list[SurfacePoint]] = {}
        self.nodes = 0

    def _kids(self, x: SurfacePoint) -> list[SurfacePoint]:
        kids = self._children.get(x)
        if kids is None:
            kids = [_apply(self.S, wd, x, self.digit_budget) for wd in self.words]
            self._children[x] = kids
        return kids

    def level_sum(self, x: SurfacePoint, k: int) -> float:
        """``S_k(x)``, computed level by level and memoized."""
        levels = self._levels.setdefault(x, [])
        if not levels:
            levels.append(class_height(self.w, x))
            self.nodes += 1
        while len(levels) <= k:
            j = len(levels)
            if self.nodes >= self.budget:
                raise BranchBudget(f"more than {self.budget} tree nodes")
            total = 0.0
            for wt, y in zip(self.weights, self._kids(x)):
                total += wt * self.level_sum(y, j - 1)
            levels.append(total)
            self.nodes += 1
        return levels[k]

    def value(self, x: SurfacePoint, depth: int) -> HeightValue:
        """Depth-``depth`` estimate with tail bound ``C alpha/(alpha-1) alpha^{-depth}``."""
        if depth < 2:
            raise ValueError("depth must be at least 2")
        a = self.alpha
        est = [self.level_sum(x, k) * a ** (-k) for k in range(depth + 1)]
        C = TAIL_SAFETY * max(abs(est[k] - est[k - 1]) * a ** k for k in (depth - 1, depth))
        err = C * a / (a - 1) * a ** (-depth)
        return HeightValue(est[-1], err, tuple(est))

    def residual(self, x: SurfacePoint, depth: int) -> tuple[float, float]:
        """``|sum nu(f) h(f x) - alpha h(x)|`` and the combined error bound."""
        hx = self.value(x, depth)
        lhs, err = 0.0, self.alpha * hx.error
        for wt, y in zip(self.weights, self._kids(x)):
            hy = self.value(y, depth)
            lhs += wt * hy.value
            err += wt * hy.error
        return abs(lhs - self.alpha * hx.value), err


def stationary_height(S: WehlerSurface, nu: MeasureSpec, w, alpha: float, pt: SurfacePoint,
                      depth: int, budget: int = 10**6,
                      digit_budget: int = DEFAULT_DIGIT_BUDGET) -> HeightValue:
    return StationaryHeight(S, nu, w, alpha, budget, digit_budget).value(pt, depth)
