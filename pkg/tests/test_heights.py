import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from wehlerdyn.corpus import load_bundled
from wehlerdyn.errors import BranchBudget, HeightOverflow, NotLoxodromic, PeriodicPoint
from wehlerdyn.heights import (
    StationaryHeight,
    canonical_height_pair,
    class_height,
    cyclic_canonical_height,
    growth_estimate_lambda,
    naive_height,
    point_digits,
    stationary_height,
    tail_error,
)
from wehlerdyn.nsgeom import MeasureSpec, RealClass, dominant_eigen, stationary_operator, wehler_ns_rep
from wehlerdyn.numcore import INFINITY, ZERO, ProjPoint1, normalize_proj
from wehlerdyn.orbits import apply_group_word, orbit_closure
from wehlerdyn.wehler import SurfacePoint

LAM = 9 + 4 * math.sqrt(5)


@pytest.fixture(scope="module")
def sample():
    S, pts = load_bundled("sample")
    wandering = [p for p in pts if not orbit_closure(S, p, 64).is_finite]
    return S, wandering


@pytest.fixture(scope="module")
def orbit8():
    return load_bundled("orbit8")


def test_naive_height():
    assert naive_height(ZERO) == 0.0
    assert naive_height(INFINITY) == 0.0
    assert naive_height(ProjPoint1(-3, 2)) == pytest.approx(math.log(3))
    assert naive_height(normalize_proj(10**400, 3)) == pytest.approx(400 * math.log(10))


coords = st.builds(lambda a, b: normalize_proj(a, b), st.integers(-10**9, 10**9), st.integers(1, 10**9))
weights = st.lists(st.floats(-5, 5), min_size=3, max_size=3)


@given(weights, weights, coords, coords, coords)
def test_class_height_is_additive(w1, w2, x, y, z):
    pt = SurfacePoint(x, y, z)
    both = [a + b for a, b in zip(w1, w2)]
    assert class_height(both, pt) == pytest.approx(class_height(w1, pt) + class_height(w2, pt),
                                                   abs=1e-9)
    assert class_height(RealClass(tuple(w1)), pt) == class_height(w1, pt)


def test_point_digits():
    assert point_digits(SurfacePoint(normalize_proj(10**20, 1), ZERO, ZERO)) in (21, 22)


def test_tail_error():
    assert tail_error([1.0], 2.0) == math.inf
    assert tail_error([1.0, 2.0, 4.0], 2.0) == 0.0
    e = tail_error([1.0, 2.5, 5.5], 2.0)
    # both defects are 0.5
    assert e == pytest.approx(4 * 0.5 * 2 ** -2 / 0.5)


def test_heights_vanish_on_orbit(orbit8):
    S, orbit = orbit8
    for pt in orbit:
        for sign in (1, -1):
            h = cyclic_canonical_height(S, (3, 2, 1), sign, pt, 6)
            assert h.value == 0.0 and h.error == 0.0
        report = canonical_height_pair(S, (3, 2, 1), pt, 4)
        assert report["verdict"] == "periodic-candidate"


def test_heights_nonnegative_and_equivariant(sample):
    S, pts = sample
    for pt in pts[:3]:
        hp = cyclic_canonical_height(S, (3, 2, 1), 1, pt, 4)
        hm = cyclic_canonical_height(S, (3, 2, 1), -1, pt, 4)
        assert hp.value >= -hp.error and hm.value >= -hm.error
        fx = apply_group_word(S, (3, 2, 1), pt)
        hfx = cyclic_canonical_height(S, (3, 2, 1), 1, fx, 4)
        assert abs(hfx.value - LAM * hp.value) <= hfx.error + LAM * hp.error
        # backward equivariance: h-(f^-1 x) = lambda h-(x)
        gx = apply_group_word(S, (1, 2, 3), pt)
        hgx = cyclic_canonical_height(S, (3, 2, 1), -1, gx, 4)
        assert abs(hgx.value - LAM * hm.value) <= hgx.error + LAM * hm.error


def test_error_shrinks_with_depth(sample):
    S, pts = sample
    errs = [cyclic_canonical_height(S, (3, 2, 1), 1, pts[0], n).error for n in (2, 3, 4)]
    assert errs[2] < errs[1] < errs[0]


def test_height_errors(sample, orbit8):
    S, pts = sample
    with pytest.raises(NotLoxodromic):
        cyclic_canonical_height(S, (2, 1), 1, pts[0], 3)
    with pytest.raises(ValueError):
        cyclic_canonical_height(S, (3, 2, 1), 1, pts[0], 1)
    with pytest.raises(HeightOverflow):
        cyclic_canonical_height(S, (3, 2, 1), 1, pts[0], 4, digit_budget=10)
    S8, orbit = orbit8
    with pytest.raises(PeriodicPoint):
        growth_estimate_lambda(S8, (3, 2, 1), orbit[0], 5)
    with pytest.raises(ValueError):
        growth_estimate_lambda(S, (3, 2, 1), pts[0], 2)


def test_growth_ratio(sample):
    S, pts = sample
    r = growth_estimate_lambda(S, (3, 2, 1), pts[0], 5)
    assert abs(r - 17.944) <= 0.15 * 17.944


def test_parabolic_growth_is_slow(sample):
    S, pts = sample
    r = growth_estimate_lambda(S, (2, 1), pts[0], 8)
    assert 0.5 < r < 2.0


@pytest.fixture(scope="module")
def stationary_data():
    rep = wehler_ns_rep()
    nu = MeasureSpec.uniform([(1, 2), (2, 3)])
    w, alpha = dominant_eigen(stationary_operator(nu, rep), rep.form)
    return nu, w, alpha


def test_stationary_height_relation(sample, stationary_data):
    S, pts = sample
    nu, w, alpha = stationary_data
    sh = StationaryHeight(S, nu, w, alpha)
    residual, bound = sh.residual(pts[0], 5)
    assert residual <= bound
    h = sh.value(pts[0], 5)
    assert h.value >= -h.error
    # memoized levels give the same number on a fresh evaluator
    assert stationary_height(S, nu, w, alpha, pts[0], 5).value == h.value


def test_stationary_height_vanishes_on_orbit(orbit8, stationary_data):
    S, orbit = orbit8
    nu, w, alpha = stationary_data
    sh = StationaryHeight(S, nu, w, alpha)
    for pt in orbit:
        h = sh.value(pt, 6)
        assert abs(h.value) <= h.error
    # the tree over a finite orbit has one node per (point, level)
    assert sh.nodes <= 8 * 7


def test_stationary_budget(sample, stationary_data):
    S, pts = sample
    nu, w, alpha = stationary_data
    with pytest.raises(BranchBudget):
        StationaryHeight(S, nu, w, alpha, budget=10).value(pts[0], 5)
    with pytest.raises(ValueError):
        StationaryHeight(S, nu, w, 1.0)
