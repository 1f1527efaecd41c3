import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from wehlerdyn.errors import LevelOverflow
from wehlerdyn.kummer import (
    EXCLUDED_TAG,
    CyclicSingularity,
    InfiniteFixedLocus,
    QuadOrder,
    TorsionPoint,
    TorusAut,
    chart_atlas,
    continued_fraction_value,
    equivariant_multiplier,
    exceptional_fixed_points,
    fixed_points_bruteforce,
    hirzebruch_jung,
    invariant_factors,
    kummer_type_validate,
    lefschetz_count,
    smith_normal_form,
    torsion_orbit,
    torus_fixed_count,
)
from wehlerdyn.numcore import Matrix

CAT = ((2, 1), (1, 1))


def cat_map(t=TorsionPoint.zero()):
    return TorusAut(QuadOrder.Z2, CAT, t)


# --- orders and torsion points ----------------------------------------------

def test_quad_order_parse_and_regular():
    assert QuadOrder.parse("zi") is QuadOrder.GaussianZi
    assert QuadOrder.parse("Zw") is QuadOrder.EisensteinZw
    with pytest.raises(ValueError):
        QuadOrder.parse("Q")
    i = Matrix(QuadOrder.GaussianZi.regular((0, 1)))
    assert i @ i == Matrix.identity(2).scale(-1)
    w = Matrix(QuadOrder.EisensteinZw.regular((0, 1)))
    assert w ** 3 == Matrix.identity(2)
    with pytest.raises(ValueError):
        QuadOrder.Z2.regular((1, 1))


def test_torsion_point_minimal_level():
    z = TorsionPoint(10, (2, 4, 6, 12))
    assert z.level == 5 and z.coords == (1, 2, 3, 1)
    assert TorsionPoint.from_fractions([Fraction(1, 2), 0, Fraction(1, 3), 1]) == TorsionPoint(6, (3, 0, 2, 0))
    assert TorsionPoint.zero().level == 1
    with pytest.raises(ValueError):
        TorsionPoint(0, (0, 0, 0, 0))


def test_torus_aut_requires_unimodular():
    with pytest.raises(ValueError):
        TorusAut(QuadOrder.Z2, ((2, 0), (0, 1)))


# --- Smith normal form -----------------------------------------------------

mat4 = st.lists(st.lists(st.integers(-6, 6), min_size=4, max_size=4), min_size=4, max_size=4)


@given(mat4)
def test_smith_normal_form(rows):
    A = Matrix(rows)
    diag, U, V = smith_normal_form(A)
    D = U @ A @ V
    assert abs(U.det()) == 1 and abs(V.det()) == 1
    for i in range(4):
        for j in range(4):
            assert D[i, j] == (diag[i] if i == j else 0)
    nz = [d for d in diag if d]
    assert all(d > 0 for d in nz)
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    assert diag[len(nz):] == [0] * (4 - len(nz))


# --- fixed points ----------------------------------------------------------

def test_cat_map_counts():
    f = cat_map()
    assert [torus_fixed_count(f, n) for n in (1, 2, 3)] == [1, 25, 256]
    assert invariant_factors(f, 2) == [1, 1, 5, 5]
    assert len(fixed_points_bruteforce(f, 2, 5)) == 25
    assert lefschetz_count(f, 3) == pytest.approx(256)


@st.composite
def unimodular_2x2(draw):
    # products of elementary matrices have determinant 1
    m = ((1, 0), (0, 1))
    for _ in range(draw(st.integers(1, 4))):
        k = draw(st.integers(-2, 2))
        e = ((1, k), (0, 1)) if draw(st.booleans()) else ((1, 0), (k, 1))
        m = tuple(tuple(sum(m[i][l] * e[l][j] for l in range(2)) for j in range(2)) for i in range(2))
    return m


@settings(max_examples=25)
@given(unimodular_2x2(), st.integers(1, 3), st.tuples(*[st.integers(0, 2)] * 4))
def test_count_matches_bruteforce(m, n, tc):
    f = TorusAut(QuadOrder.Z2, m, TorsionPoint(3, tc))
    count = torus_fixed_count(f, n)
    if count is InfiniteFixedLocus or not 0 < count <= 9:
        return          # oracle grid would be too large
    # every fixed point has level dividing 3 * count (translation of level 3)
    found = fixed_points_bruteforce(f, n, 3 * count)
    assert len(found) == count


@given(unimodular_2x2(), st.integers(1, 3))
def test_count_matches_eigenvalue_product(m, n):
    f = TorusAut(QuadOrder.Z2, m)
    count = torus_fixed_count(f, n)
    if count is InfiniteFixedLocus:
        assert lefschetz_count(f, n) == pytest.approx(0, abs=1e-6)
    else:
        assert lefschetz_count(f, n) == pytest.approx(count, rel=1e-9, abs=1e-9)


def test_translation_can_remove_fixed_points():
    ident = TorusAut(QuadOrder.Z2, ((1, 0), (0, 1)))
    assert torus_fixed_count(ident) is InfiniteFixedLocus
    shift = TorusAut(QuadOrder.Z2, ((1, 0), (0, 1)), TorsionPoint(2, (1, 0, 0, 0)))
    assert torus_fixed_count(shift) == 0
    assert torus_fixed_count(shift, 2) is InfiniteFixedLocus


def test_homothety_fixed_points():
    f = TorusAut(QuadOrder.GaussianZi, (((0, 1), 0), (0, (0, 1))))
    assert torus_fixed_count(f) == 4
    g = TorusAut(QuadOrder.EisensteinZw, (((0, 1), 0), (0, (0, 1))))
    assert torus_fixed_count(g) == 9
    with pytest.raises(ValueError):
        torus_fixed_count(f, 0)


def test_torsion_orbit_closed():
    f = cat_map()
    r = torsion_orbit([f], TorsionPoint(5, (1, 0, 0, 0)))
    assert r.is_finite
    pts = set(r.points)
    assert all(f.apply(z) in pts for z in pts)
    with pytest.raises(LevelOverflow):
        torsion_orbit([f], TorsionPoint(10**7, (1, 0, 0, 0)), max_level=10**6)
    assert torsion_orbit([f], TorsionPoint(101, (1, 2, 3, 4)), budget=3).tag == "BudgetExceeded"


# --- Kummer types ----------------------------------------------------------

def test_kummer_type_validate():
    assert kummer_type_validate(QuadOrder.Z2, 2).to_json() == {"verdict": "Valid", "case": 2}
    assert kummer_type_validate(QuadOrder.GaussianZi, 4).case == 3
    assert kummer_type_validate(QuadOrder.EisensteinZw, 3).case == 4
    assert kummer_type_validate(QuadOrder.EisensteinZw, 6).case == 5
    assert kummer_type_validate(QuadOrder.Z2, 5).tag == EXCLUDED_TAG
    assert kummer_type_validate(QuadOrder.Z2, 5, weights=(1, 2)).tag == EXCLUDED_TAG
    assert kummer_type_validate(QuadOrder.Z2, 4).tag == "Invalid"
    assert kummer_type_validate(QuadOrder.GaussianZi, 4, weights=(1, 3)).tag == "Invalid"
    with pytest.raises(ValueError):
        kummer_type_validate(QuadOrder.Z2, 0)


# --- continued fractions and the atlas --------------------------------------

def test_hirzebruch_jung_examples():
    assert hirzebruch_jung((5, 2)) == [3, 2]
    assert hirzebruch_jung((2, 1)) == [2]
    assert hirzebruch_jung((3, 1)) == [3]
    assert hirzebruch_jung(CyclicSingularity(7, 3)) == [3, 2, 2]
    with pytest.raises(ValueError):
        CyclicSingularity(6, 4)


@given(st.integers(2, 500), st.integers(1, 499))
def test_hirzebruch_jung_roundtrip(n, q):
    assume(q < n and math.gcd(n, q) == 1)
    bs = hirzebruch_jung((n, q))
    assert all(b >= 2 for b in bs)
    assert continued_fraction_value(bs) == Fraction(n, q)


def test_atlas():
    atlas = chart_atlas()
    for m in atlas.transitions.values():
        assert abs(m.det()) == 1
    for i, j, k in itertools.permutations(range(3), 3):
        assert atlas.transitions[(i, j)] @ atlas.transitions[(j, k)] == atlas.transitions[(i, k)]
    u = atlas.quotient
    assert [a + b for a, b in zip(u[0], u[2])] == [2 * x for x in u[1]]
    assert [a + b for a, b in zip(u[1], u[3])] == [3 * x for x in u[2]]
    # w2 = v0^2 w0^5
    assert atlas.transitions[(0, 2)].tolist()[0][1] == 2 and atlas.transitions[(0, 2)].tolist()[1][1] == 5
    doc = atlas.to_json()
    assert doc["relations"] == ["u0*u2 = u1^2", "u1*u3 = u2^3"]


def test_exceptional_fixed_points():
    report = exceptional_fixed_points(chart_atlas(), 2.0, 0.5)
    assert [c["count"] for c in report] == [2, 2]
    pts = [p for c in report for p in c["fixed_points"]]
    mults = {tuple(p[k]) for p in pts for k in ("tangent_exponents", "transverse_exponents")}
    assert {(-2, 1), (-1, 3), (5, 0)} <= mults
    assert all(p["saddle"] for p in pts)
    # tangent multipliers along E1 and E2 at their first fixed points
    assert [c["fixed_points"][0]["tangent_multiplier"] for c in report] == [0.125, 0.0625]
    with pytest.raises(ValueError):
        exceptional_fixed_points(chart_atlas(), 0.5, 2.0)


def test_equivariant_multiplier():
    m = equivariant_multiplier((-2, 1))
    assert m.value(2.0, 0.5) == 0.125
    assert m.classify(2.0, 0.5) == "contracting"
    assert equivariant_multiplier((0, 0)).classify(2.0, 0.5) == "neutral"
