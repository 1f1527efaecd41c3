from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from wehlerdyn.corpus import named_rng, random_orbit8_surface
from wehlerdyn.errors import (
    ContainedFiber,
    DegenerateFiber,
    FieldMismatch,
    NormalFormRequired,
    NotOnFiber,
    SingularAtV,
)
from wehlerdyn.numcore import INFINITY, ZERO, ProjPoint1, normalize_proj
from wehlerdyn.orbits import brute_force_census
from wehlerdyn.wehler import (
    ALL_EXPONENTS,
    V_POINTS,
    BiQuadraticCurve,
    Smoothness,
    SurfacePoint,
    WehlerSurface,
    curve_translation,
    eval_surface,
    fiber_containment_free,
    fiber_content_bound,
    fiber_discriminant,
    make_point,
    no_contained_fiber_heuristic,
    on_surface,
    orbit8_family,
    period2_test,
    sigma,
    smooth_biquadratic_check,
    vieta_partner,
)

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=20)
proj = st.one_of(st.just(INFINITY), rationals.map(lambda q: normalize_proj(q.numerator, q.denominator)))
coeff_maps = st.dictionaries(st.sampled_from(ALL_EXPONENTS), st.integers(-4, 4), min_size=4)


@st.composite
def surface_with_point(draw):
    """Random surface forced through a random point (finite third coordinate free)."""
    coeffs = draw(coeff_maps)
    x, y, z = draw(proj), draw(proj), draw(proj)
    pt = SurfacePoint(x, y, z)
    # solve for one coefficient whose monomial is nonzero at pt
    target = next((e for e in ALL_EXPONENTS
                   if all((c.a if k == 2 else c.b if k == 0 else c.a * c.b) != 0
                          for c, k in zip(pt.coords, e))), None)
    assume(target is not None)
    coeffs = {e: Fraction(c) for e, c in coeffs.items() if e != target}
    coeffs[target] = Fraction(1)
    S1 = WehlerSurface(coeffs)
    rest = dict(coeffs)
    rest[target] = Fraction(0)
    assume(any(rest.values()))
    v_rest = eval_surface(WehlerSurface(rest), pt)
    v_one = eval_surface(S1, pt) - v_rest
    coeffs[target] = -v_rest / v_one
    assume(any(coeffs.values()))
    return WehlerSurface(coeffs), pt


@st.composite
def fp_surface(draw):
    p = draw(st.sampled_from([3, 5, 7]))
    coeffs = draw(st.dictionaries(st.sampled_from(ALL_EXPONENTS), st.integers(0, p - 1), min_size=3))
    assume(any(c % p for c in coeffs.values()))
    return WehlerSurface(coeffs, p=p)


# --- construction ----------------------------------------------------------

def test_surface_rejects_bad_input():
    with pytest.raises(ValueError):
        WehlerSurface({(0, 0, 3): 1})
    with pytest.raises(ValueError):
        WehlerSurface({(0, 0, 0): 0})
    with pytest.raises(ValueError):
        WehlerSurface({(0, 0, 0): 1}, p=9)


def test_reduce_mod():
    S = WehlerSurface({(2, 0, 0): Fraction(1, 2), (0, 2, 0): Fraction(3, 2), (1, 1, 1): 7})
    R = S.reduce_mod(7)
    assert R.p == 7 and R.coeffs == {(2, 0, 0): 1, (0, 2, 0): 3}
    # the equation is made primitive first, so a common factor p survives
    assert WehlerSurface({(0, 0, 0): 5, (1, 0, 0): 10}).reduce_mod(5).coeffs == {(0, 0, 0): 1, (1, 0, 0): 2}
    with pytest.raises(FieldMismatch):
        R.reduce_mod(7)


def test_eval_at_infinity_uses_homogenization():
    # x^2 term: x1^2 x0^0 ... is 1 at x = inf, the constant is 0 there
    S = WehlerSurface({(2, 0, 0): 1, (0, 0, 0): -1})
    assert eval_surface(S, (INFINITY, ZERO, ZERO)) == 1
    assert on_surface(S, (ProjPoint1(1, 1), ZERO, ZERO))
    assert on_surface(S, (ProjPoint1(2, 1), ZERO, ZERO)) is False
    # y0 = z0 = 0 kills every monomial, so this point lies on S
    assert on_surface(S, (ProjPoint1(2, 1), INFINITY, INFINITY))


def test_make_point():
    pt = make_point([Fraction(1, 2), None, (4, -2)])
    assert pt == SurfacePoint(ProjPoint1(1, 2), INFINITY, ProjPoint1(-2, 1))
    assert make_point([3, 4, 5], p=3).x == ZERO


# --- Vieta -----------------------------------------------------------------

def test_vieta_partner_examples():
    # x^2 - 3x + 2 has roots 1 and 2
    assert vieta_partner(1, -3, 2, ProjPoint1(1, 1)) == ProjPoint1(2, 1)
    # A = 0: roots are infinity and -C/B
    assert vieta_partner(0, 2, -4, INFINITY) == ProjPoint1(2, 1)
    assert vieta_partner(0, 2, -4, ProjPoint1(2, 1)) == INFINITY
    # double root is fixed
    assert vieta_partner(1, -2, 1, ProjPoint1(1, 1)) == ProjPoint1(1, 1)
    assert vieta_partner(0, 0, 1, INFINITY) == INFINITY
    assert vieta_partner(Fraction(1, 2), Fraction(-3, 2), 1, ProjPoint1(1, 1)) == ProjPoint1(2, 1)
    assert vieta_partner(1, 0, 6, ProjPoint1(1, 1), p=7) == ProjPoint1(6, 1)
    with pytest.raises(NotOnFiber):
        vieta_partner(1, 0, -1, ProjPoint1(2, 1))
    with pytest.raises(DegenerateFiber):
        vieta_partner(0, 0, 0, ZERO)


@given(rationals, rationals, st.integers(-5, 5).filter(bool))
def test_vieta_partner_roundtrip(r, s, lead):
    # the quadratic lead (X - r W)(X - s W)
    A, B, C = lead, -lead * (r + s), lead * r * s
    R, Sx = normalize_proj(r.numerator, r.denominator), normalize_proj(s.numerator, s.denominator)
    assert vieta_partner(A, B, C, R) == Sx
    assert vieta_partner(A, B, C, Sx) == R


# --- involutions over Q ----------------------------------------------------

@given(surface_with_point(), st.sampled_from([1, 2, 3]))
def test_sigma_properties_over_q(data, axis):
    S, pt = data
    assert on_surface(S, pt)
    try:
        image = sigma(S, axis, pt)
    except ContainedFiber:
        assume(False)
    assert on_surface(S, image)
    for k in (1, 2, 3):
        if k != axis:
            assert image[k] == pt[k]
    assert sigma(S, axis, image) == pt


def test_sigma_rejects_off_surface_point():
    S = WehlerSurface({(2, 0, 0): 1, (0, 0, 0): -1})
    with pytest.raises(NotOnFiber):
        sigma(S, 1, make_point([2, 0, 0]))


def test_sigma_contained_fiber():
    # x^2 - 1 = 0 contains every fiber of the second projection
    S = WehlerSurface({(2, 0, 0): 1, (0, 0, 0): -1})
    with pytest.raises(ContainedFiber):
        sigma(S, 2, make_point([1, 0, 0]))
    assert no_contained_fiber_heuristic(S) is False
    assert fiber_containment_free(S) is False


def test_sigma_field_mismatch():
    S = WehlerSurface({(2, 0, 0): 1, (0, 0, 0): -1}, p=5)
    with pytest.raises(FieldMismatch):
        sigma(S, 1, make_point([1, 0, 0]))


# --- involutions over F_p --------------------------------------------------

@given(fp_surface())
def test_sigma_properties_over_fp(S):
    for pt in brute_force_census(S)[:40]:
        for axis in (1, 2, 3):
            try:
                image = sigma(S, axis, pt)
            except ContainedFiber:
                continue
            assert eval_surface(S, image) == 0
            assert sigma(S, axis, image) == pt


# --- orbit-8 family --------------------------------------------------------

def test_orbit8_family_rejects_corner_terms():
    with pytest.raises(ValueError):
        orbit8_family({(0, 0, 0): 1})
    with pytest.raises(SingularAtV):
        orbit8_family({(1, 1, 1): 1})


@given(st.integers(0, 10**6))
def test_v_is_invariant(seed):
    S = random_orbit8_surface(named_rng("test-v", seed))
    vset = set(V_POINTS)
    for pt in V_POINTS:
        assert on_surface(S, pt)
        for axis in (1, 2, 3):
            assert sigma(S, axis, pt) in vset


def test_certificate_and_content_bound():
    S = random_orbit8_surface(named_rng("test-cert", 1))
    assert fiber_containment_free(S)
    for axis in (1, 2, 3):
        assert fiber_content_bound(S, axis) > 0
    with pytest.raises(FieldMismatch):
        fiber_containment_free(S.reduce_mod(11))


# --- (2,2) curves ----------------------------------------------------------

def test_curve_translation_sends_origin_to_corner():
    c = BiQuadraticCurve.normal_form(1, 2, 3, 5, 7)
    assert curve_translation(c, (ZERO, INFINITY)) == (INFINITY, ZERO)


def test_period2_examples():
    ok, img = period2_test(BiQuadraticCurve.normal_form(0, 1, 1, 1, 1))
    assert ok and img == (ZERO, INFINITY)
    ok, img = period2_test(BiQuadraticCurve.normal_form(1, 1, 1, 1, 1))
    assert not ok and img != (ZERO, INFINITY)


def test_normal_form_required():
    c = BiQuadraticCurve({(2, 0): 1, (0, 2): 1, (0, 0): -1})
    with pytest.raises(NormalFormRequired):
        period2_test(c)
    with pytest.raises(NormalFormRequired):
        fiber_discriminant(c)
    with pytest.raises(NormalFormRequired):
        period2_test(BiQuadraticCurve.normal_form(1, 1, 1, 1, 0))


nz = st.integers(-9, 9).filter(bool)


@given(st.integers(-9, 9), st.integers(-9, 9), st.integers(-9, 9), st.integers(-9, 9), nz)
def test_discriminant_alpha_only_moves_b(alpha, beta, gamma, delta, eps):
    d = fiber_discriminant(BiQuadraticCurve.normal_form(alpha, beta, gamma, delta, eps))
    d0 = fiber_discriminant(BiQuadraticCurve.normal_form(0, beta, gamma, delta, eps))
    assert d[0] == d0[0] and d[2:] == d0[2:]
    assert d[1] == 2 * gamma * delta - 4 * alpha * eps
    assert d[4] == eps * eps


@given(nz, nz, st.integers(-9, 9), nz, st.booleans())
def test_period2_iff_alpha_zero(beta, gamma, delta, eps, zero_alpha):
    alpha = 0 if zero_alpha else delta or 1
    c = BiQuadraticCurve.normal_form(alpha, beta, gamma, delta, eps)
    assume(smooth_biquadratic_check(c) is Smoothness.SMOOTH)
    ok, _ = period2_test(c)
    assert ok == (alpha == 0)


def test_smoothness_verdicts():
    assert smooth_biquadratic_check(BiQuadraticCurve.normal_form(1, 2, 3, 5, 7)) is Smoothness.SMOOTH
    # alpha = beta = gamma = 0 degenerates at infinity
    assert smooth_biquadratic_check(BiQuadraticCurve.normal_form(0, 0, 0, 1, 1)) \
        is Smoothness.SINGULAR_AT_INFINITY
