import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wehlerdyn.errors import (
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
from wehlerdyn.nsgeom import (
    KAPPA0,
    WEHLER_GRAM,
    WEHLER_INVOLUTIONS,
    Isometry,
    LatticeForm,
    MeasureSpec,
    RealClass,
    axis_geometry,
    classify_isometry,
    degree_wrt,
    dominant_eigen,
    invariant_curve_degree_bound,
    invariant_curve_degree_bound_log2,
    invariant_plane,
    is_unipotent,
    lorenzian_gap,
    parabolic_fixed_line,
    periodic_curve_degree_bound,
    pingpong_loxodromic,
    pingpong_threshold,
    restriction_scalar,
    stationary_operator,
    theta_pair,
    verify_involution_data,
    verify_rational_stationary,
    wehler_ns_rep,
    word_matrix,
)
from wehlerdyn.numcore import Matrix, spectral_radius
from wehlerdyn.orbits import GroupWord

LAM = 9 + 4 * math.sqrt(5)


@st.composite
def reduced_words(draw, min_size=0, max_size=8):
    n = draw(st.integers(min_size, max_size))
    out = []
    for _ in range(n):
        out.append(draw(st.sampled_from([c for c in (1, 2, 3) if not out or c != out[-1]])))
    return GroupWord(tuple(out))


def test_lattice_form_signature():
    LatticeForm(WEHLER_GRAM)
    with pytest.raises(SignatureError):
        LatticeForm([[1, 0], [0, 1]])
    with pytest.raises(SignatureError):
        LatticeForm([[0, 1], [2, 0]])
    with pytest.raises(SignatureError):
        LatticeForm([[1, 0], [0, 0]])


def test_isometry_check():
    form = LatticeForm(WEHLER_GRAM)
    with pytest.raises(NotAnIsometry):
        Isometry([[2, 0, 0], [0, 1, 0], [0, 0, 1]], form)
    other = Isometry([[1, 0], [0, 1]], LatticeForm([[1, 0], [0, -1]]))
    with pytest.raises(MixedLattices):
        word_matrix((1,)) @ other


def test_involution_gate():
    verify_involution_data(WEHLER_INVOLUTIONS)
    bad = list(WEHLER_INVOLUTIONS)
    bad[0] = Matrix([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    with pytest.raises(InvolutionCheckFailed):
        verify_involution_data(bad)
    with pytest.raises(InvolutionCheckFailed):
        wehler_ns_rep([[[-1, 0, 0], [2, 1, 0], [2, 0, 1]],
                       [[1, 2, 0], [0, -1, 0], [0, 2, 1]],
                       [[1, 0, 2], [0, 1, 2], [0, 0, 1]]])


@given(reduced_words())
def test_word_matrices_are_isometries(word):
    g = word_matrix(word)
    G = WEHLER_GRAM
    assert g.m.T @ G @ g.m == G
    # pullback reverses composition
    inv = word_matrix(word.inverse())
    assert g.m @ inv.m == Matrix.identity(3)


@given(reduced_words(min_size=1))
def test_classification_consistent(word):
    g = word_matrix(word)
    t = classify_isometry(g)
    if t.kind == "elliptic":
        assert g.m ** t.order == Matrix.identity(3)
    elif t.kind == "loxodromic":
        rho, _ = spectral_radius(g.m)
        assert t.lam > 1 and abs(t.lam - rho) <= 1e-9 * rho
        # conjugate words have the same type
        assert classify_isometry(word_matrix(word.inverse())).lam == pytest.approx(t.lam, rel=1e-12)


def test_classification_examples():
    t = classify_isometry(word_matrix((3, 2, 1)))
    assert t.kind == "loxodromic"
    assert abs(t.lam - LAM) <= 1e-10
    assert t.to_json()["charpoly"] == [1, -17, -17, 1]
    p = classify_isometry(word_matrix((2, 1)))
    assert p.kind == "parabolic" and p.to_json()["charpoly"] == [1, -3, 3, -1]
    e = classify_isometry(word_matrix((1,)))
    assert e.kind == "elliptic" and e.order == 2
    assert classify_isometry(word_matrix(())).order == 1


def test_parabolic_structure():
    g = word_matrix((2, 1))
    assert is_unipotent(g.m)
    N = g.m - Matrix.identity(3)
    assert N @ N != Matrix.zeros(3) and N @ N @ N == Matrix.zeros(3)
    assert parabolic_fixed_line(g) == (0, 0, 1)
    with pytest.raises(PreconditionViolated):
        parabolic_fixed_line(word_matrix((3, 2, 1)))


def test_theta_pair_and_axis():
    g = word_matrix((3, 2, 1))
    tp, tm = theta_pair(g)
    form = LatticeForm(WEHLER_GRAM)
    M = g.m.to_float()
    assert np.allclose(M @ tp.as_array(), LAM * tp.as_array(), atol=1e-9)
    assert np.allclose(M @ tm.as_array(), tm.as_array() / LAM, atol=1e-9)
    for t in (tp, tm):
        assert abs(form.pair(t, KAPPA0) - 1) <= 1e-12
        assert abs(form.square(t)) <= 1e-9
    geo = axis_geometry(tp, tm)
    assert geo.m_sq == pytest.approx(0.5 * form.pair(tp, tm), rel=1e-12)
    assert 0 < geo.m_sq <= 1
    with pytest.raises(NotLoxodromic):
        theta_pair(word_matrix((2, 1)))
    with pytest.raises(DegenerateAxis):
        axis_geometry(tp, tp.scale(-1))


def test_lorenzian_gap_preconditions():
    m = RealClass((0.3, 0.3, 0.0))
    e = RealClass((1.0, -1.0, 0.0))       # <e|m> = 0 but <e|kappa0> = 0
    with pytest.raises(PreconditionViolated):
        lorenzian_gap(e, m)
    with pytest.raises(PreconditionViolated):
        lorenzian_gap(e, RealClass((0.0, 0.0, 1.0)))


def test_lorenzian_gap_verdict():
    form = LatticeForm(WEHLER_GRAM)
    k = KAPPA0.as_array()
    m = RealClass((0.3, 0.3, 0.0))
    msq = form.square(m)
    assert 0 < msq < 1
    # solve for e = a c1 + b c2 + c c3 with <e|m> = 0, <e|k> = 1, e negative
    G = WEHLER_GRAM.to_float()
    A = np.vstack([G @ m.as_array(), G @ k])
    base = np.linalg.lstsq(A, np.array([0.0, 1.0]), rcond=None)[0]
    null = np.cross(A[0], A[1])
    for t in (0.0, 1.0, -2.5):
        e = RealClass(tuple(base + t * null))
        lhs, rhs, ok = lorenzian_gap(e, m)
        assert ok and lhs >= rhs - 1e-9


def test_degree_wrt_is_pairing():
    g = word_matrix((3, 2, 1))
    d = degree_wrt(g)
    k = KAPPA0.as_array()
    assert d == pytest.approx(float(k @ WEHLER_GRAM.to_float() @ (g.m.to_float() @ k)))
    assert degree_wrt(word_matrix(())) == pytest.approx(1.0)


def test_degree_bounds():
    assert invariant_curve_degree_bound(1, 3, 0) == 2.0 ** 54
    assert invariant_curve_degree_bound(2, 3, 0) == 2.0 ** 110
    assert invariant_curve_degree_bound_log2(10**30, 3, 0) > 1024
    assert invariant_curve_degree_bound(10**30, 3, 0) == math.inf
    assert periodic_curve_degree_bound(1.0, 4, 1, False) == 8
    assert periodic_curve_degree_bound(1.0, 4, 1, True) == 4
    with pytest.raises(PreconditionViolated):
        periodic_curve_degree_bound(0.0, 3, 0, True)
    with pytest.raises(PreconditionViolated):
        invariant_curve_degree_bound(0.5, 3, 0)


@given(st.floats(1, 50), st.integers(3, 30), st.floats(0, 100))
def test_invariant_bound_monotone(deg, rho, c):
    assert invariant_curve_degree_bound_log2(deg * 2, rho, c) > invariant_curve_degree_bound_log2(deg, rho, c)
    assert invariant_curve_degree_bound_log2(deg, rho + 1, c) > invariant_curve_degree_bound_log2(deg, rho, c)


def test_measure_spec_validation():
    with pytest.raises(ValueError):
        MeasureSpec(((1, 2),), (Fraction(1, 2),))
    with pytest.raises(ValueError):
        MeasureSpec(((1, 2), (2, 3)), (Fraction(3, 2), Fraction(-1, 2)))
    nu = MeasureSpec.uniform([(1, 2), (2, 3)])
    assert nu.to_json() == {"support": ["1,2", "2,3"], "weights": ["1/2", "1/2"]}


def test_dominant_eigen_uniform_parabolics():
    rep = wehler_ns_rep()
    nu = MeasureSpec.uniform([(2, 1), (3, 2)])
    P = stationary_operator(nu, rep)
    w, alpha = dominant_eigen(P, rep.form)
    assert alpha == pytest.approx(3.0, abs=1e-10)
    assert rep.form.square(w.as_array()) == pytest.approx(1.0, abs=1e-10)
    rho, _ = spectral_radius(P)
    assert alpha == pytest.approx(rho, rel=1e-10)
    assert np.allclose(w.as_array() / w.as_array().sum(), [0.5, 0.0, 0.5], atol=1e-8)


@given(st.integers(1, 7))
def test_dominant_eigen_seeded_weights(k):
    rep = wehler_ns_rep()
    q = Fraction(k, 8)
    nu = MeasureSpec(((1, 2), (2, 3)), (q, 1 - q))
    P = stationary_operator(nu, rep)
    w, alpha = dominant_eigen(P, rep.form)
    res = np.linalg.norm(P.to_float() @ w.as_array() - alpha * w.as_array())
    assert res <= 1e-9 and alpha > 1
    assert rep.form.square(w.as_array()) > 0


def test_dominant_eigen_no_gap_for_single_parabolic():
    rep = wehler_ns_rep()
    P = stationary_operator(MeasureSpec.uniform([(2, 1)]), rep)
    with pytest.raises(NoGap):
        dominant_eigen(P, rep.form, max_iter=2000)


def test_rational_stationary_and_restriction():
    rep = wehler_ns_rep()
    g = word_matrix((3, 2, 1), rep)
    sym = MeasureSpec.uniform([g, Isometry(g.m.inverse(), rep.form)])
    P = stationary_operator(sym)
    assert restriction_scalar(P, invariant_plane(g)) == 9
    # the -1 eigenvector (1,-3,1) is negative, so it is rejected as w
    with pytest.raises(PreconditionViolated):
        verify_rational_stationary(sym, (1, -3, 1))
    nu = MeasureSpec.uniform([(1,), (2,), (3,)])
    assert verify_rational_stationary(nu, (1, 1, 1)) == Fraction(5, 3)
    with pytest.raises(NotEigenvector):
        verify_rational_stationary(nu, (1, 2, 3))


def test_pingpong():
    g, h = word_matrix((2, 1)), word_matrix((3, 2))
    N = pingpong_threshold(g, h)
    assert pingpong_loxodromic(g, h, N).kind == "loxodromic"
    assert all(pingpong_loxodromic(g, h, n).kind == "loxodromic" for n in range(N, N + 5))
    with pytest.raises(SameFixedLine):
        pingpong_loxodromic(g, g, 1)
