import numpy as np
import pytest
from hypothesis import given, strategies as st

import lamekit.lame as lame
from lamekit.elliptic import EllipticInvariants, WeierstrassP
from lamekit.errors import PoleProximity, RecurrenceBreakdown, UnsupportedN
from lamekit.lame import (
    LamePotentialSpec,
    LameSymmetrySpec,
    assemble_fields,
    even_coefficients,
    even_cw_closed_form,
    even_pair,
    find_gc_roots,
    gc_residuals,
    odd_coefficients,
    odd_pair,
    odd_trivial_pair,
    r1_r2_polynomials,
    reduced_cw,
    reduced_lie_operator,
)
from lamekit.numerics import Polynomial
from lamekit.symcore import compute_cw, fundamental_solutions, invariant_report, lie_residual_relative

from conftest import central_diff

params = st.tuples(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3))
small_polys = st.lists(st.floats(-2, 2), min_size=0, max_size=4).map(Polynomial)


def inv_of(g2, g3):
    return EllipticInvariants(g2, g3)


# --- R1 / R2 -------------------------------------------------------------------

def test_zero_symmetry_gives_zero():
    pot = LamePotentialSpec(Polynomial([1, -2]), Polynomial([0.5]), inv_of(1, 2))
    R1, R2 = r1_r2_polynomials(pot, LameSymmetrySpec(Polynomial(), Polynomial()))
    assert R1.is_zero and R2.is_zero


def test_n1_even_example_vanishes():
    c0, g2, g3 = 0.7, 2.0, -0.3
    pot = LamePotentialSpec(Polynomial([c0, -2]), Polynomial(), inv_of(g2, g3))
    R1, R2 = r1_r2_polynomials(pot, LameSymmetrySpec(Polynomial([c0, 1]), Polynomial()))
    assert R1.max_abs_coeff() < 1e-12 and R2.max_abs_coeff() < 1e-12


def test_bare_symmetry_nonzero():
    pot = LamePotentialSpec(Polynomial(), Polynomial(), inv_of(1, 1))
    _, R2 = r1_r2_polynomials(pot, LameSymmetrySpec(Polynomial([0, 1]), Polynomial()))
    # 12 p0 from the (C + 3 p0) A' term
    assert R2.tolist() == [0, 12]


@given(small_polys, small_polys, small_polys, small_polys, st.floats(-3, 3), st.floats(-3, 3))
def test_transcription_matches_direct_substitution(A, B, C, E, g2, g3):
    pot = LamePotentialSpec(C, E, inv_of(g2, g3))
    sym = LameSymmetrySpec(A, B)
    R1, R2 = r1_r2_polynomials(pot, sym)
    D1, D2 = reduced_lie_operator(pot, sym)
    scale = 1 + max(R1.max_abs_coeff(), R2.max_abs_coeff(), D1.max_abs_coeff())
    assert (R1 - D1).max_abs_coeff() <= 1e-12 * scale
    assert (R2 - D2).max_abs_coeff() <= 1e-12 * scale


def test_reduction_matches_pointwise_lie_residual():
    # a pair that is not a symmetry: R1 + p1 R2 must equal the raw Lie expression
    inv = inv_of(2.0, 0.5)
    pot = LamePotentialSpec(Polynomial([0.3, -1.5]), Polynomial([0.2]), inv)
    sym = LameSymmetrySpec(Polynomial([1, 0.5, 1]), Polynomial([0.4]))
    R1, R2 = r1_r2_polynomials(pot, sym)
    pair = assemble_fields(pot, sym, c_w=1.0)
    ev = WeierstrassP.from_invariants(inv)
    for x in pair.nodes(7):
        p0, p1 = ev(x)
        zd, wd = pair.z.derivs(x), pair.w.derivs(x)
        raw = zd[3] + 4 * wd[0] * zd[1] + 2 * wd[1] * zd[0]
        assert R1(p0) + p1 * R2(p0) == pytest.approx(raw, rel=1e-9, abs=1e-9)


# --- even family ---------------------------------------------------------------

def test_even_examples():
    c0, g2, g3 = 0.9, 1.7, -0.6
    inv = inv_of(g2, g3)
    f1 = even_coefficients(1, c0, inv)
    assert f1.a.tolist() == [c0, 1] and f1.c1 == -2
    f2 = even_coefficients(2, c0, inv)
    assert f2.a == pytest.approx([c0**2 / 9 - g2 / 4, c0 / 3, 1])
    f3 = even_coefficients(3, c0, inv)
    assert f3.a == pytest.approx([c0**3 / 225 - c0 * g2 / 15 - g3 / 4, 2 * c0**2 / 75 - g2 / 4, c0 / 5, 1])


@pytest.mark.parametrize("n", range(1, 9))
@given(p=params)
def test_even_family_solves_system(n, p):
    c0, g2, g3 = p
    fam = even_coefficients(n, c0, inv_of(g2, g3))
    R1, R2 = r1_r2_polynomials(fam.potential, fam.symmetry)
    m = max(1.0, np.max(np.abs(fam.a)))
    assert R1.max_abs_coeff() <= 1e-10 * m and R2.max_abs_coeff() <= 1e-10 * m


def test_even_needs_positive_n():
    with pytest.raises(ValueError):
        even_coefficients(0, 1.0, inv_of(1, 1))


def test_cw_closed_form_examples():
    assert even_cw_closed_form(1, 0, inv_of(0, 4)) == 1
    g2 = 1.2
    assert even_cw_closed_form(2, np.sqrt(3 * g2), inv_of(g2, 0.7)) == pytest.approx(0, abs=1e-14)
    assert even_cw_closed_form(1, 1, inv_of(2, 3)) == 1.25
    with pytest.raises(UnsupportedN):
        even_cw_closed_form(4, 1, inv_of(1, 1))


@pytest.mark.parametrize("n", [1, 2, 3])
@given(p=params)
def test_exact_cw_matches_closed_form(n, p):
    c0, g2, g3 = p
    inv = inv_of(g2, g3)
    fam = even_coefficients(n, c0, inv)
    F, G = reduced_cw(fam.potential, fam.symmetry)
    tol = 1e-10 * (1 + abs(c0) + abs(g2) + abs(g3)) ** (2 * n + 1)
    assert G.max_abs_coeff() <= tol
    assert all(abs(F.coeff(i)) <= tol for i in range(1, F.degree + 1))
    want = even_cw_closed_form(n, c0, inv)
    assert fam.c_w == pytest.approx(want, rel=1e-9, abs=1e-9 * (1 + abs(c0)) ** (2 * n + 1))


def test_n1_numeric_cw():
    pair = even_pair(1, 1.0, inv_of(2, 3))
    cw, dev = compute_cw(pair.w, pair.z, pair.nodes(30))
    assert cw == pytest.approx(1.25, rel=1e-8)


# --- odd family ----------------------------------------------------------------

@pytest.mark.parametrize("n", range(0, 6))
def test_odd_trivial_invariants(n):
    fam = odd_coefficients(n, 0.0, inv_of(0, 0))
    assert fam.b.tolist() == [0.0] * n + [1.0]
    assert gc_residuals(fam) == (0.0, 0.0, 0.0)


def test_odd_n0():
    fam = odd_coefficients(0, 1.3, inv_of(2, 1))
    assert fam.b.tolist() == [1.0] and fam.c1 == -3.75


def test_odd_n1_coefficient():
    fam = odd_coefficients(1, 2.0, inv_of(1, 1))
    assert fam.b.tolist() == [0.5, 1.0]


@pytest.mark.parametrize("n", range(0, 7))
@given(p=params)
def test_recurrence_and_gc_match_r1(n, p):
    c0, g2, g3 = p
    fam = odd_coefficients(n, c0, inv_of(g2, g3))
    R1, R2 = r1_r2_polynomials(fam.potential, fam.symmetry)
    assert R2.is_zero
    scale = 1 + np.max(np.abs(fam.b)) * (1 + abs(c0) + abs(g2) + abs(g3)) ** 3
    gc = gc_residuals(fam)
    for i in range(3):
        assert R1.coeff(i) == pytest.approx(gc[i], abs=1e-10 * scale)
    for i in range(3, n + 6):
        assert abs(R1.coeff(i)) <= 1e-10 * scale


def test_recurrence_breakdown(monkeypatch):
    monkeypatch.setattr(lame, "odd_c1", lambda n: -3.75)
    with pytest.raises(RecurrenceBreakdown):
        odd_coefficients(1, 1.0, inv_of(1, 1))


def test_gc_search_reports_only_roots():
    for root in find_gc_roots(1, starts=3):
        fam = odd_coefficients(1, root["c0"], inv_of(root["g2"], root["g3"]))
        r = np.array(gc_residuals(fam))
        assert np.max(np.abs(r)) < 1e-8
        pair = odd_pair(1, root["c0"], inv_of(root["g2"], root["g3"]))
        assert max(lie_residual_relative(pair.w, pair.z, x) for x in pair.nodes(20)) < 1e-6


# --- closed-form odd pair --------------------------------------------------------

def test_odd_trivial_n0_example():
    pair = odd_trivial_pair(0, 0.0)
    assert pair.w(2.0) == pytest.approx(-15 / 16)
    y = pair.meta["general_solution"](0.0, 1.0)
    d = y.derivs(1.5)
    assert d[2] == pytest.approx(15 / 4 * 1.5**0.5)
    assert d[2] + pair.w(1.5) * d[0] == pytest.approx(0, abs=1e-14)


@pytest.mark.parametrize("n", range(0, 5))
def test_odd_trivial_parabolic(n):
    pair = odd_trivial_pair(n, 0.3, (0.9, 1.9))
    cw, _ = compute_cw(pair.w, pair.z, pair.nodes(50))
    assert abs(cw) < 1e-10 and pair.case == "parabolic"
    fp = fundamental_solutions(pair)
    # the closed form with matching initial data reproduces the quadrature solution
    for y in (fp.y1, fp.y2):
        d = y.derivs(fp.x_b, 1)
        u = fp.x_b + 0.3
        e1, e2 = -1.5 - n, n + 2.5
        M = np.array([[u**e1, u**e2], [e1 * u ** (e1 - 1), e2 * u ** (e2 - 1)]])
        a1, a2 = np.linalg.solve(M, d[:2])
        closed = pair.meta["general_solution"](a1, a2)
        for x in pair.nodes(20):
            assert y(x) == pytest.approx(closed(x), rel=1e-6, abs=1e-9)


def test_odd_trivial_domain_guard():
    with pytest.raises(ValueError):
        odd_trivial_pair(1, -1.5)


# --- assembled fields ----------------------------------------------------------

def test_n1_z_derivative_is_wp_prime():
    inv = inv_of(3.0, 0.4)
    pair = even_pair(1, 0.2, inv)
    ev = WeierstrassP.from_invariants(inv)
    for x in pair.nodes(9):
        assert pair.z.derivs(x)[1] == ev.derivatives(x, 1)[1]


def test_n2_lie_residual():
    pair = even_pair(2, -0.4, inv_of(2.5, 0.8))
    assert max(lie_residual_relative(pair.w, pair.z, x) for x in pair.nodes(100)) < 1e-7
    rep = invariant_report(pair)
    assert rep["lie_ok"] and rep["cw_ok"]


@pytest.mark.parametrize("n", [1, 3])
def test_derivatives_match_finite_differences(n):
    pair = even_pair(n, 0.6, inv_of(1.5, -0.7))
    for x in pair.nodes(7)[1:-1]:
        d = pair.z.derivs(x)
        for k in range(1, 4):
            fd = central_diff(lambda t: pair.z.derivs(t)[k - 1], x, 1e-5)
            assert d[k] == pytest.approx(fd, rel=1e-5, abs=1e-7)
        assert pair.w.derivs(x)[1] == pytest.approx(central_diff(pair.w, x), rel=1e-5, abs=1e-7)


@pytest.mark.parametrize("n", [0, 1, 2])
def test_degenerate_branch_equals_trivial_pair(n):
    fam_pair = odd_pair(n, 0.0, inv_of(0, 0), domain=(1.0, 2.0))
    trivial = odd_trivial_pair(n, 0.0)
    for x in np.linspace(1, 2, 9):
        assert fam_pair.z(x) == pytest.approx(trivial.z(x), rel=1e-13)
        assert fam_pair.w(x) == pytest.approx(trivial.w(x), rel=1e-13)


def test_pole_propagates():
    pair = even_pair(1, 0.0, inv_of(4, 0), domain=(-0.5, 0.5))
    with pytest.raises(PoleProximity):
        pair.z(0.0)
