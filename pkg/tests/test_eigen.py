import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lamekit.eigen import (
    BOTH,
    DET,
    EigenProblem,
    MexicanHatSpec,
    constant_family,
    count_interior_zeros,
    density_profile,
    determinant_condition,
    lame_even_family,
    mexican_hat_field,
    numeric_family,
    refine_eigenvalue,
    shoot_miss,
    shoot_miss_batch,
    solve_eigen,
)
from lamekit.elliptic import EllipticInvariants
from lamekit.errors import NotAnEigenvalue
from lamekit.fields import ScalarField
from lamekit.lame import even_pair
from lamekit.numerics import Grid, integrate

from conftest import central_diff

ZERO = ScalarField.constant(0.0, 1)
HAT = mexican_hat_field(MexicanHatSpec())
PI2 = math.pi**2


# --- shooting ------------------------------------------------------------------

def test_shoot_examples():
    assert abs(shoot_miss(ZERO, -PI2, 0, 1)) < 1e-9
    assert shoot_miss(ZERO, -1, 0, 1) == pytest.approx(1.0)  # sin(1)/max|y| with max at x = 1
    assert abs(shoot_miss(HAT, -0.0433, -2, 2)) < 0.02


def test_batch_matches_scalar():
    lams = np.linspace(-8, -0.5, 11)
    batch = shoot_miss_batch(HAT, lams, -2, 2)
    for lam, v in zip(lams, batch):
        # normalizations use each run's own step nodes, so only near-equality holds
        assert v == pytest.approx(shoot_miss(HAT, lam, -2, 2), rel=1e-4)


# --- determinant ---------------------------------------------------------------

def test_determinant_constant_closed_form():
    fam = constant_family(0.0, 0, 1)
    for lam in (-30.0, -5.0, 0.5):
        d = determinant_condition(fam, lam, 0, 1)
        q = math.sqrt(abs(lam))
        want = -(math.sin(q) / q if lam < 0 else math.sinh(q) / q)
        assert d == pytest.approx(want, rel=1e-10)
    # continuous through c_w = 0
    assert determinant_condition(fam, 0.0, 0, 1) == pytest.approx(-1.0)


def test_determinant_roots_laplacian():
    res = solve_eigen(EigenProblem(ZERO, 0, 1, -50, -1, scan=5, method=DET, family=constant_family(0, 0, 1)))
    assert res.eigenvalues == pytest.approx([-4 * PI2, -PI2], abs=1e-6)


def test_lame_dual_method_agreement():
    inv = EllipticInvariants(4.0, 0.0)
    a, b = 0.3, 2.3
    w = even_pair(1, 0.0, inv, (a, b)).w
    res = solve_eigen(EigenProblem(w, a, b, -30, -2, scan=6, method=BOTH, family=lame_even_family(1, 0.0, inv, a, b)))
    assert len(res.eigenvalues) >= 2
    assert res.flags == [BOTH] * len(res.eigenvalues)


def test_parity_cross_check():
    # even potential on a symmetric interval: every determinant root is a shooting root
    res = solve_eigen(EigenProblem(HAT, -2, 2, -9, 0, scan=3, method=BOTH, family=numeric_family(HAT, -2, 2)))
    assert res.flags == [BOTH] * 4


# --- driver --------------------------------------------------------------------

def test_laplacian_shoot():
    res = solve_eigen(EigenProblem(ZERO, 0, 1, -50, -1))
    assert res.eigenvalues == pytest.approx([-4 * PI2, -PI2], abs=1e-6)
    assert max(res.residuals) < 1e-6


def test_scan_halving_stable():
    coarse = solve_eigen(EigenProblem(ZERO, 0, 1, -100, -1, scan=20)).eigenvalues
    fine = solve_eigen(EigenProblem(ZERO, 0, 1, -100, -1, scan=40)).eigenvalues
    assert len(coarse) == len(fine) == 3
    assert np.allclose(coarse, fine, atol=1e-10)


def test_mexican_hat():
    res = solve_eigen(EigenProblem(HAT, -2, 2, -9, 0))
    want = [-7.48, -3.087, -0.59, -0.0433]
    assert len(res.eigenvalues) == 4
    for got, w in zip(res.eigenvalues, want):
        assert abs(got - w) <= max(0.02, 0.02 * abs(w))
    assert max(res.residuals) < 1e-6


def test_harmonic_oscillator():
    h = ScalarField(lambda x: [-x * x, -2 * x], 1)
    res = solve_eigen(EigenProblem(h, -6, 6, -5.5, -0.5, scan=20))
    assert res.eigenvalues == pytest.approx([-5, -3, -1], abs=1e-3)


def test_threads_deterministic():
    p1 = EigenProblem(HAT, -2, 2, -4, 0, scan=100)
    p2 = EigenProblem(HAT, -2, 2, -4, 0, scan=100, threads=3)
    assert solve_eigen(p1).eigenvalues == pytest.approx(solve_eigen(p2).eigenvalues, abs=1e-12)


def test_problem_validation():
    with pytest.raises(ValueError):
        EigenProblem(ZERO, 1, 0, -1, 0)
    with pytest.raises(ValueError):
        EigenProblem(ZERO, 0, 1, 0, -1)
    with pytest.raises(ValueError):
        EigenProblem(ZERO, 0, 1, -1, 0, method="magic")


def test_empty_result():
    assert solve_eigen(EigenProblem(ZERO, 0, 1, -5, -1)).eigenvalues == []


# --- Sturm oscillation ----------------------------------------------------------

def test_sturm_laplacian():
    ev = solve_eigen(EigenProblem(ZERO, 0, 1, -100, -1, scan=50)).eigenvalues
    for k, lam in enumerate(sorted(ev, reverse=True), start=1):
        assert count_interior_zeros(ZERO, lam, 0, 1) == k - 1


def test_sturm_mexican_hat():
    ev = solve_eigen(EigenProblem(HAT, -2, 2, -9, 0, scan=100)).eigenvalues
    for k, lam in enumerate(sorted(ev, reverse=True), start=1):
        assert count_interior_zeros(HAT, lam, -2, 2) == k - 1


# --- field and densities -------------------------------------------------------

def test_mexican_hat_field():
    assert HAT(0) == 0
    assert HAT(1) == pytest.approx(-0.75)
    for x in (0.3, 1.7):
        assert HAT(x) == HAT(-x)
        assert HAT.derivs(x)[1] == pytest.approx(central_diff(HAT, x), rel=1e-8)
    with pytest.raises(ValueError):
        MexicanHatSpec(0, 1)


@given(st.floats(0.2, 2.0), st.floats(0.2, 2.0), st.floats(-2, 2))
def test_mexican_hat_derivative(nu, delta, x):
    f = mexican_hat_field(MexicanHatSpec(nu, delta))
    assert f.derivs(x)[1] == pytest.approx(9 * nu**6 * x**3 - 6 * delta * x, rel=1e-12, abs=1e-12)


def test_density_sine():
    g = density_profile(ZERO, -PI2, 0, 1, Grid(0, 1, 11))
    assert g.values[5] == pytest.approx(2, abs=1e-6)
    assert np.allclose(g.values, 2 * np.sin(np.pi * g.nodes) ** 2, atol=1e-8)


@pytest.mark.parametrize("guess", [-7.48, -3.087, -0.59, -0.0433])
def test_density_normalized(guess):
    lam = refine_eigenvalue(HAT, guess, -2, 2)
    g = density_profile(HAT, lam, -2, 2, Grid(-2, 2, 9))
    assert np.all(g.values >= 0)
    from lamekit.eigen import eigenfunction
    sol = eigenfunction(HAT, lam, -2, 2)
    norm = sol.u[-1, 2]
    total = integrate(lambda x: sol(x)[0] ** 2 / norm, -2, 2, rtol=1e-12)
    assert total == pytest.approx(1, abs=1e-8)
    # even potential: densities are symmetric
    assert g.values == pytest.approx(g.values[::-1], rel=1e-5, abs=1e-8)


def test_density_rejects_non_eigenvalue():
    with pytest.raises(NotAnEigenvalue):
        density_profile(ZERO, -5.0, 0, 1, Grid(0, 1, 5))
    with pytest.raises(NotAnEigenvalue):
        refine_eigenvalue(ZERO, -5.0, 0, 1)
