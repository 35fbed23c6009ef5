import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import solve_ivp

from lamekit.errors import SingularIntegrand, StepSizeUnderflow
from lamekit.numerics import (
    Grid,
    Polynomial,
    cumulative_quadrature,
    find_roots_scan,
    integrate,
    integrate_ode,
    poly_derivative,
    poly_eval,
    poly_mul,
)
from lamekit.elliptic import WeierstrassP

coeff_lists = st.lists(st.floats(-3, 3), min_size=1, max_size=9)


# --- Polynomial -------------------------------------------------------------

def test_poly_eval_examples():
    assert poly_eval(Polynomial([0]), 7) == 0
    assert poly_eval(Polynomial([3, 1]), 2) == 5
    assert poly_eval(Polynomial([0, -4, 0, 4]), 1) == 0


def test_poly_derivative_examples():
    assert poly_derivative(Polynomial([5])).is_zero
    assert poly_derivative(Polynomial([0, 0, 1])).tolist() == [0, 2]
    assert poly_derivative(Polynomial([1, 2, 3])).tolist() == [2, 6]


def test_zero_polynomial_degree_sentinel():
    assert Polynomial().degree == -1
    assert Polynomial([0, 0, 0]).degree == -1
    assert Polynomial([1, 0, 2, 0]).degree == 2


@given(coeff_lists, coeff_lists, st.floats(-2, 2))
def test_mul_is_pointwise_product(a, b, t):
    p, q = Polynomial(a), Polynomial(b)
    lhs = poly_eval(poly_mul(p, q), t)
    rhs = poly_eval(p, t) * poly_eval(q, t)
    scale = sum(abs(c) for c in a) * sum(abs(c) for c in b) * max(1, abs(t)) ** 16
    assert abs(lhs - rhs) <= 1e-12 * max(scale, 1e-300) + 1e-300


@given(coeff_lists, coeff_lists)
def test_mul_degree_adds(a, b):
    p, q = Polynomial(a), Polynomial(b)
    if p.is_zero or q.is_zero:
        assert (p * q).is_zero
    else:
        assert (p * q).degree == p.degree + q.degree


@given(coeff_lists, st.floats(-2, 2), st.floats(-2, 2), st.floats(-1, 1))
def test_compose_affine(a, s, c, t):
    p = Polynomial(a)
    got = p.compose_affine(s, c)(t)
    want = p(s * t + c)
    assert got == pytest.approx(want, rel=1e-10, abs=1e-10 * (1 + p.max_abs_coeff()) * 5**len(a))


def test_power_and_scalar_ops():
    p = Polynomial([1, 1])
    assert (p**3).tolist() == [1, 3, 3, 1]
    assert (2 * p - p).tolist() == [1, 1]
    assert (p - p).is_zero


# --- ODE integration ----------------------------------------------------------

def test_constant_solution():
    sol = integrate_ode(lambda x, u: np.zeros(1), 0, [1.0], 1)
    assert sol.u[-1, 0] == 1.0


def test_sine():
    sol = integrate_ode(lambda x, u: np.array([u[1], -u[0]]), 0, [0.0, 1.0], math.pi / 2)
    assert abs(sol.u[-1, 0] - 1) < 1e-9


def test_lie_equation_constant_potential():
    # z = cos^2 x solves the Lie equation for w = 1
    sol = integrate_ode(lambda x, u: np.array([u[1], u[2], -4 * u[1]]), 0, [1.0, 0.0, -2.0], math.pi)
    assert abs(sol.u[-1, 0] - 1) < 1e-8


def test_backward_integration():
    sol = integrate_ode(lambda x, u: np.array([u[1], -u[0]]), math.pi / 2, [1.0, 0.0], 0)
    assert abs(sol.u[-1, 0]) < 1e-9 and abs(sol.u[-1, 1] - 1) < 1e-9
    assert sol(1.0)[0] == pytest.approx(math.sin(1.0), abs=1e-9)


def test_energy_conservation():
    sol = integrate_ode(lambda x, u: np.array([u[1], -u[0]]), 0, [0.3, 0.8], 20, rtol=1e-9)
    e = sol.u[:, 0] ** 2 + sol.u[:, 1] ** 2
    assert np.max(np.abs(e / e[0] - 1)) < 1e-7


def test_dense_output_exact_at_steps_and_error_bound():
    sol = integrate_ode(lambda x, u: np.array([u[1], -x * u[0]]), 0, [1.0, 0.0], 5)
    for i in range(0, len(sol.x), 7):
        assert np.array_equal(sol(sol.x[i]), sol.u[i])
    assert np.all(sol.errors <= 1.0)


def test_against_scipy_oracle():
    f = lambda x, u: np.array([u[1], -(1 + 0.5 * np.sin(3 * x)) * u[0]])  # noqa: E731
    sol = integrate_ode(f, 0, [0.2, 1.0], 6)
    ref = solve_ivp(f, (0, 6), [0.2, 1.0], rtol=1e-12, atol=1e-13, dense_output=True)
    for x in np.linspace(0, 6, 37):
        assert np.allclose(sol(x), ref.sol(x), rtol=1e-7, atol=1e-8)


def test_step_underflow_at_blowup():
    with pytest.raises(StepSizeUnderflow):
        integrate_ode(lambda x, u: u * u, 0, [1.0], 2)


# --- quadrature -----------------------------------------------------------------

def test_quadrature_examples():
    g = cumulative_quadrature(lambda t: 1.0, 0, Grid(0, 1, 5))
    assert g.values[0] == 0 and g.values[-1] == pytest.approx(1, abs=1e-14)
    g = cumulative_quadrature(lambda t: 2 * t, 0, Grid(0, 2, 9))
    assert abs(g.values[-1] - 4) < 1e-10


def test_quadrature_interior_base_point():
    g = cumulative_quadrature(math.cos, 0.5, Grid(0, 2, 11))
    want = np.sin(g.nodes) - math.sin(0.5)
    assert np.allclose(g.values, want, atol=1e-12)


@given(st.floats(0.1, 1.9))
def test_quadrature_additive(a):
    f = lambda t: math.exp(-t) * math.cos(3 * t)  # noqa: E731
    fb = cumulative_quadrature(f, 0, Grid(0, 2, 2)).values[-1]
    fa = cumulative_quadrature(f, 0, Grid(0, a, 2)).values[-1]
    assert abs(fb - (fa + integrate(f, a, 2))) <= 2e-10 * max(1.0, abs(fb))


def test_quadrature_matches_ode_on_wp_integrand():
    ev = WeierstrassP(4.0, 0.0)
    f = lambda t: 1.0 / (ev(t)[0] + 0.5)  # noqa: E731
    g = cumulative_quadrature(f, 0.3, Grid(0.3, 2.3, 21))
    sol = integrate_ode(lambda x, u: np.array([f(x)]), 0.3, [0.0], 2.3, rtol=1e-12, atol=1e-14)
    assert np.allclose(g.values, [sol(x)[0] for x in g.nodes], atol=1e-8)


def test_singular_integrand():
    with pytest.raises(SingularIntegrand):
        integrate(lambda t: 1.0 / t, -1.0, 1.3)


# --- roots ------------------------------------------------------------------------

def test_no_roots():
    assert find_roots_scan(lambda x: x * x + 1, -1, 1, 50) == []


def test_sine_roots():
    r = find_roots_scan(math.sin, 1, 7, 100)
    assert len(r) == 2
    assert abs(r[0] - math.pi) < 1e-10 and abs(r[1] - 2 * math.pi) < 1e-10


def test_dirichlet_laplacian_via_miss():
    def miss(lam):
        k = math.sqrt(-lam)
        sol = integrate_ode(lambda x, u: np.array([u[1], lam * u[0]]), 0, [0.0, 1.0], 1)
        return sol.u[-1, 0] * k

    r = find_roots_scan(miss, -50, -1, 200, xtol=1e-12)
    assert r == pytest.approx([-4 * math.pi**2, -math.pi**2], abs=1e-6)


@given(st.lists(st.floats(-0.95, 0.95), min_size=1, max_size=6, unique=True))
def test_all_separated_roots_found(roots):
    roots = sorted(roots)
    n_scan = 400
    if any(b - a <= 2.0 / n_scan * 2 for a, b in zip(roots, roots[1:])):
        return
    p = Polynomial([1.0])
    for r in roots:
        p = p * Polynomial([-r, 1.0])
    found = find_roots_scan(p, -1, 1, n_scan, xtol=1e-12)
    assert len(found) == len(roots)
    assert np.allclose(found, roots, atol=1e-8)


def test_precomputed_values_and_nan_breaks():
    xs = np.linspace(0, 4, 9)
    vals = [math.nan if 1.9 < x < 2.6 else math.cos(x) for x in xs]
    assert find_roots_scan(math.cos, 0, 4, 9, values=vals) == []
    r = find_roots_scan(math.cos, 0, 4, 9, values=[math.cos(x) for x in xs])
    assert r == pytest.approx([math.pi / 2])


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid(1, 0, 5)
    with pytest.raises(ValueError):
        Grid(0, 1, 1)
