"""Symmetries of ``y'' + w y = 0`` and everything built from them.

A symmetry is a function ``z`` solving ``z''' + 4 w z' + 2 w' z = 0``. The pair
``(w, z)`` determines the constant ``c_w = w z^2 - z'^2/4 + z z''/2``, whose
sign selects trigonometric, hyperbolic or algebraic closed-form solutions in
terms of the phase ``Φ = ∫ dx / z``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .errors import ZeroSymmetry
from .fields import Jet, ScalarField
from .numerics import Grid, QuinticHermite, cumulative_quadrature, integrate_ode

ELLIPTIC = "elliptic"
HYPERBOLIC = "hyperbolic"
PARABOLIC = "parabolic"
CASES = (ELLIPTIC, HYPERBOLIC, PARABOLIC)

CLASSIFY_TOL = 1e-9
# minimum node count for the phase interpolant
PHASE_NODES = 257


def _zero_check(zd, x):
    if abs(zd[0]) < 1e-12 * max(1.0, *(abs(v) for v in zd[1:3])):
        raise ZeroSymmetry(f"symmetry vanishes at x = {x:.17g}")


def lie_terms(w: ScalarField, z: ScalarField, x: float) -> tuple[float, float, float]:
    zd = z.derivs(x, 3)
    wd = w.derivs(x, 1)
    return zd[3], 4.0 * wd[0] * zd[1], 2.0 * wd[1] * zd[0]


def lie_residual(w: ScalarField, z: ScalarField, x: float) -> float:
    """``z''' + 4 w z' + 2 w' z`` at ``x``."""
    return float(sum(lie_terms(w, z, x)))


def lie_residual_relative(w: ScalarField, z: ScalarField, x: float) -> float:
    """Lie residual divided by the largest of its three terms (or 1)."""
    t = lie_terms(w, z, x)
    return abs(sum(t)) / max(1.0, *(abs(v) for v in t))


def cw_at(w: ScalarField, z: ScalarField, x: float) -> float:
    zd = z.derivs(x, 2)
    _zero_check(zd, x)
    return float(w(x) * zd[0] ** 2 - 0.25 * zd[1] ** 2 + 0.5 * zd[0] * zd[2])


def compute_cw(w: ScalarField, z: ScalarField, xs: Sequence[float]) -> tuple[float, float]:
    """Median of ``w z^2 - z'^2/4 + z z''/2`` over ``xs`` and the max deviation from it."""
    vals = np.array([cw_at(w, z, x) for x in xs])
    med = float(np.median(vals))
    return med, float(np.max(np.abs(vals - med)))


def classify_case(c_w: float, scale: float, tol: float = CLASSIFY_TOL) -> str:
    if scale <= 0:
        raise ValueError("scale must be positive")
    if c_w > tol * scale:
        return ELLIPTIC
    if c_w < -tol * scale:
        return HYPERBOLIC
    return PARABOLIC


def potential_from_symmetry(z: ScalarField, c_w: float) -> ScalarField:
    """``w = c_w/z^2 + (z'/z)^2/4 - z''/(2z)``, carried to first order."""
    if z.order < 3:
        raise ValueError("need a symmetry field with three derivatives")

    def build(x):
        zd = z.derivs(x, 3)
        _zero_check(zd, x)
        zj = Jet.from_derivs(zd)
        Z = zj.truncate(1)
        Z1 = zj.derivative().truncate(1)
        Z2 = zj.derivative().derivative()
        return c_w / (Z * Z) + 0.25 * (Z1 / Z) ** 2 - Z2 / (2.0 * Z)

    return ScalarField.from_jet(build, 1, z.domain, label="w[z]")


# ---------------------------------------------------------------------------
# Pairs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SymmetryPair:
    w: ScalarField
    z: ScalarField
    domain: tuple[float, float]
    c_w: float
    case: str
    q0: float
    scale: float = 1.0
    meta: dict = field(default_factory=dict, compare=False)

    def nodes(self, n: int = 64) -> np.ndarray:
        return np.linspace(self.domain[0], self.domain[1], n)


def make_pair(
    w: ScalarField,
    z: ScalarField,
    domain: tuple[float, float],
    c_w: float | None = None,
    n_nodes: int = 64,
    **meta,
) -> SymmetryPair:
    """Bundle ``(w, z)`` with its constant, case and ``q0``.

    ``c_w`` defaults to the median over ``n_nodes`` domain nodes. The
    classification scale is ``max(1, |w| z^2)`` over the same nodes.
    """
    a, b = float(domain[0]), float(domain[1])
    if not a < b:
        raise ValueError("empty domain")
    xs = np.linspace(a, b, n_nodes)
    scale = 1.0
    for x in xs:
        scale = max(scale, abs(w(x)) * z(x) ** 2)
    if c_w is None:
        c_w, _ = compute_cw(w, z, xs)
    case = classify_case(c_w, scale)
    q0 = 0.0 if case == PARABOLIC else math.sqrt(abs(c_w))
    return SymmetryPair(w, z, (a, b), float(c_w), case, q0, scale, dict(meta))


def invariant_report(pair: SymmetryPair, n: int = 50) -> dict:
    """Lie residual and c_w constancy of ``pair`` over ``n`` domain nodes."""
    xs = pair.nodes(n)
    lie = max(lie_residual_relative(pair.w, pair.z, x) for x in xs)
    _, dev = compute_cw(pair.w, pair.z, xs)
    # deviation measured from the pair's own constant, not a fresh median
    dev = max(dev, max(abs(cw_at(pair.w, pair.z, x) - pair.c_w) for x in xs))
    return {
        "lie_residual_rel": lie,
        "cw": pair.c_w,
        "cw_deviation": dev,
        "case": pair.case,
        "lie_ok": lie <= 1e-7,
        "cw_ok": dev <= 1e-7 * (1.0 + abs(pair.c_w)),
    }


# ---------------------------------------------------------------------------
# Phase integral and closed-form solutions
# ---------------------------------------------------------------------------


class Phase:
    """``Φ(x) = ∫_{x_b}^x dt / z(t)`` on a zero-free interval.

    Node values come from adaptive quadrature; between nodes a quintic
    Hermite interpolant uses the exact ``Φ' = 1/z`` and ``Φ'' = -z'/z^2``.
    """

    def __init__(self, z: ScalarField, x_b: float, grid: Grid, rtol: float = 1e-12, min_nodes: int = PHASE_NODES):
        samples = max(grid.samples, min_nodes)
        fine = Grid(grid.x0, grid.x1, samples)
        zs = np.array([z.derivs(x, 2) for x in fine.nodes])
        for x, zd in zip(fine.nodes, zs):
            _zero_check(zd, x)
        if np.any(np.sign(zs[:, 0]) != np.sign(zs[0, 0])):
            bad = fine.nodes[np.flatnonzero(np.sign(zs[:, 0]) != np.sign(zs[0, 0]))[0]]
            raise ZeroSymmetry(f"symmetry changes sign before x = {bad:.17g}")
        self.z = z
        self.x_b = float(x_b)
        self.sign = float(np.sign(zs[0, 0]))
        self.fine = cumulative_quadrature(lambda t: 1.0 / z(t), x_b, fine, rtol)
        self._interp = QuinticHermite(
            fine.nodes, self.fine.values, 1.0 / zs[:, 0], -zs[:, 1] / zs[:, 0] ** 2
        )
        if samples == grid.samples:
            self.grid = grid.with_values(self.fine.values)
        else:
            self.grid = grid.with_values([self._interp(x) for x in grid.nodes])

    def __call__(self, x: float) -> float:
        return self._interp(float(x))

    def jet(self, x: float, order: int) -> Jet:
        zj = self.z.jet(x, order - 1)
        inv = 1.0 / zj
        return Jet([self(x)] + [c / (k + 1) for k, c in enumerate(inv.t)])


def _angle_fns(case: str):
    if case == ELLIPTIC:
        return Jet.sin, Jet.cos
    if case == HYPERBOLIC:
        return Jet.sinh, Jet.cosh
    raise ValueError(case)


@dataclass(frozen=True)
class FundamentalPair:
    y1: ScalarField
    y2: ScalarField
    phase: Phase
    case: str
    q0: float
    x_b: float
    factor: float = 1.0

    @property
    def phi_grid(self) -> Grid:
        return self.phase.grid

    def wronskian(self, x: float) -> float:
        a, b = self.y1.derivs(x, 1), self.y2.derivs(x, 1)
        return float(a[0] * b[1] - a[1] * b[0])

    def normalized(self) -> "FundamentalPair":
        """Rescale ``y1`` so that ``y1 y2' - y1' y2 = -1``."""
        k = -1.0 / self.wronskian(self.x_b)
        y1 = self.y1
        scaled = ScalarField(lambda x: k * np.asarray(y1.func(x)), y1.order, y1.domain, y1.label)
        return replace(self, y1=scaled, factor=self.factor * k)


def _grid_for(pair: SymmetryPair, grid: Grid | None) -> Grid:
    return grid if grid is not None else Grid(pair.domain[0], pair.domain[1], PHASE_NODES)


def fundamental_solutions(
    pair: SymmetryPair,
    x_b: float | None = None,
    grid: Grid | None = None,
    rtol: float = 1e-12,
    scale_by_q0: bool = False,
    min_nodes: int = PHASE_NODES,
) -> FundamentalPair:
    """Closed-form fundamental solutions of ``y'' + w y = 0`` from ``pair``.

    ``scale_by_q0`` divides ``y1`` by ``q0`` (elliptic/hyperbolic), which makes
    ``y1`` continuous through the parabolic limit. ``min_nodes`` bounds the
    phase interpolant's node count from below; only grid nodes are exact.
    """
    grid = _grid_for(pair, grid)
    x_b = 0.5 * (grid.x0 + grid.x1) if x_b is None else float(x_b)
    phase = Phase(pair.z, x_b, grid, rtol, min_nodes)
    z, case, q0 = pair.z, pair.case, pair.q0

    def amp(x, order):
        return z.jet(x, order).abs().sqrt()

    if case == PARABOLIC:
        def y1(x):
            return amp(x, 2) * phase.jet(x, 2)

        def y2(x):
            return amp(x, 2)
    else:
        s_fn, c_fn = _angle_fns(case)
        k1 = 1.0 / q0 if scale_by_q0 else 1.0

        def y1(x):
            return amp(x, 2) * s_fn(phase.jet(x, 2) * q0) * k1

        def y2(x):
            return amp(x, 2) * c_fn(phase.jet(x, 2) * q0)

    dom = (grid.x0, grid.x1)
    return FundamentalPair(
        ScalarField.from_jet(y1, 2, dom, "y1"),
        ScalarField.from_jet(y2, 2, dom, "y2"),
        phase,
        case,
        q0,
        x_b,
        1.0 / q0 if (scale_by_q0 and case != PARABOLIC) else 1.0,
    )


@dataclass(frozen=True)
class SymmetryTriple:
    z1: ScalarField
    z2: ScalarField
    z3: ScalarField
    phase: Phase
    case: str

    def __iter__(self):
        return iter((self.z1, self.z2, self.z3))


def _triple_factors(case: str, q0: float):
    """Multipliers g1, g2, g3 (as jet maps of Φ) with ``z_k = z * g_k(Φ)``."""
    if case == PARABOLIC:
        return (lambda p: Jet.const(1.0, p.order), lambda p: p * p, lambda p: p)
    s_fn, c_fn = _angle_fns(case)
    return (
        lambda p: Jet.const(1.0, p.order),
        lambda p: s_fn(p * (2.0 * q0)),
        lambda p: c_fn(p * (2.0 * q0)),
    )


def symmetry_triple(pair: SymmetryPair, x_b: float | None = None, grid: Grid | None = None, rtol: float = 1e-12) -> SymmetryTriple:
    """Three independent solutions of the Lie equation built from one."""
    grid = _grid_for(pair, grid)
    x_b = 0.5 * (grid.x0 + grid.x1) if x_b is None else float(x_b)
    phase = Phase(pair.z, x_b, grid, rtol)
    dom = (grid.x0, grid.x1)
    fields = []
    for k, g in enumerate(_triple_factors(pair.case, pair.q0), start=1):
        def build(x, g=g):
            return pair.z.jet(x, 3) * g(phase.jet(x, 3))
        fields.append(ScalarField.from_jet(build, 3, dom, f"z{k}"))
    return SymmetryTriple(*fields, phase, pair.case)


def sl2_bracket(z1: ScalarField, z2: ScalarField, x: float) -> float:
    """``[z1, z2] = z1' z2 - z1 z2'``."""
    a, b = z1.derivs(x, 1), z2.derivs(x, 1)
    return float(a[1] * b[0] - a[0] * b[1])


def sl2_basis(fp: FundamentalPair) -> tuple[ScalarField, ScalarField, ScalarField]:
    """``A = y1^2, B = y2^2, C = 2 y1 y2`` (pass a Wronskian-normalized pair)."""
    def sq(f, g, k):
        return ScalarField.from_jet(lambda x: f.jet(x, 1) * g.jet(x, 1) * k, 1, f.domain)

    return sq(fp.y1, fp.y1, 1.0), sq(fp.y2, fp.y2, 1.0), sq(fp.y1, fp.y2, 2.0)


# ---------------------------------------------------------------------------
# First integrals
# ---------------------------------------------------------------------------



def _as_field(c) -> ScalarField:
    return c if isinstance(c, ScalarField) else ScalarField.constant(float(c), order=1)


def phi_z_coeffs(z: ScalarField) -> tuple[ScalarField, ScalarField]:
    """Coefficients ``(a, b)`` of ``φ_z = z u1 - z' u0 / 2``."""
    a = ScalarField(lambda x: -0.5 * np.asarray(z.derivs(x, 2))[1:], 1, z.domain, "-z'/2")
    return a, z


def first_integral(phi1_coeffs, phi2_coeffs, y: ScalarField, w: ScalarField, x: float) -> float:
    """``H = φ1 D(φ2) - φ2 D(φ1)`` for ``φ = a u0 + b u1`` along a solution ``y``.

    ``D`` is the total derivative on the equation, so ``u1' = -w u0``.
    """
    yd = y.derivs(x, 1)
    u0, u1 = yd[0], yd[1]
    u2 = -w(x) * u0

    def phi_and_d(coeffs):
        a, b = (_as_field(c) for c in coeffs)
        ad, bd = a.derivs(x, 1), b.derivs(x, 1)
        phi = ad[0] * u0 + bd[0] * u1
        dphi = ad[1] * u0 + ad[0] * u1 + bd[1] * u1 + bd[0] * u2
        return phi, dphi

    p1, d1 = phi_and_d(phi1_coeffs)
    p2, d2 = phi_and_d(phi2_coeffs)
    return float(p1 * d2 - p2 * d1)


# ---------------------------------------------------------------------------
# Hierarchy
# ---------------------------------------------------------------------------


def quadratic_form(case: str, c_w: float, alpha: Sequence[float]) -> float:
    """Constant of ``z (α1 + α2 g2 + α3 g3)`` relative to the same potential."""
    a1, a2, a3 = alpha
    if case == ELLIPTIC:
        return c_w * (a1 * a1 - a2 * a2 - a3 * a3)
    if case == HYPERBOLIC:
        return c_w * (a1 * a1 + a2 * a2 - a3 * a3)
    return a1 * a2 - 0.25 * a3 * a3


def hierarchy_step(
    pair: SymmetryPair,
    c_hat: float,
    alpha: Sequence[float],
    x_b: float | None = None,
    grid: Grid | None = None,
    rtol: float = 1e-12,
) -> SymmetryPair:
    """New integrable pair ``(ŵ, ẑ)``.

    ``ẑ = z (α1 + α2 g2(Φ) + α3 g3(Φ))`` with ``g2, g3`` the case's second and
    third symmetry multipliers, and ``ŵ = w + ĉ / ẑ^2``.
    """
    alpha = tuple(float(a) for a in alpha)
    if len(alpha) != 3:
        raise ValueError("alpha needs three entries")
    grid = _grid_for(pair, grid)
    x_b = 0.5 * (grid.x0 + grid.x1) if x_b is None else float(x_b)
    if alpha[1] == 0.0 and alpha[2] == 0.0:
        if alpha[0] == 0.0:
            raise ZeroSymmetry("all alpha are zero")
        a1 = alpha[0]
        zh = ScalarField(lambda x: a1 * np.asarray(pair.z.derivs(x, 3)), 3, (grid.x0, grid.x1), "z^")
    else:
        phase = Phase(pair.z, x_b, grid, rtol)
        g1, g2, g3 = _triple_factors(pair.case, pair.q0)

        def build_z(x):
            p = phase.jet(x, 3)
            return pair.z.jet(x, 3) * (g1(p) * alpha[0] + g2(p) * alpha[1] + g3(p) * alpha[2])

        zh = ScalarField.from_jet(build_z, 3, (grid.x0, grid.x1), "z^")

    w = pair.w
    if c_hat == 0.0:
        wh = w
    else:
        def build_w(x):
            zj = zh.jet(x, 1)
            _zero_check(zh.derivs(x, 2), x)
            return w.jet(x, 1) + c_hat / (zj * zj)

        wh = ScalarField.from_jet(build_w, 1, (grid.x0, grid.x1), "w^")

    for x in grid.nodes:
        _zero_check(zh.derivs(x, 2), x)
    zs = np.array([zh(x) for x in grid.nodes])
    if np.any(np.sign(zs) != np.sign(zs[0])):
        raise ZeroSymmetry("new symmetry changes sign on the interval")

    expected = c_hat + quadratic_form(pair.case, pair.c_w, alpha)
    depth = pair.meta.get("depth", 0) + 1
    return make_pair(
        wh,
        zh,
        (grid.x0, grid.x1),
        n_nodes=max(64, min(grid.samples, 257)),
        c_w_expected=expected,
        depth=depth,
        parent=pair,
        c_hat=c_hat,
        alpha=alpha,
        x_b=x_b,
    )


# ---------------------------------------------------------------------------
# Numerically built symmetries
# ---------------------------------------------------------------------------


def symmetry_from_solutions(
    w: ScalarField,
    a: float,
    b: float,
    rtol: float = 1e-11,
    atol: float = 1e-13,
) -> SymmetryPair:
    """Symmetry ``z = y1^2 + y2^2`` from two integrated solutions on [a, b].

    ``y1(a) = 0, y1'(a) = 1`` and ``y2(a) = 1, y2'(a) = 0``, so ``c_w`` equals
    the squared Wronskian, 1. Higher derivatives of ``z`` follow from the
    equation itself: ``z'' = 2(y1'^2 + y2'^2) - 2 w z`` and
    ``z''' = -4 w z' - 2 w' z``.
    """

    def rhs(x, u):
        wx = w(x)
        return np.array([u[1], -wx * u[0], u[3], -wx * u[2]])

    sol = integrate_ode(rhs, a, [0.0, 1.0, 1.0, 0.0], b, rtol=rtol, atol=atol)

    def zfunc(x):
        y1, d1, y2, d2 = sol(x)
        wd = w.derivs(x, 1)
        z = y1 * y1 + y2 * y2
        z1 = 2.0 * (y1 * d1 + y2 * d2)
        z2 = 2.0 * (d1 * d1 + d2 * d2) - 2.0 * wd[0] * z
        z3 = -4.0 * wd[0] * z1 - 2.0 * wd[1] * z
        return [z, z1, z2, z3]

    z = ScalarField(zfunc, 3, (a, b), "z[num]")
    return make_pair(w, z, (a, b), solution=sol)


def solution_field(sol, component: int = 0) -> ScalarField:
    """ScalarField (order 1) from a dense ODE solution of a 2-state system."""
    return ScalarField(lambda x: sol(x)[component: component + 2], 1, (min(sol.x0, sol.x1), max(sol.x0, sol.x1)))


def schrodinger_rhs(w: Callable[[float], float]):
    def rhs(x, u):
        return np.array([u[1], -w(x) * u[0]])

    return rhs
