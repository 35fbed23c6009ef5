"""Potentials and symmetries polynomial in ``℘`` and linear in ``℘'``.

With ``p0 = ℘(x)``, ``p1 = ℘'(x)`` the potential is ``w = C(p0) + p1 E(p0)``
and the symmetry ``z = A(p0) + p1 B(p0)``. Substituting into the Lie equation
and reducing with ``p1^2 = 4 p0^3 - g2 p0 - g3`` leaves ``R1(p0) + p1 R2(p0)``;
the pair is a symmetry exactly when both polynomials vanish.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .elliptic import EllipticInvariants, WeierstrassP, real_half_period
from .errors import RecurrenceBreakdown, UnsupportedN
from .fields import Jet, ScalarField, horner_jet
from .numerics import Polynomial
from .symcore import PARABOLIC, SymmetryPair, make_pair


@dataclass(frozen=True)
class LamePotentialSpec:
    C: Polynomial
    E: Polynomial
    invariants: EllipticInvariants


@dataclass(frozen=True)
class LameSymmetrySpec:
    A: Polynomial
    B: Polynomial


def curve_poly(inv: EllipticInvariants) -> Polynomial:
    """``4 p0^3 - g2 p0 - g3``."""
    return Polynomial([-inv.g3, -inv.g2, 0.0, 4.0])


# ---------------------------------------------------------------------------
# Reduction of the Lie equation
# ---------------------------------------------------------------------------


def r1_r2_polynomials(pot: LamePotentialSpec, sym: LameSymmetrySpec) -> tuple[Polynomial, Polynomial]:
    """``R1, R2`` from their closed-form expressions in ``A, B, C, E``."""
    g2, g3 = pot.invariants.g2, pot.invariants.g3
    A, B, C, E = sym.A, sym.B, pot.C, pot.E
    P = curve_poly(pot.invariants)
    dP = Polynomial([-g2, 0.0, 12.0])  # 12 p0^2 - g2
    p = Polynomial([0.0, 1.0])
    d = lambda f, k=1: f.derivative(k)  # noqa: E731

    R1 = (
        P * P * d(B, 3)
        + 3.0 * P * dP * d(B, 2)
        + (4.0 * P * C + Polynomial([0.75 * g2 * g2, -48.0 * g3, -66.0 * g2, 0.0, 300.0])) * d(B)
        + 2.0 * B * (dP * C + Polynomial([-6.0 * g3, -9.0 * g2, 0.0, 60.0]))
        + E * A * dP
        + 2.0 * (2.0 * E * d(A) + B * d(C) + A * d(E)) * P
    )
    R2 = (
        P * d(A, 3)
        + Polynomial([-1.5 * g2, 0.0, 18.0]) * d(A, 2)
        + 4.0 * (C + 3.0 * p) * d(A)
        + 2.0 * P * (B * d(E) + 2.0 * E * d(B))
        + 2.0 * A * d(C)
        + 3.0 * B * E * dP
    )
    return R1, R2


class _Ring:
    """Arithmetic on ``F(p0) + p1 G(p0)`` modulo the curve relation."""

    def __init__(self, inv: EllipticInvariants):
        self.P = curve_poly(inv)
        self.dp1 = Polynomial([-0.5 * inv.g2, 0.0, 6.0])  # p1' = 6 p0^2 - g2/2

    def d(self, u):
        F, G = u
        # (F + p1 G)' = p1 F' + p1' G + p1^2 G'
        return (self.dp1 * G + self.P * G.derivative(), F.derivative())

    def mul(self, u, v):
        return (u[0] * v[0] + self.P * u[1] * v[1], u[0] * v[1] + u[1] * v[0])

    @staticmethod
    def add(*us):
        return (sum((u[0] for u in us), Polynomial()), sum((u[1] for u in us), Polynomial()))

    @staticmethod
    def scale(k, u):
        return (u[0] * k, u[1] * k)


def reduced_lie_operator(pot: LamePotentialSpec, sym: LameSymmetrySpec) -> tuple[Polynomial, Polynomial]:
    """``R1, R2`` by direct substitution into ``z''' + 4 w z' + 2 w' z``."""
    ring = _Ring(pot.invariants)
    z = (sym.A, sym.B)
    w = (pot.C, pot.E)
    z1 = ring.d(z)
    z3 = ring.d(ring.d(z1))
    return ring.add(z3, ring.scale(4.0, ring.mul(w, z1)), ring.scale(2.0, ring.mul(ring.d(w), z)))


def reduced_cw(pot: LamePotentialSpec, sym: LameSymmetrySpec) -> tuple[Polynomial, Polynomial]:
    """``w z^2 - z'^2/4 + z z''/2`` as ``F(p0) + p1 G(p0)``; constant for a true pair."""
    ring = _Ring(pot.invariants)
    z = (sym.A, sym.B)
    w = (pot.C, pot.E)
    z1 = ring.d(z)
    z2 = ring.d(z1)
    return ring.add(
        ring.mul(w, ring.mul(z, z)),
        ring.scale(-0.25, ring.mul(z1, z1)),
        ring.scale(0.5, ring.mul(z, z2)),
    )


# ---------------------------------------------------------------------------
# Even case: B = E = 0
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EvenFamily:
    n: int
    c0: float
    invariants: EllipticInvariants
    c1: float
    a: np.ndarray
    c_w: float

    @property
    def potential(self) -> LamePotentialSpec:
        return LamePotentialSpec(Polynomial([self.c0, self.c1]), Polynomial(), self.invariants)

    @property
    def symmetry(self) -> LameSymmetrySpec:
        return LameSymmetrySpec(Polynomial(self.a), Polynomial())


def even_coefficients(n: int, c0: float, inv: EllipticInvariants) -> EvenFamily:
    """Coefficients of ``A`` for ``w = -n(n+1) ℘ + c0`` (leading coefficient 1)."""
    if n < 1:
        raise ValueError("even family needs n >= 1")
    g2, g3 = inv.g2, inv.g3
    a = np.zeros(n + 1)
    a[n] = 1.0
    a[n - 1] = c0 / (2 * n - 1)
    if n >= 2:
        a[n - 2] = (8 * c0**2 - n * g2 * (2 * n - 1) ** 2) * (n - 1) / (8 * (2 * n - 3) * (2 * n - 1) ** 2)

    def at(j):
        return a[j] if j <= n else 0.0

    for i in range(n - 3, -1, -1):
        num = (2 * i * i + 10 * i + 12) * at(i + 3) * g3 + (2 * i * i + 7 * i + 6) * at(i + 2) * g2 - 8 * c0 * at(i + 1)
        a[i] = num * (i + 1) / (4 * (i + n + 1) * (2 * i + 1) * (i - n))
    c1 = -float(n * (n + 1))
    pot = LamePotentialSpec(Polynomial([c0, c1]), Polynomial(), inv)
    F, _ = reduced_cw(pot, LameSymmetrySpec(Polynomial(a), Polynomial()))
    return EvenFamily(n, float(c0), inv, c1, a, F.coeff(0))


def even_cw_closed_form(n: int, c0: float, inv: EllipticInvariants) -> float:
    g2, g3 = inv.g2, inv.g3
    if n == 1:
        return c0**3 - (c0 * g2 - g3) / 4.0
    if n == 2:
        return (c0**2 - 3 * g2) * (4 * c0**3 - 9 * c0 * g2 - 27 * g3) / 324.0
    if n == 3:
        return (
            c0**7 / 50625
            - 7 * g2 * c0**5 / 11250
            - 11 * g3 * c0**4 / 3750
            + 31 * g2**2 * c0**3 / 6000
            + 9 * g2 * g3 * c0**2 / 200
            + (27 * g3**2 - g2**3) * c0 / 240
        )
    raise UnsupportedN(f"closed form only for n in 1..3, got {n}")


# ---------------------------------------------------------------------------
# Odd case: A = E = 0
# ---------------------------------------------------------------------------


def odd_c1(n: int) -> float:
    return -15.0 / 4.0 - n * (n + 4)


def _odd_terms(j: int, c0: float, c1: float, g2: float, g3: float) -> dict[int, float]:
    """Coefficient of ``p0^(j+k)`` contributed by ``b_j p0^j``, keyed by ``k``."""
    return {
        3: 4.0 * (j + 2) * (4 * c1 + 4 * j * j + 16 * j + 15),
        2: 8.0 * c0 * (2 * j + 3),
        1: -2.0 * g2 * (j + 1) * (2 * c1 + 4 * j * j + 8 * j + 9),
        0: -2.0 * (2 * j + 1) * (c0 * g2 + c1 * g3 + 2 * g3 * j * j + 2 * g3 * j + 6 * g3),
        -1: 0.25 * j * (g2 * g2 * (4 * j * j - 1) - 16 * c0 * g3),
        -2: g2 * g3 * j * (j - 1) * (2 * j - 1),
        -3: g3 * g3 * j * (j - 1) * (j - 2),
    }


def odd_row(i: int, b: Sequence[float], c0: float, c1: float, g2: float, g3: float, skip_pivot: bool = False) -> float:
    """Coefficient of ``p0^i`` in the odd-case equation for coefficients ``b``.

    ``b[j]`` outside ``0..len(b)-1`` counts as zero. With ``skip_pivot`` the
    ``b_{i-3}`` term is left out.
    """
    total = 0.0
    for k in (2, 1, 0, -1, -2, -3) if skip_pivot else (3, 2, 1, 0, -1, -2, -3):
        j = i - k
        if 0 <= j < len(b) and b[j] != 0.0:
            total += _odd_terms(j, c0, c1, g2, g3)[k] * b[j]
    return total


@dataclass(frozen=True)
class OddFamily:
    n: int
    c0: float
    invariants: EllipticInvariants
    c1: float
    b: np.ndarray

    @property
    def potential(self) -> LamePotentialSpec:
        return LamePotentialSpec(Polynomial([self.c0, self.c1]), Polynomial(), self.invariants)

    @property
    def symmetry(self) -> LameSymmetrySpec:
        return LameSymmetrySpec(Polynomial(), Polynomial(self.b))


def odd_coefficients(n: int, c0: float, inv: EllipticInvariants) -> OddFamily:
    """``B`` for ``w = c1 ℘ + c0`` with ``z = ℘' B(℘)``, ``b_n = 1``.

    Rows ``i = n+2, ..., 3`` of the coefficient equations each determine
    ``b_{i-3}`` from higher coefficients.
    """
    if n < 0:
        raise ValueError("odd family needs n >= 0")
    g2, g3 = inv.g2, inv.g3
    c1 = odd_c1(n)
    b = np.zeros(n + 1)
    b[n] = 1.0
    for i in range(n + 2, 2, -1):
        j = i - 3
        pivot = _odd_terms(j, c0, c1, g2, g3)[3]
        if pivot == 0.0:
            raise RecurrenceBreakdown(f"zero pivot solving for b_{j} (n = {n})")
        b[j] = -odd_row(i, b, c0, c1, g2, g3, skip_pivot=True) / pivot
    return OddFamily(n, float(c0), inv, c1, b)


def gc_residuals(fam: OddFamily) -> tuple[float, float, float]:
    """Remaining equations (coefficients of ``p0^0, p0^1, p0^2``) for ``(c0, g2, g3)``."""
    g2, g3 = fam.invariants.g2, fam.invariants.g3
    return tuple(odd_row(i, fam.b, fam.c0, fam.c1, g2, g3) for i in (0, 1, 2))


def _gc_vector(n: int, v: np.ndarray) -> np.ndarray:
    fam = odd_coefficients(n, v[0], EllipticInvariants(v[1], v[2]))
    return np.array(gc_residuals(fam))


def find_gc_roots(
    n: int,
    starts: int = 5,
    box: float = 5.0,
    tol: float = 1e-9,
    max_iter: int = 100,
) -> list[dict]:
    """Multi-start damped Gauss-Newton search for nontrivial roots of the closing equations.

    The equations are weighted-homogeneous in ``(c0, g2, g3)`` with weights
    ``(2, 4, 6)``, so roots come in scaling families; the normalization
    ``c0^12 + g2^6 + g3^4 = 1`` picks one representative and excludes the
    trivial root. Reports what it finds; finding nothing proves nothing.
    """
    axis = np.linspace(-box, box, starts)
    found: list[dict] = []

    def system(v):
        r = _gc_vector(n, v)
        norm = v[0] ** 12 + v[1] ** 6 + v[2] ** 4 - 1.0
        return np.append(r, norm)

    for c0 in axis:
        for g2 in axis:
            for g3 in axis:
                v = np.array([c0, g2, g3], dtype=float)
                s = (v[0] ** 12 + v[1] ** 6 + v[2] ** 4) ** (1 / 24)
                if s == 0:
                    continue
                v = v / np.array([s**2, s**4, s**6])
                f = system(v)
                for _ in range(max_iter):
                    J = np.empty((4, 3))
                    for k in range(3):
                        h = 1e-7 * max(1.0, abs(v[k]))
                        e = np.zeros(3)
                        e[k] = h
                        J[:, k] = (system(v + e) - system(v - e)) / (2 * h)
                    step = np.linalg.lstsq(J, -f, rcond=None)[0]
                    t = 1.0
                    fn = np.linalg.norm(f)
                    while t > 1e-6:
                        cand = v + t * step
                        fc = system(cand)
                        if np.linalg.norm(fc) < fn:
                            break
                        t *= 0.5
                    v, f = cand, fc
                    if np.linalg.norm(f) < tol * 1e-3 or np.linalg.norm(t * step) < 1e-15:
                        break
                res = _gc_vector(n, v)
                if np.max(np.abs(res)) <= tol * max(1.0, _gc_scale(n, v)) and abs(f[3]) < 1e-9:
                    if not any(np.allclose(v, r["params"], atol=1e-6) for r in found):
                        found.append({"params": v.copy(), "c0": v[0], "g2": v[1], "g3": v[2], "residuals": res.tolist()})
    return found


def _gc_scale(n: int, v: np.ndarray) -> float:
    fam = odd_coefficients(n, v[0], EllipticInvariants(v[1], v[2]))
    g2, g3 = v[1], v[2]
    terms = []
    for i in (0, 1, 2):
        for k in (2, 1, 0, -1, -2, -3):
            j = i - k
            if 0 <= j <= n:
                terms.append(abs(_odd_terms(j, v[0], fam.c1, g2, g3)[k] * fam.b[j]))
    return max(terms) if terms else 1.0


def odd_trivial_pair(n: int, w0: float, domain: tuple[float, float] = (1.0, 2.0)) -> SymmetryPair:
    """Closed-form odd pair at ``c0 = g2 = g3 = 0``, where ``℘ = (x + w0)^-2``.

    ``w = c1 (x+w0)^-2``, ``z = -2 (x+w0)^(-2n-3)`` and ``c_w = 0``. The pair's
    ``meta["general_solution"](α1, α2)`` returns the closed-form solution
    ``α1 (x+w0)^(-3/2-n) + α2 (x+w0)^(n+5/2)`` as a field.
    """
    if n < 0:
        raise ValueError("n >= 0")
    if not domain[0] + w0 > 0:
        raise ValueError("domain must satisfy x + w0 > 0")
    c1 = odd_c1(n)
    k = 2 * n + 3

    def powjet(x, e, order):
        u = Jet.variable(x + w0, order)
        out = [u.value**e]
        coef = 1.0
        for m in range(1, order + 1):
            coef *= e - m + 1
            out.append(coef * u.value ** (e - m))
        return np.array(out)

    w = ScalarField(lambda x: c1 * powjet(x, -2.0, 1), 1, domain, "w_odd0")
    z = ScalarField(lambda x: -2.0 * powjet(x, -float(k), 3), 3, domain, "z_odd0")

    def general_solution(a1: float, a2: float) -> ScalarField:
        return ScalarField(
            lambda x: a1 * powjet(x, -1.5 - n, 2) + a2 * powjet(x, n + 2.5, 2), 2, domain, "y_odd0"
        )

    return make_pair(w, z, domain, n=n, w0=w0, general_solution=general_solution)


# ---------------------------------------------------------------------------
# Fields on the real line
# ---------------------------------------------------------------------------


def assemble_fields(
    pot: LamePotentialSpec,
    sym: LameSymmetrySpec,
    evaluator: WeierstrassP | None = None,
    domain: tuple[float, float] | None = None,
    c_w: float | None = None,
    **meta,
) -> SymmetryPair:
    """Evaluate ``w`` (order 1) and ``z`` (order 3) through ``℘`` and package them."""
    if evaluator is None:
        evaluator = WeierstrassP.from_invariants(pot.invariants)
    if domain is None:
        domain = pole_free_window(evaluator)
    C, E = pot.C.coeffs, pot.E.coeffs
    A, B = sym.A.coeffs, sym.B.coeffs

    def p_jets(x, order):
        p0 = Jet.from_derivs(evaluator.derivatives(x, order))
        return p0, p0.derivative()

    def wfunc(x):
        p0, p1 = p_jets(x, 2)
        p0 = p0.truncate(1)
        return (horner_jet(C, p0) + p1 * horner_jet(E, p0)).derivs()

    def zfunc(x):
        p0, p1 = p_jets(x, 4)
        p0 = p0.truncate(3)
        return (horner_jet(A, p0) + p1 * horner_jet(B, p0)).derivs()

    w = ScalarField(wfunc, 1, tuple(domain), "w_lame")
    z = ScalarField(zfunc, 3, tuple(domain), "z_lame")
    return make_pair(w, z, domain, c_w=c_w, **meta)


def pole_free_window(evaluator: WeierstrassP, frac: float = 0.7) -> tuple[float, float]:
    """Interval centred on the real half-period, covering ``frac`` of each side."""
    om = evaluator.half_period
    if not math.isfinite(om):
        om = real_half_period(evaluator.inv)
    if not math.isfinite(om):
        return (0.5, 2.0)
    return (om * (1.0 - frac), om * (1.0 + frac))


def even_pair(n: int, c0: float, inv: EllipticInvariants, domain=None, evaluator=None) -> SymmetryPair:
    fam = even_coefficients(n, c0, inv)
    return assemble_fields(fam.potential, fam.symmetry, evaluator, domain, family=fam)


def odd_pair(n: int, c0: float, inv: EllipticInvariants, domain=None, evaluator=None) -> SymmetryPair:
    fam = odd_coefficients(n, c0, inv)
    return assemble_fields(fam.potential, fam.symmetry, evaluator, domain, family=fam)
