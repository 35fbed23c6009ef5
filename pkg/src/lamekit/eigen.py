"""Dirichlet eigenvalues of ``y'' + (w - λ) y = 0`` on ``[a, b]``.

Two independent routes: shooting from ``a`` and the determinant built from
the closed-form fundamental pair of a λ-dependent symmetry. In standard
Schrödinger form this is ``-y'' + V y = E y`` with ``V = -w``, ``E = -λ``;
all reported values are in λ.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .config import DEFAULT_TOL
from .elliptic import EllipticInvariants, WeierstrassP
from .errors import DomainError, NotAnEigenvalue
from .fields import ScalarField
from .lame import even_coefficients, assemble_fields
from .numerics import Grid, find_roots_scan, integrate_ode
from .symcore import SymmetryPair, fundamental_solutions, make_pair, symmetry_from_solutions

SHOOT = "shoot"
DET = "det"
BOTH = "both"
METHODS = (SHOOT, DET, BOTH)

MISS_THRESHOLD = 1e-4
DEFAULT_SCAN = 400  # nodes per unit λ
DET_NODES = 33

LambdaFamily = Callable[[float], SymmetryPair]


def shifted(w: ScalarField, lam: float) -> ScalarField:
    """``w - λ`` with the same derivative order."""
    lam = float(lam)

    def f(x):
        d = np.array(w.derivs(x), dtype=float)
        d[0] -= lam
        return d

    return ScalarField(f, w.order, w.domain, f"{w.label}-λ")


# ---------------------------------------------------------------------------
# Shooting
# ---------------------------------------------------------------------------


def _shoot(w: ScalarField, lam: float, a: float, b: float, rtol: float, atol: float):
    wv = w.value_only()

    def rhs(x, u):
        return np.array([u[1], (lam - wv(x)) * u[0]])

    return integrate_ode(rhs, a, [0.0, 1.0], b, rtol=rtol, atol=atol)


def shoot_miss(w: ScalarField, lam: float, a: float, b: float, rtol: float = 1e-10, atol: float = 1e-12) -> float:
    """``y(b) / max|y|`` for the solution with ``y(a) = 0, y'(a) = 1``."""
    sol = _shoot(w, float(lam), a, b, rtol, atol)
    return float(sol.u[-1, 0] / np.max(np.abs(sol.u[:, 0])))


def shoot_miss_batch(
    w: ScalarField, lams: Sequence[float], a: float, b: float, rtol: float = 1e-10, atol: float = 1e-12
) -> np.ndarray:
    """:func:`shoot_miss` for many λ at once, as a single coupled integration."""
    lams = np.asarray(lams, dtype=float)
    n = len(lams)
    wv = w.value_only()

    def rhs(x, u):
        return np.concatenate([u[n:], (lams - wv(x)) * u[:n]])

    u0 = np.concatenate([np.zeros(n), np.ones(n)])
    sol = integrate_ode(rhs, a, u0, b, rtol=rtol, atol=atol)
    ys = sol.u[:, :n]
    return ys[-1] / np.max(np.abs(ys), axis=0)


# ---------------------------------------------------------------------------
# Determinant condition
# ---------------------------------------------------------------------------


def determinant_condition(family: LambdaFamily, lam: float, a: float, b: float, rtol: float = 1e-12) -> float:
    """``y1(a) y2(b) - y1(b) y2(a)`` for the fundamental pair of ``family(λ)``.

    ``y1`` is divided by ``q0`` so the value stays continuous as ``c_w``
    changes sign. Raises :class:`ZeroSymmetry` (or another domain error) when
    the symmetry is unusable at this λ.
    """
    pair = family(float(lam))
    fp = fundamental_solutions(pair, x_b=a, grid=Grid(a, b, 2), rtol=rtol, scale_by_q0=True, min_nodes=DET_NODES)
    return float(fp.y1(a) * fp.y2(b) - fp.y1(b) * fp.y2(a))


def _det_or_nan(family, lam, a, b, rtol):
    try:
        return determinant_condition(family, lam, a, b, rtol)
    except DomainError:
        return math.nan


def constant_family(value: float, a: float, b: float) -> LambdaFamily:
    """``w ≡ value`` with ``z ≡ 1``, so ``c_w = value - λ``."""
    one = ScalarField.constant(1.0, 3, "1")

    def fam(lam):
        w = ScalarField.constant(value - lam, 1)
        return make_pair(w, one, (a, b), c_w=value - lam, n_nodes=2)

    return fam


def lame_even_family(n: int, c0: float, inv: EllipticInvariants, a: float, b: float) -> LambdaFamily:
    """Even Lamé pair with ``c0 → c0 - λ``; ``c_w`` from exact polynomial algebra."""
    ev = WeierstrassP.from_invariants(inv)

    def fam(lam):
        f = even_coefficients(n, c0 - lam, inv)
        return assemble_fields(f.potential, f.symmetry, ev, (a, b), c_w=f.c_w, family=f)

    return fam


def numeric_family(w: ScalarField, a: float, b: float) -> LambdaFamily:
    """Symmetry of ``w - λ`` from two integrated solutions (``c_w = 1``)."""

    def fam(lam):
        return symmetry_from_solutions(shifted(w, lam), a, b)

    return fam


# ---------------------------------------------------------------------------
# Problem and driver
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EigenProblem:
    """Dirichlet problem for ``w - λ`` on ``[a, b]`` with λ in ``[lmin, lmax]``.

    ``scan`` is the number of scan nodes per unit λ. ``family`` feeds the
    determinant method; without it a numerically built symmetry is used.
    """

    w: ScalarField
    a: float
    b: float
    lmin: float
    lmax: float
    scan: float = DEFAULT_SCAN
    method: str = SHOOT
    family: LambdaFamily | None = None
    threads: int = 1
    rtol: float = DEFAULT_TOL.rtol
    atol: float = DEFAULT_TOL.atol
    xtol: float = DEFAULT_TOL.xtol

    def __post_init__(self):
        problems = []
        if not self.a < self.b:
            problems.append("need a < b")
        if not self.lmin < self.lmax:
            problems.append("need lmin < lmax")
        if self.method not in METHODS:
            problems.append(f"method must be one of {METHODS}")
        if self.scan <= 0:
            problems.append("scan density must be positive")
        if problems:
            raise ValueError("; ".join(problems))

    @property
    def n_scan(self) -> int:
        return max(2, int(math.ceil(self.scan * (self.lmax - self.lmin))) + 1)

    @property
    def lam_family(self) -> LambdaFamily:
        return self.family if self.family is not None else numeric_family(self.w, self.a, self.b)


@dataclass(frozen=True)
class EigenResult:
    eigenvalues: list[float]
    residuals: list[float]
    method: str
    flags: list[str] = field(default_factory=list)


def _map(fn, xs, threads):
    if threads <= 1:
        return [fn(x) for x in xs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, xs))


def _shoot_roots(p: EigenProblem) -> list[float]:
    xs = np.linspace(p.lmin, p.lmax, p.n_scan)
    chunks = np.array_split(xs, max(1, p.threads))
    vals = np.concatenate(_map(lambda c: shoot_miss_batch(p.w, c, p.a, p.b, p.rtol, p.atol), chunks, p.threads))
    f = lambda lam: shoot_miss(p.w, lam, p.a, p.b, p.rtol, p.atol)  # noqa: E731
    return find_roots_scan(f, p.lmin, p.lmax, p.n_scan, p.xtol, values=vals)


def _det_roots(p: EigenProblem) -> list[float]:
    fam = p.lam_family
    xs = np.linspace(p.lmin, p.lmax, p.n_scan)
    vals = _map(lambda lam: _det_or_nan(fam, lam, p.a, p.b, 1e-12), xs, p.threads)

    def f(lam):
        v = _det_or_nan(fam, lam, p.a, p.b, 1e-12)
        if math.isnan(v):
            raise ValueError("determinant undefined inside bracket")
        return v

    return find_roots_scan(f, p.lmin, p.lmax, p.n_scan, p.xtol, values=vals)


def solve_eigen(problem: EigenProblem) -> EigenResult:
    """Scan, bracket and refine Dirichlet eigenvalues.

    With ``method="both"`` the union of both root sets is returned; each root
    is flagged ``both``, ``shoot`` or ``det`` according to which methods found
    it within ``1e-6 (1 + |λ|)``.
    """
    p = problem
    miss = lambda lam: abs(shoot_miss(p.w, lam, p.a, p.b, p.rtol, p.atol))  # noqa: E731
    if p.method == SHOOT:
        roots = _shoot_roots(p)
        return EigenResult(roots, [miss(r) for r in roots], SHOOT, [SHOOT] * len(roots))
    if p.method == DET:
        roots = _det_roots(p)
        return EigenResult(roots, [miss(r) for r in roots], DET, [DET] * len(roots))

    shoot, det = _shoot_roots(p), _det_roots(p)
    merged: list[tuple[float, str]] = []
    used = set()
    for r in shoot:
        match = next(
            (k for k, d in enumerate(det) if k not in used and abs(d - r) <= 1e-6 * (1.0 + abs(r))),
            None,
        )
        if match is None:
            merged.append((r, SHOOT))
        else:
            used.add(match)
            merged.append((r, BOTH))
    merged += [(d, DET) for k, d in enumerate(det) if k not in used]
    merged.sort()
    roots = [r for r, _ in merged]
    return EigenResult(roots, [miss(r) for r in roots], BOTH, [f for _, f in merged])


# ---------------------------------------------------------------------------
# Mexican hat and eigenfunctions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MexicanHatSpec:
    nu: float = 1.0
    delta: float = 1.0

    def __post_init__(self):
        if not (self.nu > 0 and self.delta > 0):
            raise ValueError("nu and delta must be positive")


def mexican_hat_field(spec: MexicanHatSpec) -> ScalarField:
    """``w = (9ν⁶/4) x⁴ - 3δ x²``."""
    k = 2.25 * spec.nu**6
    d = spec.delta

    def f(x):
        x2 = x * x
        return [k * x2 * x2 - 3.0 * d * x2, 4.0 * k * x2 * x - 6.0 * d * x]

    return ScalarField(f, 1, label="mexican_hat")


def refine_eigenvalue(w: ScalarField, lam: float, a: float, b: float, width: float = 0.05, xtol: float = 1e-12) -> float:
    """Nearest shooting root to ``lam`` within ``±width``."""
    f = lambda t: shoot_miss(w, t, a, b)  # noqa: E731
    roots = find_roots_scan(f, lam - width, lam + width, 41, xtol)
    if not roots:
        raise NotAnEigenvalue(f"no eigenvalue within {width} of {lam}")
    return min(roots, key=lambda r: abs(r - lam))


def eigenfunction(w: ScalarField, lam: float, a: float, b: float, rtol: float = 1e-11, atol: float = 1e-13):
    """Shooting solution augmented with ``∫ y²``; returns the dense solution."""
    wv = w.value_only()
    lam = float(lam)

    def rhs(x, u):
        return np.array([u[1], (lam - wv(x)) * u[0], u[0] * u[0]])

    return integrate_ode(rhs, a, [0.0, 1.0, 0.0], b, rtol=rtol, atol=atol)


def density_profile(w: ScalarField, lam: float, a: float, b: float, grid: Grid) -> Grid:
    """Normalized ``y²`` along the Dirichlet eigenfunction for ``λ``."""
    miss = shoot_miss(w, lam, a, b)
    if abs(miss) > MISS_THRESHOLD:
        raise NotAnEigenvalue(f"miss distance {miss:.3g} at λ = {lam:.17g} exceeds {MISS_THRESHOLD}")
    sol = eigenfunction(w, lam, a, b)
    norm = sol.u[-1, 2]
    return grid.with_values([sol(x)[0] ** 2 / norm for x in grid.nodes])


def count_interior_zeros(w: ScalarField, lam: float, a: float, b: float, samples: int = 2001) -> int:
    """Sign changes of the shooting solution strictly inside ``(a, b)``."""
    sol = eigenfunction(w, lam, a, b)
    xs = np.linspace(a, b, samples)[1:-1]
    ys = np.array([sol(x)[0] for x in xs])
    # skip the ends, where y is pinned to zero and round-off flips signs
    amp = np.max(np.abs(ys))
    keep = np.abs(ys) > 1e-8 * amp
    s = np.sign(ys[keep])
    return int(np.count_nonzero(s[1:] != s[:-1]))
