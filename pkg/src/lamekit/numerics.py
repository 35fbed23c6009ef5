"""Numerical substrate: dense polynomials, an adaptive Dormand-Prince
integrator with dense output, cumulative Gauss-Kronrod quadrature, quintic
Hermite interpolation and a scan-and-bracket root finder.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import SingularIntegrand, StepSizeUnderflow

__all__ = [
    "Polynomial",
    "poly_eval",
    "poly_derivative",
    "poly_mul",
    "Grid",
    "OdeSolution",
    "integrate_ode",
    "integrate",
    "cumulative_quadrature",
    "QuinticHermite",
    "find_roots_scan",
]


# ---------------------------------------------------------------------------
# Polynomials
# ---------------------------------------------------------------------------


class Polynomial:
    """Dense real polynomial, coefficients stored low-to-high.

    ``Polynomial([c0, c1, c2])`` is ``c0 + c1*t + c2*t**2``. Trailing zeros are
    trimmed, so the zero polynomial has no coefficients and degree -1.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[float] | np.ndarray = ()):
        c = np.array(coeffs, dtype=float).ravel()
        nz = np.flatnonzero(c)
        self.coeffs = c[: nz[-1] + 1] if nz.size else c[:0]

    @classmethod
    def constant(cls, value: float) -> "Polynomial":
        return cls([value])

    @classmethod
    def monomial(cls, k: int, scale: float = 1.0) -> "Polynomial":
        c = np.zeros(k + 1)
        c[k] = scale
        return cls(c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return self.coeffs.size == 0

    def coeff(self, i: int) -> float:
        return float(self.coeffs[i]) if 0 <= i < len(self.coeffs) else 0.0

    def __call__(self, t):
        acc = 0.0 * t
        for c in self.coeffs[::-1]:
            acc = acc * t + c
        return acc

    def _lift(self, other) -> "Polynomial":
        return other if isinstance(other, Polynomial) else Polynomial([other])

    def __add__(self, other):
        other = self._lift(other)
        n = max(len(self.coeffs), len(other.coeffs))
        out = np.zeros(n)
        out[: len(self.coeffs)] += self.coeffs
        out[: len(other.coeffs)] += other.coeffs
        return Polynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(-self.coeffs)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return Polynomial(self.coeffs * float(other))
        if self.is_zero() or other.is_zero():
            return Polynomial()
        return Polynomial(np.convolve(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = Polynomial([1.0])
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        other = self._lift(other)
        return len(self.coeffs) == len(other.coeffs) and bool(np.all(self.coeffs == other.coeffs))

    def __hash__(self):
        return hash(tuple(self.coeffs))

    def __repr__(self):
        return f"Polynomial({self.coeffs.tolist()})"

    def derivative(self, k: int = 1) -> "Polynomial":
        c = self.coeffs
        for _ in range(k):
            if c.size <= 1:
                return Polynomial()
            c = c[1:] * np.arange(1, c.size)
        return Polynomial(c)

    def compose_affine(self, a: float, b: float) -> "Polynomial":
        """Return ``t -> p(a*t + b)``."""
        inner = Polynomial([b, a])
        acc = Polynomial()
        for c in self.coeffs[::-1]:
            acc = acc * inner + c
        return acc

    def max_abs_coeff(self) -> float:
        return float(np.max(np.abs(self.coeffs))) if self.coeffs.size else 0.0

    def tolist(self) -> list[float]:
        return [float(c) for c in self.coeffs]


def poly_eval(p: Polynomial, t: float) -> float:
    return p(t)


def poly_derivative(p: Polynomial) -> Polynomial:
    return p.derivative()


def poly_mul(p: Polynomial, q: Polynomial) -> Polynomial:
    return p * q


# ---------------------------------------------------------------------------
# Grids
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Grid:
    """Uniform grid on [x0, x1] with optional attached node values."""

    x0: float
    x1: float
    samples: int
    values: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        if not self.x0 < self.x1:
            raise ValueError(f"Grid needs x0 < x1, got [{self.x0}, {self.x1}]")
        if self.samples < 2:
            raise ValueError("Grid needs at least 2 samples")

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(self.x0, self.x1, self.samples)

    def with_values(self, values) -> "Grid":
        values = np.asarray(values, dtype=float)
        if values.shape[0] != self.samples:
            raise ValueError("value count does not match grid")
        return Grid(self.x0, self.x1, self.samples, values)


# ---------------------------------------------------------------------------
# Dormand-Prince 5(4) with 4th order dense output
# ---------------------------------------------------------------------------

_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
# fifth-order weights minus embedded fourth-order weights
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)
# continuous extension (Hairer & Wanner, dopri5 contd5)
_D = (
    -12715105075 / 11282082432,
    0.0,
    87487479700 / 32700410799,
    -10690763975 / 1880347072,
    701980252875 / 199316789632,
    -1453857185 / 822651844,
    69997945 / 29380423,
)

_MAX_STEPS = 200_000


class OdeSolution:
    """Dense-output trajectory of an adaptive integration.

    ``sol(x)`` interpolates the state anywhere between the endpoints; at an
    accepted step endpoint it returns the stored state exactly.
    """

    def __init__(self, xs, us, dense, errors):
        self.x = np.asarray(xs, dtype=float)
        self.u = np.asarray(us, dtype=float)
        self.errors = np.asarray(errors, dtype=float)
        self._dense = dense
        self._forward = len(xs) < 2 or xs[-1] >= xs[0]
        self._keys = list(self.x) if self._forward else list(-self.x)

    @property
    def x0(self) -> float:
        return float(self.x[0])

    @property
    def x1(self) -> float:
        return float(self.x[-1])

    @property
    def n_steps(self) -> int:
        return len(self.x) - 1

    def __call__(self, x: float) -> np.ndarray:
        key = x if self._forward else -x
        lo, hi = self._keys[0], self._keys[-1]
        span = abs(hi - lo)
        if key < lo - 1e-12 * span or key > hi + 1e-12 * span:
            raise ValueError(f"x = {x} outside integration range [{self.x0}, {self.x1}]")
        i = bisect.bisect_left(self._keys, key)
        if i < len(self._keys) and self._keys[i] == key:
            return self.u[i].copy()
        i = min(max(i - 1, 0), len(self._dense) - 1)
        xa, h = self.x[i], self.x[i + 1] - self.x[i]
        th = (x - xa) / h
        r1, r2, r3, r4, r5 = self._dense[i]
        th1 = 1.0 - th
        return r1 + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5)))

    def sample(self, xs) -> np.ndarray:
        return np.array([self(float(x)) for x in xs])


def integrate_ode(
    F: Callable[[float, np.ndarray], np.ndarray],
    x0: float,
    u0,
    x1: float,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    h0: float | None = None,
) -> OdeSolution:
    """Integrate ``u' = F(x, u)`` from ``x0`` to ``x1`` (either direction).

    The local error of each accepted step satisfies
    ``|err_i| <= max(rtol*|u_i|, atol)`` componentwise. Raises
    :class:`StepSizeUnderflow` when the controller needs a step below
    ``1e-14*|x1 - x0|``, which in practice means a singularity on the path.
    """
    if rtol <= 0 or atol <= 0:
        raise ValueError("rtol and atol must be positive")
    u = np.array(u0, dtype=float).ravel()
    x = float(x0)
    x1 = float(x1)
    if x1 == x:
        return OdeSolution([x], [u], [], [])
    direction = 1.0 if x1 > x else -1.0
    span = abs(x1 - x)
    hmin = 1e-14 * span

    def scale(a, b):
        return np.maximum(atol, rtol * np.maximum(np.abs(a), np.abs(b)))

    f0 = np.asarray(F(x, u), dtype=float)
    if h0 is None:
        sc = scale(u, u)
        d0 = np.max(np.abs(u) / sc)
        d1 = np.max(np.abs(f0) / sc)
        h = 0.01 * d0 / d1 if d0 > 1e-5 and d1 > 1e-5 else 1e-6 * span
        h = min(max(h, 1e-6 * span), 0.1 * span)
    else:
        h = abs(h0)
    h *= direction

    xs, us, dense, errs = [x], [u], [], []
    k1 = f0
    rejected = False
    for _ in range(_MAX_STEPS):
        if abs(h) < hmin:
            raise StepSizeUnderflow(f"step size {abs(h):.3g} below {hmin:.3g} near x = {x:.17g}")
        last = (x + h - x1) * direction >= 0
        if last:
            h = x1 - x
        k2 = F(x + _C[1] * h, u + h * (_A[1][0] * k1))
        k3 = F(x + _C[2] * h, u + h * (_A[2][0] * k1 + _A[2][1] * k2))
        k4 = F(x + _C[3] * h, u + h * (_A[3][0] * k1 + _A[3][1] * k2 + _A[3][2] * k3))
        k5 = F(x + _C[4] * h, u + h * (_A[4][0] * k1 + _A[4][1] * k2 + _A[4][2] * k3 + _A[4][3] * k4))
        k6 = F(
            x + h,
            u + h * (_A[5][0] * k1 + _A[5][1] * k2 + _A[5][2] * k3 + _A[5][3] * k4 + _A[5][4] * k5),
        )
        du = h * (_A[6][0] * k1 + _A[6][2] * k3 + _A[6][3] * k4 + _A[6][4] * k5 + _A[6][5] * k6)
        unew = u + du
        k7 = np.asarray(F(x + h, unew), dtype=float)
        errv = h * (_E[0] * k1 + _E[2] * k3 + _E[3] * k4 + _E[4] * k5 + _E[5] * k6 + _E[6] * k7)
        err = float(np.max(np.abs(errv) / scale(u, unew)))
        if not math.isfinite(err):
            h *= 0.2
            rejected = True
            continue
        if err <= 1.0:
            r5 = h * (_D[0] * k1 + _D[2] * k3 + _D[3] * k4 + _D[4] * k5 + _D[5] * k6 + _D[6] * k7)
            r3 = h * k1 - du
            r4 = du - h * k7 - r3
            dense.append((u, du, r3, r4, r5))
            errs.append(err)
            x = x1 if last else x + h
            u = unew
            xs.append(x)
            us.append(u)
            k1 = k7
            if last:
                return OdeSolution(xs, us, dense, errs)
            fac = 5.0 if err == 0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
            if rejected:
                fac = min(fac, 1.0)
            h *= fac
            rejected = False
        else:
            h *= max(0.2, 0.9 * err ** -0.2)
            rejected = True
    raise StepSizeUnderflow(f"exceeded {_MAX_STEPS} steps before reaching x = {x1}")


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------

_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_GK_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_GK_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
# Gauss points sit at odd Kronrod indices 1, 3, 5, 7(centre), 9, 11, 13
_G_WEIGHTS = np.array([_WG[0], _WG[1], _WG[2], _WG[3], _WG[2], _WG[1], _WG[0]])

_MAX_DEPTH = 48


def _gk15(f, a, b):
    c, r = 0.5 * (a + b), 0.5 * (b - a)
    fx = np.array([f(c + r * t) for t in _GK_NODES], dtype=float)
    if not np.all(np.isfinite(fx)):
        raise SingularIntegrand(f"non-finite integrand on [{a:.17g}, {b:.17g}]")
    k = r * float(np.dot(_GK_WEIGHTS, fx))
    g = r * float(np.dot(_G_WEIGHTS, fx[1::2]))
    kabs = abs(r) * float(np.dot(_GK_WEIGHTS, np.abs(fx)))
    return k, abs(k - g), kabs


def integrate(f: Callable[[float], float], a: float, b: float, rtol: float = 1e-10) -> float:
    """Adaptive Gauss-Kronrod (7, 15) quadrature of ``f`` over [a, b].

    A panel is accepted when its Kronrod/Gauss difference is below
    ``rtol`` times the panel's integral of ``|f|``. Raises
    :class:`SingularIntegrand` past the bisection depth limit.
    """
    if a == b:
        return 0.0
    total = 0.0
    stack = [(a, b, 0)]
    while stack:
        lo, hi, depth = stack.pop()
        k, err, kabs = _gk15(f, lo, hi)
        if err <= rtol * kabs or err <= 1e-300:
            total += k
            continue
        if depth >= _MAX_DEPTH:
            raise SingularIntegrand(f"adaptive refinement exceeded depth {_MAX_DEPTH} near x = {lo:.17g}")
        mid = 0.5 * (lo + hi)
        stack.append((mid, hi, depth + 1))
        stack.append((lo, mid, depth + 1))
    return total


def cumulative_quadrature(f: Callable[[float], float], x0: float, grid: Grid, rtol: float = 1e-10) -> Grid:
    """Return ``F(x) = int_{x0}^{x} f`` at every node of ``grid``."""
    nodes = grid.nodes
    if not grid.x0 <= x0 <= grid.x1:
        raise ValueError(f"base point {x0} outside [{grid.x0}, {grid.x1}]")
    k = int(np.searchsorted(nodes, x0, side="right")) - 1
    k = min(max(k, 0), len(nodes) - 2)
    out = np.empty(len(nodes))
    out[k] = -integrate(f, nodes[k], x0, rtol) if nodes[k] != x0 else 0.0
    out[k + 1] = integrate(f, x0, nodes[k + 1], rtol) if nodes[k + 1] != x0 else 0.0
    for j in range(k + 1, len(nodes) - 1):
        out[j + 1] = out[j] + integrate(f, nodes[j], nodes[j + 1], rtol)
    for j in range(k, 0, -1):
        out[j - 1] = out[j] - integrate(f, nodes[j - 1], nodes[j], rtol)
    return grid.with_values(out)


class QuinticHermite:
    """Piecewise quintic Hermite interpolant from values and two derivatives."""

    def __init__(self, xs, f, df, ddf):
        self.x = np.asarray(xs, dtype=float)
        self.f = np.asarray(f, dtype=float)
        self.df = np.asarray(df, dtype=float)
        self.ddf = np.asarray(ddf, dtype=float)
        self._keys = list(self.x)

    def __call__(self, x: float) -> float:
        xs = self.x
        i = bisect.bisect_right(self._keys, x) - 1
        i = min(max(i, 0), len(xs) - 2)
        if x == xs[i]:
            return float(self.f[i])
        h = xs[i + 1] - xs[i]
        t = (x - xs[i]) / h
        t2 = t * t
        t3 = t2 * t
        t4 = t3 * t
        t5 = t4 * t
        h00 = 1 - 10 * t3 + 15 * t4 - 6 * t5
        h10 = t - 6 * t3 + 8 * t4 - 3 * t5
        h20 = 0.5 * (t2 - 3 * t3 + 3 * t4 - t5)
        h01 = 10 * t3 - 15 * t4 + 6 * t5
        h11 = -4 * t3 + 7 * t4 - 3 * t5
        h21 = 0.5 * (t3 - 2 * t4 + t5)
        return float(
            self.f[i] * h00
            + h * self.df[i] * h10
            + h * h * self.ddf[i] * h20
            + self.f[i + 1] * h01
            + h * self.df[i + 1] * h11
            + h * h * self.ddf[i + 1] * h21
        )


# ---------------------------------------------------------------------------
# Roots
# ---------------------------------------------------------------------------


def _refine(f, xs, i, xtol):
    # precomputed scan values may disagree in sign with f right at a node;
    # widen the bracket by one node each side before giving up
    for lo, hi in ((i, i + 1), (max(i - 1, 0), min(i + 2, len(xs) - 1))):
        try:
            return float(brentq(f, xs[lo], xs[hi], xtol=xtol, rtol=4 * np.finfo(float).eps))
        except ValueError:
            continue
    return None


def find_roots_scan(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    n_scan: int,
    xtol: float = 1e-10,
    values: Sequence[float] | None = None,
) -> list[float]:
    """Scan ``f`` on ``n_scan`` uniform nodes, bracket sign changes, refine.

    ``values`` may carry precomputed ``f`` at the scan nodes (used by batched
    callers). Non-finite scan values break brackets rather than creating
    them. Roots closer than ``10*xtol`` are merged.
    """
    if not lo < hi:
        raise ValueError("need lo < hi")
    if n_scan < 2:
        raise ValueError("need n_scan >= 2")
    xs = np.linspace(lo, hi, n_scan)
    vals = np.array([f(x) for x in xs] if values is None else values, dtype=float)
    roots = []
    for i in range(n_scan):
        if vals[i] == 0.0:
            roots.append(float(xs[i]))
    for i in range(n_scan - 1):
        va, vb = vals[i], vals[i + 1]
        if not (np.isfinite(va) and np.isfinite(vb)) or va == 0.0 or vb == 0.0:
            continue
        if (va < 0) != (vb < 0):
            r = _refine(f, xs, i, xtol)
            if r is not None:
                roots.append(r)
    roots.sort()
    merged: list[float] = []
    for r in roots:
        if merged and r - merged[-1] <= 10 * xtol:
            continue
        merged.append(r)
    return merged
