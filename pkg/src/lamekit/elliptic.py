"""Weierstrass elliptic function on the real line.

``℘`` is evaluated from its Laurent expansion about the pole at the origin,
after reducing the argument by the real period and halving it into the
series disc; duplication then climbs back up. ``℘'`` is carried through the
duplication step by differentiating the duplication formula, so its sign
needs no bookkeeping.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import PoleProximity

DEFAULT_ORDER = 12
POLE_GUARD = 1e8


@dataclass(frozen=True)
class EllipticInvariants:
    g2: float
    g3: float
    discriminant: float = field(init=False)
    degenerate: bool = field(init=False)

    def __post_init__(self):
        g2, g3 = float(self.g2), float(self.g3)
        object.__setattr__(self, "g2", g2)
        object.__setattr__(self, "g3", g3)
        disc = g2**3 - 27.0 * g3**2
        object.__setattr__(self, "discriminant", disc)
        object.__setattr__(self, "degenerate", abs(disc) < 1e-12 * max(1.0, abs(g2) ** 3, g3**2))

    @property
    def is_zero(self) -> bool:
        return self.g2 == 0.0 and self.g3 == 0.0

    def cubic(self, t):
        return 4.0 * t**3 - self.g2 * t - self.g3

    def roots(self) -> np.ndarray:
        """Roots of 4t^3 - g2 t - g3; real roots sorted descending first."""
        r = np.roots([4.0, 0.0, -self.g2, -self.g3])
        real = sorted((x.real for x in r if abs(x.imag) <= 1e-12 * max(1.0, abs(x))), reverse=True)
        if len(real) == 3 or len(real) == 1:
            cplx = [x for x in r if abs(x.imag) > 1e-12 * max(1.0, abs(x))]
            cplx.sort(key=lambda z: z.imag)
            return np.array([complex(x) for x in real] + cplx)
        return r

    def largest_real_root(self) -> float:
        e1 = max(x.real for x in self.roots() if abs(x.imag) <= 1e-12 * max(1.0, abs(x)))
        # polish with Newton on the cubic
        for _ in range(3):
            d = 12.0 * e1 * e1 - self.g2
            if d == 0:
                break
            e1 -= self.cubic(e1) / d
        return e1


def wp_series_coeffs(inv: EllipticInvariants, K: int = DEFAULT_ORDER) -> np.ndarray:
    """Laurent coefficients ``c_2..c_K`` of ``℘(x) = x^-2 + sum c_k x^(2k-2)``.

    Returned array is indexed so that ``out[k]`` is ``c_k`` (entries 0, 1 unused).
    """
    if K < 3:
        raise ValueError("need K >= 3")
    c = np.zeros(K + 1)
    c[2] = inv.g2 / 20.0
    c[3] = inv.g3 / 28.0
    for k in range(4, K + 1):
        s = sum(c[m] * c[k - m] for m in range(2, k - 1))
        c[k] = 3.0 * s / ((2 * k + 1) * (k - 3))
    return c


def _agm(a: complex, b: complex) -> complex:
    for _ in range(100):
        a, b = 0.5 * (a + b), cmath.sqrt(a * b)
        if abs(a - b) <= 1e-16 * abs(a):
            break
    return a


def real_half_period(inv: EllipticInvariants) -> float:
    """Smallest positive ``ω`` with ``℘'(ω) = 0``; ``inf`` if there is none."""
    if inv.is_zero:
        return math.inf
    r = inv.roots()
    e1 = inv.largest_real_root()
    others = sorted(r, key=lambda z: abs(z - e1))[1:]
    a = cmath.sqrt(e1 - others[0])
    b = cmath.sqrt(e1 - others[1])
    # conjugate pair or two real roots below e1: pick branches with positive real part
    if a.real < 0:
        a = -a
    if b.real < 0:
        b = -b
    m = _agm(a, b)
    if abs(m) < 1e-300:
        return math.inf
    return math.pi / (2.0 * m.real)


class WeierstrassP:
    """Evaluator for ``℘`` and ``℘'`` with invariants ``g2, g3``.

    Parameters
    ----------
    g2, g3 : float
        Curve invariants.
    order : int
        Laurent truncation order ``K``.
    pole_guard : float
        Evaluations with ``|℘| > pole_guard`` raise :class:`PoleProximity`.
    reduce : bool
        Reduce arguments modulo the real period before halving.
    """

    def __init__(self, g2: float, g3: float, order: int = DEFAULT_ORDER, pole_guard: float = POLE_GUARD, reduce: bool = True):
        self.inv = EllipticInvariants(g2, g3)
        self.order = order
        self.pole_guard = pole_guard
        self.coeffs = wp_series_coeffs(self.inv, order)
        g2a, g3a = max(abs(self.inv.g2), 1.0), max(abs(self.inv.g3), 1.0)
        self.radius = 0.5 * min(1.0, (20.0 / g2a) ** 0.25, (28.0 / g3a) ** (1.0 / 6.0))
        self.half_period = real_half_period(self.inv) if reduce else math.inf
        self._c = [float(c) for c in self.coeffs[2:][::-1]]
        self._dc = [float(c) for c in (self.coeffs[2:] * (2.0 * np.arange(2, order + 1) - 2.0))[::-1]]

    @property
    def g2(self) -> float:
        return self.inv.g2

    @property
    def g3(self) -> float:
        return self.inv.g3

    @classmethod
    def from_invariants(cls, inv: EllipticInvariants, **kw) -> "WeierstrassP":
        return cls(inv.g2, inv.g3, **kw)

    def series(self, u: float) -> tuple[float, float]:
        """Laurent series for ``(℘(u), ℘'(u))``; only accurate for ``|u| <= radius``."""
        t = u * u
        s = 0.0
        for c in self._c:
            s = s * t + c
        ds = 0.0
        for c in self._dc:
            ds = ds * t + c
        p = 1.0 / t + s * t
        q = -2.0 / (u * t) + ds * u
        return p, q

    def duplicate(self, p: float, q: float) -> tuple[float, float]:
        """``(℘(2u), ℘'(2u))`` from ``(℘(u), ℘'(u))``."""
        if q == 0.0:
            raise PoleProximity("duplication through a half-period lands on a pole")
        r = 6.0 * p * p - 0.5 * self.inv.g2
        f = r / (2.0 * q)
        p2 = -2.0 * p + f * f
        q2 = -q + r * (12.0 * p * q * q - r * r) / (4.0 * q**3)
        return p2, q2

    def _check(self, p: float, x: float):
        if not math.isfinite(p) or abs(p) > self.pole_guard:
            raise PoleProximity(f"|℘| exceeds {self.pole_guard:.3g} at x = {x:.17g}")

    def __call__(self, x: float) -> tuple[float, float]:
        x = float(x)
        if self.inv.is_zero:
            if x == 0.0:
                raise PoleProximity("pole at x = 0")
            p, q = 1.0 / (x * x), -2.0 / x**3
            self._check(p, x)
            return p, q
        u = x
        if math.isfinite(self.half_period):
            period = 2.0 * self.half_period
            u = x - period * round(x / period)
        sign = 1.0
        if u < 0:
            u, sign = -u, -1.0
        if u == 0.0:
            raise PoleProximity(f"pole at x = {x:.17g}")
        j = 0
        while u > self.radius:
            u *= 0.5
            j += 1
        p, q = self.series(u)
        self._check(p, x)
        for _ in range(j):
            p, q = self.duplicate(p, q)
            self._check(p, x)
        return p, sign * q

    def derivatives(self, x: float, order: int = 4) -> np.ndarray:
        """``[℘, ℘', ℘'', ℘''', ℘'''']`` truncated at ``order`` (<= 4)."""
        if not 0 <= order <= 4:
            raise ValueError("order must be in 0..4")
        p, q = self(x)
        g2 = self.inv.g2
        pp = 6.0 * p * p - 0.5 * g2
        out = [p, q, pp, 12.0 * p * q, 12.0 * q * q + 12.0 * p * pp]
        return np.array(out[: order + 1])


def wp(evaluator: WeierstrassP, x: float) -> tuple[float, float]:
    return evaluator(x)


def wp_derivatives(evaluator: WeierstrassP, x: float, order: int = 4) -> np.ndarray:
    return evaluator.derivatives(x, order)
