"""Scalar fields with analytic derivatives.

A :class:`Jet` is a truncated Taylor expansion at a point, stored as
normalized coefficients ``t_k = f^(k)(x)/k!``. Arithmetic on jets is exact
Taylor arithmetic, which is how every composite field in the package gets
its derivatives without finite differences.

A :class:`ScalarField` wraps a callable ``x -> [f, f', ..., f^(order)]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

_FACT = [math.factorial(k) for k in range(12)]


class Jet:
    __slots__ = ("t",)

    def __init__(self, taylor: Sequence[float]):
        self.t = [float(v) for v in taylor]

    @classmethod
    def from_derivs(cls, derivs: Sequence[float]) -> "Jet":
        return cls([d / _FACT[k] for k, d in enumerate(derivs)])

    @classmethod
    def const(cls, value: float, order: int) -> "Jet":
        return cls([value] + [0.0] * order)

    @classmethod
    def variable(cls, x: float, order: int) -> "Jet":
        t = [x, 1.0] + [0.0] * (order - 1)
        return cls(t[: order + 1])

    @property
    def order(self) -> int:
        return len(self.t) - 1

    @property
    def value(self) -> float:
        return self.t[0]

    def derivs(self) -> np.ndarray:
        return np.array([c * _FACT[k] for k, c in enumerate(self.t)])

    def truncate(self, order: int) -> "Jet":
        return Jet(self.t[: order + 1])

    def derivative(self) -> "Jet":
        """Jet of f' (one order lower)."""
        return Jet([(k + 1) * self.t[k + 1] for k in range(len(self.t) - 1)])

    def _coerce(self, other):
        if isinstance(other, Jet):
            n = min(len(self.t), len(other.t))
            return self.t[:n], other.t[:n]
        return self.t, [float(other)] + [0.0] * (len(self.t) - 1)

    def __add__(self, other):
        a, b = self._coerce(other)
        return Jet([x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return Jet([-x for x in self.t])

    def __sub__(self, other):
        a, b = self._coerce(other)
        return Jet([x - y for x, y in zip(a, b)])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            s = float(other)
            return Jet([x * s for x in self.t])
        a, b = self._coerce(other)
        return Jet([sum(a[j] * b[k - j] for j in range(k + 1)) for k in range(len(a))])

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            s = float(other)
            return Jet([x / s for x in self.t])
        a, b = self._coerce(other)
        c: list[float] = []
        for k in range(len(a)):
            c.append((a[k] - sum(b[j] * c[k - j] for j in range(1, k + 1))) / b[0])
        return Jet(c)

    def __rtruediv__(self, other):
        return Jet.const(float(other), self.order) / self

    def __pow__(self, k: int):
        if k == 0:
            return Jet.const(1.0, self.order)
        out = self
        for _ in range(int(k) - 1):
            out = out * self
        return out

    def sqrt(self) -> "Jet":
        a = self.t
        c = [math.sqrt(a[0])]
        for k in range(1, len(a)):
            c.append((a[k] - sum(c[j] * c[k - j] for j in range(1, k))) / (2 * c[0]))
        return Jet(c)

    def abs(self) -> "Jet":
        return -self if self.t[0] < 0 else self

    def _trig_pair(self, hyperbolic: bool):
        u = self.t
        if hyperbolic:
            s, c = [math.sinh(u[0])], [math.cosh(u[0])]
            sign = 1.0
        else:
            s, c = [math.sin(u[0])], [math.cos(u[0])]
            sign = -1.0
        for k in range(1, len(u)):
            s.append(sum(j * u[j] * c[k - j] for j in range(1, k + 1)) / k)
            c.append(sign * sum(j * u[j] * s[k - j] for j in range(1, k + 1)) / k)
        return Jet(s), Jet(c)

    def sin(self) -> "Jet":
        return self._trig_pair(False)[0]

    def cos(self) -> "Jet":
        return self._trig_pair(False)[1]

    def sinh(self) -> "Jet":
        return self._trig_pair(True)[0]

    def cosh(self) -> "Jet":
        return self._trig_pair(True)[1]

    def __repr__(self):
        return f"Jet(derivs={self.derivs().tolist()})"


def horner_jet(coeffs: Sequence[float], p: Jet) -> Jet:
    """Evaluate a polynomial (low-to-high coefficients) at a jet."""
    acc = Jet.const(0.0, p.order)
    for c in list(coeffs)[::-1]:
        acc = acc * p + c
    return acc


@dataclass(frozen=True)
class ScalarField:
    """Real function with derivatives up to ``order``.

    ``func(x)`` returns the sequence ``[f(x), f'(x), ..., f^(order)(x)]``.
    """

    func: Callable[[float], Sequence[float]]
    order: int
    domain: tuple[float, float] = (-math.inf, math.inf)
    label: str = ""

    def derivs(self, x: float, order: int | None = None) -> np.ndarray:
        k = self.order if order is None else order
        if k > self.order:
            raise ValueError(f"field {self.label or '?'} only carries {self.order} derivatives")
        return np.asarray(self.func(float(x)), dtype=float)[: k + 1]

    def jet(self, x: float, order: int | None = None) -> Jet:
        return Jet.from_derivs(self.derivs(x, order))

    def __call__(self, x: float) -> float:
        return float(self.func(float(x))[0])

    def value_only(self) -> Callable[[float], float]:
        return lambda x: float(self.func(float(x))[0])

    @classmethod
    def from_jet(cls, build: Callable[[float], Jet], order: int, domain=(-math.inf, math.inf), label="") -> "ScalarField":
        return cls(lambda x: build(x).derivs(), order, domain, label)

    @classmethod
    def constant(cls, value: float, order: int = 4, label: str = "") -> "ScalarField":
        v = [float(value)] + [0.0] * order
        return cls(lambda x: v, order, label=label or f"const({value})")

    @classmethod
    def polynomial(cls, coeffs: Sequence[float], order: int = 4, label: str = "") -> "ScalarField":
        return cls.from_jet(lambda x: horner_jet(coeffs, Jet.variable(x, order)), order, label=label)
