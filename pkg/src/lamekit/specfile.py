"""JSON potential specs: parsing, validation, serialization and construction.

A spec is a JSON object with a ``kind`` discriminator::

    {"kind": "lame_even", "n": 1, "c0": 0.5, "g2": 2, "g3": 0.1}
    {"kind": "hierarchy", "base": {...}, "c_hat": 1, "alpha": [1, 0.1, 0], "x_b": 0.8}

Every kind accepts an optional ``"domain": [x0, x1]``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

from .elliptic import EllipticInvariants, WeierstrassP
from .errors import SpecError
from .fields import ScalarField
from .lame import (
    LamePotentialSpec,
    LameSymmetrySpec,
    assemble_fields,
    even_coefficients,
    odd_coefficients,
    odd_trivial_pair,
    pole_free_window,
)
from .numerics import Grid, Polynomial
from .symcore import SymmetryPair, hierarchy_step, make_pair, symmetry_from_solutions

_NUM = "number"
_INT = "integer"
_NUMLIST = "list of numbers"
_SPEC = "spec object"

SCHEMA: dict[str, dict[str, str]] = {
    "constant": {"value": _NUM},
    "lame_even": {"n": _INT, "c0": _NUM, "g2": _NUM, "g3": _NUM},
    "lame_odd": {"n": _INT, "c0": _NUM, "g2": _NUM, "g3": _NUM},
    "lame_general": {"C": _NUMLIST, "E": _NUMLIST, "g2": _NUM, "g3": _NUM},
    "mexican_hat": {"nu": _NUM, "delta": _NUM},
    "odd_trivial": {"n": _INT, "w0": _NUM},
    "hierarchy": {"base": _SPEC, "c_hat": _NUM, "alpha": _NUMLIST},
}
OPTIONAL: dict[str, dict[str, str]] = {
    "hierarchy": {"x_b": _NUM},
}
COMMON_OPTIONAL = {"domain": _NUMLIST}


@dataclass(frozen=True)
class PotentialSpecFile:
    kind: str
    params: dict = field(default_factory=dict)
    domain: tuple[float, float] | None = None

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"kind": self.kind}
        for k, v in self.params.items():
            out[k] = v.to_dict() if isinstance(v, PotentialSpecFile) else v
        if self.domain is not None:
            out["domain"] = list(self.domain)
        return out


def _is_num(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _check(kind_field: str, want: str, v, path: str, problems: list[str]):
    if want == _NUM and not _is_num(v):
        problems.append(f"{path}: expected a finite {want}, got {v!r}")
    elif want == _INT and not (isinstance(v, int) and not isinstance(v, bool)):
        problems.append(f"{path}: expected an {want}, got {v!r}")
    elif want == _NUMLIST and not (isinstance(v, list) and all(_is_num(t) for t in v)):
        problems.append(f"{path}: expected a {want}, got {v!r}")


def _validate(doc, path: str, problems: list[str]) -> PotentialSpecFile | None:
    if not isinstance(doc, dict):
        problems.append(f"{path or '<root>'}: expected an object")
        return None
    kind = doc.get("kind")
    where = lambda k: f"{path}.{k}" if path else k  # noqa: E731
    if kind is None:
        problems.append(f"{where('kind')}: missing")
        return None
    if kind not in SCHEMA:
        problems.append(f"{where('kind')}: unknown kind {kind!r} (expected one of {sorted(SCHEMA)})")
        return None
    required = SCHEMA[kind]
    optional = {**OPTIONAL.get(kind, {}), **COMMON_OPTIONAL}
    params: dict[str, Any] = {}
    for k in doc:
        if k != "kind" and k not in required and k not in optional:
            problems.append(f"{where(k)}: unexpected field for kind {kind!r}")
    for k, want in required.items():
        if k not in doc:
            problems.append(f"{where(k)}: missing (required for kind {kind!r})")
            continue
        v = doc[k]
        if want == _SPEC:
            sub = _validate(v, where(k), problems)
            if sub is not None:
                params[k] = sub
            continue
        _check(k, want, v, where(k), problems)
        params[k] = v
    for k, want in OPTIONAL.get(kind, {}).items():
        if k in doc:
            _check(k, want, doc[k], where(k), problems)
            params[k] = doc[k]

    # kind-specific constraints
    if kind in ("lame_even", "lame_odd", "odd_trivial"):
        n = params.get("n")
        lo = 1 if kind == "lame_even" else 0
        if isinstance(n, int) and n < lo:
            problems.append(f"{where('n')}: must be >= {lo}")
    if kind == "mexican_hat":
        for k in ("nu", "delta"):
            if _is_num(params.get(k)) and params[k] <= 0:
                problems.append(f"{where(k)}: must be positive")
    if kind == "hierarchy" and isinstance(params.get("alpha"), list) and len(params["alpha"]) != 3:
        problems.append(f"{where('alpha')}: needs exactly three entries")

    domain = None
    if "domain" in doc:
        d = doc["domain"]
        if not (isinstance(d, list) and len(d) == 2 and all(_is_num(t) for t in d)):
            problems.append(f"{where('domain')}: expected [x0, x1]")
        elif not d[0] < d[1]:
            problems.append(f"{where('domain')}: need x0 < x1")
        else:
            domain = (d[0], d[1])
    return PotentialSpecFile(kind, params, domain)


def parse_spec(text: str | dict) -> PotentialSpecFile:
    """Validate a spec; :class:`SpecError` lists every violation found."""
    if isinstance(text, str):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SpecError([f"line {exc.lineno}, column {exc.colno}: {exc.msg}"]) from None
    else:
        doc = text
    problems: list[str] = []
    spec = _validate(doc, "", problems)
    if problems:
        raise SpecError(problems)
    return spec


def serialize_spec(spec: PotentialSpecFile) -> str:
    return dumps(spec.to_dict())


def load_spec(path: str) -> PotentialSpecFile:
    with open(path, encoding="utf-8") as fh:
        return parse_spec(fh.read())


def parse_symmetry(text: str | dict) -> LameSymmetrySpec:
    """``{"A": [...], "B": [...]}`` (either may be omitted)."""
    doc = json.loads(text) if isinstance(text, str) else text
    problems = []
    if not isinstance(doc, dict):
        raise SpecError(["symmetry: expected an object"])
    for k in doc:
        if k not in ("A", "B"):
            problems.append(f"{k}: unexpected field in symmetry spec")
    for k in ("A", "B"):
        if k in doc:
            _check(k, _NUMLIST, doc[k], k, problems)
    if problems:
        raise SpecError(problems)
    return LameSymmetrySpec(Polynomial(doc.get("A", [])), Polynomial(doc.get("B", [])))


# ---------------------------------------------------------------------------
# Deterministic JSON
# ---------------------------------------------------------------------------


def fmt_float(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        return "null"
    s = format(x, ".17g")
    if not any(c in s for c in ".en"):
        s += ".0"
    return s


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with floats at 17 significant digits and sorted keys."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float) or (hasattr(obj, "dtype") and getattr(obj, "ndim", 0) == 0):
        if hasattr(obj, "dtype") and obj.dtype.kind in "iu":
            return str(int(obj))
        if hasattr(obj, "dtype") and obj.dtype.kind == "b":
            return json.dumps(bool(obj))
        return fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {dumps(v, indent, _level + 1)}" for k, v in sorted(obj.items())]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)) or hasattr(obj, "tolist"):
        seq = obj.tolist() if hasattr(obj, "tolist") else obj
        if not seq:
            return "[]"
        return "[" + ", ".join(dumps(v, indent, _level + 1) for v in seq) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------


def _inv(p) -> EllipticInvariants:
    return EllipticInvariants(p["g2"], p["g3"])


def _lame_general_pot(p) -> LamePotentialSpec:
    return LamePotentialSpec(Polynomial(p["C"]), Polynomial(p["E"]), _inv(p))


def default_domain(spec: PotentialSpecFile) -> tuple[float, float]:
    if spec.domain is not None:
        return spec.domain
    k, p = spec.kind, spec.params
    if k in ("lame_even", "lame_odd", "lame_general"):
        return pole_free_window(WeierstrassP.from_invariants(_inv(p)))
    if k == "odd_trivial":
        return (1.0 - p["w0"], 2.0 - p["w0"])
    if k == "mexican_hat":
        return (-2.0, 2.0)
    if k == "hierarchy":
        return default_domain(p["base"])
    return (0.0, 1.0)


def build_potential(spec: PotentialSpecFile, domain: tuple[float, float] | None = None) -> ScalarField:
    """``w`` as an order-1 field."""
    from .eigen import MexicanHatSpec, mexican_hat_field

    k, p = spec.kind, spec.params
    if k == "constant":
        return ScalarField.constant(p["value"], 1)
    if k == "mexican_hat":
        return mexican_hat_field(MexicanHatSpec(p["nu"], p["delta"]))
    if k == "lame_general":
        pot = _lame_general_pot(p)
        dom = domain or default_domain(spec)
        return assemble_fields(pot, LameSymmetrySpec(Polynomial([1.0]), Polynomial()), domain=dom, c_w=0.0).w
    return build_pair(spec, domain).w


def build_pair(spec: PotentialSpecFile, domain: tuple[float, float] | None = None) -> SymmetryPair:
    """Pair ``(w, z)`` for ``spec``; kinds without a closed-form symmetry get a numerical one."""
    k, p = spec.kind, spec.params
    dom = tuple(domain) if domain is not None else default_domain(spec)
    if k == "constant":
        v = float(p["value"])
        return make_pair(ScalarField.constant(v, 1), ScalarField.constant(1.0, 3), dom, c_w=v)
    if k == "lame_even":
        f = even_coefficients(p["n"], p["c0"], _inv(p))
        return assemble_fields(f.potential, f.symmetry, domain=dom, family=f)
    if k == "lame_odd":
        f = odd_coefficients(p["n"], p["c0"], _inv(p))
        return assemble_fields(f.potential, f.symmetry, domain=dom, family=f)
    if k == "odd_trivial":
        return odd_trivial_pair(p["n"], p["w0"], dom)
    if k in ("mexican_hat", "lame_general"):
        return symmetry_from_solutions(build_potential(spec, dom), dom[0], dom[1])
    if k == "hierarchy":
        base = build_pair(p["base"], dom)
        return hierarchy_step(base, p["c_hat"], p["alpha"], x_b=p.get("x_b"), grid=Grid(dom[0], dom[1], 257))
    raise SpecError([f"kind: cannot build {k!r}"])


def lambda_family(spec: PotentialSpecFile, a: float, b: float):
    """λ-family for the determinant method, or ``None`` for the numerical default."""
    from .eigen import constant_family, lame_even_family

    p = spec.params
    if spec.kind == "constant":
        return constant_family(p["value"], a, b)
    if spec.kind == "lame_even":
        return lame_even_family(p["n"], p["c0"], _inv(p), a, b)
    return None
