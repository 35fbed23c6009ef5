from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, replace

ENV_VAR = "LAME_KIT_TOL"


@dataclass(frozen=True)
class Tolerances:
    rtol: float = 1e-10
    atol: float = 1e-12
    xtol: float = 1e-10

    def asdict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_env(cls, environ=None) -> "Tolerances":
        """Defaults overridden by ``LAME_KIT_TOL``.

        Accepts either a JSON object (``{"rtol": 1e-8}``) or a comma list
        (``rtol=1e-8,xtol=1e-9``).
        """
        environ = os.environ if environ is None else environ
        raw = environ.get(ENV_VAR, "").strip()
        if not raw:
            return cls()
        if raw.startswith("{"):
            updates = json.loads(raw)
        else:
            updates = {}
            for item in raw.split(","):
                if not item.strip():
                    continue
                key, _, value = item.partition("=")
                updates[key.strip()] = value
        known = {"rtol", "atol", "xtol"}
        bad = sorted(set(updates) - known)
        if bad:
            raise ValueError(f"{ENV_VAR}: unknown tolerance key(s) {bad}")
        values = {k: float(v) for k, v in updates.items()}
        if any(v <= 0 for v in values.values()):
            raise ValueError(f"{ENV_VAR}: tolerances must be positive")
        return replace(cls(), **values)


DEFAULT_TOL = Tolerances()
