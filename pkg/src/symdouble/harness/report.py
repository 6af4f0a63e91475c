"""Suite reports and their canonical JSON form.

Rationals are written as "p/q" strings, polynomials as their printed form,
so identical runs give identical bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from ..exactcalc import Mat, Poly, PolyMap, qstr

SCHEMA_VERSION = 1


def jsonable(x):
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return qstr(x)
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, Mat):
        return [[qstr(a) for a in r] for r in x.rows]
    if isinstance(x, Poly):
        return str(x)
    if isinstance(x, PolyMap):
        return [str(c) for c in x.components]
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (set, frozenset)):
        return sorted((jsonable(v) for v in x), key=repr)
    if isinstance(x, (tuple, list)):
        return [jsonable(v) for v in x]
    if hasattr(x, "to_dict"):
        return jsonable(x.to_dict())
    return str(x)


@dataclass
class Check:
    name: str
    ok: bool = True
    trials: int = 0
    witness: object = None


@dataclass
class Report:
    suite: str
    anchor: str
    seed: int
    config: dict
    checks: list = field(default_factory=list)
    details: dict = field(default_factory=dict)
    timing: float | None = None
    _index: dict = field(default_factory=dict, repr=False)

    def check(self, name: str, ok: bool, witness=None):
        """Record one trial of ``name``; the first failing witness is kept."""
        c = self._index.get(name)
        if c is None:
            c = self._index[name] = Check(name)
            self.checks.append(c)
        c.trials += 1
        if not ok and c.ok:
            c.ok = False
            c.witness = witness if witness is not None else {"trial": c.trials}

    def absorb(self, prefix: str, checks: dict, failures=(), first=None):
        """Fold a module report (name -> bool plus failure list) into this one."""
        for name, ok in checks.items():
            w = None
            if not ok:
                w = next((f for f in failures if str(f.get("check", "")).startswith(name)),
                         first)
            self.check(f"{prefix}{name}", bool(ok), w)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def status(self, name: str) -> bool:
        return self._index[name].ok

    def to_dict(self, with_timing: bool = False) -> dict:
        out = {"schema": SCHEMA_VERSION, "suite": self.suite, "anchor": self.anchor,
               "seed": self.seed, "config": self.config, "ok": self.ok,
               "checks": [{"name": c.name, "ok": c.ok, "trials": c.trials,
                           "witness": c.witness} for c in self.checks],
               "details": self.details}
        out = jsonable(out)
        if with_timing:
            out["timing_s"] = round(self.timing or 0.0, 3)
        return out

    def to_json(self, with_timing: bool = False) -> str:
        return json.dumps(self.to_dict(with_timing), sort_keys=True, indent=1)

    def to_text(self) -> str:
        lines = [f"{self.suite}  seed={self.seed}  {'PASS' if self.ok else 'FAIL'}"]
        for c in self.checks:
            lines.append(f"  [{'ok' if c.ok else 'FAIL'}] {c.name} ({c.trials})")
            if not c.ok:
                lines.append("        witness: " + json.dumps(jsonable(c.witness), sort_keys=True))
        if self.timing is not None:
            lines.append(f"  time {self.timing:.2f}s")
        return "\n".join(lines)
