"""Frozen structure maps of derived models, stored as exact-rational JSON.

Each file holds {"payload": ..., "sha256": ...}; the checksum covers the
canonical serialization of the payload. Writing requires ``force=True``.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from pathlib import Path

from ..exactcalc import Mat
from .cotangent import cotangent_groupoid
from .groupoids import pair_groupoid

DEFAULT_DIR = Path(__file__).resolve().parent.parent / "golden"


class GoldenError(RuntimeError):
    pass


class GoldenChecksumError(GoldenError):
    pass


def frac_str(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def mat_payload(M: Mat) -> dict:
    return {"shape": list(M.shape), "rows": [[frac_str(v) for v in r] for r in M.rows]}


def mat_from_payload(d) -> Mat:
    return Mat([[Fraction(v) for v in r] for r in d["rows"]], d["shape"][1])


def canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _cotangent_pair(n: int) -> dict:
    T = cotangent_groupoid(pair_groupoid(n))
    return {"model": f"cotangent of the pair groupoid on R^{n}",
            "coordinates": {"arrows": "(x, y, p, q)", "base": "(m, theta)"},
            "maps": {k: mat_payload(v) for k, v in sorted(T.mats.items())}}


GENERATORS = {"cotangent-pair1": lambda: _cotangent_pair(1),
              "cotangent-pair2": lambda: _cotangent_pair(2)}


def golden_names() -> list:
    return sorted(GENERATORS)


def compute(name: str) -> dict:
    if name not in GENERATORS:
        raise GoldenError(f"unknown golden dataset {name!r}; known: {golden_names()}")
    return GENERATORS[name]()


def write(name: str, directory=None, force: bool = False) -> Path:
    if not force:
        raise GoldenError("refusing to overwrite golden data without the explicit flag")
    d = Path(directory) if directory is not None else DEFAULT_DIR
    d.mkdir(parents=True, exist_ok=True)
    payload = compute(name)
    text = json.dumps({"payload": payload,
                       "sha256": hashlib.sha256(canonical(payload).encode()).hexdigest()},
                      sort_keys=True, indent=1)
    path = d / f"{name}.json"
    try:
        path.write_text(text + "\n")
    except OSError as e:
        raise GoldenError(f"cannot write {path}: {e}") from None
    return path


def load(name: str, directory=None) -> dict:
    d = Path(directory) if directory is not None else DEFAULT_DIR
    path = d / f"{name}.json"
    if not path.exists():
        raise GoldenError(f"missing golden file {path}")
    data = json.loads(path.read_text())
    digest = hashlib.sha256(canonical(data.get("payload")).encode()).hexdigest()
    if digest != data.get("sha256"):
        raise GoldenChecksumError(f"{path}: checksum mismatch")
    return data["payload"]


def diff(name: str, directory=None) -> list:
    """Keys whose stored value differs from a fresh computation."""
    stored = load(name, directory)
    fresh = compute(name)
    return [k for k in sorted(set(stored["maps"]) | set(fresh["maps"]))
            if stored["maps"].get(k) != fresh["maps"].get(k)]
