"""Deterministic JSON for states and run manifests.

Keys are sorted and every float is written with 17 significant digits, so
identical inputs give byte-identical files and every value round-trips.
Writes go through a temporary file in the target directory and
``os.replace``.
"""
from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path

from chlab import __version__
from chlab.eulerian import EulerianState
from chlab.lagrangian import LagrangianState


class StateFormatError(ValueError):
    """Malformed state file; ``key`` names the first offending entry."""

    def __init__(self, path, key: str, detail: str = ""):
        self.path = str(path)
        self.key = key
        super().__init__(f"{path}: bad or missing key {key!r}" + (f" ({detail})" if detail else ""))


def _encode(obj, out: list[str]) -> None:
    if isinstance(obj, bool) or obj is None:
        out.append(json.dumps(obj))
    elif isinstance(obj, float):
        if not math.isfinite(obj):
            raise ValueError(f"cannot serialize non-finite float {obj}")
        out.append(format(obj, ".17g"))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        out.append("{")
        for i, key in enumerate(sorted(obj)):
            if i:
                out.append(", ")
            out.append(json.dumps(str(key)) + ": ")
            _encode(obj[key], out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(", ")
            _encode(v, out)
        out.append("]")
    elif hasattr(obj, "item"):  # numpy scalar
        _encode(obj.item(), out)
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    out: list[str] = []
    _encode(obj, out)
    return "".join(out) + "\n"


def write_text_atomic(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path, obj) -> None:
    write_text_atomic(path, dumps(obj))


def state_to_json(state) -> dict:
    if isinstance(state, EulerianState):
        return {"kind": "eulerian", **state.to_json()}
    if isinstance(state, LagrangianState):
        return {"kind": "lagrangian", **state.to_json()}
    raise TypeError(f"not a state: {type(state).__name__}")


_REQUIRED = {
    "eulerian": ("grid", "u", "rho_bar", "k", "mu"),
    "lagrangian": ("grid", "y", "U", "h", "r_bar", "k"),
}


def state_from_json(obj, path="<memory>"):
    if not isinstance(obj, dict):
        raise StateFormatError(path, "<root>", "expected an object")
    kind = obj.get("kind")
    if kind is None:
        kind = "lagrangian" if "y" in obj else "eulerian"
    if kind not in _REQUIRED:
        raise StateFormatError(path, "kind", f"unknown kind {kind!r}")
    for key in _REQUIRED[kind]:
        if key not in obj:
            raise StateFormatError(path, key, "missing")
    for key in ("x0", "dx", "cells"):
        if not isinstance(obj["grid"], dict) or key not in obj["grid"]:
            raise StateFormatError(path, f"grid.{key}", "missing")
    bad = _first_bad_key(obj, kind)
    if bad is not None:
        raise StateFormatError(path, bad)
    try:
        return (EulerianState if kind == "eulerian" else LagrangianState).from_json(obj)
    except KeyError as exc:
        raise StateFormatError(path, str(exc.args[0])) from exc
    except (TypeError, ValueError) as exc:
        raise StateFormatError(path, _first_bad_key(obj, kind) or "<values>", str(exc)) from exc


def _first_bad_key(obj: dict, kind: str) -> str | None:
    # the first entry whose shape does not fit the grid, or None
    try:
        n = int(obj["grid"]["cells"])
    except (TypeError, ValueError, KeyError):
        return "grid.cells"
    sizes = {"u": n + 1, "y": n + 1, "U": n + 1, "rho_bar": n, "h": n, "r_bar": n}
    for key in _REQUIRED[kind]:
        if key in sizes and (not isinstance(obj[key], list) or len(obj[key]) != sizes[key]):
            return key
    if kind == "eulerian":
        mu = obj["mu"]
        if not isinstance(mu, dict):
            return "mu"
        for key in ("grid", "density"):
            if key not in mu:
                return f"mu.{key}"
    return None


def read_state(path):
    path = Path(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise StateFormatError(path, "<root>", f"invalid JSON at line {exc.lineno}") from exc
    return state_from_json(obj, path)


def write_state(path, state) -> None:
    write_json(path, state_to_json(state))


@dataclass
class RunManifest:
    command: str
    inputs: list[str] = field(default_factory=list)
    config: dict | None = None
    tool_version: str = __version__
    wall_time: float = 0.0

    def to_json(self) -> dict:
        return asdict(self)


def manifest_path(output) -> Path:
    output = Path(output)
    return output / "manifest.json" if output.is_dir() else output.with_name(output.name + ".manifest.json")


def write_manifest(output, manifest: RunManifest) -> None:
    write_json(manifest_path(output), manifest.to_json())
