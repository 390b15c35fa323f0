"""JSON space/kernel specs, serialization of built instances, stable output.

Top-level spec schema:

    {"type": "lattice" | "graph" | "stack" | "weighted_line" | "model_manifold",
     "truncation_radius": R,
     "params": {...}}

Lattice specs carry a kernel subdict {"family": "nn" | "stable_i" |
"stable_ii" | "explicit", ...}; explicit kernels list [i, j, value] entries
with symmetry enforced at load. All floats in written reports are rounded
to 12 significant digits so reruns diff cleanly.
"""

from __future__ import annotations

import hashlib
import json
import math
import pickle
from pathlib import Path
from typing import Any

import numpy as np

from . import kernels as kmod
from .kernels import BuiltInstance

SPEC_TYPES = ("lattice", "graph", "stack", "weighted_line", "model_manifold")


class SpecError(ValueError):
    """Malformed spec file; the message names the offending field."""


def round_sig(x: float, sig: int = 12) -> float:
    if not math.isfinite(x) or x == 0.0:
        return x
    return float(f"{x:.{sig}g}")


def round_floats(obj: Any, sig: int = 12) -> Any:
    if isinstance(obj, float):
        return round_sig(obj, sig)
    if isinstance(obj, dict):
        return {k: round_floats(v, sig) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(v, sig) for v in obj]
    if isinstance(obj, np.floating):
        return round_sig(float(obj), sig)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return round_floats(obj.tolist(), sig)
    return obj


def write_json(path, obj: Any) -> None:
    payload = json.dumps(round_floats(obj), sort_keys=True, indent=2) + "\n"
    Path(path).write_text(payload)


def sha256_of(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def load_spec(path) -> dict:
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SpecError(f"spec is not valid JSON: {exc}") from exc
    validate_spec(raw)
    return raw


def validate_spec(raw: dict) -> None:
    if not isinstance(raw, dict):
        raise SpecError("spec must be a JSON object")
    if "type" not in raw:
        raise SpecError("missing required field 'type'")
    if raw["type"] not in SPEC_TYPES:
        raise SpecError(f"field 'type' must be one of {SPEC_TYPES}, got {raw['type']!r}")
    if "truncation_radius" not in raw:
        raise SpecError("missing required field 'truncation_radius'")
    tr = raw["truncation_radius"]
    if not isinstance(tr, (int, float)) or tr <= 0:
        raise SpecError("field 'truncation_radius' must be a positive number")
    if "params" in raw and not isinstance(raw["params"], dict):
        raise SpecError("field 'params' must be an object")


def _check_symmetric_entries(entries) -> None:
    seen: dict[tuple[int, int], float] = {}
    for row in entries:
        if len(row) != 3:
            raise SpecError("explicit kernel entries must be [i, j, value] triples")
        i, j, v = int(row[0]), int(row[1]), float(row[2])
        if i == j:
            raise SpecError("explicit kernel entries must be off-diagonal")
        key = (min(i, j), max(i, j))
        if key in seen and seen[key] != v:
            raise SpecError(f"conflicting values for symmetric pair {key}: {seen[key]} vs {v}")
        seen[key] = v


def build_from_spec(raw: dict) -> BuiltInstance:
    """Construct the described space/kernel/local triple."""
    validate_spec(raw)
    kind = raw["type"]
    radius = float(raw["truncation_radius"])
    params = dict(raw.get("params", {}))
    if kind == "lattice":
        kspec = dict(params.pop("kernel", {"family": "nn"}))
        family = kspec.pop("family", "nn")
        common = {
            "dim": int(params.get("dim", 1)),
            "spacing": float(params.get("spacing", 1.0)),
            "truncation_radius": radius,
        }
        if family == "nn":
            return kmod.lattice_nn(
                measure=params.get("measure", "counting"),
                density=float(kspec.get("density", 1.0)),
                **common,
            )
        if family in ("stable_i", "stable_ii"):
            return kmod.stable_like(
                case="i" if family == "stable_i" else "ii",
                alpha=float(kspec.get("alpha", 1.0)),
                beta=float(kspec.get("beta", 1.0)),
                tempering=float(kspec.get("tempering", 1.0)),
                support=params.get("support", "lattice"),
                gasket_level=int(params.get("gasket_level", 5)),
                **common,
            )
        if family == "explicit":
            entries = kspec.get("entries", [])
            _check_symmetric_entries(entries)
            n_points = int(
                kspec.get("n_points", (2 * math.floor(radius / common["spacing"]) + 1) ** common["dim"])
            )
            return kmod.explicit_kernel(n_points, entries, truncation_radius=radius)
        raise SpecError(f"unknown kernel family {family!r}")
    if kind == "graph":
        return kmod.mixed_graph_from_params(truncation_radius=radius, **params)
    if kind == "stack":
        psi = params.pop("psi", 1.0)
        if isinstance(psi, dict):
            if psi.get("kind") == "constant":
                psi_arg = float(psi.get("value", 1.0))
            elif psi.get("kind") == "power":
                a, p = float(psi.get("a", 1.0)), float(psi.get("p", 0.0))
                psi_arg = lambda pts: (a + np.sqrt((pts**2).sum(axis=1))) ** p
            else:
                raise SpecError(f"unknown psi kind {psi.get('kind')!r}")
        else:
            psi_arg = float(psi)
        return kmod.stack_space(psi=psi_arg, truncation_radius=radius, **params)
    if kind == "weighted_line":
        return kmod.weighted_line(truncation_radius=radius, **params)
    if kind == "model_manifold":
        return kmod.model_manifold(truncation_radius=radius, **params)
    raise SpecError(f"unhandled spec type {kind!r}")


def save_built(path, built: BuiltInstance) -> None:
    with open(path, "wb") as fh:
        pickle.dump(built, fh, protocol=pickle.HIGHEST_PROTOCOL)


def load_built(path) -> BuiltInstance:
    with open(path, "rb") as fh:
        built = pickle.load(fh)
    if not isinstance(built, BuiltInstance):
        raise SpecError("file does not contain a built instance")
    return built


def load_spec_or_built(path) -> BuiltInstance:
    """Accept either a JSON spec or a previously serialized instance."""
    p = Path(path)
    if not p.exists():
        raise SpecError(f"no such spec file: {path}")
    if p.suffix in (".pkl", ".bin"):
        return load_built(p)
    return build_from_spec(load_spec(p))
