"""Stable serialisation: sorted-key JSON with 12 significant digits, and DOT."""

from __future__ import annotations

import json
import math
from typing import Any

import numpy as np

from .lattice import SubgroupLattice


def normalize(obj: Any) -> Any:
    """Recursively convert to plain JSON types with rounded, sign-normalised floats."""
    if isinstance(obj, dict):
        return {str(k): normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [normalize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return normalize(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [normalize(obj.real), normalize(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x) or math.isinf(x):
            return str(x)
        x = float(f"{x:.12g}")
        return 0.0 if x == 0 else x
    if obj is None or isinstance(obj, str):
        return obj
    if hasattr(obj, "to_dict"):
        return normalize(obj.to_dict())
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def to_json(obj: Any) -> str:
    return json.dumps(normalize(obj), sort_keys=True, indent=2)


def lattice_to_dot(lat: SubgroupLattice, name: str = "lattice") -> str:
    """Cover graph, bottom at the bottom; nodes labelled ``order:index``."""
    lines = [f'digraph "{name}" {{', "  rankdir=BT;"]
    for i, h in enumerate(lat.nodes):
        lines.append(f'  n{i} [label="{h.order}:{i}"];')
    for a, b in sorted(lat.covers()):
        lines.append(f"  n{a} -> n{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export(artifact: Any, fmt: str = "json") -> bytes:
    if fmt == "json":
        return (to_json(artifact) + "\n").encode()
    if fmt == "dot":
        if not isinstance(artifact, SubgroupLattice):
            raise ValueError("DOT export needs a subgroup lattice")
        return lattice_to_dot(artifact, artifact.group.name or "lattice").encode()
    raise ValueError(f"unsupported export format {fmt!r}")
