"""Run configuration with ``WCYCLIC_*`` environment overrides.

Every field can be set from the environment by upper-casing its name and
adding the prefix, e.g. ``WCYCLIC_EIGEN_TOL=1e-9`` or ``WCYCLIC_JOBS=4``.
Command-line flags win over the environment, which wins over defaults.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass
from typing import Mapping, Optional

from .errors import ParseError

ENV_PREFIX = "WCYCLIC_"
FORMATS = ("text", "json", "dot")


@dataclass(frozen=True)
class Config:
    eigen_tol: float = 1e-8
    round_tol: float = 1e-6
    projection_tol: float = 1e-7
    seed: int = 0
    max_order: int = 10_000
    max_subgroups: int = 100_000
    output_format: str = "text"
    jobs: int = 1
    samples: int = 32

    def __post_init__(self):
        for name in ("eigen_tol", "round_tol", "projection_tol"):
            if not getattr(self, name) > 0:
                raise ParseError(f"{name} must be positive")
        for name in ("max_order", "max_subgroups", "jobs", "samples"):
            if getattr(self, name) < 1:
                raise ParseError(f"{name} must be positive")
        if self.output_format not in FORMATS:
            raise ParseError(f"output format must be one of {FORMATS}")

    @classmethod
    def from_env(cls, env: Optional[Mapping[str, str]] = None, **overrides) -> Config:
        env = os.environ if env is None else env
        values = {}
        for f in dataclasses.fields(cls):
            raw = env.get(ENV_PREFIX + f.name.upper())
            if raw is None:
                continue
            caster = {"float": float, "int": int, "str": str}[f.type]
            try:
                values[f.name] = caster(raw)
            except ValueError:
                raise ParseError(f"bad value {raw!r} for {ENV_PREFIX}{f.name.upper()}") from None
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)
