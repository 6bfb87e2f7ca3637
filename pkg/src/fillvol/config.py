"""Desk-scale resource caps.

Defaults live here and may be replaced by a JSON config file of the form
``{"version": 1, "caps": {...}}``. Jobs can lower any cap; raising one
needs an explicit override.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields, replace

from .errors import ValidationError


@dataclass(frozen=True)
class Caps:
    max_ball: int = 50_000           # group elements per window
    max_nodes: int = 20_000          # branch-and-bound nodes per fill
    max_enum: int = 200_000          # canonical cycles per enumeration
    max_exhaustive_k: int = 8        # largest norm bound for exhaustive mode
    max_radius: int = 6
    max_samples: int = 5_000

    def as_dict(self):
        return asdict(self)

    def merged(self, requested: dict | None, override: bool = False) -> "Caps":
        """Apply job-level caps; values above the configured ones need ``override``."""
        if not requested:
            return self
        names = {f.name for f in fields(self)}
        out = {}
        for key, val in requested.items():
            if key not in names:
                raise ValidationError(f"unknown cap {key!r}", field=f"caps.{key}")
            if not isinstance(val, int) or isinstance(val, bool) or val < 0:
                raise ValidationError(f"cap {key!r} must be a non-negative integer",
                                      field=f"caps.{key}")
            if val > getattr(self, key) and not override:
                raise ValidationError(
                    f"cap {key!r} = {val} exceeds the configured {getattr(self, key)}; "
                    "pass --cap-override to raise it", field=f"caps.{key}")
            out[key] = val
        return replace(self, **out)


def load_caps(path=None) -> Caps:
    if path is None:
        return Caps()
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read config: {exc}", path=str(path)) from None
    if not isinstance(doc, dict):
        raise ValidationError("config must be a JSON object", path=str(path))
    extra = set(doc) - {"version", "caps"}
    if extra:
        raise ValidationError(f"unknown config field {sorted(extra)[0]!r}", path=str(path),
                              field=sorted(extra)[0])
    try:
        return Caps().merged(doc.get("caps", {}), override=True)
    except ValidationError as exc:
        exc.path = str(path)
        raise
