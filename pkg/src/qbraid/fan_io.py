"""FanDocument: the JSON schema (version 1) for fans exchanged by the CLI.

All vectors are integer numerators over one shared ``denominator``; the
schema never contains floats.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

from .errors import RankError, SchemaError
from .lattice_core import Cone, Fan, Lattice, LatticePoint

SCHEMA_VERSION = "1"


@dataclass
class FanDocument:
    denominator: int
    rays: list[list[int]]
    lattice_generators: list[list[int]]
    maximal_cones: list[list[int]]
    metadata: dict[str, Any] = field(default_factory=dict)
    schema_version: str = SCHEMA_VERSION

    @classmethod
    def from_fan(cls, fan: Fan, metadata: dict | None = None) -> "FanDocument":
        r = math.lcm(fan.lattice.denominator, *(p.reduced[1] for p in fan.rays))
        return cls(
            denominator=r,
            rays=[list(p.scaled(r)) for p in fan.rays],
            lattice_generators=[list(b.scaled(r)) for b in fan.lattice.basis_points()],
            maximal_cones=[list(c.ray_indices) for c in fan.maximal_cones],
            metadata=dict(fan.metadata if metadata is None else metadata),
        )

    def to_fan(self) -> Fan:
        r = self.denominator
        try:
            lattice = Lattice(LatticePoint(tuple(g), r) for g in self.lattice_generators)
        except RankError as exc:
            raise SchemaError(f"lattice generators: {exc}") from exc
        rays = tuple(LatticePoint(tuple(v), r) for v in self.rays)
        return Fan(rays, tuple(Cone(tuple(c)) for c in self.maximal_cones), lattice, dict(self.metadata))

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": self.schema_version,
            "denominator": self.denominator,
            "rays": self.rays,
            "lattice_generators": self.lattice_generators,
            "maximal_cones": self.maximal_cones,
            "metadata": self.metadata,
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)

    @classmethod
    def from_dict(cls, data: Any) -> "FanDocument":
        if not isinstance(data, dict):
            raise SchemaError("fan document must be a JSON object")
        if str(data.get("schema_version")) != SCHEMA_VERSION:
            raise SchemaError(f"unsupported schema_version {data.get('schema_version')!r}")
        for key in ("denominator", "rays", "lattice_generators", "maximal_cones"):
            if key not in data:
                raise SchemaError(f"missing field {key!r}")
        r = data["denominator"]
        if not _is_int(r) or r < 1:
            raise SchemaError("denominator must be a positive integer")
        rays = _int_rows(data["rays"], "rays")
        gens = _int_rows(data["lattice_generators"], "lattice_generators")
        cones = _int_rows(data["maximal_cones"], "maximal_cones")
        dims = {len(v) for v in rays + gens}
        if len(dims) > 1:
            raise SchemaError("vectors have inconsistent dimensions")
        if any(not any(v) for v in rays):
            raise SchemaError("zero ray")
        for c in cones:
            if any(i < 0 or i >= len(rays) for i in c):
                raise SchemaError(f"cone {c} has an index out of range")
        meta = data.get("metadata", {})
        if not isinstance(meta, dict):
            raise SchemaError("metadata must be an object")
        return cls(r, rays, gens, cones, meta, SCHEMA_VERSION)

    @classmethod
    def from_json(cls, text: str) -> "FanDocument":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(data)


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _int_rows(rows, name):
    if not isinstance(rows, list) or not all(isinstance(v, list) for v in rows):
        raise SchemaError(f"{name} must be a list of integer lists")
    for v in rows:
        if not all(_is_int(x) for x in v):
            raise SchemaError(f"{name} entries must be integers")
    return [list(v) for v in rows]


def load_fan(path) -> Fan:
    with open(path) as fh:
        return FanDocument.from_json(fh.read()).to_fan()


def dump_fan(fan: Fan, path, metadata: dict | None = None) -> None:
    with open(path, "w") as fh:
        fh.write(FanDocument.from_fan(fan, metadata).to_json() + "\n")
