"""Feature universe: domains, kinds, precision, and concrete instances.

Numeric features are stored as scaled integers (raw value = stored / 10**scale)
so interval complements stay exact. Categorical domains are ordered; that
order is the deterministic enumeration order everywhere downstream.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

from .errors import InstanceError, PartialInstanceError, SchemaError

CATEGORICAL = "categorical"
NUMERIC = "numeric"

Value = int | str


def normalize_symbol(text: str) -> str:
    """Canonical spelling of a domain symbol: lowercase, '-'/' ' become '_'."""
    return text.strip().lower().replace("-", "_").replace(" ", "_")


def scale_value(raw: float | int | str, scale: int) -> int:
    """Convert a raw numeric value to its scaled-integer representation."""
    if isinstance(raw, str):
        raw = raw.strip()
    try:
        scaled = float(raw) * (10**scale)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"non-numeric value {raw!r}") from exc
    rounded = round(scaled)
    if abs(scaled - rounded) > 1e-9:
        raise SchemaError(f"value {raw!r} not representable at scale {scale}")
    return int(rounded)


def unscale_value(stored: int, scale: int) -> int | float:
    """Raw (human) value for a scaled integer; exact int when scale is 0."""
    if scale == 0:
        return stored
    return stored / (10**scale)


@dataclass(frozen=True)
class FeatureDef:
    """One feature: a categorical finite domain or a bounded integer-scaled range."""

    name: str
    kind: str
    values: tuple[str, ...] = ()
    min: int = 0
    max: int = 0
    scale: int = 0

    def __post_init__(self):
        if not self.name:
            raise SchemaError("feature name must be non-empty")
        if self.kind == CATEGORICAL:
            if not self.values:
                raise SchemaError(f"categorical feature {self.name!r} has empty domain")
            if len(set(self.values)) != len(self.values):
                raise SchemaError(f"duplicate values in domain of {self.name!r}")
        elif self.kind == NUMERIC:
            if self.min > self.max:
                raise SchemaError(f"feature {self.name!r}: min {self.min} > max {self.max}")
            if self.scale < 0:
                raise SchemaError(f"feature {self.name!r}: negative scale")
        else:
            raise SchemaError(f"feature {self.name!r}: unknown kind {self.kind!r}")

    @property
    def is_numeric(self) -> bool:
        return self.kind == NUMERIC

    @property
    def is_categorical(self) -> bool:
        return self.kind == CATEGORICAL

    def contains(self, value: Value) -> bool:
        if self.is_categorical:
            return value in self.values
        return isinstance(value, int) and self.min <= value <= self.max


@dataclass(frozen=True)
class FeatureSchema:
    """Ordered feature list; order defines the canonical control-vector order."""

    features: tuple[FeatureDef, ...]
    _index: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        names = [f.name for f in self.features]
        if len(set(names)) != len(names):
            raise SchemaError("feature names must be unique")
        self._index.update({f.name: i for i, f in enumerate(self.features)})

    def __iter__(self):
        return iter(self.features)

    def __len__(self) -> int:
        return len(self.features)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(f.name for f in self.features)

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def feature(self, name: str) -> FeatureDef:
        try:
            return self.features[self._index[name]]
        except KeyError:
            raise SchemaError(f"unknown feature {name!r}") from None

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise SchemaError(f"unknown feature {name!r}") from None

    def to_dict(self) -> dict:
        out = []
        for f in self.features:
            if f.is_categorical:
                out.append({"name": f.name, "kind": f.kind, "values": list(f.values)})
            else:
                out.append(
                    {"name": f.name, "kind": f.kind, "min": f.min, "max": f.max, "scale": f.scale}
                )
        return {"features": out}

    @classmethod
    def from_dict(cls, data: dict) -> "FeatureSchema":
        if not isinstance(data, dict) or "features" not in data:
            raise SchemaError("schema JSON must be an object with a 'features' list")
        defs = []
        for entry in data["features"]:
            kind = entry.get("kind")
            if kind == CATEGORICAL:
                defs.append(
                    FeatureDef(
                        name=entry["name"],
                        kind=CATEGORICAL,
                        values=tuple(normalize_symbol(v) for v in entry["values"]),
                    )
                )
            elif kind == NUMERIC:
                defs.append(
                    FeatureDef(
                        name=entry["name"],
                        kind=NUMERIC,
                        min=int(entry["min"]),
                        max=int(entry["max"]),
                        scale=int(entry.get("scale", 0)),
                    )
                )
            else:
                raise SchemaError(f"feature {entry.get('name')!r}: unknown kind {kind!r}")
        return cls(features=tuple(defs))

    @classmethod
    def from_json(cls, text: str) -> "FeatureSchema":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"bad schema JSON: {exc}") from exc
        return cls.from_dict(data)


@dataclass(frozen=True)
class Instance:
    """Partial assignment feature-name -> value (symbol or scaled integer).

    Unassigned features are free variables existentially solved by the engine.
    """

    assignments: tuple[tuple[str, Value], ...]

    @classmethod
    def of(cls, mapping: dict[str, Value]) -> "Instance":
        return cls(assignments=tuple(mapping.items()))

    def as_dict(self) -> dict[str, Value]:
        return dict(self.assignments)

    def get(self, name: str) -> Value | None:
        return self.as_dict().get(name)

    def is_total(self, schema: FeatureSchema) -> bool:
        have = {n for n, _ in self.assignments}
        return all(f.name in have for f in schema)

    @classmethod
    def from_raw(cls, schema: FeatureSchema, raw: dict) -> "Instance":
        """Build an instance from raw (human-scale) JSON values."""
        out: dict[str, Value] = {}
        for name, value in raw.items():
            if name not in schema:
                raise InstanceError(f"unknown feature {name!r}")
            feat = schema.feature(name)
            if feat.is_categorical:
                out[name] = normalize_symbol(str(value))
            else:
                try:
                    out[name] = scale_value(value, feat.scale)
                except SchemaError as exc:
                    raise InstanceError(str(exc)) from exc
        return cls.of(out)

    def to_raw(self, schema: FeatureSchema) -> dict:
        """Raw (human-scale) dict form."""
        out: dict = {}
        for name, value in self.assignments:
            feat = schema.feature(name)
            if feat.is_numeric:
                out[name] = unscale_value(int(value), feat.scale)
            else:
                out[name] = value
        return out


def validate_instance(schema: FeatureSchema, inst: Instance) -> Instance:
    """Check every assignment against its feature domain; partial is fine."""
    for name, value in inst.assignments:
        if name not in schema:
            raise InstanceError(f"unknown feature {name!r}")
        feat = schema.feature(name)
        if feat.is_categorical:
            if value not in feat.values:
                raise InstanceError(
                    f"{name}={value!r} not in domain {list(feat.values)}"
                )
        else:
            if not isinstance(value, int):
                raise InstanceError(f"{name}={value!r} must be a scaled integer")
            if not (feat.min <= value <= feat.max):
                raise InstanceError(
                    f"{name}={value} outside [{feat.min}, {feat.max}]"
                )
    return inst


def require_total(schema: FeatureSchema, inst: Instance) -> Instance:
    validate_instance(schema, inst)
    missing = [f.name for f in schema if inst.get(f.name) is None]
    if missing:
        raise PartialInstanceError(f"instance missing features: {', '.join(missing)}")
    return inst


def derive_schema(
    records: list[dict[str, str]] | str,
    column_kinds: dict[str, str],
    precision: dict[str, int] | None = None,
) -> FeatureSchema:
    """Derive a schema from tabular rows.

    Numeric columns get [min, max] over the data; categorical columns get the
    distinct values in first-occurrence order. ``records`` may be parsed rows
    or CSV text with a header line.
    """
    precision = precision or {}
    if isinstance(records, str):
        reader = csv.DictReader(io.StringIO(records))
        rows = list(reader)
        header = reader.fieldnames or []
    else:
        rows = records
        header = list(rows[0].keys()) if rows else []
    if not rows:
        raise SchemaError("empty dataset")
    for col in column_kinds:
        if col not in header:
            raise SchemaError(f"declared column {col!r} not in dataset header")

    defs: list[FeatureDef] = []
    for col, kind in column_kinds.items():
        if kind == NUMERIC:
            scale = precision.get(col, 0)
            seen: list[int] = []
            for row in rows:
                token = row[col]
                try:
                    seen.append(scale_value(token, scale))
                except SchemaError as exc:
                    raise SchemaError(f"column {col!r}: {exc}") from exc
            defs.append(
                FeatureDef(name=col, kind=NUMERIC, min=min(seen), max=max(seen), scale=scale)
            )
        elif kind == CATEGORICAL:
            ordered: list[str] = []
            for row in rows:
                sym = normalize_symbol(row[col])
                if sym not in ordered:
                    ordered.append(sym)
            defs.append(FeatureDef(name=col, kind=CATEGORICAL, values=tuple(ordered)))
        else:
            raise SchemaError(f"column {col!r}: unknown kind {kind!r}")
    return FeatureSchema(features=tuple(defs))


def schema_to_facts(schema: FeatureSchema) -> str:
    """Emit the program fragment declaring every feature domain.

    One ``f_domain(name, value).`` fact per categorical value and one range
    rule per numeric feature, in schema order. Deterministic and order-stable.
    """
    lines: list[str] = []
    for feat in schema:
        if feat.is_categorical:
            for value in feat.values:
                lines.append(f"f_domain({feat.name}, {value}).")
        else:
            lines.append(f"{feat.name}(X) :- X #>= {feat.min}, X #=< {feat.max}.")
    return "\n".join(lines) + ("\n" if lines else "")
