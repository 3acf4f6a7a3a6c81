"""Typed result tables with a commented metadata header, stored as CSV.

Layout::

    # experiment: self-averaging
    # config_hash: 3f2a...
    # seed: 12345
    # version: 0.1.0
    # created: 2026-01-01T00:00:00+00:00
    # types: float,int,str
    r,N,regime
    0.01,100,Frozen

Everything below the comment block (the body) is a pure function of config and
seed; ``created`` is the only field that changes between reruns. Floats are
written with 17 significant digits so they parse back bit-for-bit.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

_TYPES = {"float": float, "int": int, "str": str}
VOLATILE_KEYS = ("created",)


def _fmt(value, kind: str) -> str:
    if kind == "float":
        return format(float(value), ".17g")
    if kind == "int":
        return str(int(value))
    return str(value)


@dataclass
class ResultTable:
    columns: list[str]
    types: list[str]
    rows: list[tuple] = field(default_factory=list)
    metadata: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.columns) != len(self.types):
            raise ValueError("columns and types differ in length")
        bad = [t for t in self.types if t not in _TYPES]
        if bad:
            raise ValueError(f"unknown column types {bad}")

    def append(self, *values) -> None:
        if len(values) != len(self.columns):
            raise ValueError(f"row has {len(values)} values, expected {len(self.columns)}")
        self.rows.append(tuple(_TYPES[k](v) for k, v in zip(self.types, values)))

    def sort(self, *keys: str) -> "ResultTable":
        idx = [self.columns.index(k) for k in keys]
        self.rows.sort(key=lambda row: tuple(row[i] for i in idx))
        return self

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]

    def body(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_fmt(v, k) for v, k in zip(row, self.types)])
        return buf.getvalue()

    def to_csv(self) -> str:
        header = "".join(f"# {k}: {v}\n" for k, v in self.metadata.items())
        header += f"# types: {','.join(self.types)}\n"
        return header + self.body()

    def write(self, path) -> Path:
        path = Path(path)
        path.write_text(self.to_csv(), encoding="utf-8")
        return path

    @classmethod
    def from_csv(cls, text: str) -> "ResultTable":
        metadata = {}
        types = None
        lines = text.splitlines(keepends=True)
        i = 0
        while i < len(lines) and lines[i].startswith("#"):
            key, _, value = lines[i][1:].strip().partition(":")
            value = value.strip()
            if key == "types":
                types = value.split(",")
            else:
                metadata[key] = value
            i += 1
        reader = csv.reader(lines[i:])
        columns = next(reader)
        if types is None:
            types = ["str"] * len(columns)
        table = cls(columns=columns, types=types, metadata=metadata)
        for raw in reader:
            if raw:
                table.append(*raw)
        return table

    @classmethod
    def read(cls, path) -> "ResultTable":
        return cls.from_csv(Path(path).read_text(encoding="utf-8"))

    def equals(self, other: "ResultTable", include_volatile: bool = True) -> bool:
        """Structural equality; NaN cells compare equal to NaN."""
        if (self.columns, self.types) != (other.columns, other.types):
            return False
        if len(self.rows) != len(other.rows):
            return False
        for a, b in zip(self.rows, other.rows):
            for x, y in zip(a, b):
                if isinstance(x, float) and isinstance(y, float) and math.isnan(x) and math.isnan(y):
                    continue
                if x != y:
                    return False
        ma, mb = dict(self.metadata), dict(other.metadata)
        if not include_volatile:
            for k in VOLATILE_KEYS:
                ma.pop(k, None)
                mb.pop(k, None)
        return ma == mb
