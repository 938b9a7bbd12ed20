"""Column-oriented result sets and their CSV/JSON/SVG serialisation."""
from __future__ import annotations

import datetime as _dt
import io
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .svg import line_plot

FORMATS = ("csv", "json", "svg")


class EmitError(OSError):
    pass


def timestamp() -> str:
    """UTC time, or SOURCE_DATE_EPOCH when set (for reproducible builds)."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    when = (_dt.datetime.fromtimestamp(int(epoch), _dt.timezone.utc) if epoch
            else _dt.datetime.now(_dt.timezone.utc))
    return when.replace(microsecond=0).isoformat()


@dataclass
class ResultSet:
    columns: dict[str, np.ndarray]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.columns = {k: np.asarray(v, dtype=float).reshape(-1) for k, v in self.columns.items()}
        lengths = {len(v) for v in self.columns.values()}
        if len(lengths) > 1:
            raise ValueError(f"columns have unequal lengths {sorted(lengths)}")
        self.metadata.setdefault("version", __version__)
        self.metadata.setdefault("timestamp", timestamp())

    def __len__(self) -> int:
        return len(next(iter(self.columns.values()))) if self.columns else 0

    @property
    def names(self) -> list[str]:
        return list(self.columns)

    def row(self, i: int) -> dict[str, float]:
        return {k: float(v[i]) for k, v in self.columns.items()}


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def to_csv(rs: ResultSet) -> str:
    if not rs.columns:
        raise ValueError("result set has no columns")
    buf = io.StringIO()
    # timestamp last so that everything above it is reproducible
    keys = [k for k in rs.metadata if k != "timestamp"] + ["timestamp"]
    for key in keys:
        buf.write(f"# {key}: {json.dumps(rs.metadata[key], sort_keys=True)}\n")
    buf.write(",".join(rs.names) + "\n")
    cols = list(rs.columns.values())
    for i in range(len(rs)):
        buf.write(",".join(_fmt(c[i]) for c in cols) + "\n")
    return buf.getvalue()


def parse_csv(text: str) -> ResultSet:
    meta, lines = {}, []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition(": ")
            meta[key] = json.loads(value)
        elif line.strip():
            lines.append(line)
    if not lines:
        raise ValueError("no header row")
    names = lines[0].split(",")
    data = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]]).reshape(-1, len(names))
    return ResultSet({n: data[:, j] for j, n in enumerate(names)}, meta)


def to_json(rs: ResultSet) -> str:
    cols = {k: [None if not np.isfinite(x) else float(x) for x in v] for k, v in rs.columns.items()}
    return json.dumps({"metadata": rs.metadata, "columns": cols}, indent=1, sort_keys=False) + "\n"


def to_svg(rs: ResultSet) -> str:
    names = rs.names
    if len(names) < 2:
        raise ValueError("an SVG plot needs at least two columns")
    x = rs.columns[names[0]]
    return line_plot(x, {n: rs.columns[n] for n in names[1:]}, xlabel=names[0],
                     title=str(rs.metadata.get("scenario", "")))


def render(rs: ResultSet, fmt: str) -> str:
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}")
    if not rs.columns or len(rs) == 0:
        raise ValueError("refusing to emit an empty result set")
    return {"csv": to_csv, "json": to_json, "svg": to_svg}[fmt](rs)


def emit(rs: ResultSet, fmt: str, path) -> Path:
    text = render(rs, fmt)
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise EmitError(f"cannot write {path}: {exc}") from exc
    return path
