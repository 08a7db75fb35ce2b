"""Deterministic CSV/JSON emission with a hashed artifact manifest.

Floats are serialized with 17 significant digits so identical inputs give
byte-identical files; every artifact a run produces is listed in a manifest
with its sha256 content hash.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

__all__ = ["format_float", "write_csv", "write_json", "Manifest", "emit_report"]


def format_float(x) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, int):
        return str(x)
    return format(float(x), ".17g")


def _render_value(v) -> str:
    if isinstance(v, str):
        return v
    return format_float(v)


def write_csv(path, records: list[dict]) -> Path:
    """Rows share the schema of the first record; column order is preserved."""
    if not records:
        raise ValueError("no records to write")
    path = Path(path)
    columns = list(records[0].keys())
    lines = [",".join(columns)]
    for rec in records:
        if list(rec.keys()) != columns:
            raise ValueError("records do not share a homogeneous schema")
        lines.append(",".join(_render_value(rec[c]) for c in columns))
    path.write_text("\n".join(lines) + "\n")
    return path


def _jsonable(obj):
    import numpy as np

    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, float):
        return obj
    return obj


def write_json(path, payload) -> Path:
    path = Path(path)
    path.write_text(json.dumps(_jsonable(payload), sort_keys=True, indent=1) + "\n")
    return path


class Manifest:
    """Collects artifact paths and writes manifest.json with content hashes."""

    def __init__(self, out_dir):
        self.out_dir = Path(out_dir)
        self.entries: list[dict] = []

    def add(self, path) -> Path:
        path = Path(path)
        digest = hashlib.sha256(path.read_bytes()).hexdigest()
        self.entries.append({"path": path.name, "sha256": digest})
        return path

    def write(self) -> Path:
        target = self.out_dir / "manifest.json"
        payload = {"artifacts": sorted(self.entries, key=lambda e: e["path"])}
        target.write_text(json.dumps(payload, sort_keys=True, indent=1) + "\n")
        return target


def emit_report(records: list[dict], fmt: str, path, manifest: Manifest | None = None) -> Path:
    """Write records as csv or json; optionally register with a manifest."""
    if fmt == "csv":
        out = write_csv(path, records)
    elif fmt == "json":
        out = write_json(path, records)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if manifest is not None:
        manifest.add(out)
    return out
