"""CSV / JSON-lines writers and the sibling metadata file."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import IO, Any, Iterable, Sequence


def format_value(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        return format(v, ".17g")
    return str(v)


def _json_value(v: Any) -> Any:
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def write_rows(rows: Iterable[dict], columns: Sequence[str], stream: IO[str], fmt: str = "csv") -> None:
    if fmt == "csv":
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_value(row[c]) for c in columns])
    elif fmt == "jsonl":
        for row in rows:
            stream.write(json.dumps({c: _json_value(row[c]) for c in columns}) + "\n")
    else:
        raise ValueError(f"unknown format {fmt!r}")


def meta_path(out: str | Path) -> Path:
    out = Path(out)
    return out.with_name(out.stem + ".meta.json")


def write_output(rows, columns, out: str | Path, fmt: str = "csv", metadata: dict | None = None) -> None:
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="") as fh:
        write_rows(rows, columns, fh, fmt)
    if metadata is not None:
        with open(meta_path(out), "w") as fh:
            json.dump(metadata, fh, indent=2, sort_keys=True, default=str)
            fh.write("\n")
