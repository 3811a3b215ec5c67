"""Report serialization: structured JSON plus flat deterministic CSV tables.

Numbers in tables are written with 17 significant digits so doubles
round-trip losslessly; tables carry no timestamps, so identical configs
produce byte-identical CSVs.  Wall-clock timings live only in the JSON
metadata section.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable


def fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (int,)) and not isinstance(v, bool):
        return str(v)
    return format(float(v), ".17g")


def write_table(path: Path, header: tuple[str, str], rows: Iterable[tuple]) -> None:
    lines = [",".join(header)]
    for key, value in rows:
        lines.append(f"{fmt(key)},{fmt(value)}")
    path.write_text("\n".join(lines) + "\n", newline="\n")


def write_report_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", newline="\n")
