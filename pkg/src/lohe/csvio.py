"""Deterministic CSV and manifest output.

Reals are written with 17 significant digits ('.' decimal, '\\n' line
endings, no locale dependence) so 64-bit floats round-trip exactly and the
files are byte-identical for a fixed config and seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path


@dataclass
class CsvReport:
    header: list
    rows: list

    def __post_init__(self):
        width = len(self.header)
        for row in self.rows:
            if len(row) != width:
                raise ValueError("all rows must match the header width")

    def render(self) -> str:
        lines = [",".join(self.header)]
        for row in self.rows:
            lines.append(",".join(_format_cell(v) for v in row))
        return "\n".join(lines) + "\n"

    def write(self, path) -> None:
        Path(path).write_bytes(self.render().encode("ascii"))

    def column(self, name: str) -> list:
        idx = self.header.index(name)
        return [row[idx] for row in self.rows]


def _format_cell(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def write_manifest(path, subcommand: str, config_dict: dict, checks: dict,
                   version: str, backend: str) -> None:
    doc = {
        "subcommand": subcommand,
        "config": config_dict,
        "checks": checks,
        "library_version": version,
        "kernel_backend": backend,
    }
    Path(path).write_bytes(
        (json.dumps(doc, sort_keys=True, indent=2) + "\n").encode("ascii"))
