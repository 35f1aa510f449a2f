"""Deterministic JSON reports and CSV grid persistence."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


@dataclass
class Report:
    scenario: dict
    checks: dict = field(default_factory=dict)      # name -> result dict
    grids: dict = field(default_factory=dict)       # name -> list of (label, GridData)
    overall: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)        # timestamp/wall times; excluded from hash

    def body(self):
        return {
            "scenario": self.scenario,
            "inputs_hash": content_hash(self.scenario),
            "checks": self.checks,
            "overall": self.overall,
        }

    def to_json(self):
        doc = self.body()
        doc["report_hash"] = content_hash(doc)
        doc["meta"] = self.meta
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"

    def write(self, path):
        Path(path).write_text(self.to_json())


def content_hash(obj):
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def strip_meta(doc: dict):
    """Report body without the volatile meta/timestamp fields."""
    return {k: v for k, v in doc.items() if k != "meta"}


def write_grid_csv(path, grid):
    """Write a GridData as CSV with a one-line header; deterministic output."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = ",".join(grid.columns)
    data = grid.data
    if isinstance(data, np.ndarray):
        if data.size == 0:
            path.write_text(header + "\n")
            return path
        np.savetxt(path, data, fmt="%.17g", delimiter=",", header=header, comments="")
        return path
    # mixed-type table (e.g. singular points with a classification column)
    lines = [header]
    for row in data:
        lines.append(",".join(f"{v:.17g}" if isinstance(v, float) else str(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def emit_plotdata(report: Report, check, out_dir):
    """Write the grid-valued fields of one check as CSV files.

    Returns the written paths; raises KeyError for a check without grids.
    """
    if check not in report.grids:
        raise KeyError(f"no plottable grids for check '{check}'")
    out_dir = Path(out_dir)
    paths = []
    for label, grid in report.grids[check]:
        paths.append(write_grid_csv(out_dir / f"{check}_{label}.csv", grid))
    return paths
