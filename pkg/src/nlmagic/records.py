"""Scan records and their CSV schema.

One ScanRecord per (separation, measure) point.  Chain scans write the columns
backend,L,h,r,axis,measure_name,value,stderr,n_samples,seed; monitored-circuit
scans append p,depth,n_traj,n_failed.  Floats are written with repr so that
identical runs produce byte-identical files.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, fields

CHAIN_COLUMNS = [
    "backend", "L", "h", "r", "axis", "measure_name",
    "value", "stderr", "n_samples", "seed",
]
CIRCUIT_COLUMNS = CHAIN_COLUMNS + ["p", "depth", "n_traj", "n_failed"]


@dataclass
class ScanRecord:
    backend: str
    L: int
    r: int
    measure_name: str
    value: float
    h: float | None = None
    axis: str | None = None
    stderr: float | None = None
    n_samples: int | None = None
    seed: int | None = None
    p: float | None = None
    depth: int | None = None
    n_traj: int | None = None
    n_failed: int | None = None

    def row(self, columns) -> list[str]:
        out = []
        for name in columns:
            val = getattr(self, name)
            if val is None:
                out.append("")
            elif isinstance(val, float):
                out.append(repr(float(val)))
            else:
                out.append(str(val))
        return out


_FIELD_NAMES = {f.name for f in fields(ScanRecord)}
assert set(CIRCUIT_COLUMNS) <= _FIELD_NAMES


def write_scan_csv(path, records, columns=CHAIN_COLUMNS) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for rec in records:
            writer.writerow(rec.row(columns))


def read_scan_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return [dict(row) for row in csv.DictReader(fh)]
