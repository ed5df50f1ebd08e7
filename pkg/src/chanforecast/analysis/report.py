"""Per-method result records and their CSV/JSON serialization."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field

import numpy as np

CSV_COLUMNS = ("scenario", "speed_kmh", "horizon_ms", "method", "nmse_db", "cosine_pct", "n")


@dataclass(frozen=True)
class MetricsReport:
    """One row of a results table.

    ``nmse`` is the mean of per-sample ratios and ``cosine_pct`` the mean
    cosine similarity between the method's beam and the ZF beam of the true
    CSI, in percent. ``speed_kmh`` is a label such as ``"60"`` or ``"30-60"``.
    """

    scenario: str
    speed_kmh: str
    horizon_ms: float
    method: str
    nmse: float
    cosine_pct: float
    n: int
    seeds: tuple = field(default_factory=tuple)

    def __post_init__(self):
        # NaN marks methods without a CSI estimate (beam-only output)
        if not (self.nmse >= 0 or np.isnan(self.nmse)):
            raise ValueError(f"NMSE must be non-negative, got {self.nmse}")
        if not 0.0 <= self.cosine_pct <= 100.0 + 1e-9:
            raise ValueError(f"cosine must lie in [0, 100] %, got {self.cosine_pct}")

    @property
    def nmse_db(self) -> float:
        if np.isnan(self.nmse):
            return float("nan")
        return float(10.0 * np.log10(self.nmse)) if self.nmse > 0 else float("-inf")

    def row(self) -> dict:
        return {
            "scenario": self.scenario,
            "speed_kmh": self.speed_kmh,
            "horizon_ms": _fmt(self.horizon_ms, 3),
            "method": self.method,
            "nmse_db": _fmt(self.nmse_db, 6),
            "cosine_pct": _fmt(self.cosine_pct, 6),
            "n": str(self.n),
        }

    def to_json(self) -> dict:
        d = asdict(self)
        d["seeds"] = list(self.seeds)
        d["nmse_db"] = self.nmse_db
        return d


def _fmt(x: float, digits: int) -> str:
    return f"{x:.{digits}f}"


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in reports:
        writer.writerow(r.row())
    return buf.getvalue()


def reports_from_csv(text: str) -> list[dict]:
    """Parse rows written by :func:`reports_to_csv`, checking the header."""
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
        raise ValueError(f"unexpected report columns {reader.fieldnames}")
    rows = []
    for r in reader:
        rows.append({
            "scenario": r["scenario"],
            "speed_kmh": r["speed_kmh"],
            "horizon_ms": float(r["horizon_ms"]),
            "method": r["method"],
            "nmse_db": float(r["nmse_db"]),
            "cosine_pct": float(r["cosine_pct"]),
            "n": int(r["n"]),
        })
    return rows


def reports_to_json(reports, metadata: dict | None = None) -> str:
    doc = {"metadata": metadata or {}, "reports": [r.to_json() for r in reports]}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
