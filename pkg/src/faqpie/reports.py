"""Report records produced by an encoding run and their JSON/CSV/table forms.

The JSON report is reproducible bit-for-bit across runs for identical
inputs and flags, except the timing fields, which are wall-clock
measurements and explicitly non-reproducible.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field

from .circuit import trunc_percent

__all__ = [
    "STRATEGIES",
    "CircuitReport",
    "BlockReport",
    "EncodingReport",
    "report_to_dict",
    "report_to_json",
    "reports_to_csv",
    "reports_to_table",
    "CSV_COLUMNS",
]

STRATEGIES = ("faqpie", "faqpie+cucr", "faqpie+ip", "faqpie+cucr+ip", "exact-qpie")

CSV_COLUMNS = [
    "strategy",
    "qubits",
    "circuit_count",
    "m",
    "fidelity_r",
    "fidelity_g",
    "fidelity_b",
    "preprocess_ms",
    "rotations_max",
    "cnots_max",
    "rot_reduction_pct",
    "cnot_reduction_pct",
]

_TABLE_ROWS = [
    ("Qubits", "qubits", None),
    ("Circuit count", "circuit_count", None),
    ("Truncation order (m)", "m", None),
    ("Fidelity (R)", "fidelity_r", "{:.4f}"),
    ("Fidelity (G)", "fidelity_g", "{:.4f}"),
    ("Fidelity (B)", "fidelity_b", "{:.4f}"),
    ("Preprocess (ms)", "preprocess_ms", "{:.2f}"),
    ("Ry+Rz (maximal)", "rotations_max", None),
    ("CNOT (maximal)", "cnots_max", None),
    ("Ry+Rz reduction", "rot_reduction_pct", "{:.2f}%"),
    ("CNOT reduction", "cnot_reduction_pct", "{:.2f}%"),
]


@dataclass(frozen=True)
class CircuitReport:
    """One synthesized circuit (a channel, or a channel x tile)."""

    channel: str
    block_row: int
    block_col: int
    skipped: bool
    qubits: int
    rotations_ucr: int
    cnots_ucr: int
    fidelity: float
    preprocess_ms: float


@dataclass(frozen=True)
class BlockReport:
    channel: str
    block_row: int
    block_col: int
    block_norm: float
    weight: float
    skipped: bool


@dataclass(frozen=True)
class EncodingReport:
    """Row schema of the strategy-comparison table plus per-circuit detail."""

    strategy: str
    qubits: int
    circuit_count: int
    m: int
    mode: str
    partition_n0: int | None
    fidelity_r: float
    fidelity_g: float
    fidelity_b: float
    rotations_max: int
    cnots_max: int
    rot_reduction_pct: float
    cnot_reduction_pct: float
    baseline_rotations: int
    baseline_cnots: int
    baseline_m: int
    preprocess_ms: float
    circuits: list[CircuitReport] = field(default_factory=list)
    blocks: list[BlockReport] = field(default_factory=list)

    @property
    def rot_reduction_pct_rounded(self) -> float:
        return trunc_percent(self.rot_reduction_pct, 2)

    @property
    def cnot_reduction_pct_rounded(self) -> float:
        return trunc_percent(self.cnot_reduction_pct, 2)


def report_to_dict(report: EncodingReport) -> dict:
    out = asdict(report)
    out["rot_reduction_pct"] = {
        "raw": report.rot_reduction_pct,
        "rounded": report.rot_reduction_pct_rounded,
    }
    out["cnot_reduction_pct"] = {
        "raw": report.cnot_reduction_pct,
        "rounded": report.cnot_reduction_pct_rounded,
    }
    out["baseline"] = {
        "rotations": out.pop("baseline_rotations"),
        "cnots": out.pop("baseline_cnots"),
        "m": out.pop("baseline_m"),
    }
    out["fidelity"] = {
        "r": out.pop("fidelity_r"),
        "g": out.pop("fidelity_g"),
        "b": out.pop("fidelity_b"),
    }
    return out


def report_to_json(report: EncodingReport) -> str:
    return json.dumps(report_to_dict(report), indent=2, sort_keys=True)


def _csv_row(report: EncodingReport) -> dict:
    return {
        "strategy": report.strategy,
        "qubits": report.qubits,
        "circuit_count": report.circuit_count,
        "m": report.m,
        "fidelity_r": f"{report.fidelity_r:.6f}",
        "fidelity_g": f"{report.fidelity_g:.6f}",
        "fidelity_b": f"{report.fidelity_b:.6f}",
        "preprocess_ms": f"{report.preprocess_ms:.3f}",
        "rotations_max": report.rotations_max,
        "cnots_max": report.cnots_max,
        "rot_reduction_pct": f"{report.rot_reduction_pct_rounded:.2f}",
        "cnot_reduction_pct": f"{report.cnot_reduction_pct_rounded:.2f}",
    }


def reports_to_csv(reports: list[EncodingReport]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in reports:
        writer.writerow(_csv_row(r))
    return buf.getvalue()


def reports_to_table(reports: list[EncodingReport]) -> str:
    """Side-by-side text table, one column per strategy."""
    headers = ["Encoding strategy"] + [r.strategy for r in reports]
    rows = [headers]
    for label, attr, fmt in _TABLE_ROWS:
        row = [label]
        for r in reports:
            value = getattr(r, attr)
            if attr in ("rot_reduction_pct", "cnot_reduction_pct"):
                value = trunc_percent(value, 2)
            row.append(fmt.format(value) if fmt else str(value))
        rows.append(row)
    widths = [max(len(row[i]) for row in rows) for i in range(len(headers))]
    lines = []
    for idx, row in enumerate(rows):
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
        if idx == 0:
            lines.append("-" * (sum(widths) + 2 * (len(widths) - 1)))
    return "\n".join(lines) + "\n"
