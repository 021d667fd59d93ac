"""
Flat result records and their two encodings: one JSON object per line, or a
CSV table (header row, `,` delimiter, LF line endings, 17 significant
digits) written and read back with pandas.
"""

import io
import json
import math
from typing import Iterable, List, Optional, Sequence

import pandas as pd

from .models.types import CapacityEstimate, DecayReport, ResultRecord, SweepTable, Verdict

FLOAT_FORMAT = "%.17g"

SWEEP_COLUMNS = ["p", "decision", "tail_exponent", "partial_integral", "t_reached", "critical_p"]
ENERGY_COLUMNS = ["j", "energy", "decays"]
CAPACITY_COLUMNS = ["p", "R", "method", "grid_size", "value", "error_bound", "relative_gap"]


def _clean(record: dict) -> ResultRecord:
    return ResultRecord(**{key: value for key, value in record.items() if value is not None})


def verdict_record(verdict: Verdict, spec: str, kind: str = "warped_product") -> ResultRecord:
    ci = verdict["tail_exponent_ci"]
    return _clean({
        "operation": "classify",
        "spec": spec,
        "kind": kind,
        "p": verdict["p"],
        "decision": verdict["decision"],
        "partial_integral": verdict["partial_integral"],
        "tail_exponent": verdict["tail_exponent"],
        "tail_exponent_low": ci[0] if ci else None,
        "tail_exponent_high": ci[1] if ci else None,
        "t_reached": verdict["t_reached"],
        "notes": " | ".join(verdict["evidence_notes"]),
    })


def capacity_records(estimates: Sequence[CapacityEstimate], spec: str) -> List[ResultRecord]:
    """One record per method; with two methods both carry their relative gap"""
    gap = None
    if len(estimates) == 2:
        flux, variational = estimates
        gap = abs(variational["value"] - flux["value"]) / flux["value"] if flux["value"] else math.inf
    return [
        _clean({
            "operation": "capacity",
            "spec": spec,
            "p": estimate["p"],
            "R": estimate["R"],
            "method": estimate["method"],
            "grid_size": estimate["grid_size"],
            "value": estimate["value"],
            "error_bound": estimate["error_bound"],
            "relative_gap": gap,
        })
        for estimate in estimates
    ]


def sweep_records(table: SweepTable) -> List[ResultRecord]:
    critical = table["critical_p_estimate"]
    return [
        _clean({
            "p": row["p"],
            "decision": row["verdict"]["decision"],
            "tail_exponent": row["verdict"]["tail_exponent"],
            "partial_integral": row["verdict"]["partial_integral"],
            "t_reached": row["verdict"]["t_reached"],
            "critical_p": critical,
        })
        for row in table["rows"]
    ]


def energy_records(report: DecayReport) -> List[ResultRecord]:
    return [
        ResultRecord(j=j, energy=energy, decays=report["decays"])
        for j, energy in zip(report["j_schedule"], report["energies"])
    ]


def to_json_line(record: ResultRecord) -> str:
    return json.dumps(dict(record), ensure_ascii=False)


def from_json_lines(text: str) -> List[ResultRecord]:
    return [ResultRecord(**json.loads(line)) for line in text.splitlines() if line.strip()]


def to_csv(records: Iterable[ResultRecord], columns: Optional[Sequence[str]] = None) -> str:
    frame = pd.DataFrame(list(records), columns=list(columns) if columns else None)
    return frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def _plain(value):
    if hasattr(value, "item"):
        value = value.item()
    if isinstance(value, float) and math.isnan(value):
        return None
    return value


def from_csv(text: str) -> List[ResultRecord]:
    """Inverse of to_csv; empty cells are dropped from the records"""
    frame = pd.read_csv(io.StringIO(text), float_precision="round_trip", keep_default_na=True)
    records = []
    for row in frame.to_dict(orient="records"):
        records.append(_clean({key: _plain(value) for key, value in row.items()}))
    return records
