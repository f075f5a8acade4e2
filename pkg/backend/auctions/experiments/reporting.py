"""
Result files and suite reports.

Estimates are written as CSV rows with fixed columns; nested provenance goes
to a JSON manifest next to the CSV.
"""

import json
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Union

import pandas as pd

from ..core import Estimate

logger = logging.getLogger(__name__)

RESULT_COLUMNS = ["instance_id", "mechanism", "bidders", "m", "mean", "stderr", "samples", "seed", "method", "flags"]
REFERENCE_COLUMNS = ["series", "m", "value"]
DATA_DIR = Path(__file__).resolve().parents[2] / "data"


def result_row(instance_id: str, mechanism: str, bidders: int, m: int, estimate: Estimate) -> Dict[str, Any]:
    return {
        "instance_id": instance_id,
        "mechanism": mechanism,
        "bidders": bidders,
        "m": m,
        "mean": estimate.mean,
        "stderr": estimate.stderr,
        "samples": estimate.samples,
        "seed": estimate.seed,
        "method": estimate.method.value,
        "flags": ";".join(estimate.flags),
    }


def results_frame(rows: Iterable[Dict[str, Any]]) -> pd.DataFrame:
    return pd.DataFrame(list(rows), columns=RESULT_COLUMNS)


def write_results(rows: Iterable[Dict[str, Any]], path: Union[str, Path]) -> pd.DataFrame:
    """Write result rows as CSV and return them as a frame."""
    frame = results_frame(rows)
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(target, index=False, float_format="%.12g")
    logger.info(f"Wrote {len(frame)} rows to {target}")
    return frame


def manifest_path(csv_path: Union[str, Path]) -> Path:
    return Path(csv_path).with_suffix(".manifest.json")


def write_manifest(manifest: Dict[str, Any], path: Union[str, Path]) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return target


def load_reference(panel: str, data_dir: Optional[Path] = None) -> pd.DataFrame:
    """
    Plotted coordinates of one figure panel.

    Args:
        panel: "a" or "b"
        data_dir: Directory holding fig1{panel}_reference.csv

    Returns:
        Frame with columns series, m, value
    """
    key = panel.strip().lower()
    if key not in ("a", "b"):
        raise ValueError(f"unknown panel {panel!r} (expected 'a' or 'b')")
    frame = pd.read_csv((data_dir or DATA_DIR) / f"fig1{key}_reference.csv")
    missing = set(REFERENCE_COLUMNS) - set(frame.columns)
    if missing:
        raise ValueError(f"reference file for panel {key} lacks columns {sorted(missing)}")
    return frame[REFERENCE_COLUMNS]


# ==========================================
# Suite reports
# ==========================================


class CheckStatus(Enum):
    """Outcome of one check."""

    PASS = "pass"
    FAIL = "fail"
    WARN = "warn"


def _jsonable(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, dict):
        return {key: _jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(item) for item in value]
    return value


@dataclass
class CheckRecord:
    """
    One verified claim.

    Attributes:
        claim: Identifier of the claim being checked
        status: pass, fail or warn
        lhs: Measured left-hand side
        rhs: Measured right-hand side
        tolerance: Margin applied to the comparison
        details: Instance description and auxiliary values
    """

    claim: str
    status: CheckStatus
    lhs: Any = None
    rhs: Any = None
    tolerance: float = 0.0
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return _jsonable(
            {
                "claim": self.claim,
                "status": self.status.value,
                "lhs": self.lhs,
                "rhs": self.rhs,
                "tolerance": self.tolerance,
                "details": self.details,
            }
        )


@dataclass
class SuiteReport:
    """
    Result of a verification suite.

    Attributes:
        suite: Suite name
        seed: Root seed
        records: Per-check records
    """

    suite: str
    seed: int
    records: List[CheckRecord] = field(default_factory=list)

    @property
    def status(self) -> CheckStatus:
        """fail if any check fails, otherwise pass (warnings do not fail a suite)."""
        if any(record.status is CheckStatus.FAIL for record in self.records):
            return CheckStatus.FAIL
        return CheckStatus.PASS

    @property
    def passed(self) -> bool:
        return self.status is CheckStatus.PASS

    def add(self, record: CheckRecord) -> CheckRecord:
        self.records.append(record)
        log = logger.error if record.status is CheckStatus.FAIL else logger.info
        log(f"[{self.suite}] {record.claim}: {record.status.value}")
        return record

    def counts(self) -> Dict[str, int]:
        return {status.value: sum(r.status is status for r in self.records) for status in CheckStatus}

    def to_dict(self) -> Dict[str, Any]:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "status": self.status.value,
            "counts": self.counts(),
            "records": [record.to_dict() for record in self.records],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)
