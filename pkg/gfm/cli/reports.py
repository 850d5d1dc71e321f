"""Result files: long-format CSV tables and JSON sidecars."""

import json
import math
from pathlib import Path
from typing import Any, Dict, List, Sequence

import numpy as np
import pandas as pd
import structlog

from ..config.settings import config
from ..models.reports import CheckReport
from ..utils.metrics import write_metrics

logger = structlog.get_logger(__name__)


def _plain(value: Any) -> Any:
    """JSON-safe copy: numpy scalars and arrays become Python values, non-finite floats strings"""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


def write_csv(rows: List[Dict[str, Any]], columns: Sequence[str], path) -> Path:
    """Fixed-decimal CSV with '.' radix and newline-terminated rows; no rows gives the header only"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(rows, columns=list(columns))
    frame.to_csv(
        path,
        index=False,
        float_format=config.CSV_FLOAT_FORMAT,
        na_rep="nan",
        lineterminator="\n",
        decimal=".",
    )
    logger.info("CSV written", path=str(path), rows=len(frame))
    return path


def write_json(document: Dict[str, Any], path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_plain(document), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    logger.info("JSON written", path=str(path))
    return path


def csv_name(name: str, complete: bool) -> str:
    return f"{name}.csv" if complete else f"{name}.incomplete.csv"


def write_run_outputs(out_dir, name: str, rows: List[Dict[str, Any]], columns: Sequence[str],
                      sidecar: Dict[str, Any], complete: bool = True) -> Path:
    """CSV, JSON sidecar and metrics for one run or sweep"""
    out_dir = Path(out_dir)
    csv_path = write_csv(rows, columns, out_dir / csv_name(name, complete))
    write_json(dict(sidecar, complete=complete, rows=len(rows), csv=csv_path.name),
               out_dir / f"{name}.json")
    write_metrics(out_dir / "metrics.prom")
    return csv_path


def write_check_reports(out_dir, suite: str, seed: int, reports: List[CheckReport]) -> Path:
    failed = [r.check_name for r in reports if r.gated and not r.passed]
    document = {
        "suite": suite,
        "seed": seed,
        "passed": not failed,
        "failed_checks": failed,
        "reports": [r.to_dict() for r in reports],
    }
    path = write_json(document, Path(out_dir) / f"verify-{suite}.json")
    write_metrics(Path(out_dir) / "metrics.prom")
    return path
