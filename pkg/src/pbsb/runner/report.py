"""Summary documents and per-round logs."""
from __future__ import annotations

import csv
import json
from pathlib import Path

from ..evaluation import AggregateReport, RunResult

ROUND_LOG_COLUMNS = ("t", "super_arm", "psi", "n_observed", "reward", "accuracy")


def report_document(report: AggregateReport) -> str:
    """Deterministic JSON text for a report (sorted keys, no timestamps)."""
    return json.dumps(report.as_dict(), indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_report(report: AggregateReport, out_dir) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "summary.json"
    path.write_text(report_document(report), encoding="utf-8")
    return path


def write_round_log(result: RunResult, path, delimiter=",") -> Path:
    """One row per round: t, arms of S_t (space separated), psi, |P_t|, r_t, Acc(t)."""
    if result.super_arms is None or result.psi is None:
        raise ValueError("run was executed without round logging")
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, delimiter=delimiter, lineterminator="\n")
        writer.writerow(ROUND_LOG_COLUMNS)
        for t in range(result.horizon):
            writer.writerow(
                (
                    t + 1,
                    " ".join(str(int(a)) for a in result.super_arms[t]),
                    int(result.psi[t]),
                    int(result.n_observed[t]),
                    int(result.rewards[t]),
                    repr(float(result.accuracy[t])),
                )
            )
    return path


def write_round_logs(report: AggregateReport, out_dir, delimiter=",") -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for (policy, strategy), results in report.runs.items():
        for i, res in enumerate(results):
            paths.append(write_round_log(res, out / f"rounds_{policy}_{strategy}_run{i}.csv", delimiter))
    return paths
