"""Metrics export: per-trial CSV plus an aggregate JSON summary."""

from __future__ import annotations

import csv
import json
from pathlib import Path

from .trials import TrialResult

TRIAL_COLUMNS = [
    "trial_id",
    "object",
    "n_fingers",
    "seed",
    "stable",
    "drop_time",
    "duration",
    "mean_fn",
    "steady_fn_per_finger",
]


def trial_row(result: TrialResult) -> dict:
    steady = result.steady_mean_fn()
    return {
        "trial_id": result.trial_id,
        "object": result.object_name,
        "n_fingers": result.n_fingers,
        "seed": result.seed,
        "stable": result.stable,
        "drop_time": "" if result.drop_time is None else result.drop_time,
        "duration": result.duration,
        "mean_fn": sum(steady) / len(steady),
        "steady_fn_per_finger": ";".join(f"{v:.6f}" for v in steady),
    }


def aggregate(results: list[TrialResult]) -> dict:
    if not results:
        raise ValueError("no results to aggregate")
    stable = [r for r in results if r.stable]
    steady_means = [sum(r.steady_mean_fn()) / r.n_fingers for r in results]
    return {
        "n_trials": len(results),
        "n_stable": len(stable),
        "stability_rate": len(stable) / len(results),
        "mean_steady_fn": sum(steady_means) / len(steady_means),
        "objects": sorted({r.object_name for r in results}),
        "note": (
            "test objects are generated parametrically over the 10-400 g mass "
            "range; they are stand-ins, not the physical test set"
        ),
    }


def export_report(results: list[TrialResult], out_dir: str | Path) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "trials.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=TRIAL_COLUMNS)
        writer.writeheader()
        for r in results:
            writer.writerow(trial_row(r))
    with open(out / "summary.json", "w") as fh:
        json.dump(aggregate(results), fh, indent=2)


def export_trace(result: TrialResult, path: str | Path) -> None:
    """Plot-ready per-tick trace (wrench, integrator, velocity, pressure panels)."""
    from .logio import write_ndjson

    write_ndjson(path, result.trace)
