"""Run summaries and pairwise run comparisons from metrics files alone.

Everything here is recomputable from the CSV; there is no hidden state.
"""

from __future__ import annotations

from pathlib import Path

from .metrics import RoundRecord, read_metrics, series

CONVERGENCE_TOLERANCE = 0.02


def convergence_round(values: dict[int, float], tolerance: float = CONVERGENCE_TOLERANCE):
    """First round whose value is within ``tolerance`` of the maximum.

    Returns None when the series never rises above zero (no convergence to
    report, matching a flat-failed run).
    """
    if not values:
        return None
    peak = max(values.values())
    if peak <= 0.0:
        return None
    for round_index in sorted(values):
        if values[round_index] >= (1.0 - tolerance) * peak:
            return round_index
    return None


def eval_series(records: list[RoundRecord]) -> dict[int, float]:
    """The run's primary validation series: global if present, else center."""
    for model in ("global", "center"):
        values = series(records, model, "eval")
        if values:
            return values
    return {}


def train_series(records: list[RoundRecord]) -> dict[int, float]:
    """The run's primary training series: client mean if present, else center."""
    for model in ("client", "center"):
        values = series(records, model, "train")
        if values:
            return values
    return {}


def participation_train_series(records: list[RoundRecord]) -> dict[int, float]:
    """Client training rewards re-indexed by each client's participation count.

    Aligns federated clients with the centralized run on cumulative local
    epochs: a client's m-th participation has trained 'm' blocks of local
    epochs, like the centralized run at round m.
    """
    per_client: dict[int, list[tuple[int, float]]] = {}
    for rec in records:
        if rec.model == "client" and rec.phase == "train":
            per_client.setdefault(rec.client_id, []).append((rec.round_index, rec.cum_reward))
    by_participation: dict[int, list[float]] = {}
    for rows in per_client.values():
        for m, (_, value) in enumerate(sorted(rows), start=1):
            by_participation.setdefault(m, []).append(value)
    return {m: sum(v) / len(v) for m, v in sorted(by_participation.items())}


def summarize_records(records: list[RoundRecord], algorithm: str | None = None) -> dict:
    """Peak reward and convergence round per model (the results-table shape)."""
    summary: dict = {"models": {}}
    if algorithm is not None:
        summary["algorithm"] = algorithm
    for model in ("global", "center"):
        values = series(records, model, "eval")
        if values:
            summary["models"][model] = {
                "cumulative_reward": max(values.values()),
                "epochs": convergence_round(values),
            }
    return summary


def compare_runs(path_a: str | Path, path_b: str | Path, phase: str = "eval") -> dict:
    """Per-round deltas, peaks, convergence rounds and the dominance fraction.

    Both runs must cover the same round axis.  When comparing the training
    phase of a federated run against a centralized run, the federated side
    is aligned by cumulative local epochs (participation index).
    """
    records_a = read_metrics(path_a)
    records_b = read_metrics(path_b)
    if phase == "eval":
        series_a, series_b = eval_series(records_a), eval_series(records_b)
    elif phase == "train":
        series_a = participation_train_series(records_a) or train_series(records_a)
        series_b = participation_train_series(records_b) or train_series(records_b)
    else:
        raise ValueError(f"phase must be 'eval' or 'train', got {phase!r}")
    if not series_a or not series_b:
        raise ValueError("one of the runs has no data for the requested phase")
    if phase == "eval" and set(series_a) != set(series_b):
        raise ValueError("round axis mismatch between the two runs")
    shared = sorted(set(series_a) & set(series_b))
    if not shared:
        raise ValueError("round axes do not overlap; runs are not comparable")
    deltas = {r: series_a[r] - series_b[r] for r in shared}
    dominance = sum(series_a[r] >= series_b[r] for r in shared) / len(shared)
    return {
        "phase": phase,
        "rounds": shared,
        "deltas": deltas,
        "peak_a": max(series_a.values()),
        "peak_b": max(series_b.values()),
        "convergence_a": convergence_round(series_a),
        "convergence_b": convergence_round(series_b),
        "dominance_fraction": dominance,
    }
