"""Round-level metrics records and their CSV persistence.

One row per (round, model, client, phase).  Reward floats are written with
shortest round-trip repr so a reread reproduces the exact values and two
identically seeded runs produce byte-identical files.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

CSV_HEADER = ["round", "model", "client_id", "phase", "cum_reward", "episodes"]

MODELS = ("global", "center", "client")
PHASES = ("train", "eval")


@dataclass(frozen=True)
class RoundRecord:
    round_index: int
    model: str
    client_id: int | None
    phase: str
    cum_reward: float
    episodes: int

    def validate(self, max_reward: float | None = None) -> None:
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}, got {self.model!r}")
        if self.phase not in PHASES:
            raise ValueError(f"phase must be one of {PHASES}, got {self.phase!r}")
        if max_reward is not None and not 0.0 <= self.cum_reward <= max_reward:
            raise ValueError(f"cum_reward {self.cum_reward} outside [0, {max_reward}]")


def sort_key(record: RoundRecord):
    return (
        record.round_index,
        record.model,
        -1 if record.client_id is None else record.client_id,
        PHASES.index(record.phase),
    )


def write_metrics(records: list[RoundRecord], path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for rec in records:
            writer.writerow(
                [
                    rec.round_index,
                    rec.model,
                    "" if rec.client_id is None else rec.client_id,
                    rec.phase,
                    repr(rec.cum_reward),
                    rec.episodes,
                ]
            )


def read_metrics(path: str | Path) -> list[RoundRecord]:
    records = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != CSV_HEADER:
            raise ValueError(f"unexpected metrics header {header} in {path}")
        for row in reader:
            records.append(
                RoundRecord(
                    round_index=int(row[0]),
                    model=row[1],
                    client_id=None if row[2] == "" else int(row[2]),
                    phase=row[3],
                    cum_reward=float(row[4]),
                    episodes=int(row[5]),
                )
            )
    return records


def series(records: list[RoundRecord], model: str, phase: str) -> dict[int, float]:
    """Per-round value of a (model, phase) series; client rows are averaged."""
    by_round: dict[int, list[float]] = {}
    for rec in records:
        if rec.model == model and rec.phase == phase:
            by_round.setdefault(rec.round_index, []).append(rec.cum_reward)
    return {r: sum(vals) / len(vals) for r, vals in sorted(by_round.items())}
