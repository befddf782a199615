"""Experiment orchestration: run, persist, summarize.

A run directory holds the effective config echo, one metrics CSV per mode,
per-round checkpoints of the trained model and a results summary.
"""

from __future__ import annotations

import json
from pathlib import Path

from .compare import summarize_records
from .config import RunConfig, save_config
from .federation import RunArtifacts, run_centralized, run_federated
from .metrics import write_metrics

MODES = ("fed", "central", "both")

FED_METRICS = "metrics_fed.csv"
CENTRAL_METRICS = "metrics_central.csv"


def run_experiment(cfg: RunConfig, mode: str, out_dir: str | Path) -> dict[str, Path]:
    """Execute the requested runs and write all artifacts under ``out_dir``."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    cfg.validate()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_config(cfg, out_dir / "effective_config.json")
    paths: dict[str, Path] = {"config": out_dir / "effective_config.json"}

    artifacts: dict[str, RunArtifacts] = {}
    if mode in ("fed", "both"):
        artifacts["fed"] = run_federated(cfg, checkpoint_dir=out_dir / "checkpoints" / "fed")
        paths["fed_metrics"] = out_dir / FED_METRICS
        write_metrics(artifacts["fed"].records, paths["fed_metrics"])
    if mode in ("central", "both"):
        artifacts["central"] = run_centralized(
            cfg, checkpoint_dir=out_dir / "checkpoints" / "central"
        )
        paths["central_metrics"] = out_dir / CENTRAL_METRICS
        write_metrics(artifacts["central"].records, paths["central_metrics"])

    summary = {"algorithm": cfg.algorithm, "seed": cfg.seed, "models": {}}
    for art in artifacts.values():
        summary["models"].update(summarize_records(art.records)["models"])
    paths["summary"] = out_dir / "summary.json"
    paths["summary"].write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return paths
