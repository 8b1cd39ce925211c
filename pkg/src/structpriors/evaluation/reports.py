"""Report containers and JSON/CSV serialization with full provenance.

Every report records the root seed, the resolved configuration, the scale
that actually ran, and per-draw (or per-step) values. JSON files are
written with sorted keys so byte-identical reports mean identical runs;
wall-clock timings live under the single top-level key "timing" which
comparisons may strip.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

TIMING_KEY = "timing"


def config_fingerprint(config: dict) -> str:
    """SHA-256 of the canonical JSON encoding of a config dict."""
    canon = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def write_json_report(path: str | Path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def strip_timing(payload: dict) -> dict:
    return {k: v for k, v in payload.items() if k != TIMING_KEY}


def write_csv(path: str | Path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


@dataclass
class EntropyReport:
    """Prior predictive diversity: entropy of argmax-class histograms."""

    histograms: np.ndarray  # (n_draws, n_classes) counts
    entropies: np.ndarray  # (n_draws,) nats
    tie_counts: np.ndarray  # (n_draws,) exact argmax ties observed
    mean_entropy: float
    stderr: float
    n_draws: int
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "kind": "entropy",
            "mean_entropy": self.mean_entropy,
            "stderr": self.stderr,
            "n_draws": self.n_draws,
            "entropies": self.entropies.tolist(),
            "histograms": self.histograms.tolist(),
            "tie_counts": self.tie_counts.tolist(),
            "config": self.config,
            "fingerprint": config_fingerprint(self.config),
        }


@dataclass
class CorrelationReport:
    """Per-output logit correlations for same- and different-class pairs."""

    mean_same: float
    mean_diff: float
    n_draws: int
    n_pairs: int
    n_excluded_same: int
    n_excluded_diff: int
    same_correlations: np.ndarray | None = None  # optional per-pair retention
    diff_correlations: np.ndarray | None = None
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        payload = {
            "kind": "correlation",
            "mean_same": self.mean_same,
            "mean_diff": self.mean_diff,
            "gap": self.mean_same - self.mean_diff,
            "n_draws": self.n_draws,
            "n_pairs": self.n_pairs,
            "n_excluded_same": self.n_excluded_same,
            "n_excluded_diff": self.n_excluded_diff,
            "config": self.config,
            "fingerprint": config_fingerprint(self.config),
        }
        if self.same_correlations is not None:
            payload["same_correlations"] = self.same_correlations.tolist()
            payload["diff_correlations"] = self.diff_correlations.tolist()
        return payload


@dataclass
class CappaReport:
    """Class-agnostic prior predictive accuracy on a balanced binary task."""

    accuracies: np.ndarray  # (n_draws,)
    cappas: np.ndarray  # (n_draws,) max(a, 1 - a)
    mean_cappa: float
    stderr: float
    n_draws: int
    task: str = ""
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "kind": "cappa",
            "task": self.task,
            "mean_cappa": self.mean_cappa,
            "stderr": self.stderr,
            "n_draws": self.n_draws,
            "accuracies": self.accuracies.tolist(),
            "cappas": self.cappas.tolist(),
            "config": self.config,
            "fingerprint": config_fingerprint(self.config),
        }


@dataclass
class TrainingCurve:
    """One training run: loss and test accuracy at logging checkpoints."""

    steps: list[int]
    train_losses: list[float]
    test_accuracies: list[float]
    seed: int
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "kind": "training_curve",
            "seed": self.seed,
            "steps": self.steps,
            "train_losses": self.train_losses,
            "test_accuracies": self.test_accuracies,
            "config": self.config,
        }


def aggregate_curves(curves: Sequence[TrainingCurve]) -> dict:
    """Mean and 2x standard error of test accuracy across runs, per step."""
    if not curves:
        raise ValueError("no curves to aggregate")
    steps = curves[0].steps
    for c in curves:
        if c.steps != steps:
            raise ValueError("curves have mismatched logging steps")
    acc = np.array([c.test_accuracies for c in curves], dtype=np.float64)
    mean = acc.mean(axis=0)
    if len(curves) > 1:
        stderr = acc.std(axis=0, ddof=1) / np.sqrt(len(curves))
    else:
        stderr = np.zeros_like(mean)
    return {
        "steps": steps,
        "mean_test_accuracy": mean.tolist(),
        "two_stderr": (2.0 * stderr).tolist(),
        "n_runs": len(curves),
        "final_mean_test_accuracy": float(mean[-1]),
    }
