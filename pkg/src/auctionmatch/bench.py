"""Scaling experiments: generate, solve, measure, write CSV."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import time
from dataclasses import dataclass, fields
from typing import Iterable, Optional, Sequence, TextIO

import numpy as np

from .audit import alternating_distances, state_before_last_move
from .auction import SolverConfig, solve
from .graph import GeneratorSpec, generate

log = logging.getLogger(__name__)

CSV_COLUMNS = (
    "n_right", "n_left", "k", "epsilon", "seed", "moves", "comparisons",
    "discarded", "total_weight", "sum_distances", "max_label", "wall_time_ns",
)


@dataclass(frozen=True)
class ExperimentSpec:
    family: str = "k_left_regular"  # or "complete"
    n_values: tuple[int, ...] = (1000,)
    density: float = 0.9
    k: int = 3
    epsilons: tuple[float, ...] = (0.05,)
    weight_low: float = 0.0
    weight_high: float = 1.0
    integer_weights: bool = False
    trials: int = 1
    base_seed: int = 0
    timing: bool = True  # False writes wall_time_ns = 0 for reproducible output

    def validate(self) -> None:
        if self.family not in ("k_left_regular", "complete"):
            raise ValueError(f"unknown family {self.family!r}")
        if not 0 <= self.density <= 1:
            raise ValueError("density must lie in [0, 1]")
        if self.family == "k_left_regular" and self.density >= 1:
            raise ValueError("k_left_regular experiments need density < 1")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.epsilons or any(not e > 0 for e in self.epsilons):
            raise ValueError("epsilons must be positive")
        if any(n < 1 for n in self.n_values):
            raise ValueError("n values must be >= 1")

    @classmethod
    def from_mapping(cls, data: dict) -> "ExperimentSpec":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown experiment keys: {sorted(unknown)}")
        data = dict(data)
        for key in ("n_values", "epsilons"):
            if key in data:
                data[key] = tuple(data[key])
        return cls(**data)

    @classmethod
    def from_json(cls, path: str) -> "ExperimentSpec":
        with open(path) as fh:
            return cls.from_mapping(json.load(fh))


@dataclass
class ExperimentRow:
    n_right: int
    n_left: int
    k: int
    epsilon: float
    seed: int
    moves: Optional[int] = None
    comparisons: Optional[int] = None
    discarded: Optional[int] = None
    total_weight: Optional[float] = None
    sum_distances: Optional[int] = None
    max_label: Optional[float] = None
    wall_time_ns: Optional[int] = None
    # Not written to CSV.
    label_sum: float = 0.0
    locks: int = 0
    weight_range: float = 0.0
    error: Optional[str] = None

    def csv_values(self) -> list[str]:
        out = []
        for name in CSV_COLUMNS:
            x = getattr(self, name)
            out.append("" if x is None else repr(x) if isinstance(x, float) else str(x))
        return out


def trial_seed(base_seed: int, n_right: int, trial: int) -> int:
    """Graph seed for one (n, trial) cell; shared by every epsilon."""
    ss = np.random.SeedSequence([base_seed, n_right, trial])
    return int(ss.generate_state(1, np.uint64)[0])


def run_trial(spec: ExperimentSpec, n_right: int, epsilon: float, trial: int) -> ExperimentRow:
    seed = trial_seed(spec.base_seed, n_right, trial)
    n_left = int(round(spec.density * n_right))
    k = spec.k if spec.family == "k_left_regular" else n_right
    row = ExperimentRow(n_right, n_left, k, epsilon, seed)
    try:
        g = generate(GeneratorSpec(
            spec.family, n_right, n_left, k=spec.k,
            weight_low=spec.weight_low, weight_high=spec.weight_high,
            integer_weights=spec.integer_weights, seed=seed,
        ))
        t0 = time.perf_counter_ns()
        res = solve(g, SolverConfig(epsilon))
        elapsed = time.perf_counter_ns() - t0
        labels, m = state_before_last_move(g, res)
        dist = alternating_distances(g, m)
    except Exception as exc:  # one bad cell must not stop the run
        log.error("n=%d eps=%r trial=%d failed: %s", n_right, epsilon, trial, exc)
        row.error = f"{type(exc).__name__}: {exc}"
        return row
    row.moves = res.moves
    row.comparisons = res.comparisons
    row.discarded = len(res.discarded)
    row.total_weight = res.total_weight
    row.sum_distances = int(sum(d for d in dist if d != math.inf))
    row.max_label = max(res.labels, default=0.0)
    row.wall_time_ns = elapsed if spec.timing else 0
    row.label_sum = math.fsum(res.labels)
    row.locks = res.locks
    row.weight_range = g.w_max - g.w_min if g.n_edges else 0.0
    return row


def run_experiment(spec: ExperimentSpec) -> list[ExperimentRow]:
    """One row per (n, epsilon, trial), in that nesting order."""
    spec.validate()
    rows = []
    for n in spec.n_values:
        for eps in spec.epsilons:
            for t in range(spec.trials):
                rows.append(run_trial(spec, n, eps, t))
    return rows


def row_violations(row: ExperimentRow, family: str) -> list[str]:
    """Per-row checks of the label-mass and complete-graph label bounds."""
    if row.error is not None:
        return [f"error: {row.error}"]
    out = []
    if row.moves < row.n_left - row.discarded:
        out.append(f"moves {row.moves} < matched {row.n_left - row.discarded}")
    if row.locks == 0 and row.moves > 1 + row.label_sum / row.epsilon:
        out.append(f"moves {row.moves} > 1 + label_sum/epsilon = {1 + row.label_sum / row.epsilon}")
    if family == "complete" and row.max_label > row.weight_range + 2 * row.epsilon:
        out.append(f"max_label {row.max_label} > range + 2*epsilon")
    return out


def write_csv(rows: Iterable[ExperimentRow], fh: TextIO) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow(r.csv_values())


def to_csv(rows: Sequence[ExperimentRow]) -> str:
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()
