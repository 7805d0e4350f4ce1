"""Taguchi L9 tuning of the colony size, iteration count and scout limit.

Each of the nine array rows fixes one level per factor. The optimizer is run
``replicates`` times per row and the row is scored with the
smaller-the-better signal-to-noise ratio of the best fitness values. Factor
level effects are averages over the three rows that use the level.
"""
from __future__ import annotations

import csv
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from sklearn.base import clone

from .estimators import QABCOffloader, check_scenario

__all__ = [
    "FACTORS",
    "LEVELS",
    "L9_ROWS",
    "L9Design",
    "L9",
    "TaguchiRow",
    "TaguchiReport",
    "is_orthogonal",
    "snr_smaller_better",
    "derive_seed",
    "run_taguchi",
    "main_effects",
    "write_rows_csv",
    "write_effects_csv",
]

FACTORS = ("n_pop", "n_iter", "scout_limit")
LEVELS = {"n_pop": (20, 30, 40), "n_iter": (20, 30, 40), "scout_limit": (5, 10, 15)}
# First three columns of the standard L9(3^4) array.
L9_ROWS = ((1, 1, 1), (1, 2, 2), (1, 3, 3),
           (2, 1, 2), (2, 2, 3), (2, 3, 1),
           (3, 1, 3), (3, 2, 1), (3, 3, 2))


def is_orthogonal(rows) -> bool:
    """Every pair of columns contains every ordered level pair equally often."""
    rows = [tuple(r) for r in rows]
    n_cols = len(rows[0])
    for i, j in itertools.combinations(range(n_cols), 2):
        levels_i = sorted({r[i] for r in rows})
        levels_j = sorted({r[j] for r in rows})
        counts = {pair: 0 for pair in itertools.product(levels_i, levels_j)}
        for r in rows:
            counts[r[i], r[j]] += 1
        if len(set(counts.values())) != 1:
            return False
    return True


@dataclass(frozen=True)
class L9Design:
    rows: tuple[tuple[int, int, int], ...] = L9_ROWS
    factors: tuple[str, ...] = FACTORS
    levels: dict = field(default_factory=lambda: dict(LEVELS))

    def __post_init__(self):
        if len(self.rows) != 9 or any(len(r) != len(self.factors) for r in self.rows):
            raise ValueError("an L9 design needs 9 rows with one level per factor")
        if not is_orthogonal(self.rows):
            raise ValueError("design rows are not pairwise balanced")

    def settings(self, row: int) -> dict[str, int]:
        return {f: self.levels[f][lvl - 1] for f, lvl in zip(self.factors, self.rows[row])}


L9 = L9Design()


def snr_smaller_better(values) -> float:
    """``-10 log10(mean(y^2))`` in dB; values must be finite and positive."""
    y = np.asarray(values, dtype=float).ravel()
    if y.size == 0:
        raise ValueError("need at least one value")
    if not np.all(np.isfinite(y)) or np.any(y <= 0):
        raise ValueError(f"values must be finite and > 0, got {y.tolist()}")
    return float(-10.0 * np.log10(np.mean(y * y)))


def derive_seed(base_seed: int, row: int, replicate: int) -> int:
    """Schedule-independent 64-bit seed for one (row, replicate) run."""
    ss = np.random.SeedSequence(base_seed, spawn_key=(row, replicate))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass
class TaguchiRow:
    index: int
    settings: dict[str, int]
    fitnesses: list[float]
    mean: float
    snr_db: float
    infeasible: bool = False


@dataclass
class TaguchiReport:
    """Row statistics and per-factor level averages.

    ``level_fitness[f]`` and ``level_snr[f]`` list the three levels of factor
    ``f`` in ascending order. ``best_levels[f]`` is the level value with the
    highest average SNR (first level on ties, ``None`` if every row using the
    factor was infeasible).
    """

    rows: list[TaguchiRow]
    design: L9Design
    level_fitness: dict[str, list[float]]
    level_snr: dict[str, list[float]]
    best_levels: dict[str, int | None]

    @property
    def infeasible_rows(self) -> list[int]:
        return [r.index for r in self.rows if r.infeasible]


def _aggregate(rows: list[TaguchiRow], design: L9Design) -> TaguchiReport:
    level_fitness, level_snr, best = {}, {}, {}
    for col, factor in enumerate(design.factors):
        fits, snrs = [], []
        for lvl in (1, 2, 3):
            members = [r for r in rows if design.rows[r.index][col] == lvl]
            fits.append(float(np.mean([r.mean for r in members])))
            snrs.append(float(np.mean([r.snr_db for r in members])))
        level_fitness[factor] = fits
        level_snr[factor] = snrs
        finite = [k for k, v in enumerate(snrs) if math.isfinite(v)]
        best[factor] = design.levels[factor][max(finite, key=lambda k: snrs[k])] if finite else None
    return TaguchiReport(rows, design, level_fitness, level_snr, best)


def run_taguchi(scenario, replicates: int = 5, base_seed: int = 0, *, estimator=None,
                design: L9Design = L9, n_jobs: int | None = None) -> TaguchiReport:
    """Run every design row ``replicates`` times and summarise.

    ``estimator`` is cloned for each run and given the row's factor levels
    plus a derived ``random_state``; it must expose ``best_fitness_`` after
    ``fit``. Rows with an infinite result are kept and flagged, their SNR is
    NaN.
    """
    if replicates < 1:
        raise ValueError(f"replicates must be >= 1, got {replicates}")
    scenario = check_scenario(scenario)
    base = estimator if estimator is not None else QABCOffloader()
    jobs = [(row, rep) for row in range(len(design.rows)) for rep in range(replicates)]

    def run(job):
        row, rep = job
        est = clone(base).set_params(**design.settings(row),
                                     random_state=derive_seed(base_seed, row, rep))
        return float(est.fit(scenario).best_fitness_)

    if n_jobs is None or n_jobs == 1:
        results = [run(j) for j in jobs]
    else:
        with ThreadPoolExecutor(max_workers=n_jobs if n_jobs > 0 else None) as pool:
            results = list(pool.map(run, jobs))

    rows = []
    for row in range(len(design.rows)):
        fits = results[row * replicates:(row + 1) * replicates]
        infeasible = not all(math.isfinite(f) and f > 0 for f in fits)
        snr = math.nan if infeasible else snr_smaller_better(fits)
        rows.append(TaguchiRow(row, design.settings(row), fits, float(np.mean(fits)), snr, infeasible))
    return _aggregate(rows, design)


def main_effects(report: TaguchiReport) -> list[dict]:
    """Factors ranked by SNR range across levels, largest first."""
    table = []
    for order, factor in enumerate(report.design.factors):
        snrs = report.level_snr[factor]
        table.append({
            "factor": factor,
            "delta_db": max(snrs) - min(snrs),
            "best_level": report.best_levels[factor],
            "order": order,
        })
    # NaN deltas sort last
    table.sort(key=lambda r: (-(r["delta_db"] if math.isfinite(r["delta_db"]) else -math.inf), r["order"]))
    for rank, entry in enumerate(table, start=1):
        entry["rank"] = rank
        del entry["order"]
    return table


def write_rows_csv(report: TaguchiReport, path) -> Path:
    path = Path(path)
    n_rep = len(report.rows[0].fitnesses)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["row", *report.design.factors, *(f"fitness_{k}" for k in range(n_rep)),
                    "mean", "snr_db", "infeasible"])
        for r in report.rows:
            w.writerow([r.index + 1, *(r.settings[f] for f in report.design.factors),
                        *(repr(f) for f in r.fitnesses), repr(r.mean), repr(r.snr_db),
                        int(r.infeasible)])
    return path


def write_effects_csv(report: TaguchiReport, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["factor", "level", "avg_fitness", "snr_db", "is_best"])
        for factor in report.design.factors:
            for k, level in enumerate(report.design.levels[factor]):
                w.writerow([factor, level, repr(report.level_fitness[factor][k]),
                            repr(report.level_snr[factor][k]),
                            int(report.best_levels[factor] == level)])
    return path
