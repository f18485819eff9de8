"""Sweeps over (algorithm, n, w) grids, scaling fits and theory-normalised reports.

Run ``r`` of cell ``c`` is seeded with ``derive_seed(base_seed, c * reps + r)``
and records are kept in that order, so the output of a sweep never depends on
the number of workers.
"""
from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .core import RandomStream, derive_seed
from .landscape import HurdleProblem
from .metaheuristics import RunSpec
from .records import ALGORITHMS, RunRecord, write_records
from .stats import bootstrap_ci, loglog_ls, resample_means

log = logging.getLogger(__name__)

MAX_BUDGET = 1 << 62
EXPONENTIAL = "exponential"
CONFIG_KEYS = {"algorithms", "n", "w", "pm", "delta", "reps", "base_seed", "budget_multiplier",
               "budget"}
GROUP_ALIASES = {"algo": "algorithm", "algorithm": "algorithm", "n": "n", "w": "w",
                 "pm": "pm", "delta": "delta"}
Y_FIELDS = {"evaluations": "evaluations_total", "generations": "generations"}


def theory_prediction(algorithm: str, n: int, w: int) -> Union[float, str]:
    """Leading-order runtime in evaluations with constants dropped."""
    if algorithm == "ea":
        return float(n) ** w
    if algorithm == "ma-bils":
        return n**2 + n**3 / w**2
    if algorithm == "ma-fils":
        return n**3 / w**2
    if algorithm in ("ls-fils", "ls-bils"):
        return float(2**n) if n <= 62 else EXPONENTIAL
    raise ValueError(f"unknown algorithm {algorithm!r}")


def resolve_pm(rule, n: int, w: int) -> float:
    if rule == "1/n":
        return 1.0 / n
    if rule == "w/n":
        return w / n
    p = float(rule)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"mutation probability {p} outside [0, 1]")
    return p


def resolve_delta(rule, n: int) -> int:
    d = n if rule == "n" else int(rule)
    if d < 1:
        raise ValueError("delta must be at least 1")
    return d


def default_budget(algorithm: str, n: int, w: int, multiplier: float = 100.0) -> int:
    theory = theory_prediction(algorithm, n, w)
    if theory == EXPONENTIAL:
        return MAX_BUDGET
    return int(min(MAX_BUDGET, math.ceil(multiplier * theory)))


@dataclass
class SweepConfig:
    algorithms: list
    n: list
    w: list
    pm: Union[str, float] = "1/n"
    delta: Union[str, int] = "n"
    reps: int = 10
    base_seed: int = 0
    budget_multiplier: float = 100.0
    budget: int | None = None

    def __post_init__(self):
        bad = [a for a in self.algorithms if a not in ALGORITHMS]
        if bad or not self.algorithms:
            raise ValueError(f"unknown or missing algorithms {bad}; choose from {ALGORITHMS}")
        if self.reps < 1:
            raise ValueError("reps must be at least 1")
        if any(w < 2 for w in self.w) or any(n < 2 for n in self.n):
            raise ValueError("need n >= 2 and w >= 2")
        if self.budget is not None and self.budget < 1:
            raise ValueError("budget must be positive")
        if not self.cells():
            raise ValueError("grid has no (n, w) pair with w <= n")
        for _, n, w in self.cells():
            resolve_pm(self.pm, n, w)
            resolve_delta(self.delta, n)

    @classmethod
    def from_dict(cls, d: dict) -> "SweepConfig":
        unknown = set(d) - CONFIG_KEYS
        if unknown:
            raise ValueError(f"unknown sweep config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_json(cls, path: str | Path) -> "SweepConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def cells(self) -> list[tuple[str, int, int]]:
        return [(a, n, w) for a in self.algorithms for n in self.n for w in self.w if w <= n]

    def run_spec(self, algorithm: str, n: int, w: int) -> RunSpec:
        problem = HurdleProblem(n, w)
        budget = self.budget or default_budget(algorithm, n, w, self.budget_multiplier)
        pm = None if algorithm.startswith("ls-") else resolve_pm(self.pm, n, w)
        delta = None if algorithm == "ea" else resolve_delta(self.delta, n)
        return RunSpec(algorithm, problem, pm, delta, budget)


def run_sweep(config: SweepConfig, out_path: str | Path | None = None,
              workers: int = 1) -> list[RunRecord]:
    """Run every cell ``reps`` times; optionally write CSV (or JSONL by suffix)."""
    for _, n, w in config.cells():
        if w > n / 2:
            log.warning("w=%d > n/2 for n=%d: outside the big-valley regime", w, n)
    tasks = []
    for c, (algo, n, w) in enumerate(config.cells()):
        spec = config.run_spec(algo, n, w)
        for r in range(config.reps):
            tasks.append((spec, derive_seed(config.base_seed, c * config.reps + r)))

    def one(task):
        spec, seed = task
        return spec(RandomStream(seed))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(one, tasks))
    else:
        records = [one(t) for t in tasks]
    if out_path is not None:
        write_records(records, out_path)
    return records


# --- grouping, fits, reports -------------------------------------------------

def _norm_keys(group_by: Sequence[str] | str) -> tuple[str, ...]:
    if isinstance(group_by, str):
        group_by = [g for g in group_by.split(",") if g]
    try:
        return tuple(GROUP_ALIASES[g.strip()] for g in group_by)
    except KeyError as exc:
        raise ValueError(f"cannot group by {exc.args[0]!r}") from None


def group_label(record: RunRecord, keys: tuple[str, ...]) -> str:
    parts = []
    for k in keys:
        v = getattr(record, k)
        parts.append(str(v) if k == "algorithm" else f"{k}={v}")
    label = "|".join(parts) if parts else "all"
    # best-improvement at w=2 escapes valleys differently; never pooled with w >= 3
    if record.algorithm == "ma-bils" and record.w == 2 and "w" not in keys:
        label += "|w2-edge"
    return label


def group_records(records, group_by, x: str = "n") -> dict[str, dict]:
    """``{label: {x_value: [records]}}`` with labels and x values sorted."""
    keys = _norm_keys(group_by)
    out: dict[str, dict] = {}
    for r in records:
        out.setdefault(group_label(r, keys), {}).setdefault(getattr(r, x), []).append(r)
    return {g: dict(sorted(cells.items())) for g, cells in sorted(out.items())}


@dataclass
class FitResult:
    group: str
    slope: float
    intercept: float
    r2: float
    ci: tuple
    level: float
    points: int
    excluded: list = field(default_factory=list)

    @property
    def edge_case(self) -> bool:
        return "ma-bils" in self.group and ("w2-edge" in self.group or "w=2" in self.group)


def _y(records, y: str) -> np.ndarray:
    return np.array([getattr(r, Y_FIELDS[y]) for r in records], dtype=np.float64)


def loglog_fit(records, group_by=("algorithm", "w"), x: str = "n", y: str = "evaluations",
               level: float = 0.95, resamples: int = 1000, seed: int = 0) -> list[FitResult]:
    """Least squares of ln(mean y) on ln x per group, with a bootstrap slope interval.

    Cells containing an unsuccessful (budget-truncated) run are dropped and
    listed in ``excluded``. The bootstrap resamples runs within each cell.
    """
    if y not in Y_FIELDS:
        raise ValueError(f"y must be one of {sorted(Y_FIELDS)}")
    results = []
    for gi, (label, cells) in enumerate(group_records(records, group_by, x).items()):
        kept = {xv: rs for xv, rs in cells.items() if all(r.success for r in rs)}
        excluded = [xv for xv in cells if xv not in kept]
        if excluded:
            log.warning("group %s: truncated cells at %s=%s excluded from fit", label, x, excluded)
        if len(kept) < 3:
            raise ValueError(f"group {label}: need at least 3 x values with complete runs, "
                             f"have {len(kept)}")
        xs = np.array(list(kept), dtype=np.float64)
        samples = [_y(rs, y) for rs in kept.values()]
        means = np.array([s.mean() for s in samples])
        if (means <= 0).any():
            raise ValueError(f"group {label}: non-positive mean")
        slope, intercept, r2 = loglog_ls(xs, means)
        rng = RandomStream(derive_seed(seed, gi))
        cell_means = np.array([resample_means(s, resamples, rng) for s in samples])
        boot = np.array([loglog_ls(xs, cell_means[:, b])[0] for b in range(resamples)])
        alpha = (1 - level) / 2
        lo, hi = np.quantile(boot, [alpha, 1 - alpha])
        results.append(FitResult(label, slope, intercept, r2,
                                 (float(min(lo, slope)), float(max(hi, slope))), level,
                                 len(kept), excluded))
    return results


def report_rows(records, group_by=("algorithm", "w"), theory: bool = True,
                level: float = 0.95, resamples: int = 1000, seed: int = 0) -> list[dict]:
    rows = []
    for gi, (label, cells) in enumerate(group_records(records, group_by, "n").items()):
        for n, rs in cells.items():
            ys = _y(rs, "evaluations")
            mean = float(ys.mean())
            if ys.size > 1:
                lo, hi = bootstrap_ci(ys, level, resamples,
                                      RandomStream(derive_seed(seed, (gi << 20) + n)))
            else:
                lo = hi = mean
            th = theory_prediction(rs[0].algorithm, n, rs[0].w) if theory else None
            ratio = mean / th if isinstance(th, float) else None
            rows.append({"group": label, "n": n, "mean": mean, "ci_lo": lo, "ci_hi": hi,
                         "theory": th, "ratio": ratio,
                         "truncated": int(not all(r.success for r in rs))})
    return rows


REPORT_COLUMNS = ("group", "n", "mean", "ci_lo", "ci_hi", "theory", "ratio", "truncated")


def format_tsv(rows: list[dict]) -> str:
    def cell(v):
        if v is None:
            return ""
        if isinstance(v, float):
            return f"{v:.6g}"
        return str(v)

    lines = ["\t".join(REPORT_COLUMNS)]
    lines += ["\t".join(cell(row[c]) for c in REPORT_COLUMNS) for row in rows]
    return "\n".join(lines) + "\n"
