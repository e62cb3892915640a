"""Grid sweeps over rule pairs and iteration depths with repeated trials.

Trial ``t`` of every cell uses seed ``base_seed + t``, so all cells see the
same t-th dataset and differences between cells come from the reservoir alone.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Callable, Iterable, Sequence

import numpy as np

from . import experiment
from .experiment import ACCURACY_METRICS, EncoderParams, ReservoirParams, TrainingParams
from .io import atomic_write_text
from .readout import BinnedColumnSums, ReadoutConfigError, ReadoutScheme, validate

AXES = ("proj_rule", "mem_rule", "i_p", "i_m")
RESULT_COLUMNS = ("proj_rule", "mem_rule", "i_p", "i_m", "trial", "metric", "value", "seed", "wall_ms", "error")
SUMMARY_COLUMNS = ("metric", "mean", "std", "min", "max", "count", "errors")


class PlanError(ValueError):
    pass


@dataclass(frozen=True)
class SweepPlan:
    task: str
    proj_rules: tuple[int, ...]
    mem_rules: tuple[int, ...]
    i_p: tuple[int, ...]
    i_m: tuple[int, ...]
    trials: int = 1
    base_seed: int = 0
    base: ReservoirParams = field(default_factory=ReservoirParams)
    readout: ReadoutScheme = field(default_factory=lambda: BinnedColumnSums(2))
    task_params: dict = field(default_factory=dict)
    encoder: EncoderParams = field(default_factory=EncoderParams)
    training: TrainingParams = field(default_factory=TrainingParams)

    def __post_init__(self):
        for name in AXES_FIELDS:
            object.__setattr__(self, name, tuple(int(v) for v in getattr(self, name)))

    def validate(self) -> None:
        if self.task not in experiment.TASKS:
            raise PlanError(f"unknown task {self.task!r}; expected one of {sorted(experiment.TASKS)}")
        for name in AXES_FIELDS:
            if not getattr(self, name):
                raise PlanError(f"sweep axis {name!r} is empty")
        bad = [r for r in self.proj_rules + self.mem_rules if not 0 <= r <= 255]
        if bad:
            raise PlanError(f"rule numbers must be in [0, 255], got {bad}")
        if min(self.i_p) < 1 or min(self.i_m) < 0:
            raise PlanError("i_p values must be >= 1 and i_m values >= 0")
        if self.trials < 1:
            raise PlanError("trials must be >= 1")
        for ip in self.i_p:
            try:
                validate(self.readout, ip)
            except ReadoutConfigError as e:
                raise PlanError(f"readout invalid for i_p={ip}: {e}") from None

    def cells(self) -> list[tuple[int, int, int, int]]:
        return list(itertools.product(self.proj_rules, self.mem_rules, self.i_p, self.i_m))

    @property
    def metric(self) -> str:
        return experiment.TASK_METRICS[self.task]


AXES_FIELDS = ("proj_rules", "mem_rules", "i_p", "i_m")


@dataclass(frozen=True)
class Record:
    proj_rule: int
    mem_rule: int
    i_p: int
    i_m: int
    trial: int
    metric: str
    value: float
    seed: int
    wall_ms: float = 0.0
    error: str = ""

    @property
    def key(self) -> tuple:
        return (self.proj_rule, self.mem_rule, self.i_p, self.i_m, self.trial)


@dataclass
class SweepResult:
    records: list[Record]
    plan: SweepPlan | None = None

    def __len__(self) -> int:
        return len(self.records)

    def values(self, **where) -> np.ndarray:
        return np.array([r.value for r in self.records if all(getattr(r, k) == v for k, v in where.items())])

    def to_csv(self, timing: bool = True) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(RESULT_COLUMNS)
        for r in self.records:
            w.writerow([r.proj_rule, r.mem_rule, r.i_p, r.i_m, r.trial, r.metric, repr(float(r.value)), r.seed,
                        f"{r.wall_ms:.3f}" if timing else "0", r.error])
        return buf.getvalue()

    def write(self, path, timing: bool = True):
        return atomic_write_text(path, self.to_csv(timing))

    @classmethod
    def read(cls, path) -> "SweepResult":
        with open(path, newline="") as f:
            rows = list(csv.DictReader(f))
        recs = [
            Record(int(r["proj_rule"]), int(r["mem_rule"]), int(r["i_p"]), int(r["i_m"]), int(r["trial"]),
                   r["metric"], float(r["value"]), int(r["seed"]), float(r["wall_ms"]), r["error"])
            for r in rows
        ]
        return cls(recs)


def evaluate_cell(plan: SweepPlan, cell: tuple[int, int, int, int], trial: int) -> Record:
    proj, mem, ip, im = cell
    seed = plan.base_seed + trial
    t0 = time.perf_counter()
    try:
        res = replace(plan.base, proj_rule=proj, mem_rule=mem, i_p=ip, i_m=im)
        out = experiment.run(plan.task, res, plan.readout, seed, plan.task_params, plan.encoder, plan.training)
        value, err = float(out.value), ""
    except Exception as e:  # one bad cell must not abort the sweep
        value, err = math.nan, f"{type(e).__name__}: {e}".replace("\n", " ")
    wall = (time.perf_counter() - t0) * 1e3
    return Record(proj, mem, ip, im, trial, plan.metric, value, seed, wall, err)


def _evaluate_chunk(args) -> list[Record]:
    plan, jobs = args
    return [evaluate_cell(plan, cell, trial) for cell, trial in jobs]


def run_sweep(plan: SweepPlan, workers: int = 1, progress: Callable[[int, int], None] | None = None) -> SweepResult:
    """Evaluate every (cell, trial); the returned records are in canonical order."""
    plan.validate()
    jobs = [(cell, t) for cell in plan.cells() for t in range(plan.trials)]
    records: list[Record] = []
    if workers <= 1:
        for i, (cell, t) in enumerate(jobs):
            records.append(evaluate_cell(plan, cell, t))
            if progress:
                progress(i + 1, len(jobs))
    else:
        size = max(1, len(jobs) // (workers * 8))
        chunks = [(plan, jobs[i : i + size]) for i in range(0, len(jobs), size)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for chunk in pool.map(_evaluate_chunk, chunks):
                records.extend(chunk)
                if progress:
                    progress(len(records), len(jobs))
    records.sort(key=lambda r: r.key)
    return SweepResult(records, plan)


# -- aggregation ------------------------------------------------------------


@dataclass(frozen=True)
class SummaryRow:
    group: tuple
    metric: str
    mean: float
    std: float
    min: float
    max: float
    count: int
    errors: int = 0

    @property
    def single(self) -> bool:
        """True when the group has one trial (std is then reported as 0)."""
        return self.count == 1


@dataclass
class Summary:
    group_by: tuple[str, ...]
    rows: list[SummaryRow]

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def lookup(self, *group) -> SummaryRow:
        for r in self.rows:
            if r.group == tuple(group):
                return r
        raise KeyError(group)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.group_by + SUMMARY_COLUMNS)
        for r in self.rows:
            w.writerow(list(r.group) + [r.metric, repr(r.mean), repr(r.std), repr(r.min), repr(r.max), r.count, r.errors])
        return buf.getvalue()

    def write(self, path):
        return atomic_write_text(path, self.to_csv())


def aggregate(result: SweepResult, group_by: Sequence[str] = AXES) -> Summary:
    """Mean, sample std, min, max and trial count per group, best first."""
    group_by = tuple(group_by)
    unknown = [g for g in group_by if g not in AXES + ("trial", "metric")]
    if unknown:
        raise ValueError(f"cannot group by {unknown}; available axes are {AXES}")
    groups: dict[tuple, list[Record]] = {}
    for r in result.records:
        groups.setdefault(tuple(getattr(r, g) for g in group_by), []).append(r)
    rows = []
    for key, recs in groups.items():
        vals = np.array([r.value for r in recs if not r.error], dtype=float)
        metric = recs[0].metric
        if vals.size:
            std = float(vals.std(ddof=1)) if vals.size > 1 else 0.0
            rows.append(SummaryRow(key, metric, float(vals.mean()), std, float(vals.min()), float(vals.max()), int(vals.size), len(recs) - vals.size))
        else:
            rows.append(SummaryRow(key, metric, math.nan, math.nan, math.nan, math.nan, 0, len(recs)))
    higher_better = bool(rows) and rows[0].metric in ACCURACY_METRICS

    def order(row: SummaryRow):
        m = row.mean if not math.isnan(row.mean) else (-math.inf if higher_better else math.inf)
        return (-m if higher_better else m, row.group)

    rows.sort(key=order)
    return Summary(group_by, rows)


def success_count(result: SweepResult | Summary, predicate: Callable[[SummaryRow], bool], group_by: Sequence[str] = AXES) -> int:
    summary = result if isinstance(result, Summary) else aggregate(result, group_by)
    return sum(1 for row in summary.rows if predicate(row))


def heatmap(result: SweepResult) -> list[tuple[int, int, float]]:
    """``(i_p, i_m, mean_value)`` triples sorted by (i_p, i_m)."""
    summ = aggregate(result, ("i_p", "i_m"))
    return sorted((r.group[0], r.group[1], r.mean) for r in summ.rows)


def heatmap_csv(result: SweepResult) -> str:
    lines = ["i_p,i_m,mean_value"] + [f"{ip},{im},{v!r}" for ip, im, v in heatmap(result)]
    return "\n".join(lines) + "\n"


def parse_rules(spec) -> tuple[int, ...]:
    """Accepts "all", an int, a list of ints, or strings like "0-255"."""
    if isinstance(spec, str):
        s = spec.strip().lower()
        if s == "all":
            return tuple(range(256))
        out = []
        for part in s.split(","):
            part = part.strip()
            if not part:
                continue
            if "-" in part:
                a, b = part.split("-")
                out.extend(range(int(a), int(b) + 1))
            else:
                out.append(int(part))
        return tuple(out)
    if isinstance(spec, int):
        return (spec,)
    return tuple(int(v) for v in spec)
