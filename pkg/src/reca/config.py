"""Experiment and sweep configuration files (TOML, or the JSON echo of a resolved config)."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .experiment import TASKS, EncoderParams, ReservoirParams, TrainingParams
from .readout import ReadoutConfigError, ReadoutScheme, parse_scheme, scheme_to_dict, validate
from .sweep import PlanError, SweepPlan, parse_rules


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class TaskSection:
    name: str
    seed: int = 0
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class OutputSection:
    dir: str = "runs"


@dataclass(frozen=True)
class ExperimentConfig:
    task: TaskSection
    reservoir: ReservoirParams
    readout: ReadoutScheme
    encoder: EncoderParams = field(default_factory=EncoderParams)
    training: TrainingParams = field(default_factory=TrainingParams)
    output: OutputSection = field(default_factory=OutputSection)

    def to_dict(self) -> dict:
        return {
            "task": asdict(self.task),
            "reservoir": asdict(self.reservoir),
            "encoder": asdict(self.encoder),
            "readout": scheme_to_dict(self.readout),
            "training": asdict(self.training),
            "output": asdict(self.output),
        }


def _section(cls, data, where: str):
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"[{where}] must be a table")
    names = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - names)
    if unknown:
        raise ConfigError(f"[{where}] has unknown keys: {', '.join(unknown)}")
    try:
        return cls(**data)
    except TypeError as e:
        raise ConfigError(f"[{where}] {e}") from None


def _check_top(data: dict, allowed: set[str], required: set[str]) -> None:
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ConfigError(f"unknown top-level sections: {', '.join(unknown)}")
    missing = sorted(required - set(data))
    if missing:
        raise ConfigError(f"missing required sections: {', '.join(missing)}")


def load_document(path) -> dict:
    path = Path(path)
    text = path.read_text()
    try:
        if path.suffix == ".json":
            return json.loads(text)
        return tomllib.loads(text)
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as e:
        raise ConfigError(f"{path}: cannot parse: {e}") from None


def _readout(data) -> ReadoutScheme:
    try:
        return parse_scheme(data or {"scheme": "binned", "bins": 2})
    except ReadoutConfigError as e:
        raise ConfigError(str(e)) from None


def experiment_from_dict(data: dict) -> ExperimentConfig:
    _check_top(data, {"task", "reservoir", "encoder", "readout", "training", "output"}, {"task", "reservoir"})
    task = _section(TaskSection, data["task"], "task")
    if task.name not in TASKS:
        raise ConfigError(f"unknown task {task.name!r}; expected one of {sorted(TASKS)}")
    res = _section(ReservoirParams, data["reservoir"], "reservoir")
    readout = _readout(data.get("readout"))
    try:
        validate(readout, res.i_p)
    except ReadoutConfigError as e:
        raise ConfigError(str(e)) from None
    return ExperimentConfig(
        task=task,
        reservoir=res,
        readout=readout,
        encoder=_section(EncoderParams, data.get("encoder"), "encoder"),
        training=_section(TrainingParams, data.get("training"), "training"),
        output=_section(OutputSection, data.get("output"), "output"),
    )


def load_experiment(path) -> ExperimentConfig:
    return experiment_from_dict(load_document(path))


def parse_int_axis(spec) -> tuple[int, ...]:
    """An int, a list, or a string like "10-100:10" (inclusive, with step)."""
    if isinstance(spec, str) and ":" in spec:
        rng, step = spec.split(":")
        a, b = (int(v) for v in rng.split("-"))
        return tuple(range(a, b + 1, int(step)))
    return parse_rules(spec)


@dataclass(frozen=True)
class SweepSection:
    proj_rules: object = "all"
    mem_rules: object = None
    i_p: object = None
    i_m: object = None
    trials: int = 1
    base_seed: int = 0
    workers: int = 0


def sweep_from_dict(data: dict) -> tuple[SweepPlan, SweepSection, OutputSection]:
    _check_top(data, {"sweep", "task", "reservoir", "encoder", "readout", "training", "output"}, {"sweep", "task"})
    sw = _section(SweepSection, data["sweep"], "sweep")
    task = _section(TaskSection, data["task"], "task")
    base = _section(ReservoirParams, data.get("reservoir"), "reservoir")
    try:
        plan = SweepPlan(
            task=task.name,
            proj_rules=parse_rules(sw.proj_rules),
            mem_rules=parse_rules(sw.mem_rules if sw.mem_rules is not None else base.mem_rule),
            i_p=parse_int_axis(sw.i_p if sw.i_p is not None else base.i_p),
            i_m=parse_int_axis(sw.i_m if sw.i_m is not None else base.i_m),
            trials=sw.trials,
            base_seed=sw.base_seed,
            base=base,
            readout=_readout(data.get("readout")),
            task_params=dict(task.params),
            encoder=_section(EncoderParams, data.get("encoder"), "encoder"),
            training=_section(TrainingParams, data.get("training"), "training"),
        )
        plan.validate()
    except (ValueError, TypeError) as e:
        if isinstance(e, ConfigError):
            raise
        raise PlanError(str(e)) from None
    return plan, sw, _section(OutputSection, data.get("output"), "output")


def plan_to_dict(plan: SweepPlan, workers: int = 0, output: OutputSection = OutputSection()) -> dict:
    """A sweep document with every axis spelled out; ``sweep_from_dict`` inverts it."""
    return {
        "sweep": {
            "proj_rules": list(plan.proj_rules),
            "mem_rules": list(plan.mem_rules),
            "i_p": list(plan.i_p),
            "i_m": list(plan.i_m),
            "trials": plan.trials,
            "base_seed": plan.base_seed,
            "workers": workers,
        },
        "task": {"name": plan.task, "seed": 0, "params": dict(plan.task_params)},
        "reservoir": asdict(plan.base),
        "encoder": asdict(plan.encoder),
        "readout": scheme_to_dict(plan.readout),
        "training": asdict(plan.training),
        "output": asdict(output),
    }


def load_sweep(path):
    return sweep_from_dict(load_document(path))
