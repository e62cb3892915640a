"""Two-rule cellular automaton reservoir.

Per input: the encoded, zero-buffered input is XORed into the carried state,
evolved ``i_p`` steps under the projection rule, then ``i_m`` steps under the
memory rule. The final memory row is carried to the next input (RC mode) or
discarded (ELM mode).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _packed
from .ca import Cyclic, EdgePolicy, Fixed, Rule, RuleLike, Trace, as_rule, evolve
from .encoding import ConcatEncoder, EncoderSpec, encode_rows, pad

MODES = ("rc", "elm")
INJECTIONS = {"xor": _packed.INJECT_XOR, "or": _packed.INJECT_OR, "and": _packed.INJECT_AND}


class WidthMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class ReservoirConfig:
    proj_rule: RuleLike = 90
    mem_rule: RuleLike = 16
    i_p: int = 20
    i_m: int = 60
    encoder: EncoderSpec | ConcatEncoder = field(default_factory=EncoderSpec)
    R: int = 64
    edges: EdgePolicy = field(default_factory=Fixed)
    mode: str = "rc"
    injection: str = "xor"

    def __post_init__(self):
        object.__setattr__(self, "proj_rule", as_rule(self.proj_rule))
        object.__setattr__(self, "mem_rule", as_rule(self.mem_rule))
        if self.i_p < 1:
            raise ValueError("i_p must be >= 1")
        if self.i_m < 0:
            raise ValueError("i_m must be >= 0")
        if self.R < 0:
            raise ValueError("R must be >= 0")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.injection not in INJECTIONS:
            raise ValueError(f"injection must be one of {tuple(INJECTIONS)}, got {self.injection!r}")
        if self.width < 3:
            raise ValueError(f"reservoir width L = N + 2R must be >= 3, got {self.width}")

    @property
    def width(self) -> int:
        return self.encoder.width + 2 * self.R

    @property
    def cyclic(self) -> bool:
        return isinstance(self.edges, Cyclic)


@dataclass(frozen=True)
class ReservoirState:
    carry: np.ndarray


@dataclass(frozen=True)
class StepRecord:
    injected: np.ndarray
    projection_trace: Trace
    memory_trace: Trace

    @property
    def readout_rows(self) -> np.ndarray:
        """Projection rows 1..i_p (the injected row is not read out)."""
        return self.projection_trace.rows[1:]


def zero_state(config: ReservoirConfig) -> ReservoirState:
    x = np.zeros(config.width, dtype=np.uint8)
    if isinstance(config.edges, Fixed) and config.edges.edge_state:
        x[0] = x[-1] = 1
    return ReservoirState(x)


def inject(state: ReservoirState, padded_input, op: str = "xor") -> np.ndarray:
    u = np.asarray(padded_input, dtype=np.uint8)
    if u.shape != state.carry.shape:
        raise WidthMismatchError(f"input width {u.shape} does not match reservoir width {state.carry.shape}")
    if op == "xor":
        return state.carry ^ u
    if op == "or":
        return state.carry | u
    if op == "and":
        return state.carry & u
    raise ValueError(f"unknown injection operator {op!r}")


def encode_inputs(config: ReservoirConfig, inputs) -> np.ndarray:
    """Encode and pad a sequence of raw inputs to ``(K, L)``."""
    return pad(encode_rows(config.encoder, inputs), config.R)


def run_step(config: ReservoirConfig, state: ReservoirState, padded_input) -> tuple[StepRecord, ReservoirState]:
    injected = inject(state, padded_input, config.injection)
    proj = evolve(config.proj_rule, injected, config.i_p, config.edges)
    mem = evolve(config.mem_rule, proj.final, config.i_m, config.edges)
    if config.mode == "elm":
        nxt = zero_state(config)
    else:
        nxt = ReservoirState(mem.final.copy())
    return StepRecord(injected, proj, mem), nxt


def run_sequence(config: ReservoirConfig, inputs: Sequence) -> list[StepRecord]:
    """Reference (unpacked) run over raw inputs, starting from the zero state."""
    if len(inputs) == 0:
        raise ValueError("run_sequence needs at least one input")
    padded = encode_inputs(config, inputs)
    state = zero_state(config)
    records = []
    for u in padded:
        rec, state = run_step(config, state, u)
        records.append(rec)
    return records


def _kernel_args(config: ReservoirConfig, padded: np.ndarray):
    padded = np.asarray(padded, dtype=np.uint8)
    if padded.ndim != 2 or padded.shape[1] != config.width:
        raise WidthMismatchError(f"expected padded inputs of shape (K, {config.width}), got {padded.shape}")
    return (
        _packed.pack(padded),
        _packed.pack(zero_state(config).carry),
        _packed.rule_masks(config.proj_rule.number),
        _packed.rule_masks(config.mem_rule.number),
        config.i_p,
        config.i_m,
        config.width,
        config.cyclic,
        0 if config.cyclic else config.edges.edge_state,
        config.mode == "elm",
        INJECTIONS[config.injection],
    )


def projection_traces(config: ReservoirConfig, padded: np.ndarray) -> np.ndarray:
    """Fast path: projection traces ``(K, i_p + 1, L)`` for padded inputs.

    Bit-identical to the ``projection_trace`` rows of :func:`run_sequence`.
    """
    traces, _ = _packed.run_projection(*_kernel_args(config, padded))
    return traces


def binned_counts(config: ReservoirConfig, padded: np.ndarray, bins: int) -> np.ndarray:
    """Fast path: counts of 1s per (bin, column) over projection rows 1..i_p."""
    if bins < 1 or config.i_p % bins:
        raise ValueError(f"bins must divide i_p ({bins} does not divide {config.i_p})")
    counts, _ = _packed.run_binned(*_kernel_args(config, padded), bins)
    return counts
