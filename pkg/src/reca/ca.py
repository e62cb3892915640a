"""Elementary cellular automaton mechanics.

States are 1-D ``uint8`` arrays of 0/1 cells. A rule's neighborhood code is
``4*left + 2*center + right`` where *left* is the cell at the lower index, so
rule 16 moves an isolated 1 toward higher indices ("right shift") and rule 2
toward lower indices.

This module is the readable reference path. The reservoir hot loop runs on
bit-packed words in :mod:`reca._packed`; both are checked against a naive
per-cell oracle in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Union

import numpy as np

NEIGHBORHOOD = 3
NUM_RULES = 2 ** (2**NEIGHBORHOOD)


class InvalidWidthError(ValueError):
    pass


@dataclass(frozen=True)
class Rule:
    number: int
    table: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = int(self.number)
        if not 0 <= n < NUM_RULES:
            raise ValueError(f"rule number must be in [0, 255], got {self.number}")
        object.__setattr__(self, "number", n)
        object.__setattr__(self, "table", tuple((n >> k) & 1 for k in range(8)))

    @classmethod
    def from_table(cls, table) -> "Rule":
        bits = [int(b) for b in table]
        if len(bits) != 8 or any(b not in (0, 1) for b in bits):
            raise ValueError("a rule table needs exactly 8 binary entries")
        return cls(sum(b << k for k, b in enumerate(bits)))

    @property
    def lut(self) -> np.ndarray:
        return np.array(self.table, dtype=np.uint8)

    def __int__(self) -> int:
        return self.number


RuleLike = Union[Rule, int]


def as_rule(rule: RuleLike) -> Rule:
    return rule if isinstance(rule, Rule) else Rule(int(rule))


@dataclass(frozen=True)
class Fixed:
    """Edge cells are not evaluated by the rule; every step writes ``edge_state``
    into them, so a 1 shifted onto an edge is lost."""

    edge_state: int = 0

    def __post_init__(self):
        if self.edge_state not in (0, 1):
            raise ValueError("edge_state must be 0 or 1")


@dataclass(frozen=True)
class Cyclic:
    """Cell 0 and cell L-1 are neighbours."""


EdgePolicy = Union[Fixed, Cyclic]


def parse_edges(spec: str | EdgePolicy, edge_state: int = 0) -> EdgePolicy:
    if isinstance(spec, (Fixed, Cyclic)):
        return spec
    s = str(spec).lower()
    if s == "fixed":
        return Fixed(edge_state)
    if s in ("cyclic", "cyclical", "periodic"):
        return Cyclic()
    raise ValueError(f"unknown edge policy {spec!r} (expected 'fixed' or 'cyclic')")


def as_state(cells) -> np.ndarray:
    if isinstance(cells, str):
        if not cells or set(cells) - {"0", "1"}:
            raise ValueError(f"state pattern must be a string of 0/1, got {cells!r}")
        return np.frombuffer(cells.encode(), dtype=np.uint8) - ord("0")
    arr = np.asarray(cells)
    if arr.ndim != 1:
        raise ValueError("a state vector must be one-dimensional")
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise ValueError("state cells must be 0 or 1")
    return arr.astype(np.uint8)


def rule_output(rule: RuleLike, left: int, center: int, right: int) -> int:
    return as_rule(rule).table[4 * left + 2 * center + right]


def step(rule: RuleLike, state, edges: EdgePolicy = Fixed()) -> np.ndarray:
    """Advance ``state`` one synchronous update."""
    rule = as_rule(rule)
    x = as_state(state)
    if x.size < 3:
        raise InvalidWidthError(f"state width must be >= 3, got {x.size}")
    lut = rule.lut
    if isinstance(edges, Cyclic):
        code = 4 * np.roll(x, 1) + 2 * x + np.roll(x, -1)
        return lut[code]
    out = np.empty_like(x)
    out[1:-1] = lut[4 * x[:-2] + 2 * x[1:-1] + x[2:]]
    out[0] = out[-1] = edges.edge_state
    return out


@dataclass(frozen=True)
class Trace:
    rows: np.ndarray  # (iterations + 1, L); row 0 is the initial state

    @property
    def iteration_count(self) -> int:
        return self.rows.shape[0] - 1

    @property
    def width(self) -> int:
        return self.rows.shape[1]

    @property
    def final(self) -> np.ndarray:
        return self.rows[-1]


def evolve(rule: RuleLike, initial, iterations: int, edges: EdgePolicy = Fixed()) -> Trace:
    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    rule = as_rule(rule)
    x = as_state(initial)
    if x.size < 3:
        raise InvalidWidthError(f"state width must be >= 3, got {x.size}")
    rows = np.empty((iterations + 1, x.size), dtype=np.uint8)
    rows[0] = x
    for t in range(iterations):
        rows[t + 1] = step(rule, rows[t], edges)
    return Trace(rows)


# -- rule algebra -------------------------------------------------------------


def mirror_rule(rule: RuleLike) -> Rule:
    t = as_rule(rule).table
    out = [0] * 8
    for left in (0, 1):
        for c in (0, 1):
            for r in (0, 1):
                out[4 * r + 2 * c + left] = t[4 * left + 2 * c + r]
    return Rule.from_table(out)


def complement_rule(rule: RuleLike) -> Rule:
    t = as_rule(rule).table
    return Rule.from_table([1 - t[7 - n] for n in range(8)])


def equivalents(rule: RuleLike) -> frozenset[int]:
    """Orbit of ``rule`` under {identity, mirror, complement, both}."""
    r = as_rule(rule)
    m = mirror_rule(r)
    return frozenset({r.number, m.number, complement_rule(r).number, complement_rule(m).number})


@lru_cache(maxsize=None)
def equivalence_classes() -> tuple[frozenset[int], ...]:
    seen: set[int] = set()
    classes = []
    for n in range(NUM_RULES):
        if n in seen:
            continue
        orbit = equivalents(n)
        seen |= orbit
        classes.append(orbit)
    return tuple(classes)


def right_shift_family() -> tuple[int, ...]:
    """Rules that keep a 0 background and move an isolated 1 one cell right.

    Neighborhoods 000, 001 and 010 map to 0 and 100 maps to 1; the four
    neighborhoods with two or more 1s are free, giving 16 rules including 16.
    """
    return tuple(n for n in range(NUM_RULES) if n & 0b10111 == 0b10000)


def canonical_rule(rule: RuleLike) -> int:
    """Smallest rule number in the equivalence class."""
    return min(equivalents(rule))


# Only rules with a published category label; everything else is unclassified.
_CATEGORIES = {
    "I": (0, 8, 136, 250, 252),
    "II": (36, 104, 218, 50, 242),
    "III": (30, 45, 146, 126, 182),
    "IV": (110, 137),
}
RULE_CATEGORIES: dict[int, str] = {n: cat for cat, rules in _CATEGORIES.items() for n in rules}
UNCLASSIFIED = "unclassified"


def rule_category(rule: RuleLike) -> str:
    return RULE_CATEGORIES.get(as_rule(rule).number, UNCLASSIFIED)
