"""Feature vectors from projection traces.

Only projection rows 1..i_p are read; a constant bias of 1 is appended.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .encoding import gray_to_binary
from .reservoir import ReservoirConfig, StepRecord, binned_counts, projection_traces

# column codes are exact in float64 up to this many rows
WORD_CAP = 53


class ReadoutConfigError(ValueError):
    pass


@dataclass(frozen=True)
class IthIteration:
    i: int


@dataclass(frozen=True)
class BinnedColumnSums:
    bins: int = 2


@dataclass(frozen=True)
class ColumnCode:
    code: str = "binary"  # or "gray"
    msb: str = "first_row"  # or "last_row"
    cap: int = WORD_CAP


ReadoutScheme = Union[IthIteration, BinnedColumnSums, ColumnCode]


def validate(scheme: ReadoutScheme, i_p: int) -> None:
    if isinstance(scheme, IthIteration):
        if not 1 <= scheme.i <= i_p:
            raise ReadoutConfigError(f"iteration index i={scheme.i} must lie in [1, i_p={i_p}]")
    elif isinstance(scheme, BinnedColumnSums):
        if scheme.bins < 1 or i_p % scheme.bins:
            raise ReadoutConfigError(f"bins must divide i_p (bins={scheme.bins}, i_p={i_p})")
    elif isinstance(scheme, ColumnCode):
        if scheme.code not in ("binary", "gray"):
            raise ReadoutConfigError(f"column code must be 'binary' or 'gray', got {scheme.code!r}")
        if scheme.msb not in ("first_row", "last_row"):
            raise ReadoutConfigError(f"msb must be 'first_row' or 'last_row', got {scheme.msb!r}")
        if i_p > scheme.cap:
            raise ReadoutConfigError(f"column code needs i_p <= {scheme.cap}, got {i_p}")
    else:
        raise ReadoutConfigError(f"unknown readout scheme {scheme!r}")


def feature_length(scheme: ReadoutScheme, L: int) -> int:
    if isinstance(scheme, BinnedColumnSums):
        return scheme.bins * L + 1
    return L + 1


def _with_bias(x: np.ndarray) -> np.ndarray:
    return np.concatenate([x, np.ones(x.shape[:-1] + (1,))], axis=-1)


def _column_codes(rows: np.ndarray, scheme: ColumnCode) -> np.ndarray:
    # rows: (K, i_p, L) of 0/1
    i_p = rows.shape[1]
    if scheme.msb == "last_row":
        rows = rows[:, ::-1]
    weights = np.array([1 << (i_p - 1 - r) for r in range(i_p)], dtype=np.uint64)
    codes = np.tensordot(rows.astype(np.uint64), weights, axes=([1], [0]))
    if scheme.code == "gray":
        codes = np.vectorize(gray_to_binary, otypes=[np.uint64])(codes) if codes.size else codes
    return codes.astype(np.float64) / float(2**i_p - 1)


def features_from_traces(scheme: ReadoutScheme, traces: np.ndarray) -> np.ndarray:
    """Features for a batch of projection traces ``(K, i_p + 1, L)`` -> ``(K, F)``."""
    traces = np.asarray(traces)
    i_p = traces.shape[1] - 1
    validate(scheme, i_p)
    rows = traces[:, 1:]
    k, _, width = rows.shape
    if isinstance(scheme, IthIteration):
        x = rows[:, scheme.i - 1].astype(np.float64)
    elif isinstance(scheme, BinnedColumnSums):
        per = i_p // scheme.bins
        x = rows.reshape(k, scheme.bins, per, width).mean(axis=2).reshape(k, scheme.bins * width)
    else:
        x = _column_codes(rows, scheme)
    return _with_bias(x)


def features(scheme: ReadoutScheme, record: StepRecord) -> np.ndarray:
    return features_from_traces(scheme, record.projection_trace.rows[None])[0]


def reservoir_features(config: ReservoirConfig, scheme: ReadoutScheme, padded: np.ndarray) -> np.ndarray:
    """Run the reservoir over padded inputs and return the ``(K, F)`` design rows."""
    validate(scheme, config.i_p)
    if isinstance(scheme, BinnedColumnSums):
        counts = binned_counts(config, padded, scheme.bins)
        per = config.i_p // scheme.bins
        x = counts.reshape(counts.shape[0], -1).astype(np.float64) / per
        return _with_bias(x)
    return features_from_traces(scheme, projection_traces(config, padded))


def parse_scheme(d: dict) -> ReadoutScheme:
    d = dict(d)
    name = d.pop("scheme", "binned")
    try:
        if name in ("binned", "binned_column_sums"):
            return BinnedColumnSums(**d)
        if name in ("ith", "ith_iteration"):
            return IthIteration(**d)
        if name in ("column_code", "code"):
            return ColumnCode(**d)
    except TypeError as e:
        raise ReadoutConfigError(f"bad parameters for readout scheme {name!r}: {e}") from None
    raise ReadoutConfigError(f"unknown readout scheme {name!r}")


def scheme_to_dict(scheme: ReadoutScheme) -> dict:
    if isinstance(scheme, BinnedColumnSums):
        return {"scheme": "binned", "bins": scheme.bins}
    if isinstance(scheme, IthIteration):
        return {"scheme": "ith", "i": scheme.i}
    return {"scheme": "column_code", "code": scheme.code, "msb": scheme.msb, "cap": scheme.cap}
