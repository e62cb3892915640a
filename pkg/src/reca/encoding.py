"""Real-value to binary-vector encoders and zero-buffer padding."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

SCHEMES = ("unary", "binary", "gray")


class RangeError(ValueError):
    pass


@dataclass(frozen=True)
class EncoderSpec:
    """Bins ``[lo, hi]`` into equal half-open bins, the top value landing in the
    last bin.

    ``size`` is the cell count for unary and the bit width for binary/Gray
    (which then use ``2**size`` bins).
    """

    scheme: str = "unary"
    size: int = 64
    lo: float = -1.0
    hi: float = 1.0
    clamp: bool = True

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown encoder scheme {self.scheme!r}; expected one of {SCHEMES}")
        if not self.lo < self.hi:
            raise ValueError(f"encoder range needs lo < hi, got [{self.lo}, {self.hi}]")
        if self.scheme == "unary" and self.size < 2:
            raise ValueError("a unary encoder needs at least 2 cells")
        if self.scheme != "unary" and self.size < 1:
            raise ValueError("a binary/gray encoder needs at least 1 bit")

    @property
    def n_bins(self) -> int:
        return self.size if self.scheme == "unary" else 2**self.size

    @property
    def width(self) -> int:
        return self.size

    def bin_index(self, value: float) -> int:
        v = float(value)
        if not math.isfinite(v):
            raise RangeError(f"cannot encode non-finite value {value!r}")
        if not self.clamp and not self.lo <= v <= self.hi:
            raise RangeError(f"value {v} outside encoder range [{self.lo}, {self.hi}]")
        k = math.floor((v - self.lo) / (self.hi - self.lo) * self.n_bins)
        return min(max(k, 0), self.n_bins - 1)


def gray(index: int) -> int:
    return index ^ (index >> 1)


def gray_to_binary(code: int) -> int:
    out = code
    shift = code >> 1
    while shift:
        out ^= shift
        shift >>= 1
    return out


def bits_msb_first(index: int, width: int) -> np.ndarray:
    return np.array([(index >> (width - 1 - i)) & 1 for i in range(width)], dtype=np.uint8)


def bits_to_int(bits) -> int:
    out = 0
    for b in bits:
        out = (out << 1) | int(b)
    return out


def encode(spec: EncoderSpec, value: float) -> np.ndarray:
    k = spec.bin_index(value)
    if spec.scheme == "unary":
        out = np.zeros(spec.size, dtype=np.uint8)
        out[k] = 1
        return out
    if spec.scheme == "gray":
        k = gray(k)
    return bits_msb_first(k, spec.size)


def decode_index(spec: EncoderSpec, bits) -> int:
    """Inverse of the bin-index step of :func:`encode`."""
    bits = np.asarray(bits)
    if spec.scheme == "unary":
        (idx,) = np.flatnonzero(bits)
        return int(idx)
    k = bits_to_int(bits)
    return gray_to_binary(k) if spec.scheme == "gray" else k


def encode_many(spec: EncoderSpec, values) -> np.ndarray:
    """Vectorised :func:`encode` for unary specs; falls back to a loop otherwise."""
    values = np.asarray(values, dtype=float)
    if spec.scheme != "unary":
        return np.stack([encode(spec, v) for v in values]) if len(values) else np.zeros((0, spec.width), np.uint8)
    if not np.isfinite(values).all():
        raise RangeError("cannot encode non-finite values")
    if not spec.clamp and ((values < spec.lo) | (values > spec.hi)).any():
        bad = values[(values < spec.lo) | (values > spec.hi)][0]
        raise RangeError(f"value {bad} outside encoder range [{spec.lo}, {spec.hi}]")
    k = np.floor((values - spec.lo) / (spec.hi - spec.lo) * spec.n_bins).astype(np.int64)
    k = np.clip(k, 0, spec.n_bins - 1)
    out = np.zeros((len(values), spec.size), dtype=np.uint8)
    out[np.arange(len(values)), k] = 1
    return out


@dataclass(frozen=True)
class ConcatEncoder:
    """One encoder per attribute; attribute vectors are concatenated in order."""

    parts: tuple[EncoderSpec, ...]

    def __post_init__(self):
        if not self.parts:
            raise ValueError("ConcatEncoder needs at least one attribute encoder")

    @property
    def width(self) -> int:
        return sum(p.width for p in self.parts)


def concat_attributes(encoded_list: Sequence[np.ndarray]) -> np.ndarray:
    if len(encoded_list) == 0:
        raise ValueError("concat_attributes needs a nonempty list")
    return np.concatenate([np.asarray(e, dtype=np.uint8) for e in encoded_list])


def encode_rows(encoder: EncoderSpec | ConcatEncoder, values) -> np.ndarray:
    """Encode a sequence of inputs into a ``(K, width)`` array."""
    if isinstance(encoder, ConcatEncoder):
        values = np.asarray(values, dtype=float)
        if values.ndim != 2 or values.shape[1] != len(encoder.parts):
            raise ValueError(f"expected inputs of shape (K, {len(encoder.parts)}), got {values.shape}")
        return np.concatenate([encode_many(p, values[:, i]) for i, p in enumerate(encoder.parts)], axis=1)
    return encode_many(encoder, values)


def pad(encoded, R: int) -> np.ndarray:
    """Surround the encoding(s) with ``R`` zero cells on both sides."""
    if R < 0:
        raise ValueError("buffer width R must be >= 0")
    encoded = np.asarray(encoded, dtype=np.uint8)
    widths = [(0, 0)] * (encoded.ndim - 1) + [(R, R)]
    return np.pad(encoded, widths)


def fit_range(values, scheme: str = "unary", size: int = 64) -> EncoderSpec:
    """Encoder spanning the observed min/max, clamping anything outside."""
    values = np.asarray(values, dtype=float)
    lo, hi = float(values.min()), float(values.max())
    if lo == hi:
        hi = lo + 1.0
    return EncoderSpec(scheme, size, lo, hi, clamp=True)
