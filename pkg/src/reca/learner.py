"""Linear readout training by pseudoinverse, decoders and metrics."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

DEFAULT_TOL = 1e-10


class DataError(ValueError):
    pass


class UndefinedMetricError(ValueError):
    pass


def pinv(S: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Moore-Penrose pseudoinverse via thin SVD; singular values below
    ``tol * sigma_max`` are treated as zero."""
    S = np.asarray(S, dtype=np.float64)
    if S.size == 0:
        return S.T.copy()
    U, s, Vt = np.linalg.svd(S, full_matrices=False)
    cutoff = tol * s[0] if s.size else 0.0
    inv = np.zeros_like(s)
    keep = s > cutoff
    inv[keep] = 1.0 / s[keep]
    return (Vt.T * inv) @ U.T


@dataclass(frozen=True)
class Threshold:
    level: float = 0.5


@dataclass(frozen=True)
class Argmax:
    pass


@dataclass(frozen=True)
class NearestSymbol:
    symbols: tuple[float, ...]


@dataclass(frozen=True)
class TrainedReadout:
    W_out: np.ndarray  # (m, F)
    decoder: object = None

    @property
    def n_outputs(self) -> int:
        return self.W_out.shape[0]

    @property
    def n_features(self) -> int:
        return self.W_out.shape[1]

    def to_json(self) -> str:
        return json.dumps({"W_out": self.W_out.tolist(), "decoder": decoder_to_dict(self.decoder)})

    @classmethod
    def from_json(cls, text: str) -> "TrainedReadout":
        d = json.loads(text)
        return cls(np.asarray(d["W_out"], dtype=np.float64), decoder_from_dict(d.get("decoder")))

    def save(self, path) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def load(cls, path) -> "TrainedReadout":
        return cls.from_json(Path(path).read_text())


def decoder_to_dict(dec) -> dict | None:
    if dec is None:
        return None
    if isinstance(dec, Threshold):
        return {"kind": "threshold", "level": dec.level}
    if isinstance(dec, Argmax):
        return {"kind": "argmax"}
    if isinstance(dec, NearestSymbol):
        return {"kind": "nearest_symbol", "symbols": list(dec.symbols)}
    raise TypeError(f"unknown decoder {dec!r}")


def decoder_from_dict(d: dict | None):
    if d is None:
        return None
    kind = d["kind"]
    if kind == "threshold":
        return Threshold(d.get("level", 0.5))
    if kind == "argmax":
        return Argmax()
    if kind == "nearest_symbol":
        return NearestSymbol(tuple(d["symbols"]))
    raise ValueError(f"unknown decoder kind {kind!r}")


def _as_2d(Y: np.ndarray) -> np.ndarray:
    Y = np.asarray(Y, dtype=np.float64)
    return Y[:, None] if Y.ndim == 1 else Y


def train(S, Y, decoder=None, tol: float = DEFAULT_TOL, ridge: float = 0.0) -> TrainedReadout:
    """Least-squares output weights ``W_out`` (m x F) with ``S @ W_out.T ~ Y``.

    All-zero feature columns get zero weight, which is what the minimum-norm
    solution assigns them anyway; dropping them first just shrinks the SVD.
    """
    S = np.asarray(S, dtype=np.float64)
    Y = _as_2d(Y)
    if S.ndim != 2 or S.shape[0] < 1:
        raise DataError(f"design matrix must be K x F with K >= 1, got shape {S.shape}")
    if Y.shape[0] != S.shape[0]:
        raise DataError(f"target rows ({Y.shape[0]}) do not match design rows ({S.shape[0]})")
    if not (np.isfinite(S).all() and np.isfinite(Y).all()):
        raise DataError("design and target matrices must be finite")
    live = np.flatnonzero(np.any(S != 0, axis=0))
    W = np.zeros((Y.shape[1], S.shape[1]))
    if live.size:
        A = S[:, live]
        if ridge > 0:
            G = A.T @ A + ridge * np.eye(A.shape[1])
            W[:, live] = np.linalg.solve(G, A.T @ Y).T
        else:
            W[:, live] = (pinv(A, tol) @ Y).T
    return TrainedReadout(W, decoder)


def predict(readout: TrainedReadout, features) -> np.ndarray:
    """Raw outputs ``W_out @ S(k)``; accepts one feature vector or a ``(K, F)`` batch."""
    x = np.asarray(features, dtype=np.float64)
    if x.shape[-1] != readout.n_features:
        raise DataError(f"feature length {x.shape[-1]} does not match readout ({readout.n_features})")
    return x @ readout.W_out.T


def decode(readout_or_decoder, raw):
    """Decode raw outputs.

    A 1-D ``raw`` is one example's output vector and yields a scalar label;
    a ``(K, m)`` batch yields a length-K array.
    """
    dec = readout_or_decoder.decoder if isinstance(readout_or_decoder, TrainedReadout) else readout_or_decoder
    raw = np.asarray(raw, dtype=np.float64)
    single = raw.ndim == 1
    batch = np.atleast_2d(raw)
    if isinstance(dec, Argmax):
        # np.argmax picks the first maximum: lowest-index tie-break
        out = np.argmax(batch, axis=1)
    elif isinstance(dec, Threshold):
        out = (batch[:, 0] >= dec.level).astype(np.int64)
    elif isinstance(dec, NearestSymbol):
        sym = np.sort(np.asarray(dec.symbols, dtype=np.float64))
        # argmin keeps the first (lower) symbol on ties
        out = sym[np.argmin(np.abs(batch[:, :1] - sym[None, :]), axis=1)]
    else:
        raise ValueError(f"unknown decoder {dec!r}")
    return out[0].item() if single else out


def nmse(y, y_hat) -> float:
    """``sum((y - y_hat)^2) / (K * sum(y^2))`` with K the sequence length."""
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    y_hat = np.asarray(y_hat, dtype=np.float64).reshape(-1)
    if y.shape != y_hat.shape:
        raise ValueError(f"length mismatch: {y.size} vs {y_hat.size}")
    energy = float(np.sum(y**2))
    if energy == 0:
        raise UndefinedMetricError("NMSE is undefined for a zero-energy target")
    return float(np.sum((y - y_hat) ** 2)) / (y.size * energy)


def mse(y, y_hat) -> float:
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    y_hat = np.asarray(y_hat, dtype=np.float64).reshape(-1)
    return float(np.mean((y - y_hat) ** 2))


def _labels(decoded: Sequence, truth: Sequence) -> tuple[np.ndarray, np.ndarray]:
    a, b = np.asarray(decoded), np.asarray(truth)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    return a, b


def symbol_error_rate(decoded, truth) -> float:
    a, b = _labels(decoded, truth)
    return float(np.mean(a != b)) if a.size else 0.0


def accuracy(decoded, truth) -> float:
    a, b = _labels(decoded, truth)
    return float(np.mean(a == b)) if a.size else 1.0


def one_hot(labels, n_classes: int) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.int64)
    out = np.zeros((labels.size, n_classes))
    out[np.arange(labels.size), labels] = 1.0
    return out
