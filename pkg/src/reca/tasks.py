"""Benchmark datasets: sine/square classification, nonlinear channel
equalization, Santa Fe laser prediction and iris classification."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .encoding import ConcatEncoder, EncoderSpec


class ParseError(ValueError):
    pass


class DataError(ValueError):
    pass


@dataclass
class LabeledSequence:
    inputs: np.ndarray
    targets: np.ndarray
    split: int  # first `split` items train, the rest test
    seed: int | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.inputs) != len(self.targets):
            raise DataError(f"inputs ({len(self.inputs)}) and targets ({len(self.targets)}) differ in length")
        if not 0 <= self.split <= len(self.inputs):
            raise DataError(f"split {self.split} outside [0, {len(self.inputs)}]")

    def __len__(self) -> int:
        return len(self.inputs)

    @property
    def train(self) -> tuple[np.ndarray, np.ndarray]:
        return self.inputs[: self.split], self.targets[: self.split]

    @property
    def test(self) -> tuple[np.ndarray, np.ndarray]:
        return self.inputs[self.split :], self.targets[self.split :]


# -- sine / square ------------------------------------------------------------

SINE, SQUARE = 0, 1


def _wave(points_per_wave: int) -> tuple[np.ndarray, np.ndarray]:
    k = np.arange(points_per_wave)
    sine = np.sin(2 * np.pi * k / points_per_wave)
    sine[np.abs(sine) < 1e-12] = 0.0  # sin(pi) is not exactly 0 in floating point
    square = np.where(sine >= 0, 1.0, -1.0)
    return sine, square


def sine_square(
    num_waves: int = 200,
    points_per_wave: int = 20,
    seed: int = 0,
    train_fraction: float = 0.5,
    kinds=None,
) -> LabeledSequence:
    """A random stream of unit-amplitude sine and square waves, labelled per point
    (0 = sine, 1 = square).

    Each wave starts at phase 0. ``kinds`` forces the per-wave choice (e.g. all
    sine); otherwise a seeded fair coin decides. The split falls on a wave
    boundary.
    """
    if points_per_wave < 2:
        raise ValueError("points_per_wave must be >= 2")
    rng = np.random.default_rng(seed)
    if kinds is None:
        kinds = rng.integers(0, 2, num_waves)
    else:
        kinds = np.broadcast_to(np.asarray(kinds), (num_waves,))
    sine, square = _wave(points_per_wave)
    inputs = np.concatenate([square if kd == SQUARE else sine for kd in kinds]) if num_waves else np.zeros(0)
    targets = np.repeat(np.asarray(kinds, dtype=np.int64), points_per_wave)
    split = int(round(num_waves * train_fraction)) * points_per_wave
    return LabeledSequence(inputs, targets, split, seed, {"task": "sine_square"})


# -- nonlinear channel equalization ----------------------------------------------

SYMBOLS = (-3.0, -1.0, 1.0, 3.0)
# tap on d(n + 2), d(n + 1), d(n), d(n - 1), ..., d(n - 7)
CHANNEL_TAPS = (0.08, -0.12, 1.0, 0.18, -0.1, 0.091, -0.05, 0.04, 0.03, 0.01)
CHANNEL_LEAD = 2
CHANNEL_POLY = (1.0, 0.036, -0.011)  # u = q + 0.036 q^2 - 0.011 q^3


@dataclass(frozen=True)
class ChannelParams:
    snr_db: float = 28.0
    symbols: tuple[float, ...] = SYMBOLS

    def __post_init__(self):
        if math.isnan(self.snr_db) or self.snr_db == -math.inf:
            raise ValueError("snr_db must be a number (use inf for a noise-free channel)")


def channel_linear(d: np.ndarray) -> np.ndarray:
    """Multipath sum q(n); symbols outside the sequence count as 0."""
    d = np.asarray(d, dtype=np.float64)
    n = d.size
    padded = np.concatenate([np.zeros(len(CHANNEL_TAPS)), d, np.zeros(CHANNEL_LEAD)])
    off = len(CHANNEL_TAPS)
    q = np.zeros(n)
    for i, tap in enumerate(CHANNEL_TAPS):
        shift = CHANNEL_LEAD - i  # d(n + shift)
        q += tap * padded[off + shift : off + shift + n]
    return q


def channel_nonlinear(q: np.ndarray) -> np.ndarray:
    a, b, c = CHANNEL_POLY
    return a * q + b * q**2 + c * q**3


def channel_equalization(n_train: int = 1000, n_test: int = 100, params: ChannelParams = ChannelParams(), seed: int = 0) -> LabeledSequence:
    if n_train < 1 or n_test < 1:
        raise ValueError("n_train and n_test must be >= 1")
    rng = np.random.default_rng(seed)
    n = n_train + n_test
    d = rng.choice(np.asarray(params.symbols), size=n)
    clean = channel_nonlinear(channel_linear(d))
    if math.isinf(params.snr_db):
        u = clean
        noise_std = 0.0
    else:
        power = float(np.mean(clean**2))
        noise_std = math.sqrt(power / 10 ** (params.snr_db / 10))
        u = clean + rng.normal(0.0, noise_std, size=n)
    meta = {"task": "channel", "snr_db": params.snr_db, "noise_std": noise_std}
    return LabeledSequence(u, d, n_train, seed, meta)


def symbol_index(d, symbols=SYMBOLS) -> np.ndarray:
    lookup = {s: i for i, s in enumerate(symbols)}
    return np.array([lookup[float(v)] for v in np.asarray(d)], dtype=np.int64)


# -- Santa Fe laser -----------------------------------------------------------

SANTA_FE_TRAIN = 1000
SANTA_FE_TEST = 200


def parse_santa_fe(text: str, source: str = "<text>") -> np.ndarray:
    values = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s:
            continue
        try:
            v = int(s)
        except ValueError:
            raise ParseError(f"{source}:{lineno}: expected an integer, got {s!r}") from None
        if not 0 <= v <= 255:
            raise ParseError(f"{source}:{lineno}: value {v} outside [0, 255]")
        values.append(v)
    return np.array(values, dtype=np.float64)


def santa_fe_sequence(values, n_train: int = SANTA_FE_TRAIN, n_test: int = SANTA_FE_TEST, meta=None) -> LabeledSequence:
    """One-step-ahead pairs: target(k) = value(k + 1)."""
    values = np.asarray(values, dtype=np.float64)
    need = n_train + n_test + 1
    if values.size < need:
        raise DataError(f"need at least {need} values ({n_train} train + {n_test} test + 1), got {values.size}")
    return LabeledSequence(values[: need - 1], values[1:need], n_train, None, dict(meta or {}, task="santa_fe"))


def load_santa_fe(path, n_train: int = SANTA_FE_TRAIN, n_test: int = SANTA_FE_TEST) -> LabeledSequence:
    """Load the laser series: plain text, one integer in [0, 255] per line."""
    path = Path(path)
    values = parse_santa_fe(path.read_text(), str(path))
    return santa_fe_sequence(values, n_train, n_test, {"source": str(path), "canonical": True})


def mackey_glass(n: int, tau: int = 17, seed: int = 0, dt: float = 0.1, sample_every: int = 10, washout: int = 500) -> np.ndarray:
    beta, gamma, power = 0.2, 0.1, 10
    rng = np.random.default_rng(seed)
    lag = int(round(tau / dt))
    start = lag + 1  # seeded history covers x[t - 1 - lag] for the first step
    total = (n + washout) * sample_every
    x = np.empty(start + total)
    x[:start] = 1.2 + 0.1 * rng.standard_normal(start)
    for t in range(start, start + total):
        xt = x[t - 1]
        xd = x[t - 1 - lag]
        x[t] = xt + dt * (beta * xd / (1 + xd**power) - gamma * xt)
    samples = x[start::sample_every][washout : washout + n]
    return samples


def synthetic_santa_fe(n: int = SANTA_FE_TRAIN + SANTA_FE_TEST + 1, seed: int = 0) -> np.ndarray:
    """Non-canonical stand-in: a Mackey-Glass series quantised to integers in [0, 255]."""
    s = mackey_glass(n, seed=seed)
    s = (s - s.min()) / (s.max() - s.min())
    return np.round(s * 255).astype(np.float64)


def santa_fe_synthetic_sequence(seed: int = 0, n_train: int = SANTA_FE_TRAIN, n_test: int = SANTA_FE_TEST) -> LabeledSequence:
    values = synthetic_santa_fe(n_train + n_test + 1, seed)
    return santa_fe_sequence(values, n_train, n_test, {"source": "synthetic-mackey-glass", "canonical": False})


# -- iris -----------------------------------------------------------------------

IRIS_LABELS = ("Iris-setosa", "Iris-versicolor", "Iris-virginica")
IRIS_RANGES = ((4.3, 7.9), (2.0, 4.4), (1.0, 6.9), (0.1, 2.5))
IRIS_RESOLUTION = 0.1
IRIS_TRAIN = 112


def iris_encoder(ranges=IRIS_RANGES, resolution: float = IRIS_RESOLUTION) -> ConcatEncoder:
    """Unary per attribute, one cell per ``resolution`` step centred on the
    grid points lo, lo + res, ..., hi; i.e. bin = round((v - lo) / res)."""
    parts = []
    for lo, hi in ranges:
        cells = int(round((hi - lo) / resolution)) + 1
        half = resolution / 2
        parts.append(EncoderSpec("unary", cells, lo - half, hi + half, clamp=True))
    return ConcatEncoder(tuple(parts))


def bundled_iris_path():
    return resources.files("reca") / "data" / "iris.csv"


def parse_iris(text: str, source: str = "<text>") -> tuple[np.ndarray, np.ndarray]:
    X, y = [], []
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s:
            continue
        parts = [p.strip() for p in s.split(",")]
        if len(parts) != 5:
            raise DataError(f"{source}:{lineno}: expected 4 numbers and a label, got {len(parts)} fields")
        try:
            X.append([float(p) for p in parts[:4]])
        except ValueError:
            raise DataError(f"{source}:{lineno}: non-numeric attribute in {s!r}") from None
        if parts[4] not in IRIS_LABELS:
            raise DataError(f"{source}:{lineno}: unknown label {parts[4]!r}")
        y.append(IRIS_LABELS.index(parts[4]))
    if len(X) != 150:
        raise DataError(f"{source}: expected 150 rows, got {len(X)}")
    return np.array(X), np.array(y, dtype=np.int64)


def stratified_split(labels, n_train: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Index arrays (train, test) keeping class proportions within rounding."""
    labels = np.asarray(labels)
    classes = np.unique(labels)
    frac = n_train / labels.size
    members = {c: rng.permutation(np.flatnonzero(labels == c)) for c in classes}
    quota = {c: int(math.floor(members[c].size * frac)) for c in classes}
    short = n_train - sum(quota.values())
    # hand leftover slots to the classes with the largest remainders, ties random
    rema = [(members[c].size * frac - quota[c], rng.random(), c) for c in classes]
    for _, _, c in sorted(rema, reverse=True)[:short]:
        quota[c] += 1
    train = np.concatenate([members[c][: quota[c]] for c in classes])
    test = np.concatenate([members[c][quota[c] :] for c in classes])
    return rng.permutation(train), rng.permutation(test)


def load_iris(path=None, seed: int = 0, n_train: int = IRIS_TRAIN) -> LabeledSequence:
    if path is None:
        text, source = bundled_iris_path().read_text(), "iris.csv (bundled)"
    else:
        text, source = Path(path).read_text(), str(path)
    X, y = parse_iris(text, source)
    tr, te = stratified_split(y, n_train, np.random.default_rng(seed))
    order = np.concatenate([tr, te])
    return LabeledSequence(X[order], y[order], n_train, seed, {"task": "iris", "source": source})
