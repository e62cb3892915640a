"""Task bindings: dataset -> reservoir features -> trained readout -> metric."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any, Callable

import numpy as np

from . import learner, tasks
from .ca import parse_edges
from .encoding import EncoderSpec, fit_range
from .readout import BinnedColumnSums, ReadoutScheme, reservoir_features
from .reservoir import ReservoirConfig, encode_inputs

# higher-is-better metrics; everything else is an error to minimise
ACCURACY_METRICS = {"accuracy"}


@dataclass(frozen=True)
class ReservoirParams:
    proj_rule: int = 90
    mem_rule: int = 16
    i_p: int = 20
    i_m: int = 60
    N: int = 64
    R: int = 64
    edges: str = "fixed"
    edge_state: int = 0
    mode: str = "rc"
    injection: str = "xor"


@dataclass(frozen=True)
class EncoderParams:
    scheme: str = "unary"
    lo: float | None = None
    hi: float | None = None
    clamp: bool = True


@dataclass(frozen=True)
class TrainingParams:
    train: int | None = None
    test: int | None = None
    ridge: float = 0.0
    tol: float = learner.DEFAULT_TOL


@dataclass
class Prepared:
    """A dataset bound to its encoder, target encoding, decoder and metric."""

    data: tasks.LabeledSequence
    encoder: Any
    Y_train: np.ndarray
    truth_test: np.ndarray
    decoder: Any
    metric: str
    postprocess: Callable[[np.ndarray], np.ndarray] = field(default=lambda d: d)
    meta: dict = field(default_factory=dict)


@dataclass
class Outcome:
    metric: str
    value: float
    predictions: np.ndarray  # decoded test outputs (raw for regression)
    truth: np.ndarray
    raw: np.ndarray
    readout: learner.TrainedReadout
    config: ReservoirConfig
    meta: dict


def _encoder(enc: EncoderParams, N: int, lo: float, hi: float) -> EncoderSpec:
    size = N
    if enc.scheme != "unary":
        # binary/Gray use N cells as the bit width
        size = N
    return EncoderSpec(enc.scheme, size, enc.lo if enc.lo is not None else lo, enc.hi if enc.hi is not None else hi, enc.clamp)


def _prep_sine_square(params: dict, res: ReservoirParams, enc: EncoderParams, training: TrainingParams, seed: int) -> Prepared:
    p = dict(params)
    ppw = p.pop("points_per_wave", 20)
    if training.train is not None or training.test is not None:
        n_tr = training.train if training.train is not None else 100
        n_te = training.test if training.test is not None else 100
        data = tasks.sine_square(n_tr + n_te, ppw, seed, n_tr / (n_tr + n_te), **p)
    else:
        data = tasks.sine_square(p.pop("num_waves", 200), ppw, seed, **p)
    encoder = _encoder(enc, res.N, -1.0, 1.0)
    _, y_tr = data.train
    _, y_te = data.test
    return Prepared(data, encoder, y_tr.astype(float)[:, None], y_te, learner.Threshold(0.5), "accuracy")


def _prep_channel(params: dict, res: ReservoirParams, enc: EncoderParams, training: TrainingParams, seed: int) -> Prepared:
    snr = float(params.get("snr_db", 28.0))
    unknown = set(params) - {"snr_db", "target"}
    if unknown:
        raise ValueError(f"unknown channel task parameters: {sorted(unknown)}")
    data = tasks.channel_equalization(training.train or 1000, training.test or 100, tasks.ChannelParams(snr), seed)
    u_tr, d_tr = data.train
    _, d_te = data.test
    fitted = fit_range(u_tr, enc.scheme, res.N)
    encoder = _encoder(enc, res.N, fitted.lo, fitted.hi)
    meta = {"encoder_lo": encoder.lo, "encoder_hi": encoder.hi, "noise_std": data.meta["noise_std"]}
    if params.get("target", "scalar") == "one_hot":
        Y = learner.one_hot(tasks.symbol_index(d_tr), len(tasks.SYMBOLS))
        return Prepared(data, encoder, Y, tasks.symbol_index(d_te), learner.Argmax(), "ser", meta=meta)
    # scalar regression onto the symbol value, decoded to the nearest symbol
    return Prepared(data, encoder, d_tr[:, None], d_te, learner.NearestSymbol(tasks.SYMBOLS), "ser", meta=meta)


def _prep_santa_fe(params: dict, res: ReservoirParams, enc: EncoderParams, training: TrainingParams, seed: int) -> Prepared:
    path = params.get("path")
    n_tr = training.train or tasks.SANTA_FE_TRAIN
    n_te = training.test or tasks.SANTA_FE_TEST
    if path:
        data = tasks.load_santa_fe(path, n_tr, n_te)
    else:
        data = tasks.santa_fe_synthetic_sequence(int(params.get("synthetic_seed", 0)), n_tr, n_te)
    # [0, 256) with N = 256 puts integer v in cell v
    encoder = _encoder(enc, res.N, 0.0, 256.0)
    _, y_tr = data.train
    _, y_te = data.test
    return Prepared(data, encoder, y_tr[:, None], y_te, None, "nmse", meta={"source": data.meta["source"]})


def _prep_iris(params: dict, res: ReservoirParams, enc: EncoderParams, training: TrainingParams, seed: int) -> Prepared:
    data = tasks.load_iris(params.get("path"), seed, training.train or tasks.IRIS_TRAIN)
    _, y_tr = data.train
    _, y_te = data.test
    return Prepared(data, tasks.iris_encoder(), learner.one_hot(y_tr, 3), y_te, learner.Argmax(), "accuracy")


TASKS: dict[str, Callable[..., Prepared]] = {
    "sine_square": _prep_sine_square,
    "channel": _prep_channel,
    "santa_fe": _prep_santa_fe,
    "iris": _prep_iris,
}

TASK_METRICS = {"sine_square": "accuracy", "channel": "ser", "santa_fe": "nmse", "iris": "accuracy"}


def prepare(task: str, params: dict, res: ReservoirParams, enc: EncoderParams, training: TrainingParams, seed: int) -> Prepared:
    if task not in TASKS:
        raise ValueError(f"unknown task {task!r}; expected one of {sorted(TASKS)}")
    return TASKS[task](dict(params), res, enc, training, seed)


def build_config(res: ReservoirParams, encoder) -> ReservoirConfig:
    return ReservoirConfig(
        proj_rule=res.proj_rule,
        mem_rule=res.mem_rule,
        i_p=res.i_p,
        i_m=res.i_m,
        encoder=encoder,
        R=res.R,
        edges=parse_edges(res.edges, res.edge_state),
        mode=res.mode,
        injection=res.injection,
    )


def score(metric: str, predictions: np.ndarray, truth: np.ndarray) -> float:
    if metric == "accuracy":
        return learner.accuracy(predictions, truth)
    if metric == "ser":
        return learner.symbol_error_rate(predictions, truth)
    if metric == "nmse":
        return learner.nmse(truth, predictions)
    if metric == "mse":
        return learner.mse(truth, predictions)
    raise ValueError(f"unknown metric {metric!r}")


def run(
    task: str,
    res: ReservoirParams,
    scheme: ReadoutScheme = BinnedColumnSums(2),
    seed: int = 0,
    params: dict | None = None,
    enc: EncoderParams = EncoderParams(),
    training: TrainingParams = TrainingParams(),
) -> Outcome:
    """Train on the train split, evaluate on the test split."""
    prep = prepare(task, params or {}, res, enc, training, seed)
    config = build_config(res, prep.encoder)
    padded = encode_inputs(config, prep.data.inputs)
    S = reservoir_features(config, scheme, padded)
    split = prep.data.split
    readout = learner.train(S[:split], prep.Y_train, prep.decoder, tol=training.tol, ridge=training.ridge)
    raw = learner.predict(readout, S[split:])
    if prep.decoder is None:
        predictions = raw[:, 0]
    else:
        predictions = learner.decode(readout, raw)
    value = score(prep.metric, predictions, prep.truth_test)
    return Outcome(prep.metric, value, predictions, prep.truth_test, raw, readout, config, dict(prep.meta))


def mean_std(values) -> tuple[float, float]:
    v = np.asarray(values, dtype=float)
    if v.size < 2:
        return float(v.mean()) if v.size else math.nan, 0.0
    return float(v.mean()), float(v.std(ddof=1))


def with_rules(res: ReservoirParams, **changes) -> ReservoirParams:
    return replace(res, **changes)
