import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from reca.encoding import encode_rows
from reca.tasks import (
    CHANNEL_TAPS,
    IRIS_LABELS,
    SQUARE,
    SYMBOLS,
    ChannelParams,
    DataError,
    LabeledSequence,
    ParseError,
    bundled_iris_path,
    channel_equalization,
    channel_linear,
    channel_nonlinear,
    iris_encoder,
    load_iris,
    load_santa_fe,
    parse_iris,
    parse_santa_fe,
    santa_fe_sequence,
    santa_fe_synthetic_sequence,
    sine_square,
    stratified_split,
    symbol_index,
    synthetic_santa_fe,
)


# -- sine / square


def test_sine_square_defaults():
    seq = sine_square()
    assert len(seq) == 4000
    assert seq.split == 2000
    assert set(np.unique(seq.targets)) <= {0, 1}
    assert np.abs(seq.inputs).max() == pytest.approx(1.0)


def test_all_sine_zero_crossings():
    seq = sine_square(num_waves=3, kinds=0)
    assert seq.inputs[0] == 0.0 and seq.inputs[10] == 0.0
    assert seq.inputs[5] == pytest.approx(1.0)
    assert seq.inputs[15] == pytest.approx(-1.0)


def test_square_wave_shape():
    seq = sine_square(num_waves=1, kinds=SQUARE)
    assert seq.inputs.tolist() == [1.0] * 11 + [-1.0] * 9
    assert (seq.targets == 1).all()


@given(st.integers(0, 10_000))
def test_sine_square_deterministic_and_wave_labels(seed):
    a = sine_square(num_waves=30, seed=seed)
    b = sine_square(num_waves=30, seed=seed)
    assert np.array_equal(a.inputs, b.inputs) and np.array_equal(a.targets, b.targets)
    waves = a.targets.reshape(30, 20)
    assert (waves == waves[:, :1]).all()


def test_sine_square_validation():
    with pytest.raises(ValueError):
        sine_square(points_per_wave=1)


# -- channel


def test_channel_steady_state():
    # every tap sees +1 once the window is full
    q_ss = sum(CHANNEL_TAPS)
    assert q_ss == pytest.approx(1.161)
    d = np.ones(30)
    q = channel_linear(d)
    assert q[10:-2] == pytest.approx(np.full(18, 1.161))
    u = channel_nonlinear(q)
    assert u[15] == pytest.approx(1.161 + 0.036 * 1.161**2 - 0.011 * 1.161**3)


def test_channel_linear_taps():
    d = np.zeros(20)
    d[10] = 1.0  # impulse; q(n) picks up tap for d(n - shift)
    q = channel_linear(d)
    assert q[8:18].tolist() == pytest.approx(list(CHANNEL_TAPS))
    assert q[:8].sum() == 0 and q[18:].sum() == 0


def test_noise_free_is_deterministic():
    a = channel_equalization(200, 50, ChannelParams(math.inf), seed=1)
    assert np.array_equal(a.inputs, channel_nonlinear(channel_linear(a.targets)))
    b = channel_equalization(200, 50, ChannelParams(math.inf), seed=1)
    assert np.array_equal(a.inputs, b.inputs)


def test_channel_shapes_and_symbols():
    seq = channel_equalization(1000, 100, seed=3)
    assert len(seq) == 1100 and seq.split == 1000
    assert set(np.unique(seq.targets)) == set(SYMBOLS)
    assert symbol_index([-3.0, 3.0, 1.0]).tolist() == [0, 3, 2]
    with pytest.raises(ValueError):
        channel_equalization(0, 10)
    with pytest.raises(ValueError):
        ChannelParams(float("nan"))


@pytest.mark.parametrize("snr", [28.0, 12.0])
def test_empirical_snr(snr):
    seq = channel_equalization(99_000, 1_000, ChannelParams(snr), seed=11)
    clean = channel_nonlinear(channel_linear(seq.targets))
    noise = seq.inputs - clean
    measured = 10 * math.log10(np.mean(clean**2) / np.mean(noise**2))
    assert abs(measured - snr) < 0.5


def test_noise_free_brute_force_inversion():
    # exhaustive search over all symbol strings of length 6 recovers the truth
    rng = np.random.default_rng(4)
    cands = np.array(list(itertools.product(SYMBOLS, repeat=6)))
    outs = np.stack([channel_nonlinear(channel_linear(c)) for c in cands])
    for _ in range(20):
        d = rng.choice(SYMBOLS, 6)
        u = channel_nonlinear(channel_linear(d))
        err = np.abs(outs - u).max(axis=1)
        best = np.flatnonzero(err < 1e-9)
        assert len(best) == 1
        assert np.array_equal(cands[best[0]], d)


# -- Santa Fe


def test_santa_fe_pairs(tmp_path):
    assert parse_santa_fe("3\n7\n1\n").tolist() == [3, 7, 1]
    seq = santa_fe_sequence([3, 7, 1], n_train=1, n_test=1)
    assert seq.inputs.tolist() == [3, 7] and seq.targets.tolist() == [7, 1]


def test_santa_fe_parse_errors():
    with pytest.raises(ParseError, match=":2:"):
        parse_santa_fe("3\n256\n1\n")
    with pytest.raises(ParseError, match=":3:"):
        parse_santa_fe("3\n2\nx\n")
    with pytest.raises(ParseError):
        parse_santa_fe("-1\n")


def test_santa_fe_size_error(tmp_path):
    p = tmp_path / "short.dat"
    p.write_text("\n".join(["5"] * 1200))
    with pytest.raises(DataError, match="1201"):
        load_santa_fe(p)
    p.write_text("\n".join(str(i % 256) for i in range(1300)))
    seq = load_santa_fe(p)
    assert len(seq) == 1200 and seq.split == 1000
    assert seq.meta["canonical"]


def test_synthetic_santa_fe():
    v = synthetic_santa_fe(1201, seed=0)
    assert v.size == 1201
    assert v.min() == 0 and v.max() == 255
    assert np.array_equal(v, np.round(v))
    assert np.array_equal(v, synthetic_santa_fe(1201, seed=0))
    seq = santa_fe_synthetic_sequence()
    assert not seq.meta["canonical"]
    assert np.array_equal(seq.inputs[1:], seq.targets[:-1])


# -- iris


def test_iris_encoder_width():
    enc = iris_encoder()
    assert [p.size for p in enc.parts] == [37, 25, 60, 25]
    assert enc.width == 147


def test_iris_sample_indices():
    x = encode_rows(iris_encoder(), [[5.1, 3.5, 1.4, 0.2]])[0]
    assert np.flatnonzero(x).tolist() == [8, 52, 66, 123]


def test_iris_round_binning_matches_oracle():
    X, _ = parse_iris(bundled_iris_path().read_text())
    enc = iris_encoder()
    rows = encode_rows(enc, X)
    offsets = np.cumsum([0] + [p.size for p in enc.parts])[:-1]
    lows = np.array([4.3, 2.0, 1.0, 0.1])
    expect = offsets + np.round((X - lows) / 0.1).astype(int)
    assert np.array_equal(np.argwhere(rows)[:, 1].reshape(150, 4), expect)


def test_bundled_iris():
    X, y = parse_iris(bundled_iris_path().read_text())
    assert X.shape == (150, 4)
    assert np.bincount(y).tolist() == [50, 50, 50]
    lo, hi = X.min(axis=0), X.max(axis=0)
    assert lo.tolist() == [4.3, 2.0, 1.0, 0.1]
    assert hi.tolist() == [7.9, 4.4, 6.9, 2.5]


def test_iris_split():
    seq = load_iris(seed=5)
    assert (len(seq.train[0]), len(seq.test[0])) == (112, 38)
    counts = np.bincount(seq.train[1], minlength=3)
    assert counts.max() - counts.min() <= 1
    assert np.array_equal(load_iris(seed=5).inputs, seq.inputs)


@given(st.integers(0, 10_000))
def test_stratified_split_partition(seed):
    labels = np.repeat([0, 1, 2], 50)
    tr, te = stratified_split(labels, 112, np.random.default_rng(seed))
    assert sorted(np.concatenate([tr, te]).tolist()) == list(range(150))
    per = np.bincount(labels[tr], minlength=3)
    assert per.sum() == 112 and per.min() >= 37 and per.max() <= 38


def test_iris_data_errors(tmp_path):
    text = bundled_iris_path().read_text()
    lines = [s for s in text.splitlines() if s.strip()]
    with pytest.raises(DataError, match="150"):
        parse_iris("\n".join(lines[:-1]))
    bad = lines[:]
    bad[3] = bad[3].rsplit(",", 1)[0] + ",Iris-unknown"
    with pytest.raises(DataError, match="unknown label"):
        parse_iris("\n".join(bad))
    assert IRIS_LABELS[0] in lines[0]


def test_labeled_sequence_invariants():
    with pytest.raises(DataError):
        LabeledSequence(np.zeros(3), np.zeros(2), 1)
    with pytest.raises(DataError):
        LabeledSequence(np.zeros(3), np.zeros(3), 4)
