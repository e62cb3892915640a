import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from reca import ca
from reca._packed import n_words, pack, rule_masks, step_words, unpack

from oracles import naive_evolve, naive_step

rules = st.integers(0, 255)
states = st.lists(st.integers(0, 1), min_size=3, max_size=140)


def test_rule_table_matches_bits():
    for n in range(256):
        r = ca.Rule(n)
        assert all(r.table[k] == (n >> k) & 1 for k in range(8))
        assert ca.Rule.from_table(r.table) == r


def test_rule_rejects_out_of_range():
    with pytest.raises(ValueError):
        ca.Rule(256)
    with pytest.raises(ValueError):
        ca.Rule(-1)


def test_rule_output_examples():
    # 45 = 0b00101101, bit 0 set
    assert ca.rule_output(45, 0, 0, 0) == 1
    for code in range(8):
        left, c, r = (code >> 2) & 1, (code >> 1) & 1, code & 1
        assert ca.rule_output(0, left, c, r) == 0
        assert ca.rule_output(204, left, c, r) == c


@pytest.mark.parametrize(
    "rule,before,after",
    [(16, "00100", "00010"), (2, "00100", "01000"), (16, "00001", "00000")],
)
def test_shift_steps(rule, before, after):
    assert "".join(map(str, naive_step(rule, [int(c) for c in before]))) == after
    out = ca.step(rule, before, ca.Fixed())
    assert "".join(map(str, out)) == after


def test_width_below_three_rejected():
    with pytest.raises(ca.InvalidWidthError):
        ca.step(30, "01")
    with pytest.raises(ca.InvalidWidthError):
        ca.evolve(30, "1", 3)


def test_evolve_rule0_clears_interior():
    for start in ("11111", "01110", "10101"):
        tr = ca.evolve(0, start, 1, ca.Fixed())
        assert not tr.rows[1].any()


def test_nonzero_fixed_edge_state():
    tr = ca.evolve(204, "00100", 3, ca.Fixed(1))
    assert tr.rows[1:].tolist() == [[1, 0, 1, 0, 1]] * 3


def test_trace_shape():
    tr = ca.evolve(110, "0001000", 5)
    assert tr.iteration_count == 5
    assert tr.rows.shape == (6, 7)
    assert tr.rows[0].tolist() == [0, 0, 0, 1, 0, 0, 0]


@pytest.mark.parametrize("p,k", [(1, 3), (5, 10), (20, 40)])
def test_rule16_moves_single_one(p, k):
    width = 64
    x = np.zeros(width, np.uint8)
    x[p] = 1
    tr = ca.evolve(16, x, k, ca.Fixed())
    assert np.flatnonzero(tr.final).tolist() == [p + k]
    assert np.array_equal(tr.rows, naive_evolve(16, x, k))


def test_rule110_grows_left_only():
    width = 61
    x = np.zeros(width, np.uint8)
    x[30] = 1
    tr = ca.evolve(110, x, 25, ca.Fixed())
    assert np.array_equal(tr.rows, naive_evolve(110, x, 25))
    for t, row in enumerate(tr.rows):
        ones = np.flatnonzero(row)
        assert ones.max() <= 31
        assert ones.min() == 30 - t  # one cell further left each step
    # structured, not a solid block
    assert 0 < tr.final.sum() < 26


@given(rules, states, st.booleans())
def test_step_equals_naive_oracle(rule, cells, cyclic):
    edges = ca.Cyclic() if cyclic else ca.Fixed()
    assert ca.step(rule, cells, edges).tolist() == naive_step(rule, cells, cyclic)


def test_simultaneity_1000_random_states():
    rng = np.random.default_rng(1)
    for _ in range(1000):
        rule = int(rng.integers(256))
        width = int(rng.integers(3, 200))
        x = rng.integers(0, 2, width).astype(np.uint8)
        cyclic = bool(rng.integers(2))
        expect = naive_step(rule, x, cyclic)
        assert ca.step(rule, x, ca.Cyclic() if cyclic else ca.Fixed()).tolist() == expect
        out = np.empty(n_words(width), np.uint64)
        step_words(pack(x), out, rule_masks(rule), width, cyclic)
        assert unpack(out, width).tolist() == expect


@given(rules, states)
def test_determinism(rule, cells):
    assert np.array_equal(ca.step(rule, cells), ca.step(rule, cells))


@given(rules, states, st.integers(0, 30))
def test_fixed_edges_stay_zero(rule, cells, iters):
    tr = ca.evolve(rule, cells, iters, ca.Fixed(0))
    assert not tr.rows[1:, 0].any()
    assert not tr.rows[1:, -1].any()


@given(rules, states, st.integers(0, 200))
def test_cyclic_rotation_equivariance(rule, cells, k):
    x = np.array(cells, np.uint8)
    k %= x.size
    lhs = ca.step(rule, np.roll(x, k), ca.Cyclic())
    rhs = np.roll(ca.step(rule, x, ca.Cyclic()), k)
    assert np.array_equal(lhs, rhs)


@given(states)
def test_identity_and_complement_rules(cells):
    x = np.array(cells, np.uint8)
    assert np.array_equal(ca.step(204, x)[1:-1], x[1:-1])
    assert np.array_equal(ca.step(51, x)[1:-1], 1 - x[1:-1])


@given(st.integers(3, 120), st.data())
def test_shift_rules_move_isolated_ones(width, data):
    p = data.draw(st.integers(1, width - 2))
    x = np.zeros(width, np.uint8)
    x[p] = 1
    right = ca.step(16, x)
    left = ca.step(2, x)
    assert np.flatnonzero(right).tolist() == ([p + 1] if p + 1 < width - 1 else [])
    assert np.flatnonzero(left).tolist() == ([p - 1] if p - 1 > 0 else [])


def test_mirror_examples():
    assert ca.mirror_rule(2).number == 16
    assert ca.mirror_rule(204).number == 204
    for n in range(256):
        assert ca.mirror_rule(ca.mirror_rule(n)).number == n


def test_mirror_is_spatial_reflection():
    rng = np.random.default_rng(3)
    for n in range(256):
        x = rng.integers(0, 2, 40).astype(np.uint8)
        assert np.array_equal(ca.step(ca.mirror_rule(n), x[::-1]), ca.step(n, x)[::-1])


def test_complement_examples():
    assert ca.complement_rule(0).number == 255
    assert ca.complement_rule(204).number == 204
    for n in range(256):
        assert ca.complement_rule(ca.complement_rule(n)).number == n


def test_complement_conjugates_dynamics():
    rng = np.random.default_rng(4)
    for n in range(256):
        x = rng.integers(0, 2, 40).astype(np.uint8)
        c = ca.complement_rule(n)
        assert np.array_equal(ca.step(c, 1 - x, ca.Cyclic()), 1 - ca.step(n, x, ca.Cyclic()))


def test_equivalence_classes():
    classes = ca.equivalence_classes()
    assert len(classes) == 88
    assert sorted(n for c in classes for n in c) == list(range(256))
    for c in classes:
        for n in c:
            assert ca.mirror_rule(n).number in c
            assert ca.complement_rule(n).number in c
    (c204,) = [c for c in classes if 204 in c]
    assert c204 == {204}
    assert any({2, 16} <= c for c in classes)


def test_categories():
    assert ca.rule_category(110) == "IV"
    assert ca.rule_category(30) == "III"
    assert ca.rule_category(218) == "II"
    assert ca.rule_category(252) == "I"
    assert ca.rule_category(90) == ca.UNCLASSIFIED
    assert ca.rule_category(16) == ca.UNCLASSIFIED


def test_parse_edges():
    assert ca.parse_edges("fixed") == ca.Fixed(0)
    assert ca.parse_edges("cyclic") == ca.Cyclic()
    with pytest.raises(ValueError):
        ca.parse_edges("mirror")
