"""Independent brute-force references used by the tests."""

import numpy as np


def naive_step(number, cells, cyclic=False, edge_state=0):
    """Per-cell evaluation on a frozen copy of the previous row; fixed edge
    cells are set to ``edge_state``."""
    prev = [int(c) for c in cells]
    n = len(prev)
    out = list(prev)
    for j in range(n):
        if not cyclic and (j == 0 or j == n - 1):
            out[j] = edge_state
            continue
        left = prev[(j - 1) % n]
        right = prev[(j + 1) % n]
        code = left * 4 + prev[j] * 2 + right
        out[j] = (number >> code) & 1
    return out


def naive_evolve(number, cells, iterations, cyclic=False):
    rows = [list(map(int, cells))]
    for _ in range(iterations):
        rows.append(naive_step(number, rows[-1], cyclic))
    return np.array(rows, dtype=np.uint8)


def naive_reservoir(proj, mem, i_p, i_m, padded_inputs, cyclic=False, elm=False):
    """Projection traces of a two-rule reservoir, list-based."""
    width = len(padded_inputs[0])
    carry = [0] * width
    traces = []
    for u in padded_inputs:
        x = [a ^ int(b) for a, b in zip(carry, u)]
        rows = naive_evolve(proj, x, i_p, cyclic)
        traces.append(rows)
        m = naive_evolve(mem, rows[-1], i_m, cyclic)[-1].tolist()
        carry = [0] * width if elm else m
    return np.array(traces)


def brute_lstsq_min_norm(S, Y):
    """Minimum-norm least squares from the normal equations on the row space."""
    S = np.asarray(S, float)
    # S^+ = S^T (S S^T)^+ for full-row-rank wide S, or (S^T S)^-1 S^T for tall full-column-rank S
    if S.shape[0] >= S.shape[1]:
        return np.linalg.solve(S.T @ S, S.T @ Y)
    return S.T @ np.linalg.solve(S @ S.T, Y)
