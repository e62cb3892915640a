"""Bit-packed ECA kernels (numba).

Cell ``j`` lives in word ``j >> 6`` at bit ``j & 63``; bits past ``L`` in the
last word are always zero. A rule is applied with a three-level multiplexer
over (right, center, left) so one word update costs ~20 bitwise ops.
"""

from __future__ import annotations

import numba as nb
import numpy as np

ONES = np.uint64(0xFFFFFFFFFFFFFFFF)

INJECT_XOR, INJECT_OR, INJECT_AND = 0, 1, 2


def n_words(width: int) -> int:
    return (width + 63) >> 6


def rule_masks(number: int) -> np.ndarray:
    return np.array([ONES if (number >> k) & 1 else np.uint64(0) for k in range(8)], dtype=np.uint64)


def pack(cells: np.ndarray) -> np.ndarray:
    """Pack the last axis of a 0/1 array into uint64 words."""
    cells = np.asarray(cells, dtype=np.uint8)
    width = cells.shape[-1]
    w = n_words(width)
    padded = np.zeros(cells.shape[:-1] + (w * 64,), dtype=np.uint8)
    padded[..., :width] = cells
    b = np.packbits(padded, axis=-1, bitorder="little")
    return b.view("<u8").reshape(cells.shape[:-1] + (w,)).astype(np.uint64)


def unpack(words: np.ndarray, width: int) -> np.ndarray:
    words = np.ascontiguousarray(words, dtype="<u8")
    b = words.view(np.uint8).reshape(words.shape[:-1] + (words.shape[-1] * 8,))
    return np.unpackbits(b, axis=-1, bitorder="little")[..., :width]


@nb.njit(cache=True, inline="always")
def _apply(m, left, c, right):
    nr = ~right
    f00 = (m[1] & right) | (m[0] & nr)
    f01 = (m[3] & right) | (m[2] & nr)
    f10 = (m[5] & right) | (m[4] & nr)
    f11 = (m[7] & right) | (m[6] & nr)
    nc = ~c
    g0 = (c & f01) | (nc & f00)
    g1 = (c & f11) | (nc & f10)
    return (left & g1) | (~left & g0)


@nb.njit(cache=True)
def step_words(x, out, masks, width, cyclic, edge_state=0):
    """One synchronous update of packed state ``x`` into ``out``."""
    w = x.shape[0]
    one = np.uint64(1)
    last = width - 1
    last_word = last >> 6
    last_bit = np.uint64(last & 63)
    if last_bit == np.uint64(63):
        top = ONES
    else:
        top = (one << (last_bit + one)) - one
    cell0 = x[0] & one
    cell_last = (x[last_word] >> last_bit) & one
    for i in range(w):
        c = x[i]
        left = c << one
        if i > 0:
            left |= x[i - 1] >> np.uint64(63)
        elif cyclic:
            left |= cell_last
        right = c >> one
        if i < w - 1:
            right |= (x[i + 1] & one) << np.uint64(63)
        elif cyclic:
            right |= cell0 << last_bit
        v = _apply(masks, left, c, right)
        if i == w - 1:
            v &= top
        out[i] = v
    if not cyclic:
        e = np.uint64(edge_state)
        out[0] = (out[0] & ~one) | e
        keep = one << last_bit
        out[last_word] = (out[last_word] & ~keep) | (e << last_bit)


@nb.njit(cache=True)
def evolve_words(x, masks, iterations, width, cyclic, edge_state=0):
    a = x.copy()
    b = np.empty_like(a)
    for _ in range(iterations):
        step_words(a, b, masks, width, cyclic, edge_state)
        a, b = b, a
    return a


@nb.njit(cache=True, inline="always")
def _unpack_row(x, row, width):
    one = np.uint64(1)
    for j in range(width):
        row[j] = np.uint8((x[j >> 6] >> np.uint64(j & 63)) & one)


@nb.njit(cache=True)
def run_projection(inputs, carry0, proj_masks, mem_masks, i_p, i_m, width, cyclic, edge_state, elm, inject_op):
    """Run a reservoir over packed inputs.

    Returns the projection traces, shape ``(K, i_p + 1, width)`` with row 0 the
    injected state, and the carry after the last input.
    """
    k_total, w = inputs.shape
    traces = np.empty((k_total, i_p + 1, width), dtype=np.uint8)
    carry = carry0.copy()
    a = np.empty(w, dtype=np.uint64)
    b = np.empty(w, dtype=np.uint64)
    for k in range(k_total):
        for i in range(w):
            if elm:
                s = carry0[i]
            else:
                s = carry[i]
            u = inputs[k, i]
            if inject_op == 0:
                a[i] = s ^ u
            elif inject_op == 1:
                a[i] = s | u
            else:
                a[i] = s & u
        _unpack_row(a, traces[k, 0], width)
        for t in range(i_p):
            step_words(a, b, proj_masks, width, cyclic, edge_state)
            a, b = b, a
            _unpack_row(a, traces[k, t + 1], width)
        if not elm:
            for t in range(i_m):
                step_words(a, b, mem_masks, width, cyclic, edge_state)
                a, b = b, a
            carry[:] = a
    if elm:
        carry[:] = carry0
    return traces, carry


@nb.njit(cache=True)
def run_binned(inputs, carry0, proj_masks, mem_masks, i_p, i_m, width, cyclic, edge_state, elm, inject_op, bins):
    """Like :func:`run_projection` but accumulate per-bin column counts of
    projection rows 1..i_p directly, shape ``(K, bins, width)``."""
    k_total, w = inputs.shape
    per_bin = i_p // bins
    counts = np.zeros((k_total, bins, width), dtype=np.uint16)
    carry = carry0.copy()
    a = np.empty(w, dtype=np.uint64)
    b = np.empty(w, dtype=np.uint64)
    one = np.uint64(1)
    for k in range(k_total):
        for i in range(w):
            s = carry0[i] if elm else carry[i]
            u = inputs[k, i]
            if inject_op == 0:
                a[i] = s ^ u
            elif inject_op == 1:
                a[i] = s | u
            else:
                a[i] = s & u
        for t in range(i_p):
            step_words(a, b, proj_masks, width, cyclic, edge_state)
            a, b = b, a
            row = counts[k, t // per_bin]
            for i in range(w):
                v = a[i]
                base = i << 6
                while v:
                    # iterate set bits only; states are typically sparse
                    low = v & (~v + one)
                    j = base + _ctz(low)
                    row[j] += 1
                    v ^= low
        if not elm:
            for t in range(i_m):
                step_words(a, b, mem_masks, width, cyclic, edge_state)
                a, b = b, a
            carry[:] = a
    if elm:
        carry[:] = carry0
    return counts, carry


@nb.njit(cache=True, inline="always")
def _ctz(low):
    # index of the single set bit in ``low``
    n = 0
    if (low & np.uint64(0xFFFFFFFF)) == 0:
        n += 32
        low >>= np.uint64(32)
    if (low & np.uint64(0xFFFF)) == 0:
        n += 16
        low >>= np.uint64(16)
    if (low & np.uint64(0xFF)) == 0:
        n += 8
        low >>= np.uint64(8)
    if (low & np.uint64(0xF)) == 0:
        n += 4
        low >>= np.uint64(4)
    if (low & np.uint64(0x3)) == 0:
        n += 2
        low >>= np.uint64(2)
    if (low & np.uint64(0x1)) == 0:
        n += 1
    return n
