"""Compiled inner loops for the reduced inverse calibration matrix.

Entry ``(t, s)`` of the reduced inverse is a product over blocks of block-inverse
entries.  Consecutive blocks are packed into groups of at most
``GROUP_QUBITS`` qubits whose inverse is tabulated once, so each entry costs
one lookup per group instead of one per qubit.  Every row is reduced in a
fixed order, and column partial sums are kept per fixed row chunk, so results
do not depend on the number of threads.
"""
from __future__ import annotations

import contextlib
import warnings

import numba
import numpy as np
from numba import njit, prange

# prefer OpenMP; avoids a noisy fallback when an old TBB is installed
numba.config.THREADING_LAYER_PRIORITY = ["omp", "tbb", "workqueue"]

GROUP_QUBITS = 8
ROW_CHUNKS = 64


def group_blocks(model, group_qubits: int = GROUP_QUBITS):
    """Pack consecutive blocks into groups and tabulate each group's inverse.

    Returns ``(tables, groups)``: ``tables`` has shape ``(G, D, D)`` (zero
    padded) and ``groups[g]`` is the flat qubit list of group ``g``, most
    significant first.
    """
    groups, mats = [], []
    cur_q, cur_m = [], np.ones((1, 1))
    for b in model.blocks:
        if cur_q and len(cur_q) + b.size > group_qubits:
            groups.append(cur_q)
            mats.append(cur_m)
            cur_q, cur_m = [], np.ones((1, 1))
        cur_q = cur_q + list(b.qubits)
        cur_m = np.kron(cur_m, b.inverse)
    groups.append(cur_q)
    mats.append(cur_m)
    dim = max(m.shape[0] for m in mats)
    tables = np.zeros((len(mats), dim, dim))
    for g, m in enumerate(mats):
        tables[g, : m.shape[0], : m.shape[1]] = m
    return tables, groups


def encode(bits: np.ndarray, groups) -> np.ndarray:
    """Reduction table: the sub-index of every bitstring inside every group."""
    codes = np.zeros((bits.shape[0], len(groups)), dtype=np.int64)
    for g, qubits in enumerate(groups):
        col = codes[:, g]
        for q in qubits:
            col <<= 1
            col |= bits[:, q]
    return codes


@njit(parallel=True, cache=True)
def build_matrix(codes, tables, out):
    n_s, n_g = codes.shape
    for t in prange(n_s):
        for s in range(n_s):
            p = 1.0
            for g in range(n_g):
                p *= tables[g, codes[t, g], codes[s, g]]
            out[t, s] = p


@njit(parallel=True, cache=True)
def apply_and_colsums(codes, tables, y, n_chunks):
    """Matrix-free ``x = R y`` plus partial absolute column sums of ``R``."""
    n_s, n_g = codes.shape
    dim = tables.shape[1]
    x = np.zeros(n_s)
    partial = np.zeros((n_chunks, n_s))
    size = (n_s + n_chunks - 1) // n_chunks
    for c in prange(n_chunks):
        lo = c * size
        hi = min(n_s, lo + size)
        rows = np.empty((n_g, dim))
        for t in range(lo, hi):
            for g in range(n_g):
                rows[g, :] = tables[g, codes[t, g], :]
            acc = 0.0
            for s in range(n_s):
                p = 1.0
                for g in range(n_g):
                    p *= rows[g, codes[s, g]]
                acc += p * y[s]
                partial[c, s] += abs(p)
            x[t] = acc
    return x, partial


@contextlib.contextmanager
def threads(n: int | None):
    """Temporarily set the number of worker threads for compiled loops."""
    if n is None:
        yield
        return
    old = numba.get_num_threads()
    n = max(1, min(int(n), numba.config.NUMBA_NUM_THREADS))
    numba.set_num_threads(n)
    try:
        yield
    finally:
        numba.set_num_threads(old)


def warm_up():
    """Compile the kernels on a tiny input (useful before timing)."""
    codes = np.zeros((2, 1), dtype=np.int64)
    codes[1, 0] = 1
    tables = np.eye(2)[None]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        build_matrix(codes, tables, np.empty((2, 2)))
        apply_and_colsums(codes, tables, np.ones(2), 2)
