import itertools

import numpy as np
import pytest

from sparseqrem.noise_model import LocalCalibration, TensorNoiseModel


def random_stochastic(rng, k, pmax=0.1):
    """Column-stochastic 2^k x 2^k matrix with off-diagonal mass at most ``pmax`` per column."""
    d = 2**k
    m = rng.random((d, d))
    np.fill_diagonal(m, 0.0)
    m *= rng.uniform(0, pmax) / m.sum(axis=0)
    np.fill_diagonal(m, 1.0 - m.sum(axis=0))
    return m


def random_model(rng, n, max_block=1, pmax=0.1, shuffle=False):
    """Random tensor model over ``n`` qubits, optionally with multi-qubit blocks in scrambled order."""
    qubits = list(range(n))
    if shuffle:
        rng.shuffle(qubits)
    blocks = []
    while qubits:
        k = int(rng.integers(1, max_block + 1))
        chunk, qubits = qubits[:k], qubits[k:]
        if max_block == 1:
            p01, p10 = rng.uniform(0, pmax, 2)
            m = np.array([[1 - p10, p01], [p10, 1 - p01]])
        else:
            m = random_stochastic(rng, len(chunk), pmax)
        blocks.append(LocalCalibration(tuple(chunk), m))
    return TensorNoiseModel(tuple(blocks), n)


def dense_oracle(model):
    """Dense calibration matrix built entry by entry from the block definitions."""
    n = model.width
    labels = ["".join(b) for b in itertools.product("01", repeat=n)]
    a = np.ones((2**n, 2**n))
    for blk in model.blocks:
        sub = np.array([int("".join(s[q] for q in blk.qubits), 2) for s in labels])
        a *= blk.matrix[np.ix_(sub, sub)]
    return a, labels


def simplex_oracle(v):
    """Euclidean projection onto the probability simplex by sort-and-threshold."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    rho = np.nonzero(u * np.arange(1, len(v) + 1) > css - 1)[0][-1]
    tau = (css[rho] - 1) / (rho + 1)
    return np.maximum(v - tau, 0.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
