"""Ideal distributions, forward readout noise and seeded shot sampling.

Nothing here simulates circuits.  GHZ, MQC and modified-Grover experiments
are represented by their ideal outcome distributions, which are then pushed
through a tensor readout model and sampled with a finite number of shots.
Randomness always comes from a counter-based generator keyed by a tuple of
integers, so any grid point of an experiment can be regenerated on its own.
"""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from . import _config
from ._blockwise import apply_blocks
from .distributions import SparseDistribution, bits_array
from .errors import DomainError, InputError, WidthMismatchError
from .noise_model import TensorNoiseModel
from .observables import MqcSignalSet, uniform_angles

Seed = int | Sequence[int]


def make_rng(seed: Seed) -> np.random.Generator:
    """Philox generator keyed by an integer or a tuple of non-negative integers."""
    key = [int(seed)] if np.isscalar(seed) else [int(s) for s in seed]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(key)))


def ghz_ideal(n: int) -> SparseDistribution:
    if n < 2:
        raise DomainError("a GHZ state needs at least two qubits")
    return SparseDistribution({"0" * n: 0.5, "1" * n: 0.5}, n, probability=True)


def apply_noise_exact(
    p: SparseDistribution, model: TensorNoiseModel, support_cap: int | None = None, tol: float = 1e-12
) -> SparseDistribution:
    """Noisy distribution ``A p`` computed block by block on the sparse support.

    Entries below ``tol`` are dropped after each block.
    """
    if p.width != model.width:
        raise WidthMismatchError(f"distribution width {p.width} does not match model width {model.width}")
    support_cap = _config.cap("SUPPORT_CAP") if support_cap is None else support_cap
    out = apply_blocks(dict(p.items()), [(b.qubits, b.matrix) for b in model.blocks], lambda v: v >= tol, support_cap)
    return SparseDistribution(out, p.width, p.shots)


def sample_counts(p: SparseDistribution, shots: int, seed: Seed) -> SparseDistribution:
    """Multinomial draw of ``shots`` outcomes from ``p``."""
    if shots < 1:
        raise DomainError("need at least one shot")
    if not p.is_probability:
        raise InputError("can only sample from a probability distribution")
    probs = p.vector()
    counts = make_rng(seed).multinomial(shots, probs / probs.sum())
    return SparseDistribution.from_counts({k: int(c) for k, c in zip(p.subspace(), counts) if c})


def sample_noisy_counts(p: SparseDistribution, model: TensorNoiseModel, shots: int, seed: Seed) -> SparseDistribution:
    """Shot-by-shot sampling of ``A p``: draw ideal outcomes, then corrupt each block.

    Equivalent in distribution to ``sample_counts(apply_noise_exact(p, model))``
    but never enumerates the noisy support, so it works for any width.
    """
    if p.width != model.width:
        raise WidthMismatchError(f"distribution width {p.width} does not match model width {model.width}")
    if shots < 1:
        raise DomainError("need at least one shot")
    rng = make_rng(seed)
    probs = p.vector()
    picks = rng.choice(len(p), size=shots, p=probs / probs.sum())
    bits = bits_array(p.subspace(), p.width)[picks].copy()
    for b in model.blocks:
        qubits = list(b.qubits)
        j = np.zeros(shots, dtype=np.int64)
        for q in qubits:
            j = (j << 1) | bits[:, q]
        cdf = np.cumsum(b.matrix, axis=0)[:, j].T  # (shots, 2^k)
        u = rng.random(shots)[:, None]
        i = np.minimum((u >= cdf).sum(axis=1), cdf.shape[1] - 1)
        for pos, q in enumerate(qubits):
            bits[:, q] = (i >> (len(qubits) - 1 - pos)) & 1
    rows, counts = np.unique(bits, axis=0, return_counts=True)
    labels = ["".join(map(str, r)) for r in rows.tolist()]
    return SparseDistribution.from_counts(dict(zip(labels, counts.tolist())))


def mqc_ideal_signals(n: int, n_angles: int | None = None) -> MqcSignalSet:
    """Noiseless overlap signals ``cos^2(n phi / 2)`` of an ``n``-qubit GHZ state."""
    n_angles = 2 * n + 2 if n_angles is None else n_angles
    angles = uniform_angles(n_angles)
    return MqcSignalSet(angles, np.cos(n * angles / 2) ** 2, n)


def mqc_ideal_distributions(n: int, n_angles: int | None = None) -> list[SparseDistribution]:
    """Outcome distributions of the MQC circuits, one per angle.

    After the phase rotation the GHZ preparation is undone, leaving
    ``cos(n phi/2)|0...0> + i sin(n phi/2)|10...0>``; the all-zeros weight is
    the overlap signal.
    """
    signals = mqc_ideal_signals(n, n_angles)
    flag = "1" + "0" * (n - 1)
    return [SparseDistribution({"0" * n: s, flag: 1.0 - s}, n) for s in signals.signals]


def residual_strings(n: int, count: int, seed: Seed) -> list[str]:
    """``count`` distinct pseudo-random ``(n+1)``-bit strings ending in 1."""
    if count < 1 or count > 2**n:
        raise DomainError(f"residual support must lie in [1, 2^{n}]")
    key = [int(seed)] if np.isscalar(seed) else [int(s) for s in seed]
    rng = make_rng(key + [n])
    if n <= 62:
        prefixes = rng.choice(2**n, size=count, replace=False)
        return [format(int(x), f"0{n}b") + "1" for x in prefixes]
    out: dict[str, None] = {}
    while len(out) < count:
        out["".join(map(str, rng.integers(0, 2, n))) + "1"] = None
    return list(out)


def grover_ideal(n: int, m: int, theta: float, residual_support: int = 64, seed: Seed = 0) -> SparseDistribution:
    """Outcome distribution after ``m`` modified-Grover iterations on ``n + 1`` qubits.

    The all-zeros string has weight ``cos^2(2 m theta)``; the rest is spread
    evenly over a fixed residual support that depends only on ``n`` and ``seed``.
    """
    if m < 1:
        raise DomainError("need at least one iteration")
    p0 = math.cos(2 * m * theta) ** 2
    residual = residual_strings(n, residual_support, seed)
    entries = {s: (1.0 - p0) / residual_support for s in residual}
    entries["0" * (n + 1)] = p0
    return SparseDistribution(entries, n + 1)


def target_amplitude(n: int, b_max: float) -> tuple[float, float, float]:
    """Discretized and continuous values of ``(1/b) int_0^b sin^2``.

    Returns ``(S, I, theta)`` with ``theta = arcsin(sqrt(S))``, using the
    uniform weight ``2^-n`` for every grid point.
    """
    if b_max <= 0 or n < 1:
        raise DomainError("need b_max > 0 and n >= 1")
    integral = (b_max / 2 - math.sin(2 * b_max) / 4) / b_max
    x = np.arange(2**n)
    s = float(np.mean(np.sin((x + 0.5) * b_max / 2**n) ** 2))
    return s, integral, math.asin(math.sqrt(s))
