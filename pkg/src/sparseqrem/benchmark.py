"""Timing helpers for the mitigation pipeline."""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Iterable

import numpy as np

from . import _kernels
from .baselines import rigorous_mitigate
from .distributions import SparseDistribution
from .errors import DomainError
from .mitigator import mitigate
from .noise_model import synth_uniform
from .simulate import ghz_ideal, sample_noisy_counts


@dataclass
class Timing:
    kind: str
    n: int
    subspace_size: int
    method: str
    inverse_s: float
    correction_s: float
    projection_s: float
    total_s: float


def synthetic_sparse(n: int, size: int, noise: float = 0.05, seed: int = 0) -> SparseDistribution:
    """Noisy-GHZ counts trimmed to exactly ``size`` distinct outcomes.

    Outcomes are ranked by count (ties broken lexicographically) and the top
    ``size`` kept.
    """
    model = synth_uniform(n, noise, noise)
    shots = 2 * size
    while True:
        counts = sample_noisy_counts(ghz_ideal(n), model, shots, (seed, shots)).counts()
        if len(counts) >= size:
            break
        if shots > 2**24:
            raise DomainError(f"could not reach {size} distinct outcomes at n={n}")
        shots *= 2
    kept = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:size]
    return SparseDistribution.from_counts(dict(kept))


def time_proposed(y: SparseDistribution, model, method: str, threads: int | None = None, kind: str = "size") -> Timing:
    rep = mitigate(y, model, method, matrix_free=True, threads=threads)
    e = rep.elapsed
    return Timing(kind, y.width, len(y), method, e["inverse"], e["correction"], e["projection"], e["total"])


def time_rigorous(y: SparseDistribution, model, kind: str = "qubits") -> Timing:
    rep = rigorous_mitigate(y, model)
    e = rep.elapsed
    return Timing(kind, y.width, 2**y.width, "rigorous", e["inverse"], e["correction"], e["projection"], e["total"])


def scaling_by_size(
    n: int = 65,
    sizes: Iterable[int] = (1024, 2048, 4096, 8192),
    noise: float = 0.05,
    threads: int | None = None,
    repeats: int = 3,
    min_time: float = 0.5,
) -> list[Timing]:
    """Best timings of the least-norm pipeline at fixed ``n``.

    Each size runs at least ``repeats`` times and until ``min_time`` seconds
    have been spent on it, as timeit does; the fastest run is kept, which
    filters out interference from other processes on a shared machine.
    """
    _kernels.warm_up()
    model = synth_uniform(n, noise, noise)
    rows = []
    for size in sizes:
        y = synthetic_sparse(n, size, noise)
        runs = []
        while len(runs) < repeats or sum(t.total_s for t in runs) < min_time:
            runs.append(time_proposed(y, model, "least_norm", threads))
        rows.append(min(runs, key=lambda t: t.total_s))
    return rows


def scaling_by_qubits(
    qubits: Iterable[int], shots: int = 8192, noise: float = 0.03, rigorous_max_n: int = 14, seed: int = 0, threads: int | None = None
) -> list[Timing]:
    """Timings on sampled noisy GHZ data for the proposed methods and, for small ``n``, exact inversion."""
    _kernels.warm_up()
    rows = []
    for n in qubits:
        model = synth_uniform(n, noise, noise)
        y = sample_noisy_counts(ghz_ideal(n), model, shots, (seed, n))
        for method in ("delta", "least_norm"):
            rows.append(time_proposed(y, model, method, threads, kind="qubits"))
        if n <= rigorous_max_n:
            rows.append(time_rigorous(y, model))
    return rows


def fit_loglog_slope(xs, ys) -> float:
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def as_rows(timings: Iterable[Timing]) -> list[dict]:
    return [asdict(t) for t in timings]

