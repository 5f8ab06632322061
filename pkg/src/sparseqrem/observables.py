"""Diagonal observables, expectation values and MQC-based GHZ fidelity."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .distributions import SparseDistribution
from .errors import AliasingError, DomainError, InputError


@dataclass(frozen=True)
class DiagonalObservable:
    """Observable diagonal in the computational basis.

    ``evaluator`` maps a bitstring to its eigenvalue; ``bound`` is an upper
    bound on ``|evaluator(b)|``, needed to read the mitigation error bound
    as a standard deviation of the observable.
    """

    evaluator: Callable[[str], float]
    bound: float = 1.0

    def __call__(self, bitstring: str) -> float:
        return self.evaluator(bitstring)


def parity_observable(n: int) -> DiagonalObservable:
    """Z on every qubit: ``(-1)^(number of ones)``."""
    if n < 1:
        raise DomainError("need at least one qubit")

    def parity(b: str) -> float:
        if len(b) != n:
            raise InputError(f"expected a {n}-bit string, got {b!r}")
        return -1.0 if b.count("1") % 2 else 1.0

    return DiagonalObservable(parity, 1.0)


def expval_raw(p: SparseDistribution, observable: DiagonalObservable) -> float:
    """``sum_i O(i) p_i`` with no renormalization."""
    return math.fsum(observable(k) * v for k, v in p.items())


def expval_normalized(p: SparseDistribution, observable: DiagonalObservable, report=None):
    """Expectation divided by the element sum of ``p``.

    Returns ``(value, sigma)`` where ``sigma`` is the mitigation error bound
    from ``report`` (a :class:`~sparseqrem.mitigator.MitigationReport`), or
    ``None`` when no report is given.
    """
    if len(p) == 0:
        raise InputError("empty distribution")
    total = p.element_sum()
    if total == 0:
        raise InputError("distribution sums to zero")
    sigma = None
    if report is not None and report.sigma is not None:
        sigma = report.sigma * observable.bound
    return expval_raw(p, observable) / total, sigma


def ghz_population(p: SparseDistribution) -> float:
    """Weight of the all-zeros plus the all-ones bitstring."""
    n = p.width
    return p.get("0" * n, 0.0) + p.get("1" * n, 0.0)


def uniform_angles(n_angles: int) -> np.ndarray:
    return 2 * np.pi * np.arange(n_angles) / n_angles


@dataclass(frozen=True, eq=False)
class MqcSignalSet:
    """Overlap signals ``S_phi`` on a uniform angle grid for an ``n``-qubit GHZ state."""

    angles: np.ndarray
    signals: np.ndarray
    n: int

    def __post_init__(self):
        angles = np.asarray(self.angles, dtype=float)
        signals = np.asarray(self.signals, dtype=float)
        if angles.shape != signals.shape or angles.ndim != 1:
            raise InputError("angles and signals must be 1-d arrays of equal length")
        if len(angles) < 2 * self.n + 2:
            raise AliasingError(f"{len(angles)} angles cannot resolve frequency {self.n}; need at least {2 * self.n + 2}")
        if not np.allclose(angles, uniform_angles(len(angles)), atol=1e-9):
            raise InputError("angles must be 2*pi*j/N for j = 0..N-1")
        object.__setattr__(self, "angles", angles)
        object.__setattr__(self, "signals", signals)


def fourier_magnitude(signals: MqcSignalSet, q: int) -> float:
    """``I_q = |sum_phi exp(i q phi) S_phi| / N``."""
    return float(abs(np.sum(np.exp(1j * q * signals.angles) * signals.signals)) / len(signals.angles))


def mqc_fidelity(population: float, signals: MqcSignalSet) -> tuple[float, float, float]:
    """GHZ fidelity from the population and the MQC signals.

    Returns ``(F, C, I_n)`` with coherence ``C = 2 sqrt(I_n)`` and
    ``F = (P + C) / 2``.
    """
    if not 0.0 <= population <= 1.0 + 1e-12:
        raise DomainError(f"population {population} outside [0, 1]")
    i_n = fourier_magnitude(signals, signals.n)
    coherence = 2.0 * math.sqrt(i_n)
    return (population + coherence) / 2.0, coherence, i_n


def fidelity_from_distributions(
    population: SparseDistribution, signal_dists: Sequence[SparseDistribution]
) -> tuple[float, float, float]:
    """GHZ fidelity from the GHZ-basis distribution and the per-angle MQC distributions.

    The overlap signal of each angle is the weight of the all-zeros string.
    """
    n = population.width
    zero = "0" * n
    signals = MqcSignalSet(uniform_angles(len(signal_dists)), [d.get(zero, 0.0) for d in signal_dists], n)
    return mqc_fidelity(min(ghz_population(population), 1.0), signals)


def run_statistics(values: Sequence[float]) -> tuple[float, float]:
    """Mean and sample standard deviation across repeated runs."""
    values = np.asarray(values, dtype=float)
    std = float(values.std(ddof=1)) if values.size > 1 else 0.0
    return float(values.mean()), std
