"""Reduced inverse calibration matrices and the three-step mitigation pipeline.

Step 1 applies the inverse tensor calibration matrix restricted to the
measured subspace S, either by materializing ``(A^-1)_S`` or matrix-free.
Step 2 corrects the element sum (see :mod:`sparseqrem.sum_correction`) and
Step 3 removes negative entries (see :mod:`sparseqrem.simplex`).
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _config, _kernels
from .distributions import SparseDistribution, bits_array, hamming_ball
from .errors import DomainError, EmptyDistributionError, InputError, SizeCapError, WidthMismatchError
from .noise_model import TensorNoiseModel
from .simplex import negative_mass_removed, sgs_project
from .sum_correction import delta_approx, delta_exact, least_norm

METHODS = ("least_norm", "delta", "delta_exact")

# auto mode materializes the reduced inverse only up to this many entries
_AUTO_EXPLICIT_ENTRIES = 2**22


@dataclass(frozen=True, eq=False)
class ReducedInverse:
    subspace: tuple[str, ...]
    matrix: np.ndarray
    one_norm: float


@dataclass(eq=False)
class MitigationReport:
    """Outcome of a mitigation run.

    ``sigma`` is ``None`` when the input distribution carries no shot count.
    ``pre_correction_sum`` is the element sum right after Step 1 and
    ``achieved_sum`` the sum after Step 2.
    """

    mitigated: SparseDistribution
    overhead: float
    sigma: float | None
    pre_correction_sum: float
    negative_mass_removed: float
    method: str
    elapsed: dict[str, float] = field(default_factory=dict)
    subspace_size: int = 0
    achieved_sum: float = 1.0
    correction_norm: float = 0.0
    notes: list[str] = field(default_factory=list)

    def to_json_obj(self) -> dict:
        return {
            "schema": "sparseqrem.report/1",
            "method": self.method,
            "overhead": self.overhead,
            "sigma": self.sigma,
            "pre_correction_sum": self.pre_correction_sum,
            "achieved_sum": self.achieved_sum,
            "correction_norm": self.correction_norm,
            "negative_mass_removed": self.negative_mass_removed,
            "subspace_size": self.subspace_size,
            "elapsed": dict(self.elapsed),
            "notes": list(self.notes),
            "mitigated": self.mitigated.to_json_obj(),
        }


def _check_subspace(model: TensorNoiseModel, subspace: Sequence[str]) -> np.ndarray:
    if len(subspace) == 0:
        raise EmptyDistributionError("empty subspace")
    if len(subspace) > _config.cap("MAX_SUBSPACE"):
        raise SizeCapError(f"|S|={len(subspace)} exceeds the cap of {_config.cap('MAX_SUBSPACE')}")
    for s in subspace:
        if len(s) != model.width:
            raise WidthMismatchError(f"bitstring width {len(s)} does not match model width {model.width}")
    return bits_array(subspace, model.width)


def _tables_and_codes(model: TensorNoiseModel, subspace: Sequence[str]):
    bits = _check_subspace(model, subspace)
    tables, groups = _kernels.group_blocks(model)
    return tables, _kernels.encode(bits, groups)


def reduced_inverse(model: TensorNoiseModel, subspace: Iterable[str], threads: int | None = None) -> ReducedInverse:
    """Materialize ``(A^-1)_S`` with rows and columns in canonical order."""
    subspace = tuple(sorted(subspace))
    if len(subspace) ** 2 > _config.cap("MAX_DENSE_ENTRIES"):
        raise SizeCapError(f"explicit reduced inverse of size {len(subspace)}^2 exceeds the entry cap")
    tables, codes = _tables_and_codes(model, subspace)
    out = np.empty((len(subspace), len(subspace)))
    with _kernels.threads(threads):
        _kernels.build_matrix(codes, tables, out)
    return ReducedInverse(subspace, out, float(np.abs(out).sum(axis=0).max()))


def apply_inverse_matrix_free(
    model: TensorNoiseModel, y: SparseDistribution, subspace: Sequence[str] | None = None, threads: int | None = None
) -> tuple[np.ndarray, float]:
    """Compute ``x_S = (A^-1)_S y`` without storing the matrix.

    Returns ``(x_S, one_norm)``; the exact 1-norm of ``(A^-1)_S`` comes from
    column sums accumulated along the way, using O(|S|) memory.
    """
    if y.width != model.width:
        raise WidthMismatchError(f"distribution width {y.width} does not match model width {model.width}")
    subspace = y.subspace() if subspace is None else tuple(subspace)
    tables, codes = _tables_and_codes(model, subspace)
    with _kernels.threads(threads):
        x, partial = _kernels.apply_and_colsums(codes, tables, y.vector(subspace), _kernels.ROW_CHUNKS)
    return x, float(partial.sum(axis=0).max())


def extend_subspace(subspace: Iterable[str], d: int, cap: int | None = None) -> tuple[str, ...]:
    """Union of Hamming balls of radius ``d`` around each bitstring."""
    if d < 0:
        raise DomainError("Hamming radius must be non-negative")
    cap = _config.cap("MAX_SUBSPACE") if cap is None else cap
    subspace = tuple(subspace)
    if d == 0:
        return tuple(sorted(set(subspace)))
    out = set()
    for s in subspace:
        out.update(hamming_ball(s, d))
        if len(out) > cap:
            raise SizeCapError(f"extended subspace exceeds the cap of {cap}")
    return tuple(sorted(out))


def mitigation_overhead(r: ReducedInverse | float) -> float:
    """``M = ||(A^-1)_S||_1^2`` from a reduced inverse or its 1-norm."""
    norm = r.one_norm if isinstance(r, ReducedInverse) else float(r)
    return norm * norm


def error_bound(overhead: float, shots: int) -> float:
    """Upper bound ``sqrt(M / s)`` on the standard deviation of a bounded observable."""
    if shots < 1:
        raise DomainError("need at least one shot")
    if overhead < 1 - 1e-12:
        raise DomainError(f"overhead {overhead} is below 1")
    return math.sqrt(overhead / shots)


def correct_sum(method: str, x_s: np.ndarray, subspace, model: TensorNoiseModel, k: int = 1):
    if method == "least_norm":
        return least_norm(x_s)
    if method == "delta":
        return delta_approx(x_s, subspace, model.svd)
    if method == "delta_exact":
        return delta_exact(x_s, subspace, model.svd, k)
    raise InputError(f"unknown correction method {method!r}; expected one of {METHODS}")


def finish(
    x_s: np.ndarray,
    subspace: Sequence[str],
    model: TensorNoiseModel,
    method: str,
    *,
    k: int = 1,
    shots: int | None = None,
    one_norm: float,
    elapsed: dict[str, float],
    label: str | None = None,
) -> MitigationReport:
    """Steps 2 and 3 on a roughly mitigated vector, packaged as a report."""
    bits = bits_array(subspace, model.width)
    pre_sum = math.fsum(x_s)

    t0 = time.perf_counter()
    corr = correct_sum(method, x_s, bits, model, k)
    t1 = time.perf_counter()
    notes = []
    if method == "least_norm":
        projected = sgs_project(corr.corrected)
    else:
        # the delta routes do not force the sum to one; keep whatever mass they reach
        projected = sgs_project(corr.corrected, total=corr.achieved_sum)
        if abs(corr.achieved_sum - 1.0) > 1e-9:
            notes.append(f"element sum after correction is {corr.achieved_sum:.12g}")
    t2 = time.perf_counter()
    elapsed = dict(elapsed, correction=t1 - t0, projection=t2 - t1)
    elapsed["total"] = sum(elapsed.values())

    mitigated = SparseDistribution.from_vector(subspace, projected, model.width, shots)
    overhead = mitigation_overhead(one_norm)
    sigma = None if not shots else error_bound(overhead, shots)
    return MitigationReport(
        mitigated=mitigated,
        overhead=overhead,
        sigma=sigma,
        pre_correction_sum=pre_sum,
        negative_mass_removed=negative_mass_removed(corr.corrected, projected),
        method=label or (f"delta_exact:{k}" if method == "delta_exact" else method),
        elapsed=elapsed,
        subspace_size=len(subspace),
        achieved_sum=corr.achieved_sum,
        correction_norm=corr.correction_norm,
        notes=notes,
    )


def mitigate(
    y: SparseDistribution,
    model: TensorNoiseModel,
    method: str = "least_norm",
    d: int = 0,
    matrix_free: bool | None = None,
    *,
    k: int = 1,
    threads: int | None = None,
) -> MitigationReport:
    """Mitigate readout errors on a sparse distribution.

    Parameters
    ----------
    y : SparseDistribution
        Noisy measured distribution.
    model : TensorNoiseModel
    method : {"least_norm", "delta", "delta_exact"}
        Sum-to-one correction used in Step 2.
    d : int
        Hamming radius by which the measured subspace is extended.
    matrix_free : bool, optional
        Force or forbid materializing ``(A^-1)_S``.  By default the matrix is
        built only when it is small.
    k : int
        Number of singular directions for ``delta_exact``.
    threads : int, optional
        Worker threads for Step 1.
    """
    if method not in METHODS:
        raise InputError(f"unknown correction method {method!r}; expected one of {METHODS}")
    if y.width != model.width:
        raise WidthMismatchError(f"distribution width {y.width} does not match model width {model.width}")
    subspace = extend_subspace(y.subspace(), d)
    if matrix_free is None:
        matrix_free = len(subspace) ** 2 > _AUTO_EXPLICIT_ENTRIES

    t0 = time.perf_counter()
    if matrix_free:
        x_s, one_norm = apply_inverse_matrix_free(model, y, subspace, threads)
    else:
        r = reduced_inverse(model, subspace, threads)
        x_s, one_norm = r.matrix @ y.vector(subspace), r.one_norm
    step1 = time.perf_counter() - t0
    return finish(
        x_s, subspace, model, method, k=k, shots=y.shots, one_norm=one_norm, elapsed={"inverse": step1}
    )
