"""Reference mitigators used for comparison.

``rigorous_mitigate`` inverts the full tensor calibration matrix (exponential
in the number of qubits).  ``mooney_mitigate`` applies block inverses one at a
time and truncates small entries after each, following the sequential method
of Mooney et al.  Both finish with the least-norm correction and the
negativity cancellation so their outputs are comparable with
:func:`sparseqrem.mitigator.mitigate`.
"""
from __future__ import annotations

import math
import time

import numpy as np

from . import _config
from ._blockwise import apply_blocks
from .distributions import SparseDistribution
from .errors import DomainError, SizeCapError, WidthMismatchError
from .mitigator import MitigationReport, finish
from .noise_model import TensorNoiseModel, full_matrix


def _check(y: SparseDistribution, model: TensorNoiseModel):
    if y.width != model.width:
        raise WidthMismatchError(f"distribution width {y.width} does not match model width {model.width}")


def rigorous_mitigate(
    y: SparseDistribution, model: TensorNoiseModel, cap: int | None = None, solver: str = "kron"
) -> MitigationReport:
    """Exact inversion over the full ``2^n`` space.

    ``solver="kron"`` contracts each block inverse into the state tensor;
    ``solver="dense"`` solves against :func:`full_matrix` directly.
    """
    _check(y, model)
    n = model.width
    cap = _config.cap("FULL_MATRIX_QUBITS") if cap is None else cap
    if n > cap:
        raise SizeCapError(f"rigorous inversion of {n} qubits exceeds the cap of {cap}")

    t0 = time.perf_counter()
    vec = np.zeros(2**n)
    for key, value in y.items():
        vec[int(key, 2)] = value
    if solver == "dense":
        x = np.linalg.solve(full_matrix(model, cap), vec)
    elif solver == "kron":
        psi = vec.reshape((2,) * n)
        for b in model.blocks:
            k = b.size
            inv = b.inverse.reshape((2,) * (2 * k))
            psi = np.tensordot(inv, psi, axes=(list(range(k, 2 * k)), list(b.qubits)))
            # tensordot puts the block axes first; move them back into place
            psi = np.moveaxis(psi, list(range(k)), list(b.qubits))
        x = psi.reshape(-1)
    else:
        raise ValueError(f"unknown solver {solver!r}")
    one_norm = math.prod(float(np.abs(b.inverse).sum(axis=0).max()) for b in model.blocks)
    step1 = time.perf_counter() - t0

    subspace = [format(i, f"0{n}b") for i in range(2**n)]
    return finish(
        x, subspace, model, "least_norm", shots=y.shots, one_norm=one_norm, elapsed={"inverse": step1}, label="rigorous"
    )


def mooney_mitigate(
    y: SparseDistribution, model: TensorNoiseModel, t: float, support_cap: int | None = None
) -> MitigationReport:
    """Sequential block inversion with truncation.

    Parameters
    ----------
    t : float
        Truncation threshold in probability units; after each block inverse,
        entries with ``|value| < t`` are deleted.
    support_cap : int, optional
        Abort when the intermediate support exceeds this many entries.

    Blocks are processed in ascending order of their lowest qubit index.
    The reported overhead is the squared product of block-inverse 1-norms,
    i.e. that of the full tensor inverse.
    """
    _check(y, model)
    if not 0.0 <= t < 1.0:
        raise DomainError(f"threshold {t} outside [0, 1)")
    support_cap = _config.cap("SUPPORT_CAP") if support_cap is None else support_cap
    t0 = time.perf_counter()
    ordered = sorted(model.blocks, key=lambda b: min(b.qubits))
    entries = apply_blocks(
        dict(y.items()), [(b.qubits, b.inverse) for b in ordered], lambda v: v != 0.0 and abs(v) >= t, support_cap
    )
    step1 = time.perf_counter() - t0
    if not entries:
        raise DomainError(f"threshold {t} removed every entry")
    subspace = sorted(entries)
    x = np.array([entries[k] for k in subspace])
    one_norm = math.prod(float(np.abs(b.inverse).sum(axis=0).max()) for b in model.blocks)
    return finish(
        x, subspace, model, "least_norm", shots=y.shots, one_norm=one_norm, elapsed={"inverse": step1}, label=f"mooney:{t:g}"
    )
