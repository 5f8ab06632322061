"""Tensor-product readout noise models.

A model is a partition of the measured qubits into small blocks, each carrying
a column-stochastic calibration matrix whose entry ``(i, j)`` is the
probability of reading block state ``i`` after preparing block state ``j``.
Within a block, the first listed qubit is the most significant bit of the
block-state index.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import _config
from .errors import DomainError, InputError, NoninvertibleCalibrationError, SizeCapError

MAX_BLOCK_QUBITS = 6
STOCHASTIC_TOL = 1e-9
_ZERO_COLSUM = 1e-13


def _invert(matrix: np.ndarray) -> np.ndarray:
    if matrix.shape == (2, 2):
        (a, b), (c, d) = matrix
        det = a * d - b * c
        return np.array([[d, -b], [-c, a]]) / det
    from scipy.linalg import lu_factor, lu_solve

    return lu_solve(lu_factor(matrix), np.eye(matrix.shape[0]))


def _oriented_svd(matrix: np.ndarray):
    """SVD with each right singular vector oriented to a non-negative sum."""
    u, s, vt = np.linalg.svd(matrix)
    v = vt.T.copy()
    colsum = v.sum(axis=0)
    colsum[np.abs(colsum) < _ZERO_COLSUM] = 0.0
    for i in range(v.shape[1]):
        if colsum[i] != 0.0:
            sign = np.sign(colsum[i])
        else:
            nz = v[np.abs(v[:, i]) > _ZERO_COLSUM, i]
            sign = np.sign(nz[0]) if nz.size else 1.0
        v[:, i] *= sign
        u[:, i] *= sign
        colsum[i] *= sign
    return u, s, v, colsum


@dataclass(frozen=True, eq=False)
class LocalCalibration:
    """Calibration matrix of one block of qubits."""

    qubits: tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self):
        qubits = tuple(int(q) for q in self.qubits)
        k = len(qubits)
        if k == 0 or len(set(qubits)) != k:
            raise InputError(f"block qubits must be distinct and non-empty, got {self.qubits}")
        if k > MAX_BLOCK_QUBITS:
            raise SizeCapError(f"block of {k} qubits exceeds the cap of {MAX_BLOCK_QUBITS}")
        m = np.array(self.matrix, dtype=float)
        if m.shape != (2**k, 2**k):
            raise InputError(f"block {qubits} needs a {2**k}x{2**k} matrix, got {m.shape}")
        if np.any(m < -STOCHASTIC_TOL) or np.any(m > 1 + STOCHASTIC_TOL):
            raise InputError(f"block {qubits} has entries outside [0, 1]")
        if np.any(np.abs(m.sum(axis=0) - 1.0) > STOCHASTIC_TOL):
            raise InputError(f"block {qubits} is not column-stochastic")
        if abs(np.linalg.det(m)) <= 1e-12:
            raise NoninvertibleCalibrationError(f"calibration of block {qubits} is singular")
        m.setflags(write=False)
        object.__setattr__(self, "qubits", qubits)
        object.__setattr__(self, "matrix", m)
        inv = _invert(m)
        inv.setflags(write=False)
        object.__setattr__(self, "inverse", inv)

    @property
    def size(self) -> int:
        return len(self.qubits)

    @classmethod
    def from_counts(cls, qubits: Sequence[int], counts: np.ndarray) -> LocalCalibration:
        """Build from calibration tallies; column ``j`` holds the outcomes for prepared state ``j``."""
        counts = np.asarray(counts, dtype=float)
        totals = counts.sum(axis=0)
        if np.any(totals <= 0):
            raise InputError("every prepared state needs at least one shot")
        return cls(tuple(qubits), counts / totals)


@dataclass(frozen=True, eq=False)
class BlockSvd:
    qubits: tuple[int, ...]
    sigma: np.ndarray  # descending
    u: np.ndarray
    v: np.ndarray  # columns are right singular vectors
    colsum: np.ndarray  # 1^T v_i


@dataclass(frozen=True, eq=False)
class SvdCache:
    """Per-block SVDs; tensor singular data are products over blocks."""

    blocks: tuple[BlockSvd, ...]

    def sigma(self, direction: Sequence[int]) -> float:
        return float(np.prod([b.sigma[i] for b, i in zip(self.blocks, direction)]))

    def colsum(self, direction: Sequence[int]) -> float:
        return float(np.prod([b.colsum[i] for b, i in zip(self.blocks, direction)]))


@dataclass(frozen=True, eq=False)
class TensorNoiseModel:
    """A readout model ``A = kron(A_0, A_1, ...)`` over disjoint qubit blocks."""

    blocks: tuple[LocalCalibration, ...]
    width: int
    svd: SvdCache = field(init=False, repr=False)

    def __post_init__(self):
        blocks = tuple(self.blocks)
        seen = [q for b in blocks for q in b.qubits]
        if sorted(seen) != list(range(self.width)):
            raise InputError(f"blocks must partition qubits 0..{self.width - 1}, got {seen}")
        object.__setattr__(self, "blocks", blocks)
        svds = []
        for b in blocks:
            u, s, v, colsum = _oriented_svd(b.matrix)
            for arr in (u, s, v, colsum):
                arr.setflags(write=False)
            svds.append(BlockSvd(b.qubits, s, u, v, colsum))
        object.__setattr__(self, "svd", SvdCache(tuple(svds)))

    @property
    def qubit_order(self) -> list[int]:
        return [q for b in self.blocks for q in b.qubits]

    def to_json_obj(self) -> dict:
        return {
            "width": self.width,
            "blocks": [{"qubits": list(b.qubits), "matrix": b.matrix.tolist()} for b in self.blocks],
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> TensorNoiseModel:
        try:
            width = int(obj["width"])
            raw_blocks = obj["blocks"]
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError("calibration JSON needs 'width' and 'blocks'") from exc
        blocks = []
        for raw in raw_blocks:
            m = np.asarray(raw["matrix"], dtype=float)
            sums = m.sum(axis=0)
            if np.any(np.abs(sums - 1.0) > 1e-6):
                warnings.warn(
                    f"calibration columns of block {raw['qubits']} do not sum to 1 "
                    f"(max deviation {np.max(np.abs(sums - 1.0)):.3g}); renormalizing",
                    stacklevel=2,
                )
            if np.any(sums <= 0):
                raise InputError(f"block {raw['qubits']} has an empty column")
            blocks.append(LocalCalibration(tuple(raw["qubits"]), m / sums))
        return cls(tuple(blocks), width)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json_obj(), indent=1))

    @classmethod
    def load(cls, path: str | Path) -> TensorNoiseModel:
        return cls.from_json_obj(json.loads(Path(path).read_text()))


def synth_uniform(n: int, p01: float, p10: float) -> TensorNoiseModel:
    """Identical single-qubit blocks.

    ``p01`` is the probability of reading 0 when 1 was prepared and ``p10``
    the probability of reading 1 when 0 was prepared.
    """
    if n < 1:
        raise DomainError("need at least one qubit")
    for name, p in (("p01", p01), ("p10", p10)):
        if not 0.0 <= p < 0.5:
            raise DomainError(f"{name}={p} outside [0, 0.5)")
    m = np.array([[1.0 - p10, p01], [p10, 1.0 - p01]])
    return TensorNoiseModel(tuple(LocalCalibration((q,), m) for q in range(n)), n)


def full_matrix(model: TensorNoiseModel, cap: int | None = None, *, inverse: bool = False) -> np.ndarray:
    """Dense ``2^n x 2^n`` calibration matrix (or its inverse) in qubit order."""
    cap = _config.cap("FULL_MATRIX_QUBITS") if cap is None else cap
    n = model.width
    if n > cap:
        raise SizeCapError(f"full matrix of {n} qubits exceeds the cap of {cap}")
    out = np.ones((1, 1))
    for b in model.blocks:
        out = np.kron(out, b.inverse if inverse else b.matrix)
    order = model.qubit_order
    if order != list(range(n)):
        # axes currently follow `order`; permute them back to qubit order
        perm = list(np.argsort(order))
        out = out.reshape((2,) * (2 * n)).transpose(perm + [n + p for p in perm]).reshape(2**n, 2**n)
    return out


def svd_cache(model: TensorNoiseModel) -> SvdCache:
    return model.svd
