"""Sum-to-one corrections applied after the reduced inverse.

Two routes are offered.  The *delta* route solves the constrained least
squares problem ``min ||A delta||^2  s.t.  1^T (x + delta) = 1`` in the basis of
right singular vectors of the tensor calibration matrix and restricts the
solution to the measured subspace, so the corrected vector need not sum to one
exactly.  The *least-norm* route shifts every entry by the same amount.

In both routes ``1^T x`` is summed over the measured subspace only.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .distributions import bits_array
from .errors import DegenerateConstraintError, InputError
from .noise_model import SvdCache

_CHUNK_ENTRIES = 2**24


@dataclass(frozen=True, eq=False)
class CorrectionResult:
    corrected: np.ndarray
    correction_norm: float
    achieved_sum: float


def _result(x_s: np.ndarray, delta: np.ndarray) -> CorrectionResult:
    corrected = x_s + delta
    return CorrectionResult(corrected, float(np.linalg.norm(delta)), math.fsum(corrected))


def _sub_indices(subspace, cache: SvdCache) -> list[np.ndarray]:
    if isinstance(subspace, np.ndarray):
        bits = subspace
    else:
        bits = bits_array(subspace)
    out = []
    for b in cache.blocks:
        idx = np.zeros(bits.shape[0], dtype=np.int64)
        for q in b.qubits:
            idx = (idx << 1) | bits[:, q]
        out.append(idx)
    return out


def top_directions(cache: SvdCache, k: int) -> list[tuple[int, ...]]:
    """The ``k`` tensor singular directions with the largest ``|1^T v|``.

    Directions are tuples of per-block singular-vector indices.  Ties are
    broken by the per-block ordering, which keeps the choice deterministic.
    """
    total = math.prod(len(b.sigma) for b in cache.blocks)
    if not 1 <= k <= total:
        raise InputError(f"k must lie in [1, {total}], got {k}")
    ranked = [np.argsort(-np.abs(b.colsum), kind="stable") for b in cache.blocks]
    mags = [np.abs(b.colsum)[r] for b, r in zip(cache.blocks, ranked)]

    def weight(pos):
        return math.prod(float(m[p]) for m, p in zip(mags, pos))

    start = (0,) * len(cache.blocks)
    heap = [(-weight(start), start)]
    seen = {start}
    picked = []
    while heap and len(picked) < k:
        _, pos = heapq.heappop(heap)
        picked.append(tuple(int(r[p]) for r, p in zip(ranked, pos)))
        for b in range(len(pos)):
            if pos[b] + 1 < len(mags[b]):
                nxt = pos[:b] + (pos[b] + 1,) + pos[b + 1 :]
                if nxt not in seen:
                    seen.add(nxt)
                    heapq.heappush(heap, (-weight(nxt), nxt))
    return picked


def delta_exact(x_s: np.ndarray, subspace, cache: SvdCache, k: int = 1) -> CorrectionResult:
    """Lagrange-multiplier correction over ``k`` singular directions.

    Parameters
    ----------
    x_s : numpy.ndarray
        Roughly mitigated vector over the subspace.
    subspace : sequence of str or uint8 bit array
        Bitstrings indexing ``x_s``.
    cache : SvdCache
        Per-block SVDs of the noise model.
    k : int
        Number of directions, chosen by largest ``|1^T v|``.
    """
    x_s = np.asarray(x_s, dtype=float)
    directions = np.array(top_directions(cache, k), dtype=np.int64)
    coef = np.ones(len(directions))
    sig2 = np.ones(len(directions))
    for b, blk in enumerate(cache.blocks):
        coef *= blk.colsum[directions[:, b]]
        sig2 *= blk.sigma[directions[:, b]] ** 2
    denom = float(np.sum(coef**2 / sig2))
    if denom == 0.0:
        raise DegenerateConstraintError("no selected singular direction has a non-zero column sum")
    weights = (1.0 - math.fsum(x_s)) / denom * coef / sig2

    subs = _sub_indices(subspace, cache)
    delta = np.zeros_like(x_s)
    step = max(1, _CHUNK_ENTRIES // max(1, x_s.size))
    for lo in range(0, len(directions), step):
        dirs = directions[lo : lo + step]
        v_s = np.ones((x_s.size, len(dirs)))
        for b, blk in enumerate(cache.blocks):
            v_s *= blk.v[subs[b][:, None], dirs[None, :, b]]
        delta += v_s @ weights[lo : lo + step]
    return _result(x_s, delta)


def delta_approx(x_s: np.ndarray, subspace, cache: SvdCache) -> CorrectionResult:
    """Correction along the leading singular direction only.

    Adequate when every block is close to symmetric, in which case the other
    directions have (nearly) zero column sum.
    """
    x_s = np.asarray(x_s, dtype=float)
    colsum0 = math.prod(float(b.colsum[0]) for b in cache.blocks)
    if colsum0 == 0.0:
        raise DegenerateConstraintError("leading singular vector has zero column sum")
    coeff = (1.0 - math.fsum(x_s)) / colsum0
    v0 = np.ones_like(x_s)
    for b, idx in zip(cache.blocks, _sub_indices(subspace, cache)):
        v0 *= b.v[idx, 0]
    return _result(x_s, coeff * v0)


def least_norm(x_s: np.ndarray) -> CorrectionResult:
    """Closest vector (Euclidean) to ``x_s`` whose entries sum to one."""
    x_s = np.asarray(x_s, dtype=float)
    if x_s.size == 0:
        raise InputError("empty vector")
    shift = (1.0 - math.fsum(x_s)) / x_s.size
    return _result(x_s, np.full_like(x_s, shift))

