"""Negativity cancellation (Smolin, Gambetta and Smith).

Given a vector whose entries sum to one, return the closest probability
vector in the Euclidean norm.  Entries are visited in ascending order; an
entry is dropped while it would stay non-positive after receiving its share of
the deficit accumulated from the entries already dropped.  The survivors are
then shifted by ``deficit / survivors`` in one pass.
"""
from __future__ import annotations

import numpy as np

from .errors import InputError, PreconditionError

SUM_TOL = 1e-6


def sgs_project(x: np.ndarray, total: float = 1.0, tol: float = SUM_TOL) -> np.ndarray:
    """Project ``x`` onto ``{p >= 0, sum(p) = total}``.

    Parameters
    ----------
    x : array_like
        Input vector; must already sum to ``total`` within ``tol``.
    total : float
        Mass to preserve.  Defaults to 1; other positive values are used for
        vectors whose sum-to-one correction was only approximate.
    tol : float
        Admissible deviation of ``sum(x)`` from ``total``.

    Returns
    -------
    numpy.ndarray
        Same shape as ``x``; removed entries are exactly zero.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise InputError("need a non-empty vector")
    if total <= 0:
        raise PreconditionError(f"cannot project onto a simplex of mass {total}")
    if abs(x.sum() - total) > tol:
        raise PreconditionError(f"vector sums to {x.sum():.12g}, expected {total} (apply a sum correction first)")

    order = np.argsort(x, kind="stable")
    deficit = 0.0
    remaining = x.size
    i = 0
    while remaining > 1:
        v = x[order[i]]
        if v + deficit / remaining > 0:
            break
        deficit += v
        remaining -= 1
        i += 1

    out = np.zeros_like(x)
    keep = order[i:]
    out[keep] = x[keep] + deficit / remaining
    return out


def negative_mass_removed(before: np.ndarray, after: np.ndarray) -> float:
    """Total magnitude of negative entries that the projection zeroed out."""
    removed = (after == 0) & (before < 0)
    return float(-before[removed].sum())
