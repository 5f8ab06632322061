"""Apply per-block matrices to a sparse vector one block at a time."""
from __future__ import annotations

from collections import defaultdict
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import SizeCapError


def apply_block(
    entries: Mapping[str, float],
    qubits: Sequence[int],
    matrix: np.ndarray,
) -> dict[str, float]:
    """Multiply the sparse vector by ``matrix`` acting on ``qubits``.

    The support grows to every block state reachable through a non-zero
    matrix entry.
    """
    k = len(qubits)
    dim = 2**k
    patterns = [format(b, f"0{k}b") for b in range(dim)]
    out: dict[str, float] = defaultdict(float)
    for key, value in entries.items():
        chars = list(key)
        j = int("".join(chars[q] for q in qubits), 2)
        column = matrix[:, j]
        for i in range(dim):
            c = column[i]
            if c == 0.0:
                continue
            for q, bit in zip(qubits, patterns[i]):
                chars[q] = bit
            out["".join(chars)] += c * value
    return out


def apply_blocks(
    entries: Mapping[str, float],
    blocks: Sequence[tuple[Sequence[int], np.ndarray]],
    keep: Callable[[float], bool],
    support_cap: int,
) -> dict[str, float]:
    """Apply ``blocks`` in order, pruning entries with ``keep(value)`` false after each."""
    current = dict(entries)
    for qubits, matrix in blocks:
        current = {k: v for k, v in apply_block(current, qubits, matrix).items() if keep(v)}
        if len(current) > support_cap:
            raise SizeCapError(f"support grew to {len(current)} entries, above the cap of {support_cap}")
    return current
