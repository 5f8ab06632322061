"""Sparse outcome distributions over fixed-width bitstrings.

Bitstrings are plain ``str`` objects made of ``'0'`` and ``'1'``.  Qubit 0 is
the leftmost character, so the integer value ``int(b, 2)`` of a bitstring is
also its row index in a Kronecker product taken in qubit order.
"""
from __future__ import annotations

import json
import math
from collections.abc import Iterable, Iterator, Mapping
from pathlib import Path

import numpy as np

from .errors import EmptyDistributionError, InputError, WidthMismatchError

PROBABILITY_TOL = 1e-9


def check_bitstring(label: str, width: int | None = None) -> str:
    if not isinstance(label, str) or not label or label.strip("01"):
        raise InputError(f"not a bitstring: {label!r}")
    if width is not None and len(label) != width:
        raise WidthMismatchError(f"bitstring {label!r} has width {len(label)}, expected {width}")
    return label


def bits_array(labels: Iterable[str], width: int | None = None) -> np.ndarray:
    """Stack bitstrings into a ``(len(labels), width)`` uint8 array."""
    labels = list(labels)
    if not labels:
        return np.zeros((0, width or 0), dtype=np.uint8)
    width = len(labels[0]) if width is None else width
    buf = "".join(labels).encode("ascii")
    return (np.frombuffer(buf, dtype=np.uint8) - ord("0")).reshape(len(labels), width)


def hamming_ball(label: str, radius: int) -> Iterator[str]:
    """All bitstrings within Hamming distance ``radius`` of ``label``."""
    from itertools import combinations

    n = len(label)
    flip = {"0": "1", "1": "0"}
    for r in range(min(radius, n) + 1):
        for positions in combinations(range(n), r):
            chars = list(label)
            for q in positions:
                chars[q] = flip[chars[q]]
            yield "".join(chars)


class SparseDistribution(Mapping):
    """Immutable map from bitstrings to real weights.

    Weights may be counts-derived probabilities or intermediate quasi-probability
    vectors; ``is_probability`` tells which.  Zero weights are dropped, and keys
    are kept in canonical (lexicographic) order, which is the index order used
    for the subspace S everywhere else in the package.

    Parameters
    ----------
    entries : mapping of str to float
    width : int, optional
        Number of qubits.  Inferred from the keys when omitted.
    shots : int, optional
        Total number of shots behind the data, when known.
    probability : bool, optional
        ``True`` enforces the probability invariants (non-negative, sums to 1),
        ``None`` detects them.
    """

    __slots__ = ("_entries", "_keys", "width", "shots", "is_probability")

    def __init__(
        self,
        entries: Mapping[str, float],
        width: int | None = None,
        shots: int | None = None,
        *,
        probability: bool | None = None,
    ):
        if width is None:
            if not entries:
                raise EmptyDistributionError("cannot infer width of an empty distribution")
            width = len(next(iter(entries)))
        if width < 1:
            raise InputError("width must be at least 1")
        clean = {}
        for key, value in entries.items():
            check_bitstring(key, width)
            value = float(value)
            if not math.isfinite(value):
                raise InputError(f"non-finite weight for {key}")
            if value != 0.0:
                clean[key] = value
        keys = tuple(sorted(clean))
        self._entries = {k: clean[k] for k in keys}
        self._keys = keys
        self.width = int(width)
        self.shots = None if shots is None else int(shots)
        if self.shots is not None and self.shots < 0:
            raise InputError("shots must be non-negative")

        looks_like = all(v >= 0 for v in clean.values()) and abs(sum(clean.values()) - 1.0) <= PROBABILITY_TOL
        if probability and not looks_like:
            raise InputError("weights are not a probability distribution")
        self.is_probability = looks_like if probability is None else bool(probability)

    # Mapping protocol
    def __getitem__(self, key: str) -> float:
        return self._entries[key]

    def __iter__(self) -> Iterator[str]:
        return iter(self._keys)

    def __len__(self) -> int:
        return len(self._keys)

    def __repr__(self) -> str:
        shown = ", ".join(f"{k}: {v:.6g}" for k, v in list(self._entries.items())[:6])
        more = ", ..." if len(self) > 6 else ""
        return f"SparseDistribution({{{shown}{more}}}, width={self.width}, shots={self.shots})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseDistribution):
            return NotImplemented
        return self.width == other.width and self.shots == other.shots and self._entries == other._entries

    __hash__ = None

    @classmethod
    def from_counts(cls, counts: Mapping[str, int]) -> SparseDistribution:
        """Normalize integer counts into a probability distribution."""
        if not counts:
            raise EmptyDistributionError("no counts given")
        widths = {len(k) for k in counts}
        if len(widths) != 1:
            raise WidthMismatchError(f"mixed key widths {sorted(widths)}")
        total = 0
        for key, c in counts.items():
            if int(c) != c or c < 0:
                raise InputError(f"count for {key} must be a non-negative integer, got {c}")
            total += int(c)
        if total == 0:
            raise EmptyDistributionError("all counts are zero")
        probs = {k: int(c) / total for k, c in counts.items()}
        return cls(probs, widths.pop(), total, probability=True)

    @classmethod
    def from_vector(
        cls, subspace: Iterable[str], values: np.ndarray, width: int | None = None, shots: int | None = None, **kw
    ) -> SparseDistribution:
        subspace = list(subspace)
        if len(subspace) != len(values):
            raise InputError("subspace and value vector differ in length")
        return cls(dict(zip(subspace, map(float, values))), width, shots, **kw)

    def subspace(self) -> tuple[str, ...]:
        return self._keys

    def vector(self, subspace: Iterable[str] | None = None) -> np.ndarray:
        """Weights as a dense vector in ``subspace`` order (missing keys give 0)."""
        if subspace is None:
            return np.fromiter(self._entries.values(), dtype=float, count=len(self))
        return np.array([self._entries.get(k, 0.0) for k in subspace], dtype=float)

    def element_sum(self) -> float:
        return math.fsum(self._entries.values())

    def counts(self) -> dict[str, int]:
        """Integer tallies, for distributions built from counts."""
        if self.shots is None:
            raise InputError("distribution carries no shot count")
        return {k: int(round(v * self.shots)) for k, v in self._entries.items()}

    # serialization
    def to_json_obj(self, kind: str = "probs") -> dict:
        obj: dict = {"width": self.width}
        if self.shots is not None:
            obj["shots"] = self.shots
        if kind == "counts":
            obj["counts"] = self.counts()
        elif kind == "probs":
            obj["probs"] = dict(self._entries)
        else:
            raise InputError(f"unknown kind {kind!r}")
        return obj

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> SparseDistribution:
        try:
            width = int(obj["width"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError("distribution JSON needs an integer 'width'") from exc
        shots = obj.get("shots")
        if "counts" in obj:
            counts = obj["counts"]
            if not counts:
                raise EmptyDistributionError("no counts given")
            total = math.fsum(float(v) for v in counts.values())
            if total <= 0:
                raise EmptyDistributionError("counts sum to zero")
            if all(float(v) == int(v) and v >= 0 for v in counts.values()):
                dist = cls.from_counts({k: int(v) for k, v in counts.items()})
                if dist.width != width:
                    raise WidthMismatchError(f"keys have width {dist.width}, header says {width}")
                return dist if shots is None else cls(dist._entries, width, shots)
            return cls({k: float(v) / total for k, v in counts.items()}, width, shots if shots is not None else total)
        if "probs" in obj:
            return cls(obj["probs"], width, shots)
        raise InputError("distribution JSON needs 'counts' or 'probs'")

    def dumps(self, kind: str = "probs") -> str:
        return json.dumps(self.to_json_obj(kind), indent=1)

    @classmethod
    def loads(cls, text: str) -> SparseDistribution:
        return cls.from_json_obj(json.loads(text))

    def save(self, path: str | Path, kind: str = "probs") -> None:
        Path(path).write_text(self.dumps(kind))

    @classmethod
    def load(cls, path: str | Path) -> SparseDistribution:
        return cls.loads(Path(path).read_text())


def from_counts(counts: Mapping[str, int]) -> SparseDistribution:
    return SparseDistribution.from_counts(counts)


def element_sum(d: SparseDistribution) -> float:
    return d.element_sum()
