import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sparseqrem.distributions import SparseDistribution, bits_array, element_sum, from_counts, hamming_ball
from sparseqrem.errors import EmptyDistributionError, InputError, WidthMismatchError


def test_from_counts_normalizes_and_keeps_shots():
    d = from_counts({"11": 3, "00": 1})
    assert d.shots == 4
    assert d.is_probability
    assert d.subspace() == ("00", "11")
    assert d["11"] == pytest.approx(0.75)
    assert d.counts() == {"00": 1, "11": 3}


def test_zero_weights_dropped_and_keys_sorted():
    d = SparseDistribution({"10": 0.5, "01": 0.0, "00": 0.5})
    assert list(d) == ["00", "10"]


def test_quasi_distribution_is_not_probability():
    d = SparseDistribution({"0": 1.2, "1": -0.2})
    assert not d.is_probability
    assert element_sum(d) == pytest.approx(1.0)
    with pytest.raises(InputError):
        SparseDistribution({"0": 1.2, "1": -0.2}, probability=True)


@pytest.mark.parametrize(
    "counts, err",
    [
        ({}, EmptyDistributionError),
        ({"00": 0}, EmptyDistributionError),
        ({"00": 1, "1": 2}, WidthMismatchError),
        ({"0a": 1}, InputError),
        ({"00": -1}, InputError),
        ({"00": 1.5}, InputError),
    ],
)
def test_invalid_counts(counts, err):
    with pytest.raises(err):
        from_counts(counts)


def test_vector_in_foreign_order():
    d = SparseDistribution({"01": 0.25, "10": 0.75})
    np.testing.assert_array_equal(d.vector(["10", "11", "01"]), [0.75, 0.0, 0.25])


def test_bits_array_and_hamming_ball():
    np.testing.assert_array_equal(bits_array(["01", "10"]), [[0, 1], [1, 0]])
    ball = set(hamming_ball("000", 1))
    assert ball == {"000", "100", "010", "001"}
    assert len(set(hamming_ball("0000", 2))) == 1 + 4 + 6


def test_json_round_trip(tmp_path):
    d = from_counts({"000": 5, "111": 3})
    assert SparseDistribution.loads(d.dumps("counts")) == d
    path = tmp_path / "d.json"
    d.save(path)
    back = SparseDistribution.load(path)
    assert back.width == 3 and back.shots == 8
    assert back["111"] == pytest.approx(3 / 8)


def test_json_errors():
    with pytest.raises(InputError):
        SparseDistribution.from_json_obj({"counts": {"0": 1}})
    with pytest.raises(InputError):
        SparseDistribution.from_json_obj({"width": 1})
    with pytest.raises(WidthMismatchError):
        SparseDistribution.from_json_obj({"width": 3, "counts": {"01": 1}})
    json.dumps(from_counts({"1": 1}).to_json_obj())


@given(st.dictionaries(st.text("01", min_size=4, max_size=4), st.integers(1, 1000), min_size=1))
def test_counts_round_trip_property(counts):
    d = from_counts(counts)
    assert d.counts() == counts
    assert d.element_sum() == pytest.approx(1.0, abs=1e-12)
