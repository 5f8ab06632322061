import json
import warnings

import numpy as np
import pytest

from conftest import dense_oracle, random_model
from sparseqrem.errors import DomainError, InputError, NoninvertibleCalibrationError, SizeCapError
from sparseqrem.noise_model import LocalCalibration, TensorNoiseModel, full_matrix, synth_uniform


def test_local_calibration_inverse():
    m = np.array([[0.9, 0.2], [0.1, 0.8]])
    blk = LocalCalibration((0,), m)
    np.testing.assert_allclose(blk.inverse @ m, np.eye(2), atol=1e-14)
    assert not blk.inverse.flags.writeable


@pytest.mark.parametrize(
    "matrix, err",
    [
        ([[0.9, 0.2], [0.2, 0.8]], InputError),  # column sums != 1
        ([[1.1, 0.0], [-0.1, 1.0]], InputError),
        ([[0.5, 0.5], [0.5, 0.5]], NoninvertibleCalibrationError),
        (np.eye(4), InputError),  # wrong shape for one qubit
    ],
)
def test_local_calibration_rejects(matrix, err):
    with pytest.raises(err):
        LocalCalibration((0,), matrix)


def test_block_size_cap():
    with pytest.raises(SizeCapError):
        LocalCalibration(tuple(range(7)), np.eye(2**7))


def test_from_counts():
    blk = LocalCalibration.from_counts((0,), [[90, 5], [10, 95]])
    np.testing.assert_allclose(blk.matrix, [[0.9, 0.05], [0.1, 0.95]])


def test_partition_required():
    b = LocalCalibration((0,), np.eye(2))
    with pytest.raises(InputError):
        TensorNoiseModel((b,), 2)
    with pytest.raises(InputError):
        TensorNoiseModel((b, b), 1)


def test_synth_uniform_orientation():
    m = synth_uniform(1, 0.02, 0.05).blocks[0].matrix
    # column = prepared, row = read
    assert m[1, 0] == pytest.approx(0.05)
    assert m[0, 1] == pytest.approx(0.02)
    with pytest.raises(DomainError):
        synth_uniform(2, 0.5, 0.0)


@pytest.mark.parametrize("seed", range(5))
def test_full_matrix_matches_entrywise_oracle(seed):
    rng = np.random.default_rng(seed)
    model = random_model(rng, 5, max_block=3, shuffle=True)
    a, _ = dense_oracle(model)
    np.testing.assert_allclose(full_matrix(model), a, atol=1e-15)
    np.testing.assert_allclose(full_matrix(model, inverse=True), np.linalg.inv(a), atol=1e-10)


def test_full_matrix_cap():
    with pytest.raises(SizeCapError):
        full_matrix(synth_uniform(6, 0.01, 0.01), cap=5)


def test_svd_orientation_and_products():
    rng = np.random.default_rng(3)
    model = random_model(rng, 4, max_block=2)
    for blk, svd in zip(model.blocks, model.svd.blocks):
        u, s, vt = np.linalg.svd(blk.matrix)
        np.testing.assert_allclose(svd.sigma, s, atol=1e-12)
        np.testing.assert_allclose(svd.u @ np.diag(svd.sigma) @ svd.v.T, blk.matrix, atol=1e-12)
        assert np.all(svd.colsum >= 0)
        np.testing.assert_allclose(svd.colsum, svd.v.sum(axis=0), atol=1e-13)


def test_symmetric_block_has_zero_second_colsum():
    svd = synth_uniform(1, 0.03, 0.03).svd.blocks[0]
    assert svd.colsum[0] == pytest.approx(np.sqrt(2))
    assert svd.colsum[1] == 0.0


def test_json_round_trip_and_renormalization(tmp_path):
    rng = np.random.default_rng(0)
    model = random_model(rng, 4, max_block=2, shuffle=True)
    path = tmp_path / "cal.json"
    model.save(path)
    back = TensorNoiseModel.load(path)
    np.testing.assert_allclose(full_matrix(back), full_matrix(model), atol=1e-15)

    obj = {"width": 1, "blocks": [{"qubits": [0], "matrix": [[0.9, 0.1], [0.11, 0.9]]}]}
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        m = TensorNoiseModel.from_json_obj(json.loads(json.dumps(obj)))
    assert any("renormalizing" in str(x.message) for x in w)
    np.testing.assert_allclose(m.blocks[0].matrix.sum(axis=0), 1.0)
