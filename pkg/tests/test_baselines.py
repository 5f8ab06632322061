import numpy as np
import pytest

from conftest import dense_oracle, random_model
from sparseqrem.baselines import mooney_mitigate, rigorous_mitigate
from sparseqrem.distributions import SparseDistribution, from_counts
from sparseqrem.errors import DomainError, SizeCapError
from sparseqrem.mitigator import mitigate
from sparseqrem.noise_model import LocalCalibration, TensorNoiseModel, synth_uniform
from sparseqrem.simplex import sgs_project
from sparseqrem.simulate import ghz_ideal, sample_noisy_counts


def random_counts(rng, n, support):
    idx = rng.choice(2**n, size=min(support, 2**n), replace=False)
    return from_counts({format(int(i), f"0{n}b"): int(c) for i, c in zip(idx, rng.integers(1, 100, len(idx)))})


def as_dense(d, n):
    out = np.zeros(2**n)
    for k, v in d.items():
        out[int(k, 2)] = v
    return out


def test_identity_model():
    model = TensorNoiseModel(tuple(LocalCalibration((q,), np.eye(2)) for q in range(3)), 3)
    y = from_counts({"000": 4, "101": 6})
    assert dict(rigorous_mitigate(y, model).mitigated) == pytest.approx(dict(y))
    rep = mooney_mitigate(y, model, 0.5)
    assert dict(rep.mitigated) == pytest.approx({"101": 1.0})


def test_single_qubit_example():
    rep = rigorous_mitigate(SparseDistribution({"0": 0.9, "1": 0.1}), synth_uniform(1, 0.1, 0.1))
    assert dict(rep.mitigated) == pytest.approx({"0": 1.0})


@pytest.mark.parametrize("seed", range(6))
def test_rigorous_matches_dense_solve_oracle(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 7))
    model = random_model(rng, n, max_block=3, shuffle=True)
    y = random_counts(rng, n, 20)
    a, _ = dense_oracle(model)
    x = np.linalg.solve(a, as_dense(y, n))
    x += (1 - x.sum()) / x.size
    expected = sgs_project(x)
    for solver in ("kron", "dense"):
        got = as_dense(rigorous_mitigate(y, model, solver=solver).mitigated, n)
        np.testing.assert_allclose(got, expected, atol=1e-12)


@pytest.mark.parametrize("seed", range(6))
def test_mooney_without_truncation_is_rigorous(seed):
    rng = np.random.default_rng(10 + seed)
    n = int(rng.integers(2, 7))
    model = random_model(rng, n, max_block=2, shuffle=True)
    y = random_counts(rng, n, 15)
    a = as_dense(mooney_mitigate(y, model, 0.0).mitigated, n)
    b = as_dense(rigorous_mitigate(y, model).mitigated, n)
    np.testing.assert_allclose(a, b, atol=1e-9)


@pytest.mark.parametrize("seed", range(4))
def test_full_space_pipeline_matches_rigorous(seed):
    rng = np.random.default_rng(20 + seed)
    n = int(rng.integers(2, 7))
    model = random_model(rng, n, shuffle=True)
    y = random_counts(rng, n, 2**n)
    a = as_dense(mitigate(y, model, matrix_free=True).mitigated, n)
    b = as_dense(rigorous_mitigate(y, model).mitigated, n)
    np.testing.assert_allclose(a, b, atol=1e-9)


def test_mooney_hand_trace():
    # two sequential 2x2 inverses with cutoff 0.1; nothing is cut after the
    # second block, then the uniform shift and negativity cancellation apply
    rep = mooney_mitigate(SparseDistribution({"00": 0.9, "11": 0.1}), synth_uniform(2, 0.1, 0.1), 0.1)
    assert dict(rep.mitigated) == pytest.approx({"00": 0.99921875, "11": 0.00078125}, abs=1e-14)
    assert rep.pre_correction_sum == pytest.approx(1.0125)
    assert rep.method == "mooney:0.1"


def test_outputs_are_probabilities():
    model = synth_uniform(8, 0.03, 0.05)
    y = sample_noisy_counts(ghz_ideal(8), model, 4000, 3)
    for rep in (rigorous_mitigate(y, model), mooney_mitigate(y, model, 0.01)):
        v = rep.mitigated.vector()
        assert np.all(v >= 0)
        assert v.sum() == pytest.approx(1.0, abs=1e-9)


def test_caps_and_domain():
    y = from_counts({"0" * 6: 1})
    with pytest.raises(SizeCapError):
        rigorous_mitigate(y, synth_uniform(6, 0.01, 0.01), cap=5)
    with pytest.raises(SizeCapError):
        mooney_mitigate(y, synth_uniform(6, 0.01, 0.01), 0.0, support_cap=8)
    with pytest.raises(DomainError):
        mooney_mitigate(y, synth_uniform(6, 0.01, 0.01), 1.0)
