import math

import numpy as np
import pytest
from scipy.optimize import minimize

from conftest import dense_oracle, random_model
from sparseqrem.errors import DegenerateConstraintError, InputError
from sparseqrem.noise_model import LocalCalibration, TensorNoiseModel, synth_uniform
from sparseqrem.sum_correction import delta_approx, delta_exact, least_norm, top_directions


def labels(n):
    return [format(i, f"0{n}b") for i in range(2**n)]


def kkt_least_norm(x):
    """Solve min ||z - x||^2 s.t. 1^T z = 1 from the KKT system."""
    d = len(x)
    kkt = np.zeros((d + 1, d + 1))
    kkt[:d, :d] = 2 * np.eye(d)
    kkt[:d, d] = kkt[d, :d] = 1.0
    return np.linalg.solve(kkt, np.r_[2 * x, 1.0])[:d]


def test_least_norm_examples():
    np.testing.assert_allclose(least_norm(np.array([0.4, 0.4])).corrected, [0.5, 0.5])
    np.testing.assert_allclose(least_norm(np.array([1.2, -0.1])).corrected, [1.15, -0.15])
    x = np.array([0.3, 0.7])
    r = least_norm(x)
    np.testing.assert_array_equal(r.corrected, x)
    assert r.correction_norm == 0.0


def test_least_norm_matches_qp_oracle():
    rng = np.random.default_rng(5)
    for _ in range(50):
        x = rng.uniform(-0.5, 1.5, int(rng.integers(1, 33)))
        r = least_norm(x)
        assert abs(r.achieved_sum - 1) <= 1e-12
        np.testing.assert_allclose(r.corrected, kkt_least_norm(x), atol=1e-9)
        diffs = r.corrected - x
        np.testing.assert_allclose(diffs, diffs[0], atol=1e-15)


def test_least_norm_empty():
    with pytest.raises(InputError):
        least_norm(np.array([]))


def test_delta_single_qubit_example():
    cache = synth_uniform(1, 0.1, 0.1).svd
    x = np.array([0.6, 0.3])
    for r in (delta_exact(x, ["0", "1"], cache, 1), delta_approx(x, ["0", "1"], cache)):
        np.testing.assert_allclose(r.corrected, [0.65, 0.35], atol=1e-15)
    # second direction has zero column sum, so k=2 changes nothing
    np.testing.assert_allclose(delta_exact(x, ["0", "1"], cache, 2).corrected, [0.65, 0.35], atol=1e-15)


def test_delta_zero_when_sum_is_one():
    cache = synth_uniform(2, 0.05, 0.02).svd
    x = np.array([0.7, 0.3])
    np.testing.assert_array_equal(delta_approx(x, ["00", "11"], cache).corrected, x)


def test_delta_approx_sum_deficit():
    cache = synth_uniform(3, 0.05, 0.05).svd
    r = delta_approx(np.array([0.45, 0.45]), ["000", "111"], cache)
    np.testing.assert_allclose(r.corrected - 0.45, 0.0125, atol=1e-15)
    assert r.achieved_sum == pytest.approx(0.925)


@pytest.mark.parametrize("n", [1, 3, 6, 10])
def test_symmetric_delta_is_scaled_least_norm(n):
    rng = np.random.default_rng(n)
    model = synth_uniform(n, 0.04, 0.04)
    size = min(2**n, 50)
    sub = sorted(format(int(i), f"0{n}b") for i in rng.choice(2**n, size, replace=False))
    x = rng.random(size)
    x *= 0.93 / x.sum()
    ln = least_norm(x).corrected - x
    da = delta_approx(x, sub, model.svd).corrected - x
    np.testing.assert_allclose(da, ln * size / 2**n, rtol=1e-12, atol=1e-17)
    np.testing.assert_allclose(da, (1 - x.sum()) / 2**n, rtol=1e-12)
    np.testing.assert_allclose(delta_exact(x, sub, model.svd, 1).corrected, x + da, atol=1e-12)


@pytest.mark.parametrize("seed", range(6))
def test_delta_exact_full_rank_matches_constrained_qp(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 5))
    model = random_model(rng, n, max_block=2, shuffle=True)
    a, labs = dense_oracle(model)
    x = rng.uniform(-0.1, 0.5, 2**n)
    c = 1 - x.sum()
    # constrained QP: min ||A d||^2 s.t. 1^T d = c, closed form through the normal matrix
    g = np.linalg.solve(a.T @ a, np.ones(2**n))
    optimum = c**2 / g.sum()
    r = delta_exact(x, labs, model.svd, 2**n)
    d = r.corrected - x
    assert abs(r.achieved_sum - 1) <= 1e-9
    assert np.linalg.norm(a @ d) ** 2 == pytest.approx(optimum, rel=1e-8, abs=1e-14)
    # cross-check with a generic solver
    res = minimize(lambda z: np.sum((a @ z) ** 2), np.full(2**n, c / 2**n), constraints={"type": "eq", "fun": lambda z: z.sum() - c}, tol=1e-14)
    assert np.linalg.norm(a @ d) ** 2 <= res.fun + 1e-10


def test_top_directions_order():
    model = TensorNoiseModel(
        (LocalCalibration((0,), [[0.9, 0.3], [0.1, 0.7]]), LocalCalibration((1,), [[0.95, 0.0], [0.05, 1.0]])), 2
    )
    dirs = top_directions(model.svd, 4)
    weights = [model.svd.colsum(d) for d in dirs]
    assert weights == sorted(weights, reverse=True)
    assert sorted(dirs) == [(0, 0), (0, 1), (1, 0), (1, 1)]
    with pytest.raises(InputError):
        top_directions(model.svd, 5)


def test_degenerate_constraint():
    cache = synth_uniform(1, 0.1, 0.1).svd
    # only the second direction, whose column sum is zero
    object.__setattr__(cache.blocks[0], "colsum", np.array([0.0, 0.0]))
    with pytest.raises(DegenerateConstraintError):
        delta_approx(np.array([0.5, 0.3]), ["0", "1"], cache)
    with pytest.raises(DegenerateConstraintError):
        delta_exact(np.array([0.5, 0.3]), ["0", "1"], cache, 2)
