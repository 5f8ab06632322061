"""Maximum likelihood amplitude estimation with the modified Grover iterator.

After ``m`` iterations the all-zeros outcome has probability
``cos^2(2 m theta)``.  Observations are ``(m, h, w)`` triples: ``h`` is the
(possibly fractional, after mitigation) number of all-zeros outcomes out of
``w`` shots.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .baselines import mooney_mitigate, rigorous_mitigate
from .errors import DomainError, InputError
from .mitigator import mitigate
from .noise_model import synth_uniform
from .simulate import apply_noise_exact, grover_ideal, sample_counts, target_amplitude

EPS = 1e-12
# cos^2(2 m theta) is invariant under theta -> pi/2 - theta for every m, so the
# angle is only identifiable on (0, pi/4]
THETA_MAX = math.pi / 4
GRID_POINTS = 100_000
DEFAULT_SCHEDULE = (1, 2, 4, 8, 16, 32, 64)
MLAE_METHODS = ("raw", "least_norm", "delta", "rigorous", "mooney")


@dataclass(frozen=True)
class MlaeSchedule:
    iterations: tuple[int, ...] = DEFAULT_SCHEDULE
    shots_per_circuit: int = 100

    def __post_init__(self):
        it = tuple(int(m) for m in self.iterations)
        if not it or it[0] < 1 or any(b <= a for a, b in zip(it, it[1:])):
            raise InputError(f"iterations must be strictly increasing and >= 1, got {self.iterations}")
        if self.shots_per_circuit < 1:
            raise InputError("need at least one shot per circuit")
        object.__setattr__(self, "iterations", it)

    def queries(self) -> np.ndarray:
        """Cumulative oracle calls after each prefix of the schedule."""
        return self.shots_per_circuit * np.cumsum(self.iterations)


@dataclass(frozen=True)
class MlaeResult:
    theta_hat: float
    queries: int
    error: float | None = None

    @property
    def amplitude_hat(self) -> float:
        return math.sin(self.theta_hat) ** 2


def _loglik_terms(theta: np.ndarray, m: int, h: float, w: float) -> np.ndarray:
    p = np.clip(np.cos(2 * m * theta) ** 2, EPS, 1 - EPS)
    return h * np.log(p) + (w - h) * np.log1p(-p)


def log_likelihood(theta: float, observations: Sequence[tuple[int, float, float]]) -> float:
    """Binomial log-likelihood summed over ``(m, h, w)`` observations."""
    th = np.asarray(theta, dtype=float)
    total = 0.0
    for m, h, w in observations:
        if not 0 <= h <= w:
            raise InputError(f"need 0 <= h <= w, got h={h}, w={w}")
        total = total + _loglik_terms(th, m, h, w)
    return float(total) if np.ndim(total) == 0 else total


def mle_theta(
    observations: Sequence[tuple[int, float, float]],
    schedule: MlaeSchedule | None = None,
    theta_true: float | None = None,
    grid_points: int = GRID_POINTS,
) -> list[MlaeResult]:
    """Maximum likelihood estimate for every prefix of the observations.

    The likelihood is maximized on a uniform grid over ``(0, pi/4]`` and the
    best grid cell is refined with a bounded scalar minimizer to ``1e-12``.
    Exact ties on the grid resolve to the smallest angle.
    """
    if not observations:
        raise InputError("no observations")
    if schedule is not None and [o[0] for o in observations] != list(schedule.iterations[: len(observations)]):
        raise InputError("observations do not follow the schedule")
    step = THETA_MAX / grid_points
    grid = (np.arange(grid_points) + 0.5) * step
    running = np.zeros(grid_points)
    queries = 0
    results = []
    for K, (m, h, w) in enumerate(observations):
        if not 0 <= h <= w:
            raise InputError(f"need 0 <= h <= w, got h={h}, w={w}")
        running += _loglik_terms(grid, m, h, w)
        queries += int(round(w)) * int(m)
        prefix = observations[: K + 1]
        if all(o[2] == 0 for o in prefix):
            warnings.warn("all observations are empty; likelihood is flat", stacklevel=2)
        j = int(np.argmax(running))
        lo, hi = max(grid[j] - step, EPS), min(grid[j] + step, THETA_MAX)
        res = minimize_scalar(
            lambda t: -log_likelihood(t, prefix), bounds=(lo, hi), method="bounded", options={"xatol": 1e-12}
        )
        theta = float(res.x) if -res.fun >= running[j] else float(grid[j])
        err = None if theta_true is None else abs(theta - theta_true)
        results.append(MlaeResult(theta, queries, err))
    return results


def heisenberg_reference(queries: Sequence[float], first_point: tuple[float, float]) -> np.ndarray:
    """Reference curve ``c / queries`` through ``first_point = (queries0, error0)``."""
    nq0, err0 = first_point
    if nq0 < 1 or err0 <= 0:
        raise DomainError("reference point needs at least one query and a positive error")
    q = np.asarray(queries, dtype=float)
    if np.any(q < 1):
        raise DomainError("query counts must be >= 1")
    return (nq0 * err0) / q


def loglog_slope(queries: Sequence[float], errors: Sequence[float]) -> float:
    """Least-squares slope of ``log(error)`` against ``log(queries)``."""
    return float(np.polyfit(np.log(queries), np.log(errors), 1)[0])


@dataclass
class ExperimentConfig:
    n: int = 10
    b_max: float = 0.5
    shots: int = 100
    noise_levels: tuple[float, ...] = (0.0, 0.01, 0.03, 0.05)
    methods: tuple[str, ...] = ("raw", "least_norm")
    trials: int = 10
    seed: int = 0
    schedule: tuple[int, ...] = DEFAULT_SCHEDULE
    residual_support: int = 64
    mooney_threshold: float = 0.01
    grid_points: int = GRID_POINTS


@dataclass
class Curve:
    noise: float
    method: str
    queries: list[int]
    theta_errors: np.ndarray  # (trials, prefixes)
    amplitude_errors: np.ndarray
    zero_counts: np.ndarray  # (trials, schedule steps) quasi-counts of the all-zeros string

    @property
    def mean_error(self) -> np.ndarray:
        return self.theta_errors.mean(axis=0)

    def to_json_obj(self) -> dict:
        return {
            "noise": self.noise,
            "method": self.method,
            "queries": list(self.queries),
            "theta_error_mean": self.theta_errors.mean(axis=0).tolist(),
            "theta_error_std": self.theta_errors.std(axis=0, ddof=1).tolist() if len(self.theta_errors) > 1 else [0.0] * len(self.queries),
            "amplitude_error_mean": self.amplitude_errors.mean(axis=0).tolist(),
            "zero_count_mean": self.zero_counts.mean(axis=0).tolist(),
            "zero_count_std": self.zero_counts.std(axis=0, ddof=1).tolist() if len(self.zero_counts) > 1 else [0.0] * len(self.queries),
        }


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    theta_true: float
    ideal_zero_counts: list[float]
    curves: list[Curve] = field(default_factory=list)
    heisenberg: list[float] | None = None

    def curve(self, noise: float, method: str) -> Curve:
        for c in self.curves:
            if c.method == method and math.isclose(c.noise, noise):
                return c
        raise KeyError((noise, method))

    def to_json_obj(self) -> dict:
        cfg = dict(vars(self.config))
        return {
            "schema": "sparseqrem.mlae/1",
            "config": {k: list(v) if isinstance(v, tuple) else v for k, v in cfg.items()},
            "theta_true": self.theta_true,
            "schedule": list(self.config.schedule),
            "ideal_zero_counts": self.ideal_zero_counts,
            "heisenberg_reference": self.heisenberg,
            "curves": [c.to_json_obj() for c in self.curves],
        }

    def to_csv_rows(self) -> list[dict]:
        rows = []
        for c in self.curves:
            obj = c.to_json_obj()
            for i, q in enumerate(c.queries):
                rows.append(
                    {
                        "noise": c.noise,
                        "method": c.method,
                        "m": self.config.schedule[i],
                        "queries": q,
                        "theta_error_mean": obj["theta_error_mean"][i],
                        "theta_error_std": obj["theta_error_std"][i],
                        "zero_count_mean": obj["zero_count_mean"][i],
                        "ideal_zero_count": self.ideal_zero_counts[i],
                    }
                )
        return rows


def _zero_weight(counts, model, method: str, mooney_t: float) -> float:
    zero = "0" * counts.width
    if method == "raw" or model is None:
        return counts.get(zero, 0.0)
    if method in ("least_norm", "delta"):
        dist = mitigate(counts, model, method).mitigated
    elif method == "rigorous":
        dist = rigorous_mitigate(counts, model).mitigated
    elif method == "mooney":
        dist = mooney_mitigate(counts, model, mooney_t).mitigated
    else:
        raise InputError(f"unknown method {method!r}; expected one of {MLAE_METHODS}")
    return dist.get(zero, 0.0)


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Simulate MLAE under symmetric readout noise for each method.

    For every noise level, method, trial and schedule step: build the ideal
    modified-Grover distribution, push it through the noise model, sample
    ``config.shots`` outcomes keyed by ``(seed, m, trial)``, mitigate, and
    record the all-zeros weight as a quasi-count.  The same samples are shared
    across methods.
    """
    schedule = MlaeSchedule(config.schedule, config.shots)
    s_val, _, theta_true = target_amplitude(config.n, config.b_max)
    queries = schedule.queries().tolist()
    width = config.n + 1
    ideal = {m: grover_ideal(config.n, m, theta_true, config.residual_support, config.seed) for m in schedule.iterations}
    report = ExperimentReport(
        config, theta_true, [config.shots * math.cos(2 * m * theta_true) ** 2 for m in schedule.iterations]
    )

    for noise in config.noise_levels:
        model = synth_uniform(width, noise, noise) if noise > 0 else None
        noisy = {m: apply_noise_exact(d, model) if model else d for m, d in ideal.items()}
        samples = {
            (m, t): sample_counts(noisy[m], config.shots, (config.seed, m, t))
            for m in schedule.iterations
            for t in range(config.trials)
        }
        for method in config.methods:
            th_err = np.zeros((config.trials, len(queries)))
            amp_err = np.zeros_like(th_err)
            zeros = np.zeros_like(th_err)
            for t in range(config.trials):
                obs = []
                for i, m in enumerate(schedule.iterations):
                    h = _zero_weight(samples[m, t], model, method, config.mooney_threshold) * config.shots
                    h = min(max(h, 0.0), float(config.shots))
                    zeros[t, i] = h
                    obs.append((m, h, config.shots))
                for i, r in enumerate(mle_theta(obs, schedule, theta_true, config.grid_points)):
                    th_err[t, i] = r.error
                    amp_err[t, i] = abs(r.amplitude_hat - s_val)
            report.curves.append(Curve(noise, method, queries, th_err, amp_err, zeros))

    first = next((c for c in report.curves if c.noise == 0.0 and c.method == "raw"), None) or (
        report.curves[0] if report.curves else None
    )
    if first is not None and first.mean_error[0] > 0:
        report.heisenberg = heisenberg_reference(queries, (queries[0], float(first.mean_error[0]))).tolist()
    return report
