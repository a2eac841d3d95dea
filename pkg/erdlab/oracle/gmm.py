"""Isotropic Gaussian mixture data and its exact Bayes oracles under x_t = alpha x0 + sigma eps.

Conditioning on x_t keeps every component Gaussian: component k contributes
N(x_t; alpha mu_k, (alpha^2 s0^2 + sigma^2) I) to the evidence, so the posterior
means of x0 and eps are closed-form mixtures.
"""

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.special import logsumexp

from erdlab.diffusion.schedules import Schedule
from erdlab.diffusion.targets import TargetSpec, make_target
from erdlab.errors import ContractError, DomainError
from erdlab.utils.shards import DEFAULT_SHARDS, run_sharded

DEFAULT_CENTERS = ((2.0, 2.0), (2.0, -2.0), (-2.0, 2.0), (-2.0, -2.0))

Predictor = Callable[[np.ndarray, np.ndarray], np.ndarray]


class GmmModel:
    def __init__(
        self,
        centers: Sequence[Sequence[float]] = DEFAULT_CENTERS,
        component_std: float = 0.3,
    ):
        centers = np.atleast_2d(np.asarray(centers, dtype=np.float64))
        if centers.shape[0] < 1:
            raise DomainError("A mixture needs at least one center")
        if not component_std > 0:
            raise DomainError(f"component_std must be positive, got {component_std}")

        self.centers = centers
        self.component_std = float(component_std)
        self.weights = np.full(centers.shape[0], 1.0 / centers.shape[0])

    @property
    def n_components(self) -> int:
        return self.centers.shape[0]

    @property
    def dim(self) -> int:
        return self.centers.shape[1]

    @property
    def mean(self) -> np.ndarray:
        return self.weights @ self.centers

    @property
    def second_moment(self) -> float:
        """E||x0||^2 = sum_k pi_k ||mu_k||^2 + d s0^2."""
        return float(
            self.weights @ np.sum(np.square(self.centers), axis=1)
            + self.dim * self.component_std**2
        )

    @property
    def trace_covariance(self) -> float:
        return self.second_moment - float(np.sum(np.square(self.mean)))

    def sample(self, count: int, rng: np.random.Generator, return_labels: bool = False):
        if count < 1:
            raise DomainError(f"Sample count must be at least 1, got {count}")
        labels = rng.integers(0, self.n_components, size=count)
        noise = rng.standard_normal((count, self.dim))
        points = self.centers[labels] + self.component_std * noise
        if return_labels:
            return points, labels
        return points

    def describe(self) -> dict:
        return {
            "centers": self.centers.tolist(),
            "component_std": self.component_std,
        }

    def __repr__(self) -> str:
        return f"<GmmModel K={self.n_components} d={self.dim} s0={self.component_std}>"


@dataclass(frozen=True)
class BayesDecomposition:
    signal_norm: np.ndarray
    noise_norm: np.ndarray

    def __len__(self) -> int:
        return len(self.signal_norm)

    def __iter__(self):
        return zip(self.signal_norm.tolist(), self.noise_norm.tolist())

    @property
    def contaminated(self) -> np.ndarray:
        return self.noise_norm > self.signal_norm


@dataclass(frozen=True)
class FloorEstimate:
    mse: float
    stderr: float
    n: int


@dataclass(frozen=True)
class ExcessEstimate:
    mse: float
    mse_stderr: float
    floor: float
    floor_stderr: float
    excess: float
    excess_stderr: float
    cross_term: float
    cross_stderr: float
    n: int


@dataclass(frozen=True)
class CouplingEstimate:
    empirical: float
    analytic: float
    stderr: float

    @property
    def rel_error(self) -> float:
        if self.analytic == 0.0:
            return abs(self.empirical)
        return abs(self.empirical - self.analytic) / self.analytic


def mean_and_stderr(values: np.ndarray) -> tuple[float, float]:
    values = np.asarray(values, dtype=np.float64)
    if values.size < 2:
        return float(values.mean()), 0.0
    return float(values.mean()), float(values.std(ddof=1) / np.sqrt(values.size))


def _as_batch(x_t) -> tuple[np.ndarray, bool]:
    x_t = np.asarray(x_t, dtype=np.float64)
    if not np.all(np.isfinite(x_t)):
        raise ContractError("x_t must be finite")
    if x_t.ndim == 1:
        return x_t[None, :], True
    return x_t, False


def _column(value, n: int) -> np.ndarray:
    value = np.asarray(value, dtype=np.float64)
    if value.ndim == 0:
        return value
    if value.shape != (n,):
        raise ContractError(f"Got {value.shape[0]} times for {n} points")
    return value[:, None]


def _posterior(gmm: GmmModel, schedule: Schedule, t, x_t: np.ndarray):
    """Responsibilities (n, K) and the responsibility-weighted residual sum_k r_k (x - alpha mu_k)."""
    if x_t.shape[1] != gmm.dim:
        raise ContractError(f"x_t has dimension {x_t.shape[1]}, mixture has {gmm.dim}")
    n = x_t.shape[0]
    alpha, sigma = schedule.alpha_sigma(t)
    alpha, sigma = _column(alpha, n), _column(sigma, n)
    variance = np.square(alpha) * gmm.component_std**2 + np.square(sigma)

    residual = x_t[:, None, :] - np.expand_dims(alpha, -1) * gmm.centers[None, :, :]
    logits = np.log(gmm.weights)[None, :] - np.sum(np.square(residual), axis=2) / (
        2.0 * variance
    )
    responsibilities = np.exp(logits - logsumexp(logits, axis=1, keepdims=True))
    weighted_residual = np.einsum("nk,nkd->nd", responsibilities, residual)
    return responsibilities, weighted_residual, alpha, sigma, variance


def sample_x0(gmm: GmmModel, count: int, rng: np.random.Generator, return_labels=False):
    return gmm.sample(count, rng, return_labels=return_labels)


def posterior_responsibilities(gmm: GmmModel, schedule: Schedule, t, x_t) -> np.ndarray:
    batch, single = _as_batch(x_t)
    responsibilities = _posterior(gmm, schedule, t, batch)[0]
    return responsibilities[0] if single else responsibilities


def posterior_means(gmm: GmmModel, schedule: Schedule, t, x_t):
    """(E[x0 | x_t], E[eps | x_t]); E[eps | x_t] vanishes at sigma = 0."""
    batch, single = _as_batch(x_t)
    responsibilities, weighted_residual, alpha, sigma, variance = _posterior(
        gmm, schedule, t, batch
    )
    gain = alpha * gmm.component_std**2 / variance
    mean_x0 = responsibilities @ gmm.centers + gain * weighted_residual
    mean_eps = (sigma / variance) * weighted_residual
    if single:
        return mean_x0[0], mean_eps[0]
    return mean_x0, mean_eps


def bayes_predictor(gmm: GmmModel, target: TargetSpec, schedule: Schedule, t, x_t):
    mean_x0, mean_eps = posterior_means(gmm, schedule, t, x_t)
    return make_target(target, schedule, mean_x0, mean_eps, t)


def _draw(gmm: GmmModel, schedule: Schedule, t: float, size: int, rng):
    x0 = gmm.sample(size, rng)
    eps = rng.standard_normal(x0.shape)
    alpha, sigma = schedule.alpha_sigma(t)
    return x0, eps, alpha * x0 + sigma * eps


def bayes_floor(
    gmm: GmmModel,
    target: TargetSpec,
    schedule: Schedule,
    t: float,
    n_mc: int,
    rng: np.random.Generator,
    shards: int = DEFAULT_SHARDS,
) -> FloorEstimate:
    if n_mc < 1:
        raise DomainError(f"n_mc must be at least 1, got {n_mc}")

    def shard(size, shard_rng):
        x0, eps, x_t = _draw(gmm, schedule, t, size, shard_rng)
        y = make_target(target, schedule, x0, eps, t)
        f_star = bayes_predictor(gmm, target, schedule, t, x_t)
        return np.sum(np.square(f_star - y), axis=1)

    errors = np.concatenate(run_sharded(shard, n_mc, rng, shards))
    mse, stderr = mean_and_stderr(errors)
    return FloorEstimate(mse=mse, stderr=stderr, n=errors.size)


def signal_noise_decomposition(
    gmm: GmmModel, target: TargetSpec, schedule: Schedule, t: float, x0, eps
) -> BayesDecomposition:
    x0, _ = _as_batch(x0)
    eps, _ = _as_batch(eps)
    alpha, sigma = schedule.alpha_sigma(t)
    y = make_target(target, schedule, x0, eps, t)
    f_star = bayes_predictor(gmm, target, schedule, t, alpha * x0 + sigma * eps)
    return BayesDecomposition(
        signal_norm=np.linalg.norm(f_star, axis=1),
        noise_norm=np.linalg.norm(y - f_star, axis=1),
    )


def contamination_fraction(decomposition: BayesDecomposition) -> float:
    """Share of samples past the 50% contamination boundary (noise norm above signal norm)."""
    return float(np.mean(decomposition.contaminated))


def excess_decomposition(
    gmm: GmmModel,
    target: TargetSpec,
    schedule: Schedule,
    t: float,
    predictor: Predictor,
    n_mc: int,
    rng: np.random.Generator,
    shards: int = DEFAULT_SHARDS,
) -> ExcessEstimate:
    """Paired estimate of mse = floor + ||g - f*||^2 + 2 <g - f*, f* - y> for a predictor g."""
    if n_mc < 1:
        raise DomainError(f"n_mc must be at least 1, got {n_mc}")

    def shard(size, shard_rng):
        x0, eps, x_t = _draw(gmm, schedule, t, size, shard_rng)
        y = make_target(target, schedule, x0, eps, t)
        f_star = bayes_predictor(gmm, target, schedule, t, x_t)
        prediction = np.asarray(predictor(x_t, np.full(size, float(t))), dtype=np.float64)
        return np.stack(
            [
                np.sum(np.square(prediction - y), axis=1),
                np.sum(np.square(f_star - y), axis=1),
                np.sum((prediction - f_star) * (f_star - y), axis=1),
            ],
            axis=1,
        )

    columns = np.concatenate(run_sharded(shard, n_mc, rng, shards))
    mse, mse_stderr = mean_and_stderr(columns[:, 0])
    floor, floor_stderr = mean_and_stderr(columns[:, 1])
    excess, excess_stderr = mean_and_stderr(columns[:, 0] - columns[:, 1])
    cross, cross_stderr = mean_and_stderr(columns[:, 2])
    return ExcessEstimate(
        mse=mse,
        mse_stderr=mse_stderr,
        floor=floor,
        floor_stderr=floor_stderr,
        excess=excess,
        excess_stderr=excess_stderr,
        cross_term=cross,
        cross_stderr=cross_stderr,
        n=columns.shape[0],
    )


def w2_coupling_cost(
    gmm: GmmModel,
    schedule: Schedule,
    t: float,
    n_mc: int,
    rng: np.random.Generator,
    shards: int = DEFAULT_SHARDS,
) -> CouplingEstimate:
    """Cost of the coupling (x_t, sigma_max eps) against alpha^2 E||x0||^2 + (sigma - sigma_max)^2 d."""
    if n_mc < 1:
        raise DomainError(f"n_mc must be at least 1, got {n_mc}")
    alpha, sigma = schedule.alpha_sigma(t)
    gap = sigma - schedule.sigma_max

    def shard(size, shard_rng):
        x0 = gmm.sample(size, shard_rng)
        eps = shard_rng.standard_normal(x0.shape)
        return np.sum(np.square(alpha * x0 + gap * eps), axis=1)

    costs = np.concatenate(run_sharded(shard, n_mc, rng, shards))
    empirical, stderr = mean_and_stderr(costs)
    analytic = alpha**2 * gmm.second_moment + gap**2 * gmm.dim
    return CouplingEstimate(empirical=empirical, analytic=float(analytic), stderr=stderr)
