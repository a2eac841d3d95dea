from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from loguru import logger
from tqdm import tqdm

from erdlab.diffusion.schedules import LinearSchedule, Schedule, corrupt
from erdlab.diffusion.targets import EpsTarget, TargetSpec, make_target
from erdlab.diffusion.weights import WeightKind, make_weight_rule
from erdlab.errors import ConfigError, ContractError, TrainingFault
from erdlab.network.mlp import MlpConfig, MlpModel
from erdlab.oracle.gmm import GmmModel
from erdlab.trainer.adam import Adam
from erdlab.trainer.evaluation import CurvePoint, evaluate_loss_curve
from erdlab.utils.shards import map_ordered, thread_count


@dataclass(frozen=True)
class TrainConfig:
    iterations: int = 2000
    batch: int = 512
    lr: float = 1e-3
    betas: tuple[float, float] = (0.9, 0.999)
    adam_eps: float = 1e-8
    t_range: tuple[float, float] = (0.0, 1.0)
    seed: int = 0
    target: TargetSpec = field(default_factory=EpsTarget)
    schedule: Schedule = field(default_factory=LinearSchedule)
    weight: WeightKind = WeightKind.UNIFORM
    gamma: float = 5.0
    model: MlpConfig = field(default_factory=MlpConfig)
    eval_every: int = 0
    eval_grid_size: int = 11
    eval_samples: int = 2048
    log_window: int = 50

    def __post_init__(self):
        lo, hi = self.t_range
        if not 0.0 <= lo < hi <= 1.0:
            raise ConfigError(f"t_range must satisfy 0 <= lo < hi <= 1, got {self.t_range}")
        if self.lr <= 0:
            raise ConfigError(f"lr must be positive, got {self.lr}")
        if self.batch < 1:
            raise ConfigError(f"batch must be at least 1, got {self.batch}")
        if self.iterations < 0:
            raise ConfigError(f"iterations must be non-negative, got {self.iterations}")

    def weight_rule(self):
        return make_weight_rule(self.weight, self.target, self.schedule, self.gamma)


@dataclass
class MetricLog:
    iterations: list[int] = field(default_factory=list)
    losses: list[float] = field(default_factory=list)
    curves: dict[int, list[CurvePoint]] = field(default_factory=dict)

    def append(self, iteration: int, loss: float):
        if self.iterations and iteration <= self.iterations[-1]:
            raise ContractError(f"Iteration {iteration} logged after {self.iterations[-1]}")
        self.iterations.append(iteration)
        self.losses.append(loss)

    def __len__(self) -> int:
        return len(self.losses)

    def running_loss(self, which: str = "final", window: int = 50) -> float:
        if not self.losses:
            raise ContractError("Empty metric log")
        window = min(window, len(self.losses))
        values = self.losses[:window] if which == "initial" else self.losses[-window:]
        return float(np.mean(values))


def _evaluate(model: MlpModel, gmm: GmmModel, config: TrainConfig, iteration: int):
    lo, hi = config.t_range
    return evaluate_loss_curve(
        model,
        gmm,
        config.target,
        config.schedule,
        np.linspace(lo, hi, config.eval_grid_size),
        config.eval_samples,
        np.random.default_rng((config.seed, iteration)),
        trained_range=config.t_range,
    )


def train(
    config: TrainConfig,
    gmm: GmmModel,
    rng: np.random.Generator | None = None,
    progress: bool = True,
) -> tuple[MlpModel, MetricLog]:
    """Adam on the weighted objective with fresh mixture samples every step."""
    rng = rng if rng is not None else np.random.default_rng(config.seed)
    model = MlpModel.init(config.model, config.seed)
    rule = config.weight_rule()
    optimizer = Adam(model.params, config.lr, config.betas, config.adam_eps)
    log = MetricLog()
    lo, hi = config.t_range

    logger.debug(
        f"Training {config.target.kind}/{config.schedule.kind}/{config.weight} on t in [{lo}, {hi}] "
        f"for {config.iterations} iterations (P={model.param_count})"
    )
    bar = tqdm(
        range(config.iterations),
        desc=f"Training [{lo:g}, {hi:g}]",
        unit="it",
        disable=not progress,
    )
    for iteration in bar:
        x0 = gmm.sample(config.batch, rng)
        eps = rng.standard_normal(x0.shape)
        t = rng.uniform(lo, hi, config.batch)
        x_t = corrupt(config.schedule, x0, eps, t)
        y = make_target(config.target, config.schedule, x0, eps, t)

        loss, grad = model.loss_grad(x_t, t, y, rule(t))
        if not np.isfinite(loss) or not np.all(np.isfinite(grad)):
            raise TrainingFault(f"Non-finite loss {loss}", iteration)

        optimizer.step(grad)
        if not np.all(np.isfinite(model.params)):
            raise TrainingFault("Non-finite parameters after Adam step", iteration)

        log.append(iteration, loss)
        if iteration % 100 == 0:
            bar.set_postfix(loss=f"{loss:.4f}")

        if config.eval_every and (iteration + 1) % config.eval_every == 0:
            log.curves[iteration + 1] = _evaluate(model, gmm, config, iteration + 1)
            bar.write(f"Evaluated loss curve at iteration {iteration + 1}")

    bar.close()
    if config.eval_every and config.iterations not in log.curves:
        log.curves[config.iterations] = _evaluate(model, gmm, config, config.iterations)
    if log.losses:
        logger.info(
            f"Trained [{lo:g}, {hi:g}]: running loss {log.running_loss('initial', config.log_window):.4f} -> "
            f"{log.running_loss('final', config.log_window):.4f}"
        )
    return model, log


def default_bins(count: int = 5) -> list[tuple[float, float]]:
    edges = np.linspace(0.0, 1.0, count + 1)
    return [(float(lo), float(hi)) for lo, hi in zip(edges[:-1], edges[1:])]


def validate_bins(bins: Sequence[Sequence[float]]) -> list[tuple[float, float]]:
    if not bins:
        raise ConfigError("Piecewise training needs at least one bin")
    bins = [(float(lo), float(hi)) for lo, hi in bins]
    for lo, hi in bins:
        if not 0.0 <= lo < hi <= 1.0:
            raise ConfigError(f"Bin [{lo}, {hi}] is not a sub-interval of [0, 1]")
    for (_, previous_hi), (lo, _) in zip(bins[:-1], bins[1:]):
        if not np.isclose(previous_hi, lo):
            raise ConfigError(f"Bins must be contiguous and sorted, got {bins}")
    if not (np.isclose(bins[0][0], 0.0) and np.isclose(bins[-1][1], 1.0)):
        raise ConfigError(f"Bins must cover [0, 1], got {bins}")
    return bins


def train_piecewise(
    config: TrainConfig,
    bins: Sequence[Sequence[float]],
    gmm: GmmModel,
    progress: bool = True,
) -> list[tuple[tuple[float, float], MlpModel, MetricLog]]:
    """One independent model per bin; bin i trains with seed config.seed + i."""
    bins = validate_bins(bins)
    parallel = thread_count() > 1 and len(bins) > 1

    def train_bin(job):
        index, (lo, hi) = job
        bin_config = replace(config, t_range=(lo, hi), seed=config.seed + index)
        model, log = train(bin_config, gmm, progress=progress and not parallel)
        return (lo, hi), model, log

    logger.info(f"Training {len(bins)} piecewise models")
    return map_ordered(train_bin, enumerate(bins))
