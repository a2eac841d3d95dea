"""Experiment configuration.

Config files are plain `key = value` lines with `#` comments, read with
python-dotenv. Every key maps to one ExperimentConfig field; values are
validated when the dataclass is built.
"""

from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np
from dotenv import dotenv_values

from erdlab.diffusion.schedules import DEFAULT_LAMBDA_CLAMP, ScheduleKind, make_schedule
from erdlab.diffusion.targets import TargetKind, make_target_spec
from erdlab.diffusion.weights import WeightKind
from erdlab.errors import ConfigError, ErdlabError
from erdlab.network.mlp import MlpConfig
from erdlab.oracle.gmm import DEFAULT_CENTERS, GmmModel
from erdlab.spectra.ntk import Scalarization
from erdlab.trainer.trainer import TrainConfig, default_bins, validate_bins

TRUE_VALUES = {"1", "true", "yes", "on"}
FALSE_VALUES = {"0", "false", "no", "off"}


def parse_bool(value: str) -> bool:
    lowered = value.strip().lower()
    if lowered in TRUE_VALUES:
        return True
    if lowered in FALSE_VALUES:
        return False
    raise ValueError(f"not a boolean: {value!r}")


def parse_floats(value: str) -> tuple[float, ...]:
    return tuple(float(item) for item in value.split(",") if item.strip())


def parse_points(value: str) -> tuple[tuple[float, ...], ...]:
    """`2,2; -2,2; ...` -> ((2, 2), (-2, 2), ...)"""
    return tuple(parse_floats(point) for point in value.split(";") if point.strip())


def parse_targets(value: str) -> tuple[TargetKind, ...]:
    return tuple(TargetKind(item.strip()) for item in value.split(",") if item.strip())


def parse_bins(value: str) -> tuple[tuple[float, float], ...]:
    """Either a bin count (`5`) or explicit intervals (`0:0.2, 0.2:1`)."""
    value = value.strip()
    if ":" not in value:
        return tuple(default_bins(int(value)))
    bins = []
    for item in value.split(","):
        lo, hi = item.split(":")
        bins.append((float(lo), float(hi)))
    return tuple(bins)


@dataclass(frozen=True)
class ExperimentConfig:
    schedule: ScheduleKind = ScheduleKind.LINEAR
    beta_min: float = 0.1
    beta_max: float = 20.0
    lambda_clamp: float = DEFAULT_LAMBDA_CLAMP
    target: TargetKind = TargetKind.X0
    targets: tuple[TargetKind, ...] = tuple(TargetKind)
    weight: WeightKind = WeightKind.UNIFORM
    gamma: float = 5.0

    iterations: int = 2000
    batch: int = 512
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    t_lo: float = 0.0
    t_hi: float = 1.0
    seed: int = 0

    embed_dim: int = 64
    hidden_dim: int = 256
    depth: int = 3
    time_scale: float = 1000.0
    freq_base: float = 10000.0

    centers: tuple[tuple[float, ...], ...] = DEFAULT_CENTERS
    component_std: float = 0.3

    out_dir: str = "runs/default"
    t_grid_size: int = 101
    n_mc: int = 100_000
    n_eval: int = 16_384
    plot: bool = False
    bins: tuple[tuple[float, float], ...] = field(default_factory=lambda: tuple(default_bins(5)))
    piecewise: bool = True
    ntk_points: int = 64
    ntk_times: tuple[float, ...] = (0.05, 0.35, 0.65, 0.95)
    pca_times: tuple[float, ...] = (0.1, 0.4, 0.7, 0.9)
    pca_samples: int = 512
    pca_components: int = 2
    phase_samples: int = 1000
    scalarization: Scalarization = Scalarization.TRACE
    shards: int = 8
    eval_every: int = 0
    log_window: int = 50

    def __post_init__(self):
        for name in ("iterations",):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be non-negative, got {getattr(self, name)}")
        for name in (
            "batch", "n_mc", "n_eval", "ntk_points", "pca_samples", "pca_components",
            "phase_samples", "shards", "log_window",
        ):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if self.t_grid_size < 2:
            raise ConfigError(f"t_grid_size must be at least 2, got {self.t_grid_size}")
        if not 0.0 <= self.t_lo < self.t_hi <= 1.0:
            raise ConfigError(f"Need 0 <= t_lo < t_hi <= 1, got [{self.t_lo}, {self.t_hi}]")
        for name in ("pca_times", "ntk_times"):
            times = getattr(self, name)
            if not times or any(not 0.0 <= t <= 1.0 for t in times):
                raise ConfigError(f"{name} must be a non-empty subset of [0, 1], got {times}")
        if len(set(self.ntk_times)) < 2:
            raise ConfigError(f"ntk_times needs at least two distinct noise levels, got {self.ntk_times}")
        if not self.targets or len(set(self.targets)) != len(self.targets):
            raise ConfigError(f"targets must be distinct and non-empty, got {self.targets}")
        if self.pca_components > self.hidden_dim:
            raise ConfigError(
                f"pca_components ({self.pca_components}) exceeds hidden_dim ({self.hidden_dim})"
            )
        if self.eval_every < 0:
            raise ConfigError(f"eval_every must be non-negative, got {self.eval_every}")
        if not self.centers or len({len(c) for c in self.centers}) != 1:
            raise ConfigError(f"centers must be non-empty points of equal dimension, got {self.centers}")
        validate_bins(self.bins)
        try:
            self.schedule_model()
            self.mlp_config()
            self.gmm()
            self.train_config()
        except ErdlabError as error:
            if isinstance(error, ConfigError):
                raise
            raise ConfigError(str(error)) from error

    def schedule_model(self):
        return make_schedule(self.schedule, self.beta_min, self.beta_max, self.lambda_clamp)

    def target_spec(self, kind: str | None = None):
        return make_target_spec(kind or self.target)

    def gmm(self) -> GmmModel:
        return GmmModel(self.centers, self.component_std)

    def mlp_config(self) -> MlpConfig:
        return MlpConfig(
            data_dim=len(self.centers[0]),
            embed_dim=self.embed_dim,
            hidden_dim=self.hidden_dim,
            depth=self.depth,
            time_scale=self.time_scale,
            freq_base=self.freq_base,
        )

    def train_config(
        self, weight: str | None = None, target: str | None = None, **changes
    ) -> TrainConfig:
        config = TrainConfig(
            iterations=self.iterations,
            batch=self.batch,
            lr=self.lr,
            betas=(self.beta1, self.beta2),
            adam_eps=self.adam_eps,
            t_range=(self.t_lo, self.t_hi),
            seed=self.seed,
            target=self.target_spec(target),
            schedule=self.schedule_model(),
            weight=WeightKind(weight or self.weight),
            gamma=self.gamma,
            model=self.mlp_config(),
            eval_every=self.eval_every,
            log_window=self.log_window,
        )
        return replace(config, **changes) if changes else config

    def t_grid(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.t_grid_size)

    def as_dict(self) -> dict:
        payload = asdict(self)
        return {
            key: [list(item) for item in value] if key in ("centers", "bins")
            else list(value) if isinstance(value, tuple) else value
            for key, value in payload.items()
        }


PARSERS = {
    bool: parse_bool,
    int: int,
    float: float,
    str: str,
}
SPECIAL_PARSERS = {
    "centers": parse_points,
    "bins": parse_bins,
    "targets": parse_targets,
    "ntk_times": parse_floats,
    "pca_times": parse_floats,
}


def parse_values(raw: dict[str, str | None]) -> dict:
    known = {f.name: f for f in fields(ExperimentConfig)}
    values = {}
    for key, value in raw.items():
        key = key.strip().lower()
        if key not in known:
            raise ConfigError(f"Unknown config key `{key}`")
        if value is None:
            raise ConfigError(f"Config key `{key}` has no value")
        field_type = known[key].type
        parser = SPECIAL_PARSERS.get(key) or PARSERS.get(field_type) or field_type
        try:
            values[key] = parser(value)
        except ValueError as error:
            raise ConfigError(f"Invalid value {value!r} for `{key}`: {error}") from error
    return values


def load_config(path: str | Path | None = None, **overrides) -> ExperimentConfig:
    """Read a config file (optional) and apply typed overrides; None overrides are ignored."""
    values = {}
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"Config file not found: {path}")
        values = parse_values(dotenv_values(path))

    known = {f.name for f in fields(ExperimentConfig)}
    for key, value in overrides.items():
        if key not in known:
            raise ConfigError(f"Unknown config override `{key}`")
        if value is not None:
            values[key] = value
    return ExperimentConfig(**values)
