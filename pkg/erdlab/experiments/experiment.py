from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from erdlab.config import ExperimentConfig
from erdlab.errors import ConfigError, MissingCheckpointError
from erdlab.network.checkpoint import load_checkpoint
from erdlab.network.mlp import MlpModel
from erdlab.trainer.evaluation import PiecewiseModel
from erdlab.utils.mixins import CreateInstanceMixin, VisitSubclassesMixin
from erdlab.utils.report import ReportWriter


@dataclass
class RunContext:
    """Everything an experiment needs: config, output location and run-wide flags."""

    config: ExperimentConfig
    writer: ReportWriter
    oracle_only: bool = False
    progress: bool = True

    @property
    def out_dir(self) -> Path:
        return self.writer.out_dir

    def checkpoint_dir(self, target: str) -> Path:
        return self.out_dir / "checkpoints" / str(target)

    def global_checkpoint(self, target: str) -> Path:
        return self.checkpoint_dir(target) / "global.erdl"

    def bin_checkpoint(self, target: str, index: int) -> Path:
        return self.checkpoint_dir(target) / f"piecewise_{index}.erdl"

    def rng(self, *stream: int) -> np.random.Generator:
        """Generator for one named stream of the run; independent of execution order."""
        return np.random.default_rng([self.config.seed, *stream])

    def check_header(self, path: Path, header: dict, target: str, t_range: tuple[float, float]):
        expected = {
            "target": str(target),
            "schedule": str(self.config.schedule),
            "weight": str(self.config.weight),
        }
        for key, value in expected.items():
            if header.get(key) != value:
                raise ConfigError(
                    f"{path} was trained with {key} {header.get(key)}, config asks for {value}; "
                    f"rerun `erdlab train`"
                )
        trained = header.get("t_range")
        if trained is None or not np.allclose(trained, t_range):
            raise ConfigError(
                f"{path} covers t in {trained}, config asks for {list(t_range)}; rerun `erdlab train`"
            )

    def load_global(self, target: str) -> MlpModel:
        path = self.global_checkpoint(target)
        if not path.exists():
            raise MissingCheckpointError(f"Checkpoint not found: {path} (run `erdlab train` first)")
        model, header = load_checkpoint(path)
        self.check_header(path, header, target, (self.config.t_lo, self.config.t_hi))
        return model

    def load_piecewise(self, target: str) -> PiecewiseModel | None:
        paths = [self.bin_checkpoint(target, index) for index in range(len(self.config.bins))]
        if not all(path.exists() for path in paths):
            return None
        models = []
        for path, t_range in zip(paths, self.config.bins):
            model, header = load_checkpoint(path)
            self.check_header(path, header, target, t_range)
            models.append(model)
        return PiecewiseModel(self.config.bins, models)


class AbstractExperiment(ABC, VisitSubclassesMixin, CreateInstanceMixin):
    name: str = None
    order: int = 0
    uses_model: bool = False

    def __init__(self, context: RunContext):
        self.context = context
        self.config = context.config
        self.writer = context.writer

    @abstractmethod
    def run(self): ...

    def plot(self):
        """Write the SVG view of this experiment's CSVs; most experiments override."""

    @classmethod
    def get_class(cls, name: str) -> type["AbstractExperiment"]:
        for subclass in cls.visit_subclasses():
            if subclass.name == name:
                return subclass
        raise ValueError(f'Could not find experiment "{name}"')

    @classmethod
    def ordered(cls) -> list[type["AbstractExperiment"]]:
        return sorted(
            (subclass for subclass in cls.visit_subclasses() if subclass.name),
            key=lambda subclass: subclass.order,
        )

    @classmethod
    def names(cls) -> list[str]:
        return [subclass.name for subclass in cls.ordered()]
