from dataclasses import dataclass
from typing import Sequence

import numpy as np
from tqdm import tqdm

from erdlab.diffusion.schedules import Schedule
from erdlab.diffusion.targets import TargetSpec
from erdlab.errors import ContractError
from erdlab.network.mlp import MlpModel
from erdlab.oracle.gmm import GmmModel, Predictor, bayes_predictor, excess_decomposition
from erdlab.utils.shards import DEFAULT_SHARDS, spawn_generators


@dataclass(frozen=True)
class CurvePoint:
    t: float
    mse: float
    mse_stderr: float
    floor: float
    floor_stderr: float
    excess: float
    excess_stderr: float
    in_range: bool = True

    @property
    def above_floor(self) -> bool:
        """Dominance check: mse >= floor up to four paired standard errors."""
        return self.excess >= -4.0 * self.excess_stderr


class OraclePredictor:
    """The Bayes predictor packaged with the model call signature."""

    def __init__(self, gmm: GmmModel, target: TargetSpec, schedule: Schedule):
        self.gmm = gmm
        self.target = target
        self.schedule = schedule

    def __call__(self, x, t) -> np.ndarray:
        return bayes_predictor(self.gmm, self.target, self.schedule, t, x)


class PiecewiseModel:
    """Routes every sample to the model trained on the bin containing its t."""

    def __init__(self, bins: Sequence[tuple[float, float]], models: Sequence[MlpModel]):
        if len(bins) != len(models) or not bins:
            raise ContractError(f"Got {len(bins)} bins for {len(models)} models")
        self.bins = [tuple(map(float, b)) for b in bins]
        self.models = list(models)
        self.lower_edges = np.array([lo for lo, _ in self.bins])

    def bin_index(self, t) -> np.ndarray:
        index = np.searchsorted(self.lower_edges, np.asarray(t), side="right") - 1
        return np.clip(index, 0, len(self.models) - 1)

    def __call__(self, x, t) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        t = np.broadcast_to(np.asarray(t, dtype=np.float64), (x.shape[0],))
        output = np.empty_like(x)
        index = self.bin_index(t)
        for bin_id in np.unique(index):
            mask = index == bin_id
            output[mask] = self.models[bin_id].predict(x[mask], t[mask])
        return output


def evaluate_loss_curve(
    model: Predictor,
    gmm: GmmModel,
    target: TargetSpec,
    schedule: Schedule,
    t_grid: Sequence[float],
    n_mc: int,
    rng: np.random.Generator,
    trained_range: tuple[float, float] = (0.0, 1.0),
    shards: int = DEFAULT_SHARDS,
    progress: bool = False,
) -> list[CurvePoint]:
    """Unweighted per-t MSE paired with the Bayes floor on the same draws."""
    t_grid = [float(t) for t in t_grid]
    generators = spawn_generators(rng, len(t_grid))
    lo, hi = trained_range

    curve = []
    for t, t_rng in tqdm(
        list(zip(t_grid, generators)), desc="Evaluating loss curve", unit="t", disable=not progress
    ):
        estimate = excess_decomposition(gmm, target, schedule, t, model, n_mc, t_rng, shards)
        curve.append(
            CurvePoint(
                t=t,
                mse=estimate.mse,
                mse_stderr=estimate.mse_stderr,
                floor=estimate.floor,
                floor_stderr=estimate.floor_stderr,
                excess=estimate.excess,
                excess_stderr=estimate.excess_stderr,
                in_range=lo <= t <= hi,
            )
        )
    return curve
