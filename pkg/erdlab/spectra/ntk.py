"""Empirical neural tangent kernels of the time-conditioned MLP."""

from dataclasses import dataclass, field
from enum import StrEnum
from functools import cached_property
from typing import Sequence

import numpy as np
from loguru import logger
from scipy.stats import entropy, spearmanr

from erdlab.errors import ContractError, DegenerateKernelError, DegenerateSpectrumError
from erdlab.network.mlp import MlpModel
from erdlab.spectra.eigen import SYMMETRY_TOLERANCE, sym_eig

EIGENVALUE_FLOOR = 1e-12
PSD_TOLERANCE = 1e-8


class Scalarization(StrEnum):
    TRACE = "trace"
    FROBENIUS = "frobenius"


@dataclass
class NtkGram:
    block: np.ndarray
    scalar: np.ndarray
    xs: np.ndarray
    ts: np.ndarray
    scalarization: Scalarization = Scalarization.TRACE
    provenance: dict = field(default_factory=dict)

    @property
    def n_points(self) -> int:
        return self.scalar.shape[0]

    @property
    def output_dim(self) -> int:
        return self.block.shape[0] // self.n_points

    @property
    def is_joint(self) -> bool:
        return np.unique(self.ts).size > 1

    @cached_property
    def eigenvalues(self) -> np.ndarray:
        eigenvalues, _ = sym_eig(self.block)
        if eigenvalues[-1] < -PSD_TOLERANCE * max(eigenvalues[0], 0.0):
            raise ContractError(
                f"Gram is not positive semidefinite: min eigenvalue {eigenvalues[-1]:.3e}, "
                f"max {eigenvalues[0]:.3e}"
            )
        return eigenvalues


def scalarize(block: np.ndarray, n: int, scalarization: Scalarization) -> np.ndarray:
    blocks = block.reshape(n, -1, n, block.shape[0] // n).transpose(0, 2, 1, 3)
    if scalarization == Scalarization.FROBENIUS:
        return np.sqrt(np.sum(np.square(blocks), axis=(2, 3)))
    return np.trace(blocks, axis1=2, axis2=3) / blocks.shape[2]


def ntk_gram(
    model: MlpModel,
    xs,
    ts,
    scalarization: str = Scalarization.TRACE,
    provenance: dict | None = None,
) -> NtkGram:
    """Block Gram J_i J_j^T over the points (xs[i], ts[i]).

    Points spanning several noise levels give the joint kernel. The block is
    assembled layer by layer from activations and backprop deltas, never
    forming the full parameter Jacobian.
    """
    xs = np.atleast_2d(np.asarray(xs, dtype=np.float64))
    ts = np.broadcast_to(np.asarray(ts, dtype=np.float64), (xs.shape[0],)).copy()
    n = xs.shape[0]
    if n == 0:
        raise ContractError("ntk_gram needs at least one point")

    d = model.config.data_dim
    block = np.zeros((n, d, n, d))
    for inputs, deltas in model.jacobian_factors(xs, ts):
        shared = inputs @ inputs.T + 1.0
        flat = deltas.reshape(n * d, -1)
        block += shared[:, None, :, None] * (flat @ flat.T).reshape(n, d, n, d)
    block = block.reshape(n * d, n * d)

    scale = max(float(np.max(np.abs(block))), 1.0)
    asymmetry = float(np.max(np.abs(block - block.T)))
    if asymmetry > SYMMETRY_TOLERANCE * scale:
        raise ContractError(f"Assembled Gram is not symmetric (max asymmetry {asymmetry:.3e})")
    block = 0.5 * (block + block.T)

    scalarization = Scalarization(scalarization)
    logger.debug(f"Assembled {n * d}x{n * d} NTK block over {np.unique(ts).size} noise levels")
    return NtkGram(
        block=block,
        scalar=scalarize(block, n, scalarization),
        xs=xs,
        ts=ts,
        scalarization=scalarization,
        provenance=dict(provenance or {}),
    )


def ntk_spectrum(gram: NtkGram, k: int = 3) -> np.ndarray:
    size = gram.block.shape[0]
    if not 1 <= k <= size:
        raise ContractError(f"Requested {k} eigenvalues of a {size}x{size} Gram")
    return gram.eigenvalues[:k].copy()


def joint_ntk_spectrum(gram: NtkGram, k: int = 3) -> tuple[np.ndarray, float]:
    if not gram.is_joint:
        raise ContractError("Joint spectrum needs points at more than one noise level")
    return ntk_spectrum(gram, k), effective_rank(gram.eigenvalues)


def effective_rank(eigenvalues) -> float:
    """exp of the Shannon entropy of the normalized spectrum above the floor."""
    eigenvalues = np.asarray(eigenvalues, dtype=np.float64)
    retained = eigenvalues[eigenvalues > EIGENVALUE_FLOOR]
    if retained.size == 0:
        raise DegenerateSpectrumError(
            f"No eigenvalue above {EIGENVALUE_FLOOR} among {eigenvalues.size}"
        )
    return float(np.clip(np.exp(entropy(retained)), 1.0, retained.size))


def normalized_heatmap(gram: NtkGram) -> np.ndarray:
    diagonal = np.diag(gram.scalar)
    if np.any(diagonal <= 0.0):
        raise DegenerateKernelError(
            f"Scalarized Gram has {int(np.sum(diagonal <= 0.0))} non-positive diagonal entries"
        )
    scale = np.sqrt(diagonal)
    heatmap = np.clip(gram.scalar / np.outer(scale, scale), -1.0, 1.0)
    np.fill_diagonal(heatmap, 1.0)
    return heatmap


@dataclass(frozen=True)
class SpectralSummary:
    spearman_kappa1: float
    erank_low: float
    erank_high: float
    t_low: float
    t_high: float

    def as_dict(self) -> dict:
        return {
            "spearman_kappa1_vs_t": self.spearman_kappa1,
            "effective_rank_low": self.erank_low,
            "effective_rank_high": self.erank_high,
            "t_low": self.t_low,
            "t_high": self.t_high,
        }


def spectral_summary(
    ts: Sequence[float],
    kappa1: Sequence[float],
    eranks: Sequence[float],
    low: float = 0.1,
    high: float = 0.9,
) -> SpectralSummary:
    ts = np.asarray(ts, dtype=np.float64)
    if ts.size < 2:
        raise ContractError("Spectral summary needs at least two noise levels")
    low_index = int(np.argmin(np.abs(ts - low)))
    high_index = int(np.argmin(np.abs(ts - high)))
    return SpectralSummary(
        spearman_kappa1=float(spearmanr(ts, kappa1).statistic),
        erank_low=float(eranks[low_index]),
        erank_high=float(eranks[high_index]),
        t_low=float(ts[low_index]),
        t_high=float(ts[high_index]),
    )
