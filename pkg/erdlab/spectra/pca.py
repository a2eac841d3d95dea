from dataclasses import dataclass

import numpy as np
from loguru import logger

from erdlab.errors import ContractError
from erdlab.spectra.eigen import sym_eig


@dataclass(frozen=True)
class PcaBasis:
    mean: np.ndarray
    components: np.ndarray
    explained_variance: np.ndarray
    total_variance: float

    @property
    def dim(self) -> int:
        return self.mean.size

    @property
    def n_components(self) -> int:
        return self.components.shape[1]

    @property
    def explained_ratio(self) -> np.ndarray:
        if self.total_variance <= 0.0:
            return np.zeros_like(self.explained_variance)
        return self.explained_variance / self.total_variance

    def orthonormality_error(self) -> float:
        gram = self.components.T @ self.components
        return float(np.max(np.abs(gram - np.eye(self.n_components))))


def _features(features) -> np.ndarray:
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 2:
        raise ContractError(f"Features must be a 2-D array, got shape {features.shape}")
    return features


def pca_fit(features, k: int = 2) -> PcaBasis:
    features = _features(features)
    n, dim = features.shape
    if not 1 <= k <= dim:
        raise ContractError(f"Cannot keep {k} components of {dim}-dimensional features")
    if n <= k:
        raise ContractError(f"PCA with {k} components needs more than {k} samples, got {n}")

    mean = features.mean(axis=0)
    centred = features - mean
    covariance = centred.T @ centred / (n - 1)
    eigenvalues, eigenvectors = sym_eig(covariance)

    components = eigenvectors[:, :k].copy()
    # Sign convention: the largest-magnitude loading of each axis is positive.
    pivots = np.argmax(np.abs(components), axis=0)
    components *= np.sign(components[pivots, np.arange(k)])

    basis = PcaBasis(
        mean=mean,
        components=components,
        explained_variance=np.clip(eigenvalues[:k], 0.0, None),
        total_variance=float(np.trace(covariance)),
    )
    logger.debug(
        f"PCA on {n} samples: explained ratio {np.round(basis.explained_ratio, 4).tolist()}"
    )
    return basis


def pca_project(basis: PcaBasis, features) -> np.ndarray:
    features = _features(features)
    if features.shape[1] != basis.dim:
        raise ContractError(
            f"Features have dimension {features.shape[1]}, basis expects {basis.dim}"
        )
    return (features - basis.mean) @ basis.components


def cluster_distance_ratio(projections, labels) -> float:
    """Mean distance between cluster centroids over mean distance of points to their centroid."""
    projections = _features(projections)
    labels = np.asarray(labels)
    clusters = np.unique(labels)
    if clusters.size < 2:
        raise ContractError("Cluster separation needs at least two clusters")

    centroids = np.stack([projections[labels == c].mean(axis=0) for c in clusters])
    within = np.mean(
        [np.linalg.norm(projections[labels == c] - centroid, axis=1).mean()
         for c, centroid in zip(clusters, centroids)]
    )
    upper = np.triu_indices(clusters.size, k=1)
    between = np.linalg.norm(centroids[:, None, :] - centroids[None, :, :], axis=2)[upper].mean()
    return float(between / within) if within > 0 else float("inf")


def mean_projected_norm(projections) -> float:
    return float(np.linalg.norm(_features(projections), axis=1).mean())
