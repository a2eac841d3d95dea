"""Symmetric eigendecomposition by parallel cyclic Jacobi rotations.

Each sweep visits every (p, q) pair once, grouped into rounds of disjoint
pairs by a round-robin tournament so a whole round is applied with array
operations. Odd sizes get a dummy player that sits out its round.
"""

from functools import lru_cache

import numpy as np
from loguru import logger

from erdlab.errors import ContractError

SYMMETRY_TOLERANCE = 1e-10
OFF_DIAGONAL_TOLERANCE = 1e-12
MAX_SWEEPS = 100


@lru_cache(maxsize=16)
def round_robin(n: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    players = list(range(n + n % 2))
    half = len(players) // 2
    rounds = []
    for _ in range(len(players) - 1):
        pairs = [
            (min(a, b), max(a, b))
            for a, b in zip(players[:half], reversed(players[half:]))
            if a < n and b < n
        ]
        rounds.append((np.array([p for p, _ in pairs]), np.array([q for _, q in pairs])))
        players = [players[0], players[-1]] + players[1:-1]
    return tuple(rounds)


def off_diagonal_norm(matrix: np.ndarray) -> float:
    return float(np.sqrt(max(np.sum(np.square(matrix)) - np.sum(np.square(np.diag(matrix))), 0.0)))


def check_symmetric(matrix) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ContractError(f"Expected a square matrix, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise ContractError("Matrix has non-finite entries")
    scale = max(float(np.max(np.abs(matrix), initial=0.0)), 1.0)
    asymmetry = float(np.max(np.abs(matrix - matrix.T), initial=0.0))
    if asymmetry > SYMMETRY_TOLERANCE * scale:
        raise ContractError(f"Matrix is not symmetric (max asymmetry {asymmetry:.3e})")
    return 0.5 * (matrix + matrix.T)


def _rotate(a: np.ndarray, v: np.ndarray, p: np.ndarray, q: np.ndarray):
    app, aqq, apq = a[p, p], a[q, q], a[p, q]
    active = np.abs(apq) > np.finfo(np.float64).tiny
    if not np.any(active):
        return
    p, q = p[active], q[active]
    app, aqq, apq = app[active], aqq[active], apq[active]

    tau = (aqq - app) / (2.0 * apq)
    tan = np.where(tau >= 0.0, 1.0, -1.0) / (np.abs(tau) + np.sqrt(1.0 + np.square(tau)))
    cos = 1.0 / np.sqrt(1.0 + np.square(tan))
    sin = tan * cos

    col_p, col_q = a[:, p], a[:, q]
    a[:, p] = cos * col_p - sin * col_q
    a[:, q] = sin * col_p + cos * col_q

    row_p, row_q = a[p, :], a[q, :]
    a[p, :] = cos[:, None] * row_p - sin[:, None] * row_q
    a[q, :] = sin[:, None] * row_p + cos[:, None] * row_q
    a[p, q] = 0.0
    a[q, p] = 0.0

    vec_p, vec_q = v[:, p], v[:, q]
    v[:, p] = cos * vec_p - sin * vec_q
    v[:, q] = sin * vec_p + cos * vec_q


def sym_eig(matrix, max_sweeps: int = MAX_SWEEPS) -> tuple[np.ndarray, np.ndarray]:
    a = check_symmetric(matrix).copy()
    n = a.shape[0]
    v = np.eye(n)
    norm = float(np.linalg.norm(a))
    rounds = round_robin(n)

    sweep = 0
    while sweep < max_sweeps and off_diagonal_norm(a) > OFF_DIAGONAL_TOLERANCE * norm:
        for p, q in rounds:
            _rotate(a, v, p, q)
        sweep += 1

    residual = off_diagonal_norm(a)
    if residual > OFF_DIAGONAL_TOLERANCE * norm:
        logger.warning(f"Jacobi stopped after {sweep} sweeps with off-diagonal norm {residual:.3e}")
    else:
        logger.debug(f"Jacobi converged for n={n} in {sweep} sweeps")

    eigenvalues = np.diag(a).copy()
    order = np.argsort(-eigenvalues, kind="stable")
    return eigenvalues[order], v[:, order]
