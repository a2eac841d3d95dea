import numpy as np

from erdlab.diffusion.schedules import check_time
from erdlab.errors import ContractError

DEFAULT_TIME_SCALE = 1000.0
DEFAULT_FREQ_BASE = 10000.0


def time_embed(
    t,
    embed_dim: int = 64,
    time_scale: float = DEFAULT_TIME_SCALE,
    freq_base: float = DEFAULT_FREQ_BASE,
) -> np.ndarray:
    """Interleaved [sin(w_i s t), cos(w_i s t)] pairs with w_i = base^(-i / (embed_dim / 2))."""
    if embed_dim < 2 or embed_dim % 2:
        raise ContractError(f"embed_dim must be a positive even number, got {embed_dim}")

    t = check_time(t)
    half = embed_dim // 2
    frequencies = freq_base ** (-np.arange(half, dtype=np.float64) / half)
    angles = np.multiply.outer(t * time_scale, frequencies)
    pairs = np.stack([np.sin(angles), np.cos(angles)], axis=-1)
    return pairs.reshape(t.shape + (embed_dim,))
