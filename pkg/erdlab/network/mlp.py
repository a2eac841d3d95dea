"""Time-conditioned MLP with a hand-written reverse pass.

Layout: input [x_t, embed(t)] -> `depth` SiLU layers of width `hidden_dim`
-> linear readout. Parameters live in one flat float64 vector; layer weights
and biases are views into it, so optimizers update the vector in place.
"""

from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import expit

from erdlab.errors import ContractError
from erdlab.network.embedding import DEFAULT_FREQ_BASE, DEFAULT_TIME_SCALE, time_embed

ACTIVATION = "silu"


@dataclass(frozen=True)
class MlpConfig:
    data_dim: int = 2
    embed_dim: int = 64
    hidden_dim: int = 256
    depth: int = 3
    time_scale: float = DEFAULT_TIME_SCALE
    freq_base: float = DEFAULT_FREQ_BASE

    def __post_init__(self):
        for name in ("data_dim", "embed_dim", "hidden_dim", "depth"):
            if getattr(self, name) < 1:
                raise ContractError(f"MlpConfig.{name} must be positive")
        if self.embed_dim % 2:
            raise ContractError(f"embed_dim must be even, got {self.embed_dim}")

    @property
    def in_dim(self) -> int:
        return self.data_dim + self.embed_dim

    @property
    def layer_shapes(self) -> list[tuple[int, int]]:
        widths = [self.in_dim] + [self.hidden_dim] * self.depth + [self.data_dim]
        return list(zip(widths[:-1], widths[1:]))

    @property
    def param_count(self) -> int:
        return sum(fan_in * fan_out + fan_out for fan_in, fan_out in self.layer_shapes)

    def as_dict(self) -> dict:
        return asdict(self)


class LayerFactor(NamedTuple):
    """Layer input activations (n, fan_in) and backprop deltas (n, R, fan_out) for R output directions."""

    inputs: np.ndarray
    deltas: np.ndarray


def silu(x: np.ndarray) -> np.ndarray:
    return x * expit(x)


def silu_grad(x: np.ndarray) -> np.ndarray:
    s = expit(x)
    return s * (1.0 + x * (1.0 - s))


class MlpModel:
    def __init__(self, config: MlpConfig, params: np.ndarray, seed: int | None = None):
        params = np.ascontiguousarray(params, dtype=np.float64)
        if params.shape != (config.param_count,):
            raise ContractError(
                f"Expected {config.param_count} parameters, got {params.shape}"
            )
        self.config = config
        self.seed = seed
        self.params = params
        self.layers = self._bind_layers()

    def _bind_layers(self) -> list[tuple[np.ndarray, np.ndarray]]:
        layers, offset = [], 0
        for fan_in, fan_out in self.config.layer_shapes:
            weight = self.params[offset : offset + fan_in * fan_out].reshape(fan_in, fan_out)
            offset += fan_in * fan_out
            bias = self.params[offset : offset + fan_out]
            offset += fan_out
            layers.append((weight, bias))
        return layers

    @classmethod
    def init(cls, config: MlpConfig, seed: int) -> "MlpModel":
        """Kaiming-normal weights N(0, 2 / fan_in), zero biases."""
        rng = np.random.default_rng(seed)
        model = cls(config, np.zeros(config.param_count), seed=seed)
        for weight, _ in model.layers:
            weight[...] = rng.standard_normal(weight.shape) * np.sqrt(2.0 / weight.shape[0])
        return model

    @classmethod
    def zeros(cls, config: MlpConfig) -> "MlpModel":
        return cls(config, np.zeros(config.param_count))

    @property
    def param_count(self) -> int:
        return self.params.size

    @property
    def readout(self) -> tuple[np.ndarray, np.ndarray]:
        return self.layers[-1]

    def copy(self) -> "MlpModel":
        return MlpModel(self.config, self.params.copy(), seed=self.seed)

    def with_params(self, params: np.ndarray) -> "MlpModel":
        return MlpModel(self.config, np.array(params, dtype=np.float64), seed=self.seed)

    def _inputs(self, x, t) -> tuple[np.ndarray, bool]:
        x = np.asarray(x, dtype=np.float64)
        single = x.ndim == 1
        x = np.atleast_2d(x)
        if x.shape[1] != self.config.data_dim:
            raise ContractError(
                f"Input has dimension {x.shape[1]}, model expects {self.config.data_dim}"
            )
        t = np.asarray(t, dtype=np.float64)
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(t))):
            raise ContractError("Model inputs must be finite")
        t = np.broadcast_to(t, (x.shape[0],)) if t.ndim == 0 else t
        if t.shape != (x.shape[0],):
            raise ContractError(f"Got {t.shape} times for {x.shape[0]} points")

        embedding = time_embed(
            t, self.config.embed_dim, self.config.time_scale, self.config.freq_base
        )
        return np.concatenate([x, embedding], axis=1), single

    def _forward(self, z: np.ndarray):
        activations, pre_activations = [z], []
        for weight, bias in self.layers[:-1]:
            pre = activations[-1] @ weight + bias
            pre_activations.append(pre)
            activations.append(silu(pre))
        weight, bias = self.layers[-1]
        return activations[-1] @ weight + bias, activations, pre_activations

    def forward(self, x, t) -> tuple[np.ndarray, np.ndarray]:
        """Return (output, hidden) where hidden is the representation feeding the readout."""
        z, single = self._inputs(x, t)
        output, activations, _ = self._forward(z)
        if single:
            return output[0], activations[-1][0]
        return output, activations[-1]

    def predict(self, x, t) -> np.ndarray:
        return self.forward(x, t)[0]

    __call__ = predict

    def _backprop(self, activations, pre_activations, directions) -> list[LayerFactor]:
        """Reverse pass for a stack of output directions of shape (n, R, data_dim)."""
        factors = []
        delta = directions
        for index in range(len(self.layers) - 1, -1, -1):
            weight, _ = self.layers[index]
            factors.append(LayerFactor(activations[index], delta))
            if index > 0:
                delta = (delta @ weight.T) * silu_grad(pre_activations[index - 1])[:, None, :]
        factors.reverse()
        return factors

    def jacobian_factors(self, x, t) -> list[LayerFactor]:
        """Per-layer factors of the parameter Jacobian for every output coordinate.

        For weights the Jacobian of output r at sample i is inputs[i] (outer) deltas[i, r],
        for biases it is deltas[i, r].
        """
        z, _ = self._inputs(x, t)
        _, activations, pre_activations = self._forward(z)
        directions = np.broadcast_to(
            np.eye(self.config.data_dim), (z.shape[0],) + (self.config.data_dim,) * 2
        )
        return self._backprop(activations, pre_activations, directions)

    def param_jacobians(self, x, t) -> np.ndarray:
        """Batched Jacobians d f(x_i, t_i) / d theta of shape (n, data_dim, P)."""
        blocks = []
        for inputs, deltas in self.jacobian_factors(x, t):
            n, rows, fan_out = deltas.shape
            weight_block = inputs[:, None, :, None] * deltas[:, :, None, :]
            blocks.append(weight_block.reshape(n, rows, -1))
            blocks.append(deltas)
        return np.concatenate(blocks, axis=2)

    def param_jacobian(self, x, t) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 1:
            raise ContractError("param_jacobian takes a single point; use param_jacobians")
        return self.param_jacobians(x[None, :], np.reshape(t, (1,)))[0]

    def loss_grad(self, x, t, y, w) -> tuple[float, np.ndarray]:
        """Batch mean of (w / 2) ||f(x, t) - y||^2 and its exact gradient."""
        z, _ = self._inputs(x, t)
        n = z.shape[0]
        y = np.atleast_2d(np.asarray(y, dtype=np.float64))
        w = np.broadcast_to(np.asarray(w, dtype=np.float64), (n,))
        if y.shape != (n, self.config.data_dim):
            raise ContractError(f"Targets have shape {y.shape}, expected {(n, self.config.data_dim)}")

        output, activations, pre_activations = self._forward(z)
        residual = output - y
        loss = float(np.mean(0.5 * w * np.sum(np.square(residual), axis=1)))

        directions = (w[:, None] * residual / n)[:, None, :]
        grads = []
        for inputs, deltas in self._backprop(activations, pre_activations, directions):
            grads.append((inputs.T @ deltas[:, 0, :]).ravel())
            grads.append(deltas[:, 0, :].sum(axis=0))
        return loss, np.concatenate(grads)

    def describe(self) -> dict:
        return self.config.as_dict() | {
            "activation": ACTIVATION,
            "param_count": self.param_count,
            "seed": self.seed,
        }

    def __repr__(self) -> str:
        return f"<MlpModel P={self.param_count} seed={self.seed}>"


def init(config: MlpConfig, seed: int) -> MlpModel:
    return MlpModel.init(config, seed)


def forward(model: MlpModel, x, t):
    return model.forward(x, t)


def loss_grad(model: MlpModel, x, t, y, w):
    return model.loss_grad(x, t, y, w)


def param_jacobian(model: MlpModel, x, t) -> np.ndarray:
    return model.param_jacobian(x, t)
