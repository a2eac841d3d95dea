import numpy as np
import pytest

from erdlab.errors import ContractError, DomainError
from erdlab.network.embedding import time_embed
from erdlab.network.mlp import MlpConfig, MlpModel, forward, loss_grad, param_jacobian
from tests.conftest import SMALL_NET
from tests.oracles import finite_difference


def _batch(rng, n=32, d=2):
    return rng.standard_normal((n, d)), rng.uniform(0.0, 1.0, n), rng.standard_normal((n, d))


def test_param_count():
    expected = 66 * 256 + 256 + 2 * (256 * 256 + 256) + 256 * 2 + 2
    assert MlpConfig().param_count == expected
    assert MlpModel.init(MlpConfig(), seed=0).param_count == expected


def test_init_is_deterministic():
    first = MlpModel.init(SMALL_NET, seed=3)
    second = MlpModel.init(SMALL_NET, seed=3)
    np.testing.assert_array_equal(first.params, second.params)
    assert not np.array_equal(first.params, MlpModel.init(SMALL_NET, seed=4).params)


def test_kaiming_variance():
    model = MlpModel.init(MlpConfig(), seed=0)
    weight, bias = model.layers[0]
    assert weight.shape == (66, 256)
    assert weight.var() == pytest.approx(2.0 / 66, rel=0.1)
    assert np.all(bias == 0.0)


def test_layers_are_views():
    model = MlpModel.init(SMALL_NET, seed=0)
    model.params[:] = 0.0
    assert all(np.all(weight == 0.0) for weight, _ in model.layers)


def test_time_embedding():
    start = time_embed(0.0)
    np.testing.assert_array_equal(start[0::2], 0.0)
    np.testing.assert_array_equal(start[1::2], 1.0)

    grid = np.linspace(0.0, 1.0, 200)
    embedded = time_embed(grid)
    np.testing.assert_allclose(np.sum(embedded**2, axis=1), 32.0)
    distances = np.linalg.norm(embedded[:, None, :] - embedded[None, :, :], axis=2)
    assert np.all(distances[~np.eye(grid.size, dtype=bool)] > 0.0)


def test_time_embedding_frequencies():
    embedded = time_embed(0.3, embed_dim=4, time_scale=10.0, freq_base=100.0)
    np.testing.assert_allclose(embedded, [np.sin(3.0), np.cos(3.0), np.sin(0.3), np.cos(0.3)])


def test_time_embedding_domain():
    with pytest.raises(DomainError):
        time_embed(1.5)
    with pytest.raises(ContractError):
        time_embed(0.5, embed_dim=7)


def test_zero_model_outputs_zero(rng):
    x, t, _ = _batch(rng)
    output, hidden = MlpModel.zeros(SMALL_NET).forward(x, t)
    np.testing.assert_array_equal(output, 0.0)
    assert hidden.shape == (32, SMALL_NET.hidden_dim)


def test_forward_single_point(small_model):
    output, hidden = forward(small_model, [0.5, -0.5], 0.3)
    assert output.shape == (2,)
    assert hidden.shape == (SMALL_NET.hidden_dim,)
    np.testing.assert_array_equal(output, small_model.forward([0.5, -0.5], 0.3)[0])


def test_readout_is_linear(small_model, rng):
    x, t, _ = _batch(rng)
    before, hidden = small_model.forward(x, t)
    doubled = small_model.copy()
    weight, bias = doubled.readout
    weight *= 2.0
    bias *= 2.0
    after, hidden_after = doubled.forward(x, t)
    np.testing.assert_array_equal(hidden_after, hidden)
    np.testing.assert_allclose(after, 2.0 * before, rtol=1e-14, atol=1e-14)


def test_forward_rejects_bad_inputs(small_model):
    with pytest.raises(ContractError):
        small_model.forward([[np.nan, 0.0]], [0.5])
    with pytest.raises(ContractError):
        small_model.forward(np.zeros((3, 3)), np.full(3, 0.5))
    with pytest.raises(ContractError):
        small_model.forward(np.zeros((3, 2)), np.full(4, 0.5))


def test_loss_grad_at_exact_fit(small_model, rng):
    x, t, _ = _batch(rng)
    y = small_model.predict(x, t)
    loss, grad = loss_grad(small_model, x, t, y, np.ones(32))
    assert loss == 0.0
    np.testing.assert_array_equal(grad, 0.0)


def test_loss_grad_scales_with_weights(small_model, rng):
    x, t, y = _batch(rng)
    w = rng.uniform(0.5, 2.0, 32)
    loss, grad = small_model.loss_grad(x, t, y, w)
    loss3, grad3 = small_model.loss_grad(x, t, y, 3.0 * w)
    assert loss3 == pytest.approx(3.0 * loss, rel=1e-14)
    np.testing.assert_allclose(grad3, 3.0 * grad, rtol=1e-13, atol=1e-15)


def test_uniform_weight_is_plain_mse(small_model, rng):
    x, t, y = _batch(rng)
    loss, _ = small_model.loss_grad(x, t, y, np.ones(32))
    assert loss == pytest.approx(0.5 * np.mean(np.sum((small_model.predict(x, t) - y) ** 2, axis=1)), rel=1e-14)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_gradient_matches_finite_differences(seed):
    rng = np.random.default_rng(seed)
    model = MlpModel.init(SMALL_NET, seed=seed)
    x, t, y = _batch(rng, n=16)
    w = rng.uniform(0.1, 2.0, 16)
    _, grad = model.loss_grad(x, t, y, w)

    def loss_at(params):
        return model.with_params(params).loss_grad(x, t, y, w)[0]

    indices = rng.choice(model.param_count, size=50, replace=False)
    for index in indices:
        numeric = finite_difference(loss_at, model.params, index, h=1e-5)
        assert grad[index] == pytest.approx(numeric, rel=1e-4, abs=1e-8), index


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_jacobian_matches_finite_differences(seed):
    rng = np.random.default_rng(seed)
    model = MlpModel.init(SMALL_NET, seed=seed)
    x, t = rng.standard_normal(2), float(rng.uniform())
    jacobian = param_jacobian(model, x, t)
    assert jacobian.shape == (2, model.param_count)

    indices = rng.choice(model.param_count, size=50, replace=False)
    for r in range(2):
        def output(params):
            return model.with_params(params).predict(x, t)[r]

        for index in indices:
            numeric = finite_difference(output, model.params, index, h=1e-5)
            assert jacobian[r, index] == pytest.approx(numeric, rel=1e-4, abs=1e-8)


def test_jacobian_directional_derivative(small_model, rng):
    x, t = np.array([0.3, -1.2]), 0.6
    direction = rng.standard_normal(small_model.param_count)
    h = 1e-6
    numeric = (
        small_model.with_params(small_model.params + h * direction).predict(x, t)
        - small_model.with_params(small_model.params - h * direction).predict(x, t)
    ) / (2 * h)
    np.testing.assert_allclose(param_jacobian(small_model, x, t) @ direction, numeric, rtol=1e-4)


def test_batched_jacobians_match_single(small_model, rng):
    x, t, _ = _batch(rng, n=4)
    batched = small_model.param_jacobians(x, t)
    for i in range(4):
        np.testing.assert_allclose(batched[i], param_jacobian(small_model, x[i], t[i]), rtol=1e-14)


def test_jacobian_rows_give_ntk_diagonal(small_model):
    jacobian = param_jacobian(small_model, [1.0, 0.5], 0.2)
    factors = small_model.jacobian_factors(np.array([[1.0, 0.5]]), np.array([0.2]))
    diagonal = sum(
        (inputs[0] @ inputs[0] + 1.0) * (deltas[0] @ deltas[0].T) for inputs, deltas in factors
    )
    np.testing.assert_allclose(np.diag(diagonal), np.sum(jacobian**2, axis=1), rtol=1e-12)


def test_readout_factorization(small_model, rng):
    x, t, y = _batch(rng, n=8)
    w = rng.uniform(0.5, 1.5, 8)
    _, grad = small_model.loss_grad(x, t, y, w)

    output, hidden = small_model.forward(x, t)
    scaled = (w / 8)[:, None] * (output - y)
    hidden_dim, data_dim = SMALL_NET.hidden_dim, SMALL_NET.data_dim
    readout_weight = grad[-(hidden_dim * data_dim + data_dim) : -data_dim].reshape(hidden_dim, data_dim)
    np.testing.assert_allclose(readout_weight, hidden.T @ scaled, rtol=1e-12, atol=1e-15)
    np.testing.assert_allclose(grad[-data_dim:], scaled.sum(axis=0), rtol=1e-12, atol=1e-15)

    jacobians = small_model.param_jacobians(x, t)
    np.testing.assert_allclose(grad, np.einsum("nr,nrp->p", scaled, jacobians), rtol=1e-10, atol=1e-13)


def test_config_validation():
    with pytest.raises(ContractError):
        MlpConfig(hidden_dim=0)
    with pytest.raises(ContractError):
        MlpConfig(embed_dim=5)
    with pytest.raises(ContractError):
        MlpModel(SMALL_NET, np.zeros(3))
