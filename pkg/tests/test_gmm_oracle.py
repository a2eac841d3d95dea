import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from erdlab.diffusion.schedules import corrupt, make_schedule
from erdlab.diffusion.targets import make_target_spec
from erdlab.errors import ContractError
from erdlab.oracle.gmm import (
    GmmModel,
    bayes_floor,
    bayes_predictor,
    contamination_fraction,
    excess_decomposition,
    posterior_means,
    posterior_responsibilities,
    sample_x0,
    signal_noise_decomposition,
    w2_coupling_cost,
)
from tests.oracles import grid_posterior_means


def test_default_moments(gmm):
    assert gmm.mean.tolist() == [0.0, 0.0]
    assert gmm.second_moment == pytest.approx(8.18)
    assert gmm.trace_covariance == pytest.approx(8.18)


def test_sample_statistics(gmm, rng):
    x0 = sample_x0(gmm, 100_000, rng)
    assert np.all(np.abs(x0.mean(axis=0)) < 0.05)
    np.testing.assert_allclose(x0.var(axis=0), 4.09, rtol=0.02)


def test_sample_labels(gmm, rng):
    x0, labels = sample_x0(gmm, 1000, rng, return_labels=True)
    assert set(labels.tolist()) == {0, 1, 2, 3}
    assert np.max(np.linalg.norm(x0 - gmm.centers[labels], axis=1)) < 0.3 * 6


def test_single_component_is_gaussian(rng):
    x0 = GmmModel(centers=[(0.0, 0.0)], component_std=0.3).sample(50_000, rng)
    np.testing.assert_allclose(x0.std(axis=0), 0.3, rtol=0.02)


def test_responsibility_examples(gmm, linear):
    np.testing.assert_allclose(posterior_responsibilities(gmm, linear, 1.0, [3.0, -1.0]), 0.25)
    assert posterior_responsibilities(gmm, linear, 0.0, [2.0, 2.0])[0] > 0.999
    np.testing.assert_allclose(posterior_responsibilities(gmm, linear, 0.37, [0.0, 0.0]), 0.25)


@settings(max_examples=50, deadline=None)
@given(
    t=st.floats(min_value=0.0, max_value=1.0),
    x=st.tuples(st.floats(-50, 50), st.floats(-50, 50)),
    kind=st.sampled_from(["linear", "vp", "gvp"]),
)
def test_responsibilities_sum_to_one(t, x, kind):
    responsibilities = posterior_responsibilities(GmmModel(), make_schedule(kind), t, x)
    assert np.all(responsibilities >= 0.0)
    assert responsibilities.sum() == pytest.approx(1.0, abs=1e-12)


def test_posterior_mean_examples(gmm, linear):
    x_t = np.array([0.7, -3.0])
    np.testing.assert_allclose(bayes_predictor(gmm, make_target_spec("x0"), linear, 1.0, x_t), 0.0, atol=1e-12)
    np.testing.assert_allclose(bayes_predictor(gmm, make_target_spec("eps"), linear, 1.0, x_t), x_t, atol=1e-12)
    np.testing.assert_array_equal(posterior_means(gmm, linear, 0.0, x_t)[1], [0.0, 0.0])


def test_posterior_matches_quadrature_point(gmm, linear):
    expected, _ = grid_posterior_means(gmm, 0.5, 0.5, [1.5, 1.5])
    actual = bayes_predictor(gmm, make_target_spec("x0"), linear, 0.5, [1.5, 1.5])
    assert np.max(np.abs(actual - expected)) <= 1e-6


def test_posterior_matches_quadrature(gmm, schedule):
    rng = np.random.default_rng(99)
    worst = 0.0
    for _ in range(34):
        t = rng.uniform(0.05, 0.95)
        x_t = corrupt(schedule, gmm.sample(1, rng)[0], rng.standard_normal(2), t)
        alpha, sigma = schedule.alpha_sigma(t)
        expected_x0, expected_eps = grid_posterior_means(gmm, alpha, sigma, x_t)
        mean_x0, mean_eps = posterior_means(gmm, schedule, t, x_t)
        worst = max(worst, np.max(np.abs(mean_x0 - expected_x0)), np.max(np.abs(mean_eps - expected_eps)))
    assert worst <= 1e-6


def test_channel_identity(gmm, schedule, rng):
    t = rng.uniform(0.0, 1.0, 500)
    x_t = corrupt(schedule, gmm.sample(500, rng), rng.standard_normal((500, 2)), t)
    mean_x0, mean_eps = posterior_means(gmm, schedule, t, x_t)
    alpha, sigma = schedule.alpha_sigma(t)
    np.testing.assert_allclose(alpha[:, None] * mean_x0 + sigma[:, None] * mean_eps, x_t, atol=1e-10)


def test_dimension_mismatch(gmm, linear):
    with pytest.raises(ContractError):
        posterior_means(gmm, linear, 0.5, [1.0, 2.0, 3.0])


def test_floor_endpoints(gmm, linear, rng):
    eps_floor = bayes_floor(gmm, make_target_spec("eps"), linear, 0.001, 100_000, rng)
    assert 1.9 <= eps_floor.mse <= 2.0 + 4 * eps_floor.stderr

    x0_high = bayes_floor(gmm, make_target_spec("x0"), linear, 0.999, 100_000, rng)
    assert x0_high.mse == pytest.approx(8.18, rel=0.02)

    x0_low = bayes_floor(gmm, make_target_spec("x0"), linear, 0.001, 100_000, rng)
    assert x0_low.mse <= 0.01


def test_eps_floor_vanishes_at_pure_noise(gmm, linear, rng):
    assert bayes_floor(gmm, make_target_spec("eps"), linear, 1.0, 10_000, rng).mse <= 0.02


def test_floor_is_shard_deterministic(gmm, linear):
    target = make_target_spec("v")
    first = bayes_floor(gmm, target, linear, 0.4, 5000, np.random.default_rng(3), shards=4)
    second = bayes_floor(gmm, target, linear, 0.4, 5000, np.random.default_rng(3), shards=4)
    assert first == second


def test_floor_independent_of_threads(gmm, linear, monkeypatch):
    target = make_target_spec("u")
    serial = bayes_floor(gmm, target, linear, 0.6, 8000, np.random.default_rng(5), shards=8)
    monkeypatch.setenv("ERDLAB_THREADS", "4")
    threaded = bayes_floor(gmm, target, linear, 0.6, 8000, np.random.default_rng(5), shards=8)
    assert serial == threaded


def test_signal_noise_examples(gmm, linear, rng):
    x0 = gmm.sample(2000, rng)
    eps = rng.standard_normal(x0.shape)
    target = make_target_spec("eps")

    low = signal_noise_decomposition(gmm, target, linear, 0.001, x0, eps)
    assert low.signal_norm.mean() < 0.02
    np.testing.assert_allclose(low.noise_norm, np.linalg.norm(eps, axis=1), atol=0.05)

    high = signal_noise_decomposition(gmm, target, linear, 1.0, x0, eps)
    np.testing.assert_allclose(high.noise_norm, 0.0, atol=1e-12)


def test_noise_norm_matches_floor(gmm, linear):
    rng = np.random.default_rng(21)
    target = make_target_spec("x0")
    x0 = gmm.sample(10_000, rng)
    eps = rng.standard_normal(x0.shape)
    decomposition = signal_noise_decomposition(gmm, target, linear, 0.5, x0, eps)
    squared = decomposition.noise_norm**2
    floor = bayes_floor(gmm, target, linear, 0.5, 100_000, rng)
    tolerance = 4 * np.hypot(squared.std(ddof=1) / np.sqrt(squared.size), floor.stderr)
    assert squared.mean() == pytest.approx(floor.mse, abs=tolerance)


@pytest.mark.parametrize(
    "kind, t",
    [("eps", 0.01), ("x0", 0.99)],
)
def test_contamination_at_extremes(gmm, linear, kind, t, rng):
    x0 = gmm.sample(5000, rng)
    eps = rng.standard_normal(x0.shape)
    decomposition = signal_noise_decomposition(gmm, make_target_spec(kind), linear, t, x0, eps)
    assert contamination_fraction(decomposition) >= 0.95


def test_u_target_is_balanced(gmm, linear, rng):
    x0 = gmm.sample(10_000, rng)
    eps = rng.standard_normal(x0.shape)
    decomposition = signal_noise_decomposition(gmm, make_target_spec("u"), linear, 0.5, x0, eps)
    assert 0.0 < contamination_fraction(decomposition) < 1.0


def _predictors(gmm, linear, small_model):
    f_star = lambda x, t: bayes_predictor(gmm, make_target_spec("v"), linear, t, x)  # noqa: E731
    return {
        "zero": lambda x, t: np.zeros_like(x),
        "identity": lambda x, t: x,
        "sine": lambda x, t: np.sin(3 * x),
        "network": small_model.predict,
        "shifted oracle": lambda x, t: 2 * f_star(x, t) + 1.0,
    }


def test_orthogonality_and_dominance(gmm, linear, small_model, rng):
    target = make_target_spec("v")
    for name, predictor in _predictors(gmm, linear, small_model).items():
        estimate = excess_decomposition(gmm, target, linear, 0.3, predictor, 100_000, rng)
        assert abs(estimate.cross_term) <= 4 * estimate.cross_stderr, name
        assert estimate.mse >= estimate.floor - 4 * estimate.excess_stderr, name


def test_oracle_has_no_excess(gmm, linear, rng):
    target = make_target_spec("x0")
    oracle = lambda x, t: bayes_predictor(gmm, target, linear, t, x)  # noqa: E731
    estimate = excess_decomposition(gmm, target, linear, 0.6, oracle, 10_000, rng)
    assert estimate.excess == pytest.approx(0.0, abs=1e-12)
    assert estimate.cross_term == pytest.approx(0.0, abs=1e-12)


def test_coupling_examples(gmm, rng):
    linear = make_schedule("linear")
    end = w2_coupling_cost(gmm, linear, 1.0, 10_000, rng)
    assert end.analytic == 0.0
    assert end.empirical == pytest.approx(0.0, abs=1e-24)

    start = w2_coupling_cost(gmm, linear, 0.0, 100_000, rng)
    assert start.analytic == pytest.approx(10.18)
    assert start.empirical == pytest.approx(10.18, rel=0.02)


def test_coupling_identity(gmm, schedule, rng):
    for t in (0.0, 0.2, 0.4, 0.6, 0.8):
        estimate = w2_coupling_cost(gmm, schedule, t, 100_000, rng)
        assert estimate.rel_error <= 0.02, t
