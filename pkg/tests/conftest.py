import numpy as np
import pytest

from erdlab.diffusion.schedules import make_schedule
from erdlab.diffusion.targets import X0Target
from erdlab.network.mlp import MlpConfig, MlpModel
from erdlab.oracle.gmm import GmmModel
from erdlab.trainer import PiecewiseModel, TrainConfig, default_bins, train, train_piecewise

SMALL_NET = MlpConfig(embed_dim=8, hidden_dim=16, depth=2)


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run full-length reproduction tests")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full-length training reproductions, run with --runslow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def gmm():
    return GmmModel()


@pytest.fixture(params=["linear", "vp", "gvp"])
def schedule(request):
    return make_schedule(request.param)


@pytest.fixture
def linear():
    return make_schedule("linear")


@pytest.fixture
def small_model():
    return MlpModel.init(SMALL_NET, seed=7)


@pytest.fixture
def small_conf(tmp_path):
    """A config file for runs that finish in seconds."""
    path = tmp_path / "small.conf"
    path.write_text(
        "\n".join(
            [
                "# tiny run",
                "iterations = 20",
                "batch = 64",
                "embed_dim = 8",
                "hidden_dim = 16",
                "depth = 2",
                "t_grid_size = 5",
                "n_mc = 2000",
                "n_eval = 512",
                "ntk_points = 6",
                "pca_samples = 40",
                "phase_samples = 50",
                "bins = 0:0.5, 0.5:1",
                f"out_dir = {tmp_path / 'run'}",
            ]
        )
        + "\n"
    )
    return path


@pytest.fixture(scope="session")
def trained_x0():
    """Full-length X0 / linear / uniform global model and its training log."""
    return train(TrainConfig(target=X0Target(), seed=0), GmmModel(), progress=False)


@pytest.fixture(scope="session")
def trained_x0_bins():
    pieces = train_piecewise(TrainConfig(target=X0Target(), seed=0), default_bins(5), GmmModel(), progress=False)
    return PiecewiseModel([t_range for t_range, _, _ in pieces], [model for _, model, _ in pieces])
