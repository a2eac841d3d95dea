import pytest

from erdlab.config import (
    ExperimentConfig,
    load_config,
    parse_bins,
    parse_bool,
    parse_points,
    parse_targets,
    parse_values,
)
from erdlab.diffusion.schedules import VpSchedule
from erdlab.diffusion.targets import TargetKind
from erdlab.errors import ConfigError
from erdlab.network.mlp import MlpConfig


def test_defaults():
    config = ExperimentConfig()
    assert config.target == TargetKind.X0
    assert config.targets == (TargetKind.EPS, TargetKind.X0, TargetKind.V, TargetKind.U)
    assert config.bins == ((0.0, 0.2), (0.2, 0.4), (0.4, 0.6), (0.6, 0.8), (0.8, 1.0))
    assert config.t_grid().size == 101
    assert config.mlp_config() == MlpConfig()


def test_parsers():
    assert parse_bool(" Yes ") is True and parse_bool("0") is False
    with pytest.raises(ValueError):
        parse_bool("maybe")
    assert parse_points("2,2; -2,2;") == ((2.0, 2.0), (-2.0, 2.0))
    assert parse_bins("2") == ((0.0, 0.5), (0.5, 1.0))
    assert parse_bins("0:0.3, 0.3:1") == ((0.0, 0.3), (0.3, 1.0))
    assert parse_targets(" v, eps ") == (TargetKind.V, TargetKind.EPS)
    with pytest.raises(ValueError):
        parse_targets("x0, score")


def test_load_file(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text(
        "# comment\nschedule = vp\ntarget = v\niterations = 10\nplot = true\n"
        "ntk_times = 0.1, 0.9\ncenters = 1,0; -1,0\n"
    )
    config = load_config(path)
    assert isinstance(config.schedule_model(), VpSchedule)
    assert config.target_spec().kind == "v"
    assert config.iterations == 10
    assert config.plot is True
    assert config.ntk_times == (0.1, 0.9)
    assert config.gmm().n_components == 2


def test_overrides_win_and_none_is_ignored(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text("seed = 3\nout_dir = a\n")
    config = load_config(path, seed=9, out_dir=None)
    assert config.seed == 9
    assert config.out_dir == "a"


def test_train_config_follows_experiment():
    config = ExperimentConfig(iterations=5, t_lo=0.2, t_hi=0.6, weight="erd")
    train = config.train_config()
    assert train.iterations == 5
    assert train.t_range == (0.2, 0.6)
    assert train.weight == "erd"
    assert config.train_config(weight="uniform", seed=4).seed == 4
    assert config.train_config(target="u").target.kind == "u"
    assert train.target.kind == "x0"


@pytest.mark.parametrize(
    "text",
    [
        "speed = 3\n",
        "target = score\n",
        "schedule = cosine\n",
        "iterations = many\n",
        "bins = 0:0.4, 0.5:1\n",
        "batch = 0\n",
        "ntk_times = 0.5\n",
        "t_lo = 0.8\nt_hi = 0.2\n",
        "schedule = vp\nbeta_min = 5\nbeta_max = 1\n",
        "embed_dim = 7\n",
        "pca_times = 1.5\n",
        "targets = x0, eps, x0\n",
        "targets = v, score\n",
    ],
)
def test_invalid_files(tmp_path, text):
    path = tmp_path / "bad.conf"
    path.write_text(text)
    with pytest.raises(ConfigError):
        load_config(path)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.conf")


def test_unknown_override():
    with pytest.raises(ConfigError):
        load_config(speed=3)


def test_keyless_value():
    with pytest.raises(ConfigError):
        parse_values({"seed": None})


def test_as_dict_is_json_friendly():
    payload = ExperimentConfig().as_dict()
    assert payload["bins"][0] == [0.0, 0.2]
    assert payload["centers"][0] == [2.0, 2.0]
    assert payload["ntk_times"] == [0.05, 0.35, 0.65, 0.95]
    assert payload["targets"] == ["eps", "x0", "v", "u"]
