import json
import struct

import numpy as np
import pytest

from erdlab.errors import ContractError, MissingCheckpointError
from erdlab.network.checkpoint import MAGIC, load_checkpoint, save_checkpoint
from tests.conftest import SMALL_NET


def _rewrite_header(path, **changes):
    blob = path.read_bytes()
    (length,) = struct.unpack("<I", blob[4:8])
    header = json.loads(blob[8 : 8 + length]) | changes
    encoded = json.dumps(header).encode()
    path.write_bytes(MAGIC + struct.pack("<I", len(encoded)) + encoded + blob[8 + length :])


def test_roundtrip_is_bit_exact(small_model, tmp_path, rng):
    path = save_checkpoint(tmp_path / "model.erdl", small_model, t_range=(0.2, 0.4), target="x0")
    loaded, header = load_checkpoint(path)

    np.testing.assert_array_equal(loaded.params, small_model.params)
    assert loaded.config == SMALL_NET
    assert loaded.seed == 7
    assert header["t_range"] == [0.2, 0.4]
    assert header["target"] == "x0"
    assert header["activation"] == "silu"

    x, t = rng.standard_normal((5, 2)), rng.uniform(size=5)
    np.testing.assert_array_equal(loaded.predict(x, t), small_model.predict(x, t))


def test_layout(small_model, tmp_path):
    blob = save_checkpoint(tmp_path / "model.erdl", small_model).read_bytes()
    (length,) = struct.unpack("<I", blob[4:8])
    assert blob[:4] == b"ERDL"
    assert len(blob) == 8 + length + 8 * small_model.param_count


def test_missing_file(tmp_path):
    with pytest.raises(MissingCheckpointError):
        load_checkpoint(tmp_path / "absent.erdl")


def test_bad_magic(small_model, tmp_path):
    path = save_checkpoint(tmp_path / "model.erdl", small_model)
    path.write_bytes(b"NOPE" + path.read_bytes()[4:])
    with pytest.raises(ContractError):
        load_checkpoint(path)


def test_param_count_mismatch(small_model, tmp_path):
    path = save_checkpoint(tmp_path / "model.erdl", small_model)
    _rewrite_header(path, param_count=small_model.param_count + 1)
    with pytest.raises(ContractError):
        load_checkpoint(path)


def test_config_mismatch(small_model, tmp_path):
    path = save_checkpoint(tmp_path / "model.erdl", small_model)
    _rewrite_header(path, hidden_dim=SMALL_NET.hidden_dim + 1)
    with pytest.raises(ContractError):
        load_checkpoint(path)


def test_wrong_activation(small_model, tmp_path):
    path = save_checkpoint(tmp_path / "model.erdl", small_model)
    _rewrite_header(path, activation="relu")
    with pytest.raises(ContractError):
        load_checkpoint(path)


def test_non_finite_parameters(small_model, tmp_path):
    broken = small_model.copy()
    broken.params[3] = np.nan
    path = save_checkpoint(tmp_path / "model.erdl", broken)
    with pytest.raises(ContractError):
        load_checkpoint(path)
