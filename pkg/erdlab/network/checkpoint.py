"""Binary checkpoint format.

    bytes 0-3   magic b"ERDL"
    bytes 4-7   header length H, little-endian uint32
    next H      UTF-8 JSON header: MlpConfig fields, activation, seed,
                t_range, param_count, format version
    remainder   param_count little-endian float64 values
"""

import json
import struct
from pathlib import Path

import numpy as np
from loguru import logger

from erdlab.errors import ContractError, MissingCheckpointError
from erdlab.network.mlp import ACTIVATION, MlpConfig, MlpModel

MAGIC = b"ERDL"
FORMAT_VERSION = 1


def save_checkpoint(
    path: str | Path, model: MlpModel, t_range: tuple[float, float] = (0.0, 1.0), **extra
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = model.config.as_dict() | {
        "activation": ACTIVATION,
        "seed": model.seed,
        "t_range": [float(t_range[0]), float(t_range[1])],
        "param_count": model.param_count,
        "format_version": FORMAT_VERSION,
    } | extra
    header_bytes = json.dumps(header, sort_keys=True).encode("utf-8")

    with open(path, "wb") as handle:
        handle.write(MAGIC)
        handle.write(struct.pack("<I", len(header_bytes)))
        handle.write(header_bytes)
        handle.write(model.params.astype("<f8").tobytes())

    logger.debug(f"Saved checkpoint {path} ({model.param_count} parameters)")
    return path


def load_checkpoint(path: str | Path) -> tuple[MlpModel, dict]:
    path = Path(path)
    if not path.exists():
        raise MissingCheckpointError(f"Checkpoint not found: {path}")

    blob = path.read_bytes()
    if blob[:4] != MAGIC:
        raise ContractError(f"{path} is not an erdlab checkpoint")
    (header_length,) = struct.unpack("<I", blob[4:8])
    header = json.loads(blob[8 : 8 + header_length].decode("utf-8"))
    if header.get("activation") != ACTIVATION:
        raise ContractError(f"{path} uses activation {header.get('activation')!r}")

    config = MlpConfig(
        **{field: header[field] for field in MlpConfig.__dataclass_fields__}
    )
    params = np.frombuffer(blob[8 + header_length :], dtype="<f8").astype(np.float64)
    if params.size != header["param_count"] or params.size != config.param_count:
        raise ContractError(
            f"{path} holds {params.size} parameters, header says {header['param_count']}"
        )
    if not np.all(np.isfinite(params)):
        raise ContractError(f"{path} contains non-finite parameters")

    return MlpModel(config, params, seed=header.get("seed")), header
