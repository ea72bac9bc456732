"""
Network weight checkpoints (``.grfw``).

Layout:
    4 bytes   magic b"GRFW"
    1 byte    format version (1)
    4 bytes   uint32 little-endian header length
    n bytes   UTF-8 JSON header: model config, init seed, tensor names, extra metadata
    per tensor, in header order:
        uint16 name length, name (UTF-8), uint8 rank, rank x uint32 dims,
        float64 little-endian values, row-major
"""

import json
import logging
import struct
from pathlib import Path
from typing import Any

import numpy as np

from ..errors import CheckpointError, StorageError
from .network import ModelConfig, Network

logger = logging.getLogger(__name__)

CHECKPOINT_MAGIC = b"GRFW"
CHECKPOINT_VERSION = 1


def save_checkpoint(
    net: Network, path: str | Path, metadata: dict[str, Any] | None = None
) -> Path:
    """Write the network's parameters; identical weights produce identical bytes."""
    path = Path(path)
    header = {
        "model_config": net.config.to_dict(),
        "seed": net.seed,
        "tensors": list(net.params),
        "metadata": metadata or {},
    }
    header_bytes = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")

    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("wb") as handle:
            handle.write(CHECKPOINT_MAGIC)
            handle.write(struct.pack("<BI", CHECKPOINT_VERSION, len(header_bytes)))
            handle.write(header_bytes)
            for name, tensor in net.params.items():
                encoded = name.encode("utf-8")
                handle.write(struct.pack("<H", len(encoded)))
                handle.write(encoded)
                handle.write(struct.pack("<B", tensor.ndim))
                handle.write(struct.pack(f"<{tensor.ndim}I", *tensor.shape))
                handle.write(np.ascontiguousarray(tensor, dtype="<f8").tobytes())
    except OSError as e:
        raise StorageError(f"Cannot write checkpoint {path}: {e}") from e

    logger.info(f"Saved checkpoint {path} ({net.config.parameter_count():,} parameters)")
    return path


class _Reader:
    def __init__(self, blob: bytes, name: str):
        self.blob = blob
        self.name = name
        self.offset = 0

    def take(self, n: int) -> bytes:
        if self.offset + n > len(self.blob):
            raise CheckpointError(f"{self.name}: truncated at byte {self.offset}")
        chunk = self.blob[self.offset : self.offset + n]
        self.offset += n
        return chunk

    def unpack(self, fmt: str) -> tuple[Any, ...]:
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))


def load_checkpoint(path: str | Path) -> tuple[Network, dict[str, Any]]:
    """
    Read a checkpoint.

    Returns:
        (network, metadata)

    Raises:
        CheckpointError: missing file, bad magic, unknown version, truncation
            or tensors inconsistent with the stored model config
    """
    path = Path(path)
    try:
        blob = path.read_bytes()
    except OSError as e:
        raise CheckpointError(f"Cannot read checkpoint {path}: {e}") from e

    reader = _Reader(blob, path.name)
    if reader.take(4) != CHECKPOINT_MAGIC:
        raise CheckpointError(f"{path.name}: not a checkpoint (bad magic)")
    version, header_len = reader.unpack("<BI")
    if version != CHECKPOINT_VERSION:
        raise CheckpointError(
            f"{path.name}: unsupported checkpoint version {version} "
            f"(this build reads version {CHECKPOINT_VERSION})"
        )
    try:
        header = json.loads(reader.take(header_len).decode("utf-8"))
        config = ModelConfig.from_dict(header["model_config"])
    except (UnicodeDecodeError, json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
        raise CheckpointError(f"{path.name}: corrupt header: {e}") from e

    params: dict[str, np.ndarray] = {}
    for expected_name in header["tensors"]:
        (name_len,) = reader.unpack("<H")
        name = reader.take(name_len).decode("utf-8")
        if name != expected_name:
            raise CheckpointError(f"{path.name}: tensor {name!r}, expected {expected_name!r}")
        (rank,) = reader.unpack("<B")
        dims = reader.unpack(f"<{rank}I")
        count = int(np.prod(dims))
        values = np.frombuffer(reader.take(count * 8), dtype="<f8").astype(np.float64)
        params[name] = values.reshape(dims)

    if reader.offset != len(blob):
        raise CheckpointError(f"{path.name}: {len(blob) - reader.offset} trailing bytes")

    try:
        net = Network(config, params, header.get("seed"))
    except ValueError as e:
        raise CheckpointError(f"{path.name}: tensors do not match model config: {e}") from e

    logger.info(f"Loaded checkpoint {path}")
    return net, header.get("metadata", {})
