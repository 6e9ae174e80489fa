"""Versioned binary container for named tensors plus a config header.

Layout: magic ``BTCK``, format version (u32 LE), header length (u64 LE),
header JSON (config dict and tensor table with names, dtypes, shapes),
then each tensor's raw little-endian bytes in table order. Writing is
fully deterministic, so save -> load -> save is byte-identical.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path
from typing import Union

import numpy as np

MAGIC = b"BTCK"
FORMAT_VERSION = 1


class CheckpointError(ValueError):
    pass


def save_checkpoint(path: Union[str, Path], config: dict, tensors: dict[str, np.ndarray]) -> None:
    table = []
    blobs = []
    for name in sorted(tensors):
        arr = np.asarray(tensors[name])
        shape = list(arr.shape)  # before ascontiguousarray, which promotes 0-d to 1-d
        arr = np.ascontiguousarray(arr)
        dtype = arr.dtype.newbyteorder("<")
        table.append({"name": name, "dtype": dtype.str, "shape": shape})
        blobs.append(arr.astype(dtype, copy=False).tobytes())
    header = json.dumps(
        {"config": config, "tensors": table}, sort_keys=True, separators=(",", ":")
    ).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", FORMAT_VERSION))
        fh.write(struct.pack("<Q", len(header)))
        fh.write(header)
        for blob in blobs:
            fh.write(blob)


def load_checkpoint(path: Union[str, Path]) -> tuple[dict, dict[str, np.ndarray]]:
    with open(path, "rb") as fh:
        if fh.read(4) != MAGIC:
            raise CheckpointError(f"{path}: not a checkpoint file")
        (version,) = struct.unpack("<I", fh.read(4))
        if version != FORMAT_VERSION:
            raise CheckpointError(f"{path}: unsupported format version {version}")
        (hlen,) = struct.unpack("<Q", fh.read(8))
        header = json.loads(fh.read(hlen).decode("utf-8"))
        tensors = {}
        for entry in header["tensors"]:
            dtype = np.dtype(entry["dtype"])
            shape = tuple(entry["shape"])
            count = int(np.prod(shape)) if shape else 1
            raw = fh.read(count * dtype.itemsize)
            if len(raw) != count * dtype.itemsize:
                raise CheckpointError(f"{path}: truncated tensor {entry['name']!r}")
            tensors[entry["name"]] = np.frombuffer(raw, dtype=dtype).reshape(shape).copy()
    return header["config"], tensors
