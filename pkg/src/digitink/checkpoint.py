"""Versioned binary checkpoint container.

Layout: 4-byte magic ``DGTK``, 1-byte format version, 4-byte little-endian
header length, UTF-8 JSON header, then the raw bytes of every array in
header order (C row-major, little-endian).  The writer is fully
deterministic, so identical training runs produce byte-identical files,
and load(save(x)) round-trips bit-exactly.

Each parameterized layer contributes weights, biases and both momentum
velocity buffers.  The header also carries the feature-normalization
constants computed on the training split and the training seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .models import ModelSpec
from .nn.network import Network

MAGIC = b"DGTK"
FORMAT_VERSION = 1

_ARRAY_SUFFIXES = ("weights", "biases", "vel_weights", "vel_biases")


@dataclass
class Checkpoint:
    model: ModelSpec
    arrays: list[np.ndarray]
    normalization: dict
    train_seed: int
    meta: dict = field(default_factory=dict)

    def build_network(self, *, dtype=np.float32) -> Network:
        net = self.model.build(rng=np.random.default_rng(0), dtype=dtype)
        net.set_state(self.arrays)
        return net

    @classmethod
    def from_network(
        cls, network: Network, model: ModelSpec, normalization: dict, train_seed: int, meta=None
    ) -> "Checkpoint":
        return cls(
            model=model,
            arrays=network.get_state(),
            normalization=normalization,
            train_seed=train_seed,
            meta=dict(meta or {}),
        )


def save(path, ckpt: Checkpoint) -> None:
    names = []
    for i in range(len(ckpt.arrays) // len(_ARRAY_SUFFIXES)):
        names.extend(f"param{i}.{suffix}" for suffix in _ARRAY_SUFFIXES)
    header = {
        "format_version": FORMAT_VERSION,
        "model": ckpt.model.to_dict(),
        "normalization": ckpt.normalization,
        "train_seed": ckpt.train_seed,
        "meta": ckpt.meta,
        "arrays": [
            {"name": name, "shape": list(a.shape), "dtype": a.dtype.str}
            for name, a in zip(names, ckpt.arrays)
        ],
    }
    blob = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(bytes([FORMAT_VERSION]))
        fh.write(len(blob).to_bytes(4, "little"))
        fh.write(blob)
        for a in ckpt.arrays:
            fh.write(np.ascontiguousarray(a).tobytes())


def load(path) -> Checkpoint:
    path = Path(path)
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != MAGIC:
            raise ValueError(f"{path}: not a checkpoint file (bad magic {magic!r})")
        version = fh.read(1)[0]
        if version != FORMAT_VERSION:
            raise ValueError(f"{path}: unsupported checkpoint version {version}")
        header_len = int.from_bytes(fh.read(4), "little")
        header = json.loads(fh.read(header_len).decode("utf-8"))
        arrays = []
        for entry in header["arrays"]:
            dtype = np.dtype(entry["dtype"])
            count = int(np.prod(entry["shape"])) if entry["shape"] else 1
            data = fh.read(count * dtype.itemsize)
            if len(data) != count * dtype.itemsize:
                raise ValueError(f"{path}: truncated array {entry['name']}")
            arrays.append(np.frombuffer(data, dtype=dtype).reshape(entry["shape"]).copy())
        trailing = fh.read(1)
        if trailing:
            raise ValueError(f"{path}: trailing bytes after declared arrays")
    return Checkpoint(
        model=ModelSpec.from_dict(header["model"]),
        arrays=arrays,
        normalization=header["normalization"],
        train_seed=header["train_seed"],
        meta=header.get("meta", {}),
    )
