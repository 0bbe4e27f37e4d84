"""Binary and CSV sample files.

Binary layout (little-endian): a 16-byte header ``b"CEVM"``, ``u32``
version, ``u64`` pair count, followed by ``count`` pairs of ``f64``
``(x, y)``.  CSV files have an ``x,y`` header and ``repr``-formatted floats.
"""

from __future__ import annotations

import csv
import struct
from pathlib import Path
from typing import BinaryIO

import numpy as np

__all__ = ["MAGIC", "VERSION", "HEADER", "SampleWriter", "write_samples", "read_samples"]

MAGIC = b"CEVM"
VERSION = 1
HEADER = struct.Struct("<4sIQ")
_PAIR = np.dtype("<f8")


class SampleWriter:
    """Streaming binary writer; the count in the header is patched on close."""

    def __init__(self, path):
        self.path = Path(path)
        self._fh: BinaryIO = open(self.path, "wb")
        self._fh.write(HEADER.pack(MAGIC, VERSION, 0))
        self.count = 0

    def write(self, x, y) -> None:
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if x.shape != y.shape or x.ndim != 1:
            raise ValueError("x and y must be 1-d arrays of equal length")
        block = np.empty((x.size, 2), dtype=_PAIR)
        block[:, 0] = x
        block[:, 1] = y
        self._fh.write(block.tobytes())
        self.count += x.size

    def close(self) -> None:
        if self._fh.closed:
            return
        self._fh.seek(0)
        self._fh.write(HEADER.pack(MAGIC, VERSION, self.count))
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def write_samples(path, x, y, fmt: str = "bin") -> None:
    if fmt == "bin":
        with SampleWriter(path) as w:
            w.write(x, y)
    elif fmt == "csv":
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(["x", "y"])
            wr.writerows((repr(float(a)), repr(float(b))) for a, b in zip(x, y))
    else:
        raise ValueError(f"unknown sample format {fmt!r}")


def read_samples(path) -> tuple[np.ndarray, np.ndarray]:
    """Read a binary or CSV sample file (detected from the magic bytes)."""
    path = Path(path)
    with open(path, "rb") as fh:
        head = fh.read(HEADER.size)
        if head[:4] == MAGIC:
            if len(head) < HEADER.size:
                raise ValueError("truncated sample file header")
            _, version, count = HEADER.unpack(head)
            if version != VERSION:
                raise ValueError(f"unsupported sample file version {version}")
            data = np.frombuffer(fh.read(), dtype=_PAIR)
            if data.size != 2 * count:
                raise ValueError(f"sample file holds {data.size // 2} pairs, header says {count}")
            data = data.reshape(count, 2).astype(np.float64)
            return data[:, 0].copy(), data[:, 1].copy()
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0]] != ["x", "y"]:
        raise ValueError("not a CEVM sample file")
    arr = np.array([[float(a), float(b)] for a, b in rows[1:]], dtype=float).reshape(-1, 2)
    return arr[:, 0].copy(), arr[:, 1].copy()
