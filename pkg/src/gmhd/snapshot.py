"""Binary snapshot format for spectral states.

Layout (all little-endian):
    magic   4 bytes  b"GMHD"
    version u32      currently 1
    n       u32      grid points per side
    box     f64      box side length
    t       f64      clock time
    step    u64      step counter
followed by four blocks u1, u2, b1, b2, each n*n row-major complex
coefficients stored as (real, imag) f64 pairs.
"""

from __future__ import annotations

import struct

import numpy as np

from .errors import ParameterError

MAGIC = b"GMHD"
VERSION = 1
_HEADER = struct.Struct("<4sIIddQ")


def write_snapshot(path, n: int, box_length: float, u, b, t: float, step: int) -> None:
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, n, box_length, t, step))
        for comp in (u[0], u[1], b[0], b[1]):
            fh.write(np.ascontiguousarray(comp, dtype="<c16").tobytes())


def read_snapshot(path):
    """Return (n, box_length, u, b, t, step)."""
    with open(path, "rb") as fh:
        raw = fh.read(_HEADER.size)
        if len(raw) < _HEADER.size:
            raise ParameterError(f"{path}: truncated snapshot header")
        magic, version, n, box, t, step = _HEADER.unpack(raw)
        if magic != MAGIC:
            raise ParameterError(f"{path}: bad magic {magic!r}")
        if version != VERSION:
            raise ParameterError(f"{path}: unsupported snapshot version {version}")
        count = 4 * n * n
        payload = fh.read(count * 16)
        if len(payload) != count * 16:
            raise ParameterError(f"{path}: truncated snapshot payload")
        data = np.frombuffer(payload, dtype="<c16")
    blocks = data.reshape(4, n, n).astype(complex)
    u = np.stack([blocks[0], blocks[1]])
    b = np.stack([blocks[2], blocks[3]])
    return n, box, u, b, t, step
