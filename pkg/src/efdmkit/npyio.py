"""Reader and writer for rank-4 float tensors in NPY version 1.0 format.

Only little-endian ``<f4`` / ``<f8`` payloads in C order are accepted, and
every value must be finite. Files written here load with :func:`numpy.load`
and the round trip is bit-exact.
"""
from __future__ import annotations

import ast
import os
import struct

import numpy as np

from .errors import (
    BadHeaderError,
    BadMagicError,
    FortranOrderError,
    NonFiniteError,
    PayloadSizeError,
    RankError,
    UnsupportedDtypeError,
    UnsupportedVersionError,
)

MAGIC = b"\x93NUMPY"
_DTYPES = {"<f4": np.dtype("<f4"), "<f8": np.dtype("<f8")}
_ALIGN = 64


def _header_bytes(descr: str, shape: tuple) -> bytes:
    text = "{'descr': '%s', 'fortran_order': False, 'shape': %r, }" % (descr, tuple(shape))
    # magic(6) + version(2) + length(2) + header, padded with spaces to a multiple of 64
    pad = -(10 + len(text) + 1) % _ALIGN
    text = text + " " * pad + "\n"
    return MAGIC + b"\x01\x00" + struct.pack("<H", len(text)) + text.encode("latin1")


def _validate(arr: np.ndarray) -> np.ndarray:
    if arr.ndim != 4:
        raise RankError(f"expected a rank-4 tensor, got shape {arr.shape}")
    if min(arr.shape) < 1:
        raise BadHeaderError(f"empty axis in shape {arr.shape}")
    if arr.dtype.kind != "f" or arr.dtype.itemsize not in (4, 8):
        raise UnsupportedDtypeError(f"unsupported dtype {arr.dtype.str}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError("tensor contains NaN or Inf")
    return arr


def write_tensor(path, t) -> None:
    arr = _validate(np.asarray(t))
    le = arr.astype(arr.dtype.newbyteorder("<"), order="C", copy=False)
    with open(path, "wb") as fh:
        fh.write(_header_bytes(le.dtype.str, le.shape))
        fh.write(le.tobytes(order="C"))


def read_tensor(path) -> np.ndarray:
    """Load a tensor written by :func:`write_tensor` (or ``numpy.save``).

    Raises a distinct :class:`~efdmkit.errors.NpyFormatError` subclass for
    each way the file can be rejected.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:6] != MAGIC:
        raise BadMagicError(f"{os.fspath(path)}: not an NPY file (bad magic)")
    if len(data) < 10:
        raise BadHeaderError("truncated header")
    major, minor = data[6], data[7]
    if (major, minor) != (1, 0):
        raise UnsupportedVersionError(f"NPY version {major}.{minor} not supported, need 1.0")
    (hlen,) = struct.unpack("<H", data[8:10])
    if len(data) < 10 + hlen:
        raise BadHeaderError("truncated header")
    try:
        header = ast.literal_eval(data[10:10 + hlen].decode("latin1"))
    except (ValueError, SyntaxError, UnicodeDecodeError) as exc:
        raise BadHeaderError(f"unparseable header: {exc}") from None
    if not isinstance(header, dict) or set(header) != {"descr", "fortran_order", "shape"}:
        raise BadHeaderError(f"header must have keys descr, fortran_order, shape: {header!r}")

    descr = header["descr"]
    if descr not in _DTYPES:
        raise UnsupportedDtypeError(f"unsupported dtype {descr!r}")
    if header["fortran_order"] is not False:
        raise FortranOrderError("fortran_order=True is not supported")
    shape = header["shape"]
    if not isinstance(shape, tuple) or not all(isinstance(d, int) and d >= 1 for d in shape):
        raise BadHeaderError(f"invalid shape {shape!r}")
    if len(shape) != 4:
        raise RankError(f"expected a rank-4 tensor, got shape {shape}")

    dtype = _DTYPES[descr]
    payload = data[10 + hlen:]
    expected = int(np.prod(shape)) * dtype.itemsize
    if len(payload) != expected:
        raise PayloadSizeError(f"payload size mismatch: {len(payload)} bytes, expected {expected}")
    arr = np.frombuffer(payload, dtype=dtype).reshape(shape).copy()
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError("tensor contains NaN or Inf")
    return arr
