"""Bit-exact binary interchange for dense matrices and model checkpoints.

Matrix files and checkpoints are little-endian with fixed headers, so any
language can produce or consume them. Readers validate eagerly: magic,
version, declared sizes against actual byte length, and finiteness of
every value.

Matrix file layout (header 24 bytes):
    magic   4 bytes  "TNTM"
    version u8       1
    dtype   u8       0 = float32, 1 = float64
    reserved 2 bytes zero
    rows    u64 LE
    cols    u64 LE
    payload rows*cols values, row-major, little-endian

Checkpoint layout:
    magic      8 bytes "TNTMCKPT"
    version    u8      1
    header_len u64 LE
    header     JSON (UTF-8): {"config": {...}, "tensors": [
                   {"name", "dtype", "shape", "byte_offset"}, ...]}
    payload    concatenated tensor data, offsets relative to payload start
"""

import json
import struct

import numpy as np

from .errors import (
    BadMagic,
    HeaderSchemaError,
    NonFiniteValue,
    TruncatedPayload,
    UnsupportedVersion,
)

MATRIX_MAGIC = b"TNTM"
CHECKPOINT_MAGIC = b"TNTMCKPT"
FORMAT_VERSION = 1

_DTYPE_CODES = {np.dtype(np.float32): 0, np.dtype(np.float64): 1}
_CODE_DTYPES = {0: np.dtype("<f4"), 1: np.dtype("<f8")}
_MATRIX_HEADER = struct.Struct("<4sBBHQQ")
_CKPT_PREFIX = struct.Struct("<8sBQ")


def write_matrix(path, matrix: np.ndarray) -> None:
    """Write a 2-D float32/float64 matrix; values must be finite."""
    m = np.ascontiguousarray(matrix)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    if m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"rows and cols must be >= 1, got shape {m.shape}")
    if m.dtype not in _DTYPE_CODES:
        raise ValueError(f"unsupported dtype {m.dtype}; use float32 or float64")
    if not np.all(np.isfinite(m)):
        raise NonFiniteValue("matrix contains NaN or Inf")
    header = _MATRIX_HEADER.pack(
        MATRIX_MAGIC, FORMAT_VERSION, _DTYPE_CODES[m.dtype], 0, m.shape[0], m.shape[1]
    )
    le = m.astype(m.dtype.newbyteorder("<"), copy=False)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(le.tobytes(order="C"))


def read_matrix(path) -> np.ndarray:
    """Read a matrix file, validating magic, version, size, and finiteness."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < _MATRIX_HEADER.size:
        raise TruncatedPayload(f"file is {len(data)} bytes, shorter than the header")
    magic, version, dtype_code, reserved, rows, cols = _MATRIX_HEADER.unpack_from(data)
    if magic != MATRIX_MAGIC:
        raise BadMagic(f"expected {MATRIX_MAGIC!r}, found {magic!r}")
    if version != FORMAT_VERSION:
        raise UnsupportedVersion(f"version {version} not supported")
    if dtype_code not in _CODE_DTYPES:
        raise UnsupportedVersion(f"unknown dtype code {dtype_code}")
    if rows < 1 or cols < 1:
        raise TruncatedPayload(f"declared shape ({rows}, {cols}) is invalid")
    dtype = _CODE_DTYPES[dtype_code]
    expected = _MATRIX_HEADER.size + rows * cols * dtype.itemsize
    if len(data) != expected:
        raise TruncatedPayload(
            f"declared size implies {expected} bytes, file has {len(data)}"
        )
    flat = np.frombuffer(data, dtype=dtype, offset=_MATRIX_HEADER.size)
    matrix = flat.reshape(rows, cols).astype(dtype.newbyteorder("="), copy=True)
    if not np.all(np.isfinite(matrix)):
        raise NonFiniteValue(f"{path}: payload contains NaN or Inf")
    return matrix


# ---------------------------------------------------------------- checkpoints

def write_checkpoint_raw(path, config: dict, tensors: dict[str, np.ndarray]) -> None:
    """Write named tensors plus a JSON config; tensor order is name-sorted
    so identical inputs produce byte-identical files."""
    entries = []
    blobs = []
    offset = 0
    for name in sorted(tensors):
        arr = np.ascontiguousarray(tensors[name])
        if arr.dtype not in _DTYPE_CODES:
            raise ValueError(f"tensor {name}: unsupported dtype {arr.dtype}")
        if not np.all(np.isfinite(arr)):
            raise NonFiniteValue(f"tensor {name} contains NaN or Inf")
        blob = arr.astype(arr.dtype.newbyteorder("<"), copy=False).tobytes(order="C")
        entries.append(
            {
                "name": name,
                "dtype": _DTYPE_CODES[arr.dtype],
                "shape": list(arr.shape),
                "byte_offset": offset,
            }
        )
        blobs.append(blob)
        offset += len(blob)
    header = json.dumps(
        {"config": config, "tensors": entries}, sort_keys=True, separators=(",", ":")
    ).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_CKPT_PREFIX.pack(CHECKPOINT_MAGIC, FORMAT_VERSION, len(header)))
        fh.write(header)
        for blob in blobs:
            fh.write(blob)


def read_checkpoint_raw(path) -> tuple[dict, dict[str, np.ndarray]]:
    """Read (config, tensors), validating structure, offsets, and finiteness."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < _CKPT_PREFIX.size:
        raise TruncatedPayload(f"file is {len(data)} bytes, shorter than the prefix")
    magic, version, header_len = _CKPT_PREFIX.unpack_from(data)
    if magic != CHECKPOINT_MAGIC:
        raise BadMagic(f"expected {CHECKPOINT_MAGIC!r}, found {magic!r}")
    if version != FORMAT_VERSION:
        raise UnsupportedVersion(f"version {version} not supported")
    if _CKPT_PREFIX.size + header_len > len(data):
        raise TruncatedPayload("declared header length exceeds file size")
    try:
        header = json.loads(data[_CKPT_PREFIX.size : _CKPT_PREFIX.size + header_len])
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise HeaderSchemaError(f"header is not valid JSON: {exc}") from exc
    if not isinstance(header, dict) or "config" not in header or "tensors" not in header:
        raise HeaderSchemaError("header must contain 'config' and 'tensors'")
    config = header["config"]
    entries = header["tensors"]
    if not isinstance(config, dict) or not isinstance(entries, list):
        raise HeaderSchemaError("'config' must be an object, 'tensors' a list")

    payload = data[_CKPT_PREFIX.size + header_len :]
    names = set()
    spans = []
    total = 0
    for entry in entries:
        try:
            name = entry["name"]
            dtype_code = entry["dtype"]
            shape = tuple(int(s) for s in entry["shape"])
            offset = int(entry["byte_offset"])
        except (KeyError, TypeError, ValueError) as exc:
            raise HeaderSchemaError(f"malformed tensor entry {entry!r}") from exc
        if name in names:
            raise HeaderSchemaError(f"tensor {name!r} appears more than once")
        names.add(name)
        if dtype_code not in _CODE_DTYPES:
            raise HeaderSchemaError(f"tensor {name!r}: unknown dtype code {dtype_code}")
        if any(s < 0 for s in shape):
            raise HeaderSchemaError(f"tensor {name!r}: negative dimension in {shape}")
        nbytes = int(np.prod(shape, dtype=np.int64)) * _CODE_DTYPES[dtype_code].itemsize
        if offset < 0 or offset + nbytes > len(payload):
            raise TruncatedPayload(f"tensor {name!r} extends past end of payload")
        spans.append((offset, offset + nbytes, name))
        total += nbytes
    spans.sort()
    for (_, end_a, name_a), (start_b, _, name_b) in zip(spans, spans[1:]):
        if start_b < end_a:
            raise HeaderSchemaError(f"tensors {name_a!r} and {name_b!r} overlap")
    if total != len(payload):
        raise TruncatedPayload(
            f"declared tensors cover {total} bytes, payload has {len(payload)}"
        )

    tensors: dict[str, np.ndarray] = {}
    for entry in entries:
        dtype = _CODE_DTYPES[entry["dtype"]]
        shape = tuple(int(s) for s in entry["shape"])
        count = int(np.prod(shape, dtype=np.int64))
        offset = int(entry["byte_offset"])
        flat = np.frombuffer(payload, dtype=dtype, count=count, offset=offset)
        arr = flat.reshape(shape).astype(dtype.newbyteorder("="), copy=True)
        if not np.all(np.isfinite(arr)):
            raise NonFiniteValue(f"tensor {entry['name']!r} contains NaN or Inf")
        tensors[entry["name"]] = arr
    return config, tensors


def save_checkpoint(path, model) -> None:
    """Persist a model (topic parameters + inference network + config)."""
    write_checkpoint_raw(path, model.checkpoint_config(), model.named_tensors())


def load_checkpoint(path):
    """Load a model saved by :func:`save_checkpoint`.

    Validates the tensor set against the configuration (HeaderSchemaError)
    and every tensor shape against (K, N, P, r, layer sizes) (ShapeMismatch).
    """
    from .model import TntmModel  # local import to avoid a module cycle

    config, tensors = read_checkpoint_raw(path)
    return TntmModel.from_checkpoint(config, tensors)
