# SPDX-FileCopyrightText: 2025 guided-mixup contributors
# SPDX-License-Identifier: GPL-3.0

"""GMTN tensor files and PNG ingestion.

GMTN layout, little-endian throughout::

    b"GMTN" | version u8 = 1 | dtype u8 = 1 (float32) | ndim u8 | reserved u8 = 0
    ndim x u32 dimensions
    prod(dims) x float32, row-major
"""

import struct

from pathlib import Path

import cv2
import numpy as np

from typeguard import typechecked

from .errors import (
    BadMagicError,
    ImageReadError,
    MissingInputError,
    ShapeMismatchError,
    TensorFormatError,
    TruncatedPayloadError,
    UnsupportedDtypeError,
    UnsupportedVersionError,
)
from .tensor_core import check_image
from .utils.clogger import create_logger

# Constants
GMTN_MAGIC: bytes = b"GMTN"
GMTN_VERSION: int = 1
GMTN_DTYPE_FLOAT32: int = 1
GMTN_HEADER = struct.Struct("<4sBBBB")
PAYLOAD_DTYPE = np.dtype("<f4")
MAX_NDIM: int = 255

logger = create_logger(__name__, "TENSOR")


@typechecked
def encode_tensor(t: np.ndarray) -> bytes:
    if t.ndim == 0 or t.ndim > MAX_NDIM:
        raise ShapeMismatchError(f"cannot encode tensor with {t.ndim} dimensions")

    header = GMTN_HEADER.pack(GMTN_MAGIC, GMTN_VERSION, GMTN_DTYPE_FLOAT32, t.ndim, 0)
    dims = struct.pack(f"<{t.ndim}I", *t.shape)
    payload = np.ascontiguousarray(t, dtype=PAYLOAD_DTYPE).tobytes()
    return header + dims + payload


@typechecked
def decode_tensor(data: bytes) -> np.ndarray:
    """Decode a GMTN byte string.

    Raises:
        BadMagicError: The first four bytes are not `GMTN`.
        UnsupportedVersionError: Version byte is not 1.
        UnsupportedDtypeError: Dtype byte is not 1 (float32).
        TruncatedPayloadError: Header, dimensions or payload are cut short.
        TensorFormatError: Trailing bytes after the payload.
    """
    if len(data) < GMTN_HEADER.size:
        if not GMTN_MAGIC.startswith(data[:4]):
            raise BadMagicError(f"bad magic: {data[:4]!r}")
        raise TruncatedPayloadError(f"header needs {GMTN_HEADER.size} bytes, got {len(data)}")

    magic, version, dtype, ndim, _ = GMTN_HEADER.unpack_from(data)
    if magic != GMTN_MAGIC:
        raise BadMagicError(f"bad magic: {magic!r}")
    if version != GMTN_VERSION:
        raise UnsupportedVersionError(f"unsupported GMTN version: {version}")
    if dtype != GMTN_DTYPE_FLOAT32:
        raise UnsupportedDtypeError(f"unsupported GMTN dtype: {dtype}")

    dims_end = GMTN_HEADER.size + 4 * ndim
    if len(data) < dims_end:
        raise TruncatedPayloadError(f"dimension block needs {dims_end} bytes, got {len(data)}")
    shape = struct.unpack_from(f"<{ndim}I", data, GMTN_HEADER.size)

    count = int(np.prod(shape, dtype=np.int64))
    payload_end = dims_end + count * PAYLOAD_DTYPE.itemsize
    if len(data) < payload_end:
        raise TruncatedPayloadError(
            f"payload needs {payload_end - dims_end} bytes, got {len(data) - dims_end}"
        )
    if len(data) > payload_end:
        raise TensorFormatError(f"{len(data) - payload_end} trailing bytes after payload")

    values = np.frombuffer(data, dtype=PAYLOAD_DTYPE, count=count, offset=dims_end)
    return values.astype(np.float32).reshape(shape)


@typechecked
def write_tensor(t: np.ndarray, path: Path) -> None:
    path.write_bytes(encode_tensor(t))
    logger.debug(f"wrote tensor {t.shape} -> {path}")


@typechecked
def read_tensor(path: Path) -> np.ndarray:
    if not path.exists():
        raise MissingInputError(f"tensor file not found: {path}")
    try:
        return decode_tensor(path.read_bytes())
    except TensorFormatError as e:
        raise type(e)(f"{path}: {e}") from e


@typechecked
def read_png(path: Path) -> np.ndarray:
    """Decode an 8/16-bit gray or RGB(A) PNG into an `H x W x C` image in [0, 1].

    Alpha is dropped, channel order is RGB.
    """
    if not path.exists():
        raise MissingInputError(f"image file not found: {path}")

    raw = cv2.imread(path.as_posix(), cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise ImageReadError(f"could not decode image: {path}")

    if raw.dtype == np.uint8:
        img = raw.astype(np.float32) / 255.0
    elif raw.dtype == np.uint16:
        img = raw.astype(np.float32) / 65535.0
    else:
        raise ImageReadError(f"unsupported pixel depth {raw.dtype}: {path}")

    if img.ndim == 2:
        img = img[..., np.newaxis]
    elif img.shape[2] == 4:
        img = cv2.cvtColor(img, cv2.COLOR_BGRA2RGB)
    elif img.shape[2] == 3:
        img = cv2.cvtColor(img, cv2.COLOR_BGR2RGB)
    else:
        raise ImageReadError(f"unsupported channel layout {img.shape}: {path}")

    return check_image(img)


@typechecked
def write_png(path: Path, img: np.ndarray) -> None:
    """Encode an image as 8-bit PNG."""
    img = check_image(img)
    raw = np.round(img * 255.0).astype(np.uint8)
    if raw.shape[2] == 3:
        raw = cv2.cvtColor(raw, cv2.COLOR_RGB2BGR)
    else:
        raw = raw[..., 0]

    if not cv2.imwrite(path.as_posix(), raw):
        logger.error(f"cv2.imwrite failed: {path}")
        raise ImageReadError(f"could not write image: {path}")
