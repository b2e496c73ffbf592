# SPDX-FileCopyrightText: 2025 guided-mixup contributors
# SPDX-License-Identifier: GPL-3.0

"""Image and label tensors shared by every stage of the pipeline.

Images are `H x W x C` float32 arrays with values in [0, 1], row-major and
channel-interleaved. Saliency maps are plain `H x W` float arrays. Labels are
1-D probability vectors.
"""

import numpy as np

from scipy import ndimage
from typeguard import typechecked

from .errors import ChannelError, ParameterError, ShapeMismatchError

# Constants
IMAGE_DTYPE = np.float32
SUPPORTED_CHANNELS: set[int] = {1, 3}
LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])  # Rec.601
LABEL_SUM_TOL: float = 1e-6


@typechecked
def check_image(img: np.ndarray) -> np.ndarray:
    """Validate an image tensor and return it as contiguous float32.

    Raises:
        ShapeMismatchError: If the array is not `H x W x C` or is empty.
        ChannelError: If C is not 1 or 3.
        ParameterError: If a value lies outside [0, 1].
    """
    if img.ndim != 3 or img.shape[0] == 0 or img.shape[1] == 0:
        raise ShapeMismatchError(f"expected a nonempty H x W x C image, got {img.shape}")
    if img.shape[2] not in SUPPORTED_CHANNELS:
        raise ChannelError(f"unsupported channel count: {img.shape[2]}")

    img = np.ascontiguousarray(img, dtype=IMAGE_DTYPE)
    if not np.all(np.isfinite(img)) or img.min() < 0.0 or img.max() > 1.0:
        raise ParameterError("image values must lie in [0, 1]")
    return img


@typechecked
def check_label(label: np.ndarray) -> np.ndarray:
    """Validate a label vector (nonnegative, sums to 1)."""
    label = np.asarray(label, dtype=np.float64)
    if label.ndim != 1 or label.size == 0:
        raise ShapeMismatchError(f"label must be a nonempty vector, got {label.shape}")
    if label.min() < 0.0 or abs(label.sum() - 1.0) > LABEL_SUM_TOL:
        raise ParameterError("label must be nonnegative and sum to 1")
    return label


@typechecked
def one_hot(class_index: int, num_classes: int) -> np.ndarray:
    if not 0 <= class_index < num_classes:
        raise ParameterError(f"class index {class_index} not in [0, {num_classes})")
    label = np.zeros(num_classes, dtype=np.float64)
    label[class_index] = 1.0
    return label


@typechecked
def to_grayscale(img: np.ndarray) -> np.ndarray:
    """Convert to a single channel with Rec.601 luma weights.

    1-channel input is returned unchanged.
    """
    if img.ndim != 3 or img.shape[2] not in SUPPORTED_CHANNELS:
        raise ChannelError(f"unsupported image shape for grayscale: {img.shape}")
    if img.shape[2] == 1:
        return img

    gray = np.tensordot(img.astype(np.float64), LUMA_WEIGHTS, axes=([2], [0]))
    # weights sum to 1, clip only removes rounding above 1
    gray = np.clip(gray, 0.0, 1.0)
    return gray[..., np.newaxis].astype(img.dtype)


@typechecked
def resize_bilinear(img: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Bilinear resize with corner-aligned sampling.

    Works on `H x W` maps and `H x W x C` images. Output corners sample the
    input corners exactly, so values stay within the input's range.

    Raises:
        ParameterError: If a target dimension is smaller than 1.
    """
    if out_h < 1 or out_w < 1:
        raise ParameterError(f"zero-sized resize target: {out_h}x{out_w}")
    if img.ndim not in (2, 3) or img.shape[0] == 0 or img.shape[1] == 0:
        raise ShapeMismatchError(f"cannot resize array of shape {img.shape}")

    in_h, in_w = img.shape[:2]
    if (in_h, in_w) == (out_h, out_w):
        return img.copy()

    rows = np.linspace(0.0, in_h - 1, out_h)
    cols = np.linspace(0.0, in_w - 1, out_w)
    grid = np.stack(np.meshgrid(rows, cols, indexing="ij"))

    def sample(plane: np.ndarray) -> np.ndarray:
        out = ndimage.map_coordinates(
            plane.astype(np.float64), grid, order=1, mode="nearest"
        )
        return np.clip(out, plane.min(), plane.max())

    if img.ndim == 2:
        return sample(img).astype(img.dtype)

    channels = [sample(img[..., c]) for c in range(img.shape[2])]
    return np.stack(channels, axis=-1).astype(img.dtype)
