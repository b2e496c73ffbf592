# SPDX-FileCopyrightText: 2025 guided-mixup contributors
# SPDX-License-Identifier: GPL-3.0

"""Saliency maps: spectral residual extraction, blur and sum-to-1 normalization.

The batch entry point is `prepare_saliency`, which yields one normalized map
per image at the image's own resolution, in batch order.
"""

from enum import Enum
from pathlib import Path

import numpy as np

from pydantic import BaseModel, Field, field_validator
from scipy import ndimage
from typeguard import typechecked

from .errors import (
    BatchItemError,
    ParameterError,
    SaliencyError,
    ShapeMismatchError,
)
from .tensor_core import check_image, resize_bilinear, to_grayscale
from .tensor_io import read_tensor
from .utils.clogger import create_logger
from .utils.workers import ordered_map

# Constants
SR_WORKING_SIZE: int = 64
SR_BOX_SIZE: int = 3
LOG_EPS: float = 1e-12
FLAT_EPS: float = 1e-12
DEFAULT_BLUR_KERNEL: int = 7
DEFAULT_BLUR_SIGMA: float = 3.0

logger = create_logger(__name__, "SALIENCY")


class SaliencyMethod(str, Enum):
    SR = "sr"
    EXTERNAL = "external"


class SaliencyParams(BaseModel):
    blur_kernel: int = Field(default=DEFAULT_BLUR_KERNEL, ge=1)
    blur_sigma: float = Field(default=DEFAULT_BLUR_SIGMA, gt=0)
    working_size: int = Field(default=SR_WORKING_SIZE, ge=1)

    @field_validator("blur_kernel")
    def validate_kernel(cls, v):
        if v % 2 == 0:
            raise ValueError(f"blur kernel must be odd, got {v}")
        return v


@typechecked
def spectral_residual(img: np.ndarray, working_size: int = SR_WORKING_SIZE) -> np.ndarray:
    """Spectral residual saliency of one image.

    grayscale -> resize (longer side = `working_size`) -> FFT -> log amplitude
    minus its 3x3 box average -> inverse FFT with the original phase ->
    squared magnitude -> resize back to the input resolution.

    A constant image has no structure to single out; it gets a flat map.
    """
    img = check_image(img)
    if working_size < 1:
        raise ParameterError(f"working size must be >= 1, got {working_size}")

    height, width = img.shape[:2]
    gray = to_grayscale(img)[..., 0].astype(np.float64)
    if np.ptp(gray) <= FLAT_EPS:
        return np.ones((height, width), dtype=np.float64)

    scale = working_size / max(height, width)
    work_h = max(1, int(round(height * scale)))
    work_w = max(1, int(round(width * scale)))
    small = resize_bilinear(gray, work_h, work_w)

    spectrum = np.fft.fft2(small)
    log_amplitude = np.log(np.abs(spectrum) + LOG_EPS)
    phase = np.angle(spectrum)
    residual = log_amplitude - ndimage.uniform_filter(
        log_amplitude, size=SR_BOX_SIZE, mode="reflect"
    )
    saliency = np.abs(np.fft.ifft2(np.exp(residual + 1j * phase))) ** 2

    return resize_bilinear(saliency, height, width)


@typechecked
def gaussian_kernel(kernel: int = DEFAULT_BLUR_KERNEL, sigma: float = DEFAULT_BLUR_SIGMA) -> np.ndarray:
    """Normalized 1-D Gaussian weights, centered at `kernel // 2`."""
    if kernel < 1 or kernel % 2 == 0:
        raise ParameterError(f"blur kernel must be a positive odd size, got {kernel}")
    if sigma <= 0:
        raise ParameterError(f"blur sigma must be > 0, got {sigma}")

    radius = kernel // 2
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    weights = np.exp(-(x**2) / (2.0 * sigma**2))
    return weights / weights.sum()


@typechecked
def gaussian_blur(
    saliency: np.ndarray,
    kernel: int = DEFAULT_BLUR_KERNEL,
    sigma: float = DEFAULT_BLUR_SIGMA,
) -> np.ndarray:
    """Separable Gaussian blur with reflect padding."""
    if saliency.ndim != 2:
        raise ShapeMismatchError(f"saliency map must be 2-D, got {saliency.shape}")

    weights = gaussian_kernel(kernel, sigma)
    out = ndimage.convolve1d(saliency.astype(np.float64), weights, axis=0, mode="reflect")
    return ndimage.convolve1d(out, weights, axis=1, mode="reflect")


@typechecked
def normalize_sum_to_1(saliency: np.ndarray) -> np.ndarray:
    """Divide by the total mass; near-zero mass gives the uniform map."""
    saliency = saliency.astype(np.float64)
    if saliency.size == 0:
        raise ShapeMismatchError("cannot normalize an empty saliency map")
    if saliency.min() < 0.0:
        raise SaliencyError("saliency values must be nonnegative")

    total = saliency.sum()
    if total < FLAT_EPS:
        return np.full(saliency.shape, 1.0 / saliency.size)
    return saliency / total


@typechecked
def load_external_saliency(path: Path, target_h: int, target_w: int) -> np.ndarray:
    """Load a rank-2 GMTN map (e.g. a signed gradient map), rectified and resized."""
    raw = read_tensor(path)
    if raw.ndim != 2:
        raise ShapeMismatchError(f"{path}: external saliency must be rank 2, got rank {raw.ndim}")

    rectified = np.abs(raw.astype(np.float64))
    return resize_bilinear(rectified, target_h, target_w)


@typechecked
def prepare_saliency(
    batch: list[np.ndarray],
    method: SaliencyMethod = SaliencyMethod.SR,
    params: SaliencyParams | None = None,
    saliency_paths: list[Path] | None = None,
    workers: int | None = None,
) -> list[np.ndarray]:
    """Saliency -> blur -> sum-to-1 normalization for every image of a batch.

    Args:
        batch: Images of identical dimensions.
        method: `sr` computes spectral residual maps, `external` loads one
            GMTN map per image from `saliency_paths`.
        params: Blur and working-size parameters.
        saliency_paths: Required for the external method, one per image.
        workers: Fan-out cap, `None` uses `GMX_THREADS`.

    Returns:
        list[np.ndarray]: Normalized maps in batch order.

    Raises:
        ShapeMismatchError: Empty batch, mixed image sizes, path count mismatch.
        BatchItemError: Wraps any per-image failure with its batch index.
    """
    params = params or SaliencyParams()
    if not batch:
        raise ShapeMismatchError("saliency batch is empty")
    if method == SaliencyMethod.EXTERNAL and (
        saliency_paths is None or len(saliency_paths) != len(batch)
    ):
        raise ShapeMismatchError("external saliency needs exactly one map path per image")

    height, width = batch[0].shape[:2]

    def one(index: int) -> np.ndarray:
        try:
            img = batch[index]
            if img.shape[:2] != (height, width):
                raise ShapeMismatchError(
                    f"image size {img.shape[:2]} differs from batch size {(height, width)}"
                )
            if method == SaliencyMethod.SR:
                raw = spectral_residual(img, params.working_size)
            else:
                assert saliency_paths is not None
                raw = load_external_saliency(saliency_paths[index], height, width)
            blurred = gaussian_blur(raw, params.blur_kernel, params.blur_sigma)
            return normalize_sum_to_1(blurred)
        except BatchItemError:
            raise
        except Exception as e:
            raise BatchItemError(index, e) from e

    maps = ordered_map(one, range(len(batch)), workers=workers)
    logger.debug(f"prepared {len(maps)} {method.value} saliency maps at {height}x{width}")
    return maps
