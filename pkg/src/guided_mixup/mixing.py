# SPDX-FileCopyrightText: 2025 guided-mixup contributors
# SPDX-License-Identifier: GPL-3.0

"""Pixel-wise saliency-ratio mixing of images and labels, plus baselines."""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from typeguard import typechecked

from .errors import InvalidPairingError, ParameterError, ShapeMismatchError
from .pairing import permutation_from_pairing, validate_pairing
from .tensor_core import IMAGE_DTYPE, check_image, check_label
from .utils.clogger import create_logger

# Constants
DEN_EPS: float = 1e-12
DEFAULT_BETA_ALPHA: float = 1.0

logger = create_logger(__name__, "MIXING")


class BaselineMethod(str, Enum):
    MIXUP = "mixup"
    CUTMIX = "cutmix"


@dataclass
class MixedSample:
    """A mixed image with its soft label and the source share per pixel."""

    image: np.ndarray
    label: np.ndarray
    source_mask: np.ndarray
    pair: tuple[int, int]
    lambda_src: float

    @property
    def lambda_dst(self) -> float:
        return 1.0 - self.lambda_src


def _check_same_shape(a: np.ndarray, b: np.ndarray, what: str) -> None:
    if a.shape != b.shape:
        raise ShapeMismatchError(f"{what} shapes differ: {a.shape} vs {b.shape}")


@typechecked
def pixel_mix_mask(
    z_s: np.ndarray, z_t: np.ndarray, eps: float = DEN_EPS
) -> tuple[np.ndarray, np.ndarray]:
    """Per-pixel source/target shares `z_s / (z_s + z_t)` and its complement.

    Pixels where both maps are (near) zero get 0.5 each.
    """
    _check_same_shape(z_s, z_t, "saliency map")
    z_s = np.asarray(z_s, dtype=np.float64)
    z_t = np.asarray(z_t, dtype=np.float64)

    den = z_s + z_t
    empty = den < eps
    mask_s = np.where(empty, 0.5, z_s / np.where(empty, 1.0, den))
    return mask_s, 1.0 - mask_s


@typechecked
def label_weight(z_s: np.ndarray, z_t: np.ndarray, eps: float = DEN_EPS) -> float:
    """Source label coefficient: the spatial mean of the source mask."""
    mask_s, _ = pixel_mix_mask(z_s, z_t, eps)
    return float(mask_s.mean())


def _blend(x_s: np.ndarray, x_t: np.ndarray, mask_s: np.ndarray) -> np.ndarray:
    weights = mask_s[..., np.newaxis]
    mixed = weights * x_s.astype(np.float64) + (1.0 - weights) * x_t.astype(np.float64)
    return np.clip(mixed, 0.0, 1.0).astype(IMAGE_DTYPE)


@typechecked
def mix_pair(
    x_s: np.ndarray,
    x_t: np.ndarray,
    z_s: np.ndarray,
    z_t: np.ndarray,
    eps: float = DEN_EPS,
) -> np.ndarray:
    x_s = check_image(x_s)
    x_t = check_image(x_t)
    _check_same_shape(x_s, x_t, "image")
    if z_s.shape != x_s.shape[:2]:
        raise ShapeMismatchError(f"saliency {z_s.shape} does not match image {x_s.shape[:2]}")

    mask_s, _ = pixel_mix_mask(z_s, z_t, eps)
    return _blend(x_s, x_t, mask_s)


@typechecked
def mix_labels(
    y_s: np.ndarray,
    y_t: np.ndarray,
    z_s: np.ndarray,
    z_t: np.ndarray,
    eps: float = DEN_EPS,
) -> np.ndarray:
    y_s = check_label(y_s)
    y_t = check_label(y_t)
    if y_s.size != y_t.size:
        raise ShapeMismatchError(f"class counts differ: {y_s.size} vs {y_t.size}")

    lam = label_weight(z_s, z_t, eps)
    return lam * y_s + (1.0 - lam) * y_t


@typechecked
def mix_batch(
    x_B: list[np.ndarray],
    y_B: list[np.ndarray],
    z_B: list[np.ndarray],
    p: np.ndarray,
    eps: float = DEN_EPS,
) -> list[MixedSample]:
    """Mix every source with its paired target in one batched pass.

    Targets are gathered with the pairing matrix itself (`p @ z_B`, `p @ x_B`),
    which for a 0/1 permutation matrix is an exact row gather. The result
    equals mixing each pair on its own.

    Raises:
        ShapeMismatchError: List lengths differ from M or shapes are mixed.
        InvalidPairingError: `p` breaks a diversity constraint.
    """
    m = p.shape[0]
    if not (len(x_B) == len(y_B) == len(z_B) == m):
        raise ShapeMismatchError(
            f"batch lengths {len(x_B)}/{len(y_B)}/{len(z_B)} do not match M={m}"
        )
    report = validate_pairing(p)
    if not report.ok:
        raise InvalidPairingError(report)

    checked_images = [check_image(x).astype(np.float64) for x in x_B]
    checked_labels = [check_label(y) for y in y_B]
    try:
        images = np.stack(checked_images)
        maps = np.stack([np.asarray(z, dtype=np.float64) for z in z_B])
        labels = np.stack(checked_labels)
    except ValueError as e:
        raise ShapeMismatchError(f"batch is not homogeneous: {e}") from e
    if maps.shape[1:] != images.shape[1:3]:
        raise ShapeMismatchError(f"saliency {maps.shape[1:]} does not match images {images.shape[1:3]}")

    gather = p.astype(np.float64)
    maps_t = np.tensordot(gather, maps, axes=1)
    images_t = np.tensordot(gather, images, axes=1)
    labels_t = gather @ labels

    mask_s, _ = pixel_mix_mask(maps, maps_t, eps)
    mixed = _blend(images, images_t, mask_s)
    lambdas = mask_s.reshape(m, -1).mean(axis=1)
    mixed_labels = lambdas[:, np.newaxis] * labels + (1.0 - lambdas[:, np.newaxis]) * labels_t

    targets = permutation_from_pairing(p)
    samples = [
        MixedSample(
            image=mixed[i],
            label=mixed_labels[i],
            source_mask=mask_s[i],
            pair=(i, int(targets[i])),
            lambda_src=float(lambdas[i]),
        )
        for i in range(m)
    ]
    logger.debug(f"mixed batch of {m}, mean lambda_src {lambdas.mean():.4f}")
    return samples


def _check_lambda(lam: float) -> None:
    if not 0.0 <= lam <= 1.0:
        raise ParameterError(f"lambda must lie in [0, 1], got {lam}")


@typechecked
def input_mixup(
    x_s: np.ndarray,
    x_t: np.ndarray,
    y_s: np.ndarray,
    y_t: np.ndarray,
    lam: float,
    pair: tuple[int, int] = (0, 1),
) -> MixedSample:
    """Global convex combination `lam * source + (1 - lam) * target`."""
    _check_lambda(lam)
    x_s = check_image(x_s)
    x_t = check_image(x_t)
    _check_same_shape(x_s, x_t, "image")

    mask = np.full(x_s.shape[:2], lam, dtype=np.float64)
    return MixedSample(
        image=_blend(x_s, x_t, mask),
        label=lam * check_label(y_s) + (1.0 - lam) * check_label(y_t),
        source_mask=mask,
        pair=pair,
        lambda_src=float(lam),
    )


@typechecked
def cutmix(
    x_s: np.ndarray,
    x_t: np.ndarray,
    y_s: np.ndarray,
    y_t: np.ndarray,
    lam: float,
    seed: int | None = None,
    pair: tuple[int, int] = (0, 1),
) -> MixedSample:
    """Paste a target rectangle of area fraction `1 - lam` into the source.

    The rectangle center is uniform over the image and the box is clipped at
    the border; the label weight is the source area that actually survives.
    """
    _check_lambda(lam)
    x_s = check_image(x_s)
    x_t = check_image(x_t)
    _check_same_shape(x_s, x_t, "image")

    height, width = x_s.shape[:2]
    rng = np.random.default_rng(seed)
    cut_ratio = np.sqrt(1.0 - lam)
    cut_h = int(round(height * cut_ratio))
    cut_w = int(round(width * cut_ratio))
    cy = int(rng.integers(height))
    cx = int(rng.integers(width))

    y0, y1 = np.clip([cy - cut_h // 2, cy - cut_h // 2 + cut_h], 0, height)
    x0, x1 = np.clip([cx - cut_w // 2, cx - cut_w // 2 + cut_w], 0, width)

    mask = np.ones((height, width), dtype=np.float64)
    mask[y0:y1, x0:x1] = 0.0
    lam_actual = float(mask.mean())
    return MixedSample(
        image=_blend(x_s, x_t, mask),
        label=lam_actual * check_label(y_s) + (1.0 - lam_actual) * check_label(y_t),
        source_mask=mask,
        pair=pair,
        lambda_src=lam_actual,
    )


@typechecked
def mix_batch_baseline(
    x_B: list[np.ndarray],
    y_B: list[np.ndarray],
    p: np.ndarray,
    method: BaselineMethod = BaselineMethod.MIXUP,
    lam: float | None = None,
    alpha: float = DEFAULT_BETA_ALPHA,
    seed: int | None = None,
) -> list[MixedSample]:
    """Run input mixup or CutMix over the pairs of a pairing matrix.

    Without a fixed `lam`, one value per pair is drawn from Beta(alpha, alpha).
    """
    m = p.shape[0]
    if not (len(x_B) == len(y_B) == m):
        raise ShapeMismatchError(f"batch lengths {len(x_B)}/{len(y_B)} do not match M={m}")
    if alpha <= 0:
        raise ParameterError(f"beta alpha must be > 0, got {alpha}")
    report = validate_pairing(p)
    if not report.ok:
        raise InvalidPairingError(report)

    rng = np.random.default_rng(seed)
    targets = permutation_from_pairing(p)
    samples = []
    for i in range(m):
        j = int(targets[i])
        lam_i = float(rng.beta(alpha, alpha)) if lam is None else lam
        if method == BaselineMethod.MIXUP:
            samples.append(input_mixup(x_B[i], x_B[j], y_B[i], y_B[j], lam_i, pair=(i, j)))
        else:
            pair_seed = int(rng.integers(2**31))
            samples.append(
                cutmix(x_B[i], x_B[j], y_B[i], y_B[j], lam_i, seed=pair_seed, pair=(i, j))
            )
    return samples
