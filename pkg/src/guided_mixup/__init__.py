# SPDX-FileCopyrightText: 2025 guided-mixup contributors
# SPDX-License-Identifier: GPL-3.0

"""Saliency-guided mixup: saliency maps, conflict-minimizing pairing, pixel-wise mixing."""

from .mixing import MixedSample, cutmix, input_mixup, mix_batch, mix_labels, mix_pair, pixel_mix_mask
from .pairing import (
    PairingAlgo,
    distance_matrix,
    exact_pairing,
    greedy_pairing,
    objective,
    random_pairing,
    validate_pairing,
)
from .saliency import (
    SaliencyMethod,
    SaliencyParams,
    gaussian_blur,
    load_external_saliency,
    normalize_sum_to_1,
    prepare_saliency,
    spectral_residual,
)
from .tensor_core import resize_bilinear, to_grayscale
from .tensor_io import read_tensor, write_tensor

__all__ = [
    "MixedSample",
    "PairingAlgo",
    "SaliencyMethod",
    "SaliencyParams",
    "cutmix",
    "distance_matrix",
    "exact_pairing",
    "gaussian_blur",
    "greedy_pairing",
    "input_mixup",
    "load_external_saliency",
    "mix_batch",
    "mix_labels",
    "mix_pair",
    "normalize_sum_to_1",
    "objective",
    "pixel_mix_mask",
    "prepare_saliency",
    "random_pairing",
    "read_tensor",
    "resize_bilinear",
    "spectral_residual",
    "to_grayscale",
    "validate_pairing",
    "write_tensor",
]
