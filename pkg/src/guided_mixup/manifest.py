# SPDX-FileCopyrightText: 2025 guided-mixup contributors
# SPDX-License-Identifier: GPL-3.0

"""Batch manifests: which images form a batch, their labels and optional maps.

A manifest is a JSON file::

    {"num_classes": 10,
     "items": [{"image": "a.png", "label": 3, "saliency": "a.grad.gmtn"}, ...]}

Relative paths are resolved against the manifest's directory. Item order is
the batch index order everywhere.
"""

import json

from pathlib import Path

import numpy as np

from pydantic import BaseModel, Field, ValidationError, model_validator
from typeguard import typechecked

from .errors import ManifestError, MissingInputError
from .tensor_core import one_hot
from .tensor_io import read_png
from .utils.clogger import create_logger

logger = create_logger(__name__, "MANIFEST")


class ManifestItem(BaseModel):
    image: Path
    label: int = Field(ge=0)
    saliency: Path | None = None


class BatchManifest(BaseModel):
    items: list[ManifestItem]
    num_classes: int = Field(gt=0)

    @model_validator(mode="after")
    def validate_labels(self):
        for index, item in enumerate(self.items):
            if item.label >= self.num_classes:
                raise ValueError(
                    f"item {index}: label {item.label} not in [0, {self.num_classes})"
                )
        return self

    def stems(self) -> list[str]:
        return [item.image.stem for item in self.items]


@typechecked
def load_manifest(path: Path) -> BatchManifest:
    """Parse a manifest, resolve its paths and check that every file exists.

    Raises:
        ManifestError: Unreadable JSON, schema or label violations, missing files,
            two images with the same file stem.
    """
    if not path.exists():
        raise MissingInputError(f"manifest not found: {path}")

    try:
        manifest = BatchManifest.model_validate(json.loads(path.read_text()))
    except (json.JSONDecodeError, ValidationError) as e:
        raise ManifestError(f"{path}: {e}") from e

    base = path.parent
    for index, item in enumerate(manifest.items):
        item.image = item.image if item.image.is_absolute() else base / item.image
        if item.saliency is not None and not item.saliency.is_absolute():
            item.saliency = base / item.saliency

        if not item.image.exists():
            raise ManifestError(f"item {index}: image not found: {item.image}")
        if item.saliency is not None and not item.saliency.exists():
            raise ManifestError(f"item {index}: saliency map not found: {item.saliency}")

    seen: dict[str, int] = {}
    for index, stem in enumerate(manifest.stems()):
        # output files are named after the stem
        if stem in seen:
            raise ManifestError(
                f"items {seen[stem]} and {index} share the file stem '{stem}': "
                f"{manifest.items[seen[stem]].image} and {manifest.items[index].image}"
            )
        seen[stem] = index

    logger.debug(f"loaded manifest {path} with {len(manifest.items)} items")
    return manifest


@typechecked
def load_images(manifest: BatchManifest, count: int | None = None) -> list[np.ndarray]:
    items = manifest.items if count is None else manifest.items[:count]
    return [read_png(item.image) for item in items]


@typechecked
def load_labels(manifest: BatchManifest, count: int | None = None) -> list[np.ndarray]:
    items = manifest.items if count is None else manifest.items[:count]
    return [one_hot(item.label, manifest.num_classes) for item in items]


@typechecked
def saliency_paths(manifest: BatchManifest, count: int | None = None) -> list[Path]:
    """External map paths in batch order.

    Raises:
        ManifestError: An item has no `saliency` entry, naming the item.
    """
    items = manifest.items if count is None else manifest.items[:count]
    paths = []
    for index, item in enumerate(items):
        if item.saliency is None:
            raise ManifestError(f"item {index} ({item.image.name}) has no saliency map")
        paths.append(item.saliency)
    return paths
