# SPDX-FileCopyrightText: 2025 guided-mixup contributors
# SPDX-License-Identifier: GPL-3.0

import json

from pathlib import Path

import cv2
import numpy as np
import pytest

from guided_mixup.tensor_io import write_tensor

CORPUS_SIZE: int = 8
CORPUS_HW: int = 32
CORPUS_CLASSES: int = 4


def blob_image(height: int, width: int, top: int, left: int, size: int, channels: int = 3) -> np.ndarray:
    img = np.zeros((height, width, channels), dtype=np.float32)
    img[top : top + size, left : left + size, :] = 1.0
    return img


def random_maps(rng: np.random.Generator, m: int, shape: tuple[int, int]) -> list[np.ndarray]:
    maps = []
    for _ in range(m):
        z = rng.random(shape)
        maps.append(z / z.sum())
    return maps


def random_symmetric(rng: np.random.Generator, m: int) -> np.ndarray:
    upper = np.triu(rng.random((m, m)), k=1)
    return upper + upper.T


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def corpus(tmp_path: Path) -> Path:
    """Eight 32x32 RGB PNGs with one colored square each, plus a manifest.

    Every item also carries a signed 16x16 "gradient" map for the external
    saliency path. Returns the manifest path.
    """
    rng = np.random.default_rng(7)
    image_dir = tmp_path / "corpus"
    image_dir.mkdir()

    items = []
    for k in range(CORPUS_SIZE):
        img = (rng.random((CORPUS_HW, CORPUS_HW, 3)) * 0.2 * 255).astype(np.uint8)
        top, left = int(rng.integers(0, 24)), int(rng.integers(0, 24))
        img[top : top + 8, left : left + 8] = rng.integers(150, 256, size=3, dtype=np.uint8)
        name = f"img{k:02d}.png"
        cv2.imwrite((image_dir / name).as_posix(), img)

        grad = rng.normal(size=(16, 16)).astype(np.float32)
        write_tensor(grad, image_dir / f"img{k:02d}.grad.gmtn")
        items.append({"image": name, "label": k % CORPUS_CLASSES, "saliency": f"img{k:02d}.grad.gmtn"})

    manifest = image_dir / "batch.json"
    manifest.write_text(json.dumps({"num_classes": CORPUS_CLASSES, "items": items}))
    return manifest


@pytest.fixture
def corpus_without_maps(corpus: Path) -> Path:
    data = json.loads(corpus.read_text())
    del data["items"][2]["saliency"]
    manifest = corpus.parent / "batch_nomaps.json"
    manifest.write_text(json.dumps(data))
    return manifest


def write_batch(directory: Path, names: list[str], rng: np.random.Generator, num_classes: int = 3) -> Path:
    """Small 16x16 PNGs at `directory / name` plus `batch.json` listing them in order."""
    items = []
    for k, name in enumerate(names):
        path = directory / name
        path.parent.mkdir(parents=True, exist_ok=True)
        img = (rng.random((16, 16, 3)) * 0.2 * 255).astype(np.uint8)
        top, left = int(rng.integers(0, 12)), int(rng.integers(0, 12))
        img[top : top + 4, left : left + 4] = 255
        cv2.imwrite(path.as_posix(), img)
        items.append({"image": name, "label": k % num_classes})

    manifest = directory / "batch.json"
    manifest.write_text(json.dumps({"num_classes": num_classes, "items": items}))
    return manifest
