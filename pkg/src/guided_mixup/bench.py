# SPDX-FileCopyrightText: 2025 guided-mixup contributors
# SPDX-License-Identifier: GPL-3.0

"""Augmentation latency per batch and the relative overhead metric.

Only the augmentation itself is timed (saliency, pairing and mixing, or the
baseline path). Loading images is outside the timed section and the vanilla
time is supplied by the caller, since it stands for a training step this
package does not run.
"""

import statistics
import time

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable

import numpy as np

from pydantic import BaseModel, model_validator
from typeguard import typechecked

from .errors import BenchError, ParameterError
from .manifest import BatchManifest, load_images, load_labels, saliency_paths
from .mixing import BaselineMethod, mix_batch, mix_batch_baseline
from .pairing import MIN_BATCH, PairingAlgo, distance_matrix, random_pairing, solve_pairing
from .saliency import SaliencyMethod, SaliencyParams, prepare_saliency
from .utils.clogger import create_logger

# Constants
MIN_REPEATS: int = 3
TIMING_SCOPE: str = "augmentation only; excludes data loading; t_vanilla_ms supplied by caller"

logger = create_logger(__name__, "BENCH")


class BenchMethod(str, Enum):
    MIXUP = "mixup"
    CUTMIX = "cutmix"
    GUIDED_SR = "guided-sr"
    GUIDED_AP = "guided-ap"


class OverheadReport(BaseModel):
    method: str
    pairing: str
    batch_size: int
    t_aug_ms: float
    t_vanilla_ms: float
    overhead_pct: float
    repeats: int
    samples_ms: list[float] = []
    timing_scope: str = TIMING_SCOPE

    @model_validator(mode="after")
    def validate_overhead(self):
        if self.overhead_pct != overhead(self.t_aug_ms, self.t_vanilla_ms):
            raise ValueError("overhead_pct does not match t_aug_ms and t_vanilla_ms")
        return self


@typechecked
def overhead(t_aug: float, t_vanilla: float) -> float:
    """Relative time increase in percent, negative when augmentation is faster.

    Plain float arithmetic without rounding: `overhead(107.7, 100)` is
    `7.700000000000003`, the nearest double to 7.7 is not reachable from
    these inputs. Compare with a tolerance.
    """
    if t_vanilla <= 0:
        raise ParameterError(f"t_vanilla must be > 0, got {t_vanilla}")
    return (t_aug - t_vanilla) / t_vanilla * 100


@typechecked
def default_pairing(method: BenchMethod) -> PairingAlgo:
    """Random pairs for the plain baselines, greedy pairs for the guided methods."""
    if method in (BenchMethod.MIXUP, BenchMethod.CUTMIX):
        return PairingAlgo.RANDOM
    return PairingAlgo.GREEDY


@dataclass
class TimedSection:
    """Context manager recording the wall-clock duration of its body in ms."""

    label: str
    samples_ms: list[float] = field(default_factory=list)
    _start: float = 0.0

    def __enter__(self) -> "TimedSection":
        self._start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb) -> None:
        elapsed_ms = (time.perf_counter() - self._start) * 1000.0
        if exc_type is not None:
            logger.warning(f"{self.label}: timed section failed after {elapsed_ms:.3f} ms")
            return
        self.samples_ms.append(elapsed_ms)


def _build_augmentation(
    manifest: BatchManifest,
    method: BenchMethod,
    batch_size: int,
    pairing: PairingAlgo,
    seed: int,
    params: SaliencyParams,
) -> Callable[[], list]:
    images = load_images(manifest, batch_size)
    labels = load_labels(manifest, batch_size)
    external = saliency_paths(manifest, batch_size) if method == BenchMethod.GUIDED_AP else None

    def pairs_for(maps: list[np.ndarray] | None) -> np.ndarray:
        if maps is None or pairing == PairingAlgo.RANDOM:
            return random_pairing(batch_size, seed)
        return solve_pairing(distance_matrix(maps), pairing, seed)

    if method in (BenchMethod.GUIDED_SR, BenchMethod.GUIDED_AP):
        source = SaliencyMethod.SR if method == BenchMethod.GUIDED_SR else SaliencyMethod.EXTERNAL

        def guided() -> list:
            maps = prepare_saliency(images, source, params, external, workers=1)
            return mix_batch(images, labels, maps, pairs_for(maps))

        return guided

    baseline = BaselineMethod.MIXUP if method == BenchMethod.MIXUP else BaselineMethod.CUTMIX

    def plain() -> list:
        maps = None
        if pairing != PairingAlgo.RANDOM:
            # saliency-guided pairs for a baseline mixer cost a saliency pass
            maps = prepare_saliency(images, SaliencyMethod.SR, params, workers=1)
        return mix_batch_baseline(images, labels, pairs_for(maps), baseline, seed=seed)

    return plain


@typechecked
def run_bench(
    manifest: BatchManifest,
    method: BenchMethod,
    batch_size: int,
    repeats: int,
    t_vanilla_ms: float,
    pairing: PairingAlgo | None = None,
    seed: int = 0,
    params: SaliencyParams | None = None,
) -> OverheadReport:
    """Median single-threaded augmentation time over `repeats` after one warm-up.

    Without an explicit `pairing` the baselines pair at random and the guided
    methods greedily, see `default_pairing`.

    Raises:
        BenchError: Not enough manifest items or repeats, batch below 3.
        ParameterError: Nonpositive vanilla time.
    """
    if repeats < MIN_REPEATS:
        raise BenchError(f"need at least {MIN_REPEATS} repeats, got {repeats}")
    if batch_size < MIN_BATCH:
        raise BenchError(f"batch size must be >= {MIN_BATCH}, got {batch_size}")
    if len(manifest.items) < batch_size:
        raise BenchError(f"manifest has {len(manifest.items)} items, batch needs {batch_size}")
    if t_vanilla_ms <= 0:
        raise ParameterError(f"t_vanilla_ms must be > 0, got {t_vanilla_ms}")

    pairing = pairing or default_pairing(method)
    augment = _build_augmentation(
        manifest, method, batch_size, pairing, seed, params or SaliencyParams()
    )
    augment()  # warm-up

    section = TimedSection(label=f"{method.value}/{pairing.value}/{batch_size}")
    for _ in range(repeats):
        with section:
            augment()

    t_aug_ms = float(statistics.median(section.samples_ms))
    report = OverheadReport(
        method=method.value,
        pairing=pairing.value,
        batch_size=batch_size,
        t_aug_ms=t_aug_ms,
        t_vanilla_ms=float(t_vanilla_ms),
        overhead_pct=overhead(t_aug_ms, float(t_vanilla_ms)),
        repeats=repeats,
        samples_ms=section.samples_ms,
    )
    logger.info(
        f"{section.label}: t_aug {t_aug_ms:.3f} ms, overhead {report.overhead_pct:+.1f}%"
    )
    return report


@typechecked
def write_reports(reports: list[OverheadReport], path: Path | None = None) -> str:
    """Serialize reports as JSON lines; appended to `path` when given."""
    lines = "".join(report.model_dump_json() + "\n" for report in reports)
    if path is not None:
        with open(path, "a") as f:
            f.write(lines)
    return lines
