# SPDX-FileCopyrightText: 2025 guided-mixup contributors
# SPDX-License-Identifier: GPL-3.0

"""File-staged pipeline commands: saliency -> pair -> mix, validate, bench.

Every command returns a `CommandResult`; errors are reported through `err`
instead of being raised, the CLI turns them into exit codes.
"""

import json

from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from pydantic import ValidationError
from typeguard import typechecked

from .bench import BenchMethod, OverheadReport, run_bench, write_reports
from .errors import GmxError, ManifestError, ShapeMismatchError
from .manifest import BatchManifest, load_images, load_labels, load_manifest, saliency_paths
from .mixing import DEN_EPS, mix_batch
from .pairing import (
    EXACT_MAX_M,
    PairingAlgo,
    distance_matrix,
    objective,
    read_distance_csv,
    read_pairing_csv,
    solve_pairing,
    validate_pairing,
    write_distance_csv,
    write_pairing_csv,
)
from .saliency import SaliencyMethod, SaliencyParams, prepare_saliency
from .tensor_io import read_tensor, write_png, write_tensor
from .utils.clogger import create_logger

# Constants
SALIENCY_SUFFIX: str = ".sal.gmtn"
MIX_PNG_SUFFIX: str = ".mix.png"
MIX_GMTN_SUFFIX: str = ".mix.gmtn"
LABELS_FILE: str = "labels.json"

logger = create_logger(__name__, "CLI")


@dataclass
class CommandResult:
    ret: Any | None = None
    err: str | None = None


def _failed(name: str, e: Exception) -> CommandResult:
    if isinstance(e, (GmxError, ValidationError)):
        logger.error(f"{name} failed: {e}")
    else:
        logger.error(f"{name} failed", exc_info=True)
    return CommandResult(err=f"{name}: {e}")


def _saliency_files(saliency_dir: Path, manifest: BatchManifest) -> list[Path]:
    return [saliency_dir / f"{stem}{SALIENCY_SUFFIX}" for stem in manifest.stems()]


@typechecked
def cmd_saliency(
    manifest_path: Path,
    method: SaliencyMethod,
    blur_kernel: int,
    blur_sigma: float,
    out_dir: Path,
    working_size: int = 64,
) -> CommandResult:
    """Write one normalized map `<stem>.sal.gmtn` per manifest item."""
    try:
        params = SaliencyParams(
            blur_kernel=blur_kernel, blur_sigma=blur_sigma, working_size=working_size
        )
        manifest = load_manifest(manifest_path)
        paths = saliency_paths(manifest) if method == SaliencyMethod.EXTERNAL else None
        images = load_images(manifest)
        maps = prepare_saliency(images, method, params, paths)

        out_dir.mkdir(parents=True, exist_ok=True)
        written = []
        for stem, z in zip(manifest.stems(), maps):
            target = out_dir / f"{stem}{SALIENCY_SUFFIX}"
            write_tensor(z.astype(np.float32), target)
            written.append(target)

        logger.info(f"saliency ({method.value}): wrote {len(written)} maps to {out_dir}")
        return CommandResult(ret=written)
    except Exception as e:
        return _failed("saliency", e)


@typechecked
def cmd_pair(
    saliency_dir: Path | None,
    algo: PairingAlgo,
    seed: int,
    out: Path,
    manifest_path: Path | None = None,
    max_m: int = EXACT_MAX_M,
    distances_out: Path | None = None,
    distances_in: Path | None = None,
) -> CommandResult:
    """Compute the distance matrix, solve the pairing and write `src,dst` CSV.

    Maps are read from `saliency_dir` in manifest order, so a manifest is
    required unless `distances_in` supplies the matrix directly.

    Returns:
        CommandResult: `ret` is the achieved objective.
    """
    try:
        if distances_in is not None:
            w = read_distance_csv(distances_in)
        else:
            if saliency_dir is None:
                raise ManifestError("pair needs a saliency directory or a distance matrix")
            if manifest_path is None:
                raise ManifestError("pair --saliency-dir needs --manifest to fix the batch order")
            files = _saliency_files(saliency_dir, load_manifest(manifest_path))
            w = distance_matrix([read_tensor(f) for f in files])

        p = solve_pairing(w, algo, seed=seed, max_m=max_m)
        write_pairing_csv(p, out)
        if distances_out is not None:
            write_distance_csv(w, distances_out)

        score = objective(w, p)
        logger.info(f"pair ({algo.value}): M={w.shape[0]}, objective {score:.9g} -> {out}")
        return CommandResult(ret=score)
    except Exception as e:
        return _failed("pair", e)


@typechecked
def cmd_mix(
    manifest_path: Path,
    pairing_csv: Path,
    out_dir: Path,
    eps: float = DEN_EPS,
    saliency_dir: Path | None = None,
) -> CommandResult:
    """Mix every manifest item with its paired target.

    Writes `<stem>.mix.png`, `<stem>.mix.gmtn` and a `labels.json` sidecar.
    Without `saliency_dir` the maps are recomputed with default SR parameters.
    """
    try:
        manifest = load_manifest(manifest_path)
        p = read_pairing_csv(pairing_csv)
        if p.shape[0] != len(manifest.items):
            raise ShapeMismatchError(
                f"pairing covers {p.shape[0]} items, manifest has {len(manifest.items)}"
            )

        images = load_images(manifest)
        labels = load_labels(manifest)
        if saliency_dir is not None:
            maps = [read_tensor(f) for f in _saliency_files(saliency_dir, manifest)]
        else:
            maps = prepare_saliency(images)

        samples = mix_batch(images, labels, maps, p, eps=eps)

        out_dir.mkdir(parents=True, exist_ok=True)
        stems = manifest.stems()
        entries = []
        for sample in samples:
            src, dst = sample.pair
            write_png(out_dir / f"{stems[src]}{MIX_PNG_SUFFIX}", sample.image)
            write_tensor(sample.image, out_dir / f"{stems[src]}{MIX_GMTN_SUFFIX}")
            entries.append(
                {
                    "src": src,
                    "dst": dst,
                    "lambda_src": sample.lambda_src,
                    "lambda_dst": sample.lambda_dst,
                    "label": [float(v) for v in sample.label],
                }
            )

        (out_dir / LABELS_FILE).write_text(json.dumps({"pairs": entries}, indent=2) + "\n")
        logger.info(f"mix: wrote {len(samples)} mixed samples to {out_dir}")
        return CommandResult(ret=samples)
    except Exception as e:
        return _failed("mix", e)


@typechecked
def cmd_validate(pairing_csv: Path, m: int | None = None) -> CommandResult:
    """Validate a pairing CSV; `err` holds the violations, `ret` the report."""
    try:
        p = read_pairing_csv(pairing_csv, m)
        report = validate_pairing(p)
    except Exception as e:
        return _failed("validate", e)

    if not report.ok:
        for violation in report.violations:
            logger.warning(f"validate: [{violation.constraint}] {violation.message}")
        return CommandResult(ret=report, err=str(report))
    return CommandResult(ret=report)


@typechecked
def cmd_bench(
    manifest_path: Path,
    method: BenchMethod,
    batch: int,
    repeats: int,
    vanilla_ms: float,
    pairing: PairingAlgo | None = None,
    seed: int = 0,
    out: Path | None = None,
) -> CommandResult:
    """Benchmark one method; `ret` holds the JSON line(s)."""
    try:
        manifest = load_manifest(manifest_path)
        report: OverheadReport = run_bench(
            manifest, method, batch, repeats, vanilla_ms, pairing=pairing, seed=seed
        )
        return CommandResult(ret=write_reports([report], out))
    except Exception as e:
        return _failed("bench", e)
