# SPDX-FileCopyrightText: 2025 guided-mixup contributors
# SPDX-License-Identifier: GPL-3.0

"""Command-line frontend of the guided-mixup engine.

    python src/gmx_cli.py saliency --manifest batch.json --out-dir sal/
    python src/gmx_cli.py pair --saliency-dir sal/ --manifest batch.json --out pairs.csv
    python src/gmx_cli.py mix --manifest batch.json --pairing pairs.csv --saliency-dir sal/ --out-dir mixed/
    python src/gmx_cli.py validate --pairing pairs.csv
    python src/gmx_cli.py bench --manifest batch.json --method guided-sr --batch 16 --vanilla-ms 100

Exit codes: 0 success, 1 validation or processing failure, 2 usage error.
"""

import argparse
import sys

from pathlib import Path

from pydantic import ValidationError

from guided_mixup.bench import BenchMethod
from guided_mixup.commands import (
    CommandResult,
    cmd_bench,
    cmd_mix,
    cmd_pair,
    cmd_saliency,
    cmd_validate,
)
from guided_mixup.mixing import DEN_EPS
from guided_mixup.pairing import EXACT_MAX_M, PairingAlgo
from guided_mixup.saliency import (
    DEFAULT_BLUR_KERNEL,
    DEFAULT_BLUR_SIGMA,
    SR_WORKING_SIZE,
    SaliencyMethod,
)
from guided_mixup.utils.clogger import create_logger
from guided_mixup.utils.config import get_settings

EXIT_OK: int = 0
EXIT_FAILURE: int = 1
EXIT_USAGE: int = 2

logger = create_logger("gmx_cli", "CLI")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gmx", description="Saliency-guided mixup augmentation engine."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("saliency", help="extract normalized saliency maps")
    p.add_argument("--manifest", type=Path, required=True)
    p.add_argument("--method", type=SaliencyMethod, choices=list(SaliencyMethod), default=SaliencyMethod.SR)
    p.add_argument("--blur-kernel", type=int, default=DEFAULT_BLUR_KERNEL)
    p.add_argument("--blur-sigma", type=float, default=DEFAULT_BLUR_SIGMA)
    p.add_argument("--working-size", type=int, default=SR_WORKING_SIZE)
    p.add_argument("--out-dir", type=Path, required=True)

    p = sub.add_parser("pair", help="build the pairing CSV")
    p.add_argument("--saliency-dir", type=Path)
    p.add_argument("--manifest", type=Path, help="batch order of the maps, required with --saliency-dir")
    p.add_argument("--from-distances", type=Path, help="dense distance CSV instead of maps")
    p.add_argument("--algo", type=PairingAlgo, choices=list(PairingAlgo), default=PairingAlgo.GREEDY)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-m", type=int, default=EXACT_MAX_M)
    p.add_argument("--distances", type=Path, help="also write the distance matrix")
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("mix", help="mix images and labels along a pairing")
    p.add_argument("--manifest", type=Path, required=True)
    p.add_argument("--pairing", type=Path, required=True)
    p.add_argument("--saliency-dir", type=Path)
    p.add_argument("--eps", type=float, default=DEN_EPS)
    p.add_argument("--out-dir", type=Path, required=True)

    p = sub.add_parser("validate", help="check a pairing CSV")
    p.add_argument("--pairing", type=Path, required=True)
    p.add_argument("--m", type=int, default=None)

    p = sub.add_parser("bench", help="augmentation overhead per batch")
    p.add_argument("--manifest", type=Path, required=True)
    p.add_argument("--method", type=BenchMethod, choices=list(BenchMethod), required=True)
    p.add_argument("--batch", type=int, required=True)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--vanilla-ms", type=float, required=True)
    p.add_argument("--pairing", type=PairingAlgo, choices=list(PairingAlgo), default=None,
                   help="default: random for mixup/cutmix, greedy for guided methods")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, help="append JSON lines here instead of stdout")

    return parser


def run(args: argparse.Namespace) -> CommandResult:
    if args.command == "saliency":
        return cmd_saliency(
            args.manifest, args.method, args.blur_kernel, args.blur_sigma,
            args.out_dir, working_size=args.working_size,
        )
    if args.command == "pair":
        result = cmd_pair(
            args.saliency_dir, args.algo, args.seed, args.out,
            manifest_path=args.manifest, max_m=args.max_m,
            distances_out=args.distances, distances_in=args.from_distances,
        )
        if result.err is None:
            print(f"objective: {result.ret:.9g}", file=sys.stderr)
        return result
    if args.command == "mix":
        return cmd_mix(
            args.manifest, args.pairing, args.out_dir, eps=args.eps,
            saliency_dir=args.saliency_dir,
        )
    if args.command == "validate":
        result = cmd_validate(args.pairing, args.m)
        if result.err is None:
            print("OK")
        return result

    result = cmd_bench(
        args.manifest, args.method, args.batch, args.repeats, args.vanilla_ms,
        pairing=args.pairing, seed=args.seed, out=args.out,
    )
    if result.err is None and args.out is None:
        sys.stdout.write(result.ret)
    return result


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        get_settings()
    except ValidationError as e:
        print(f"error: invalid GMX_* environment settings: {e}", file=sys.stderr)
        return EXIT_USAGE
    logger.debug(f"gmx {args.command}: {vars(args)}")

    result = run(args)
    if result.err is not None:
        print(f"error: {result.err}", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
