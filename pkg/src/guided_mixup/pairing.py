# SPDX-FileCopyrightText: 2025 guided-mixup contributors
# SPDX-License-Identifier: GPL-3.0

"""Pair selection over a mini-batch.

A pairing matrix `p` is an `M x M` 0/1 matrix with `p[i][j] = 1` when image
`i` (source) is mixed with image `j` (target). Valid matrices are
permutations without fixed points and without 2-cycles, i.e. cycle covers
whose cycles all have length >= 3. The solvers maximize `sum(w * p)` for a
distance matrix `w` of saliency maps.
"""

import csv
import itertools

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from pathlib import Path

import numpy as np

from scipy.spatial.distance import pdist, squareform
from typeguard import typechecked

from .errors import MissingInputError, PairingError, ParameterError, ShapeMismatchError
from .utils.clogger import create_logger

# Constants
MIN_BATCH: int = 3
EXACT_MAX_M: int = 8
PAIRING_DTYPE = np.int8
CSV_HEADER: list[str] = ["src", "dst"]

logger = create_logger(__name__, "PAIRING")


class PairingAlgo(str, Enum):
    GREEDY = "greedy"
    RANDOM = "random"
    EXACT = "exact"


@dataclass
class Violation:
    constraint: str
    indices: tuple[int, ...]
    message: str


@dataclass
class PairingReport:
    m: int
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        if self.ok:
            return "OK"
        return "; ".join(f"[{v.constraint}] {v.message}" for v in self.violations)


def _check_batch_size(m: int) -> None:
    if m < MIN_BATCH:
        raise PairingError(
            f"batch size {m} < {MIN_BATCH}: no pairing without self or mutual pairs exists"
        )


def _check_square(w: np.ndarray) -> int:
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise ShapeMismatchError(f"expected a square matrix, got {w.shape}")
    return w.shape[0]


@typechecked
def distance_matrix(maps: list[np.ndarray], downsample: int = 1) -> np.ndarray:
    """Pairwise l2 distances between normalized saliency maps.

    Args:
        maps: M >= 2 maps of identical shape.
        downsample: Integer block-sum factor applied before the distances,
            1 keeps full resolution.

    Returns:
        np.ndarray: Symmetric `M x M` matrix with an exact zero diagonal.
    """
    if len(maps) < 2:
        raise PairingError(f"need at least 2 maps for distances, got {len(maps)}")
    if downsample < 1:
        raise ParameterError(f"downsample factor must be >= 1, got {downsample}")

    shape = maps[0].shape
    for index, z in enumerate(maps):
        if z.shape != shape:
            raise ShapeMismatchError(f"map {index} has shape {z.shape}, expected {shape}")

    stack = np.stack([np.asarray(z, dtype=np.float64) for z in maps])
    if downsample > 1 and stack.ndim == 3:
        h = shape[0] // downsample * downsample
        w = shape[1] // downsample * downsample
        if h == 0 or w == 0:
            raise ParameterError(f"downsample factor {downsample} exceeds map size {shape}")
        stack = stack[:, :h, :w].reshape(
            len(maps), h // downsample, downsample, w // downsample, downsample
        ).sum(axis=(2, 4))

    return squareform(pdist(stack.reshape(len(maps), -1), metric="euclidean"))


@typechecked
def pairing_from_permutation(perm: list[int] | np.ndarray) -> np.ndarray:
    perm = np.asarray(perm, dtype=np.int64)
    p = np.zeros((perm.size, perm.size), dtype=PAIRING_DTYPE)
    p[np.arange(perm.size), perm] = 1
    return p


@typechecked
def permutation_from_pairing(p: np.ndarray) -> np.ndarray:
    """Target index of every source; requires exactly one 1 per row."""
    _check_square(p)
    if not np.all(p.sum(axis=1) == 1):
        raise PairingError("every row of the pairing matrix needs exactly one target")
    return np.argmax(p, axis=1)


@typechecked
def pairing_cycles(perm: list[int] | np.ndarray) -> list[list[int]]:
    perm = [int(v) for v in perm]
    seen: set[int] = set()
    cycles = []
    for start in range(len(perm)):
        if start in seen:
            continue
        cycle = []
        node = start
        while node not in seen:
            seen.add(node)
            cycle.append(node)
            node = perm[node]
        cycles.append(cycle)
    return cycles


@typechecked
def greedy_pairing(w: np.ndarray) -> np.ndarray:
    """Greedy single-cycle pairing in O(M^2).

    Starts from the globally largest distance `(i, j)`, then repeatedly moves
    to the best remaining neighbor of the last target and finally closes the
    cycle back to the first source. Ties go to the smallest row, then the
    smallest column.

    Candidates are restricted to vertices not yet used as targets (and, until
    the closing step, not the first source). Zeroing used columns alone is not
    enough once the remaining distances tie at 0.
    """
    m = _check_square(w)
    _check_batch_size(m)

    work = np.array(w, dtype=np.float64)
    np.fill_diagonal(work, -np.inf)
    p = np.zeros((m, m), dtype=PAIRING_DTYPE)
    open_targets = np.ones(m, dtype=bool)

    i, j = np.unravel_index(int(np.argmax(work)), work.shape)
    i, j = int(i), int(j)
    p[i, j] = 1
    i_first = i
    work[:, i] = 0.0
    open_targets[i] = False
    open_targets[j] = False

    for _ in range(m - 2):
        i = j
        row = np.where(open_targets, work[i], -np.inf)
        j = int(np.argmax(row))
        p[i, j] = 1
        work[:, i] = 0.0
        open_targets[j] = False

    p[j, i_first] = 1
    return p


@lru_cache(maxsize=None)
def _valid_covers(m: int) -> np.ndarray:
    """All permutations of `range(m)` without fixed points or 2-cycles, lexicographic."""
    perms = np.array(list(itertools.permutations(range(m))), dtype=np.int64)
    identity = np.arange(m)
    rows = np.arange(len(perms))[:, np.newaxis]
    # perm o perm hits the identity exactly on fixed points and 2-cycles
    squared = perms[rows, perms]
    valid = ~np.any(squared == identity, axis=1)
    covers = perms[valid]
    covers.setflags(write=False)
    return covers


@typechecked
def exact_pairing(w: np.ndarray, max_m: int = EXACT_MAX_M) -> np.ndarray:
    """Optimal cycle cover by exhaustive enumeration (small batches only).

    Ties go to the lexicographically smallest permutation.
    """
    m = _check_square(w)
    if not MIN_BATCH <= m <= max_m:
        raise PairingError(f"exact pairing supports {MIN_BATCH} <= M <= {max_m}, got M={m}")

    covers = _valid_covers(m)
    scores = np.asarray(w, dtype=np.float64)[np.arange(m), covers].sum(axis=1)
    best = covers[int(np.argmax(scores))]
    logger.debug(f"exact pairing over {len(covers)} covers, objective {scores.max():.6g}")
    return pairing_from_permutation(best)


@typechecked
def random_pairing(m: int, seed: int | None = None) -> np.ndarray:
    """Uniformly random single M-cycle from a generator owned by this call."""
    _check_batch_size(m)
    rng = np.random.default_rng(seed)
    order = rng.permutation(m)
    perm = np.empty(m, dtype=np.int64)
    perm[order] = np.roll(order, -1)
    return pairing_from_permutation(perm)


@typechecked
def objective(w: np.ndarray, p: np.ndarray) -> float:
    if w.shape != p.shape:
        raise ShapeMismatchError(f"distance {w.shape} and pairing {p.shape} differ")
    return float(np.sum(np.asarray(w, dtype=np.float64) * p))


@typechecked
def expected_random_objective(w: np.ndarray) -> float:
    """Mean objective of a uniformly random M-cycle: each off-diagonal pair has chance 1/(M-1)."""
    m = _check_square(w)
    _check_batch_size(m)
    off_diagonal = np.asarray(w, dtype=np.float64) * (1 - np.eye(m))
    return float(off_diagonal.sum() / (m - 1))


@typechecked
def validate_pairing(p: np.ndarray) -> PairingReport:
    """Check every diversity constraint; violations are reported, never raised."""
    m = _check_square(p)
    report = PairingReport(m=m)
    add = report.violations.append

    bad = np.argwhere((p != 0) & (p != 1))
    for i, j in bad:
        add(Violation("binary", (int(i), int(j)), f"p[{i}][{j}] = {p[i, j]} is not 0/1"))

    for i, total in enumerate(p.sum(axis=1)):
        if total != 1:
            add(Violation("row-sum", (i,), f"source {i} has {total} targets"))
    for j, total in enumerate(p.sum(axis=0)):
        if total != 1:
            add(Violation("column-sum", (j,), f"target {j} is used {total} times"))

    upper = np.triu((p + p.T) > 1, k=1)
    for i, j in np.argwhere(upper):
        add(Violation("mutual-pair", (int(i), int(j)), f"{i} and {j} are paired both ways"))

    for i in np.flatnonzero(np.diag(p)):
        add(Violation("self-pair", (int(i),), f"{i} is paired with itself"))

    if report.ok:
        for cycle in pairing_cycles(permutation_from_pairing(p)):
            if len(cycle) < MIN_BATCH:
                add(Violation("cycle-length", tuple(cycle), f"cycle {cycle} is shorter than 3"))

    return report


@typechecked
def solve_pairing(
    w: np.ndarray,
    algo: PairingAlgo = PairingAlgo.GREEDY,
    seed: int | None = None,
    max_m: int = EXACT_MAX_M,
) -> np.ndarray:
    if algo == PairingAlgo.GREEDY:
        p = greedy_pairing(w)
    elif algo == PairingAlgo.EXACT:
        p = exact_pairing(w, max_m=max_m)
    else:
        p = random_pairing(_check_square(w), seed=seed)
    logger.debug(f"{algo.value} pairing for M={w.shape[0]}: objective {objective(w, p):.6g}")
    return p


@typechecked
def write_pairing_csv(p: np.ndarray, path: Path) -> None:
    perm = permutation_from_pairing(p)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(CSV_HEADER)
        for src, dst in enumerate(perm):
            writer.writerow([src, int(dst)])


@typechecked
def read_pairing_csv(path: Path, m: int | None = None) -> np.ndarray:
    """Read `src,dst` rows into a pairing matrix.

    Repeated rows accumulate, so the result can fail validation instead of
    silently hiding duplicates.
    """
    if not path.exists():
        raise MissingInputError(f"pairing file not found: {path}")

    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != CSV_HEADER:
            raise PairingError(f"{path}: expected header 'src,dst', got {header}")
        try:
            rows = [(int(src), int(dst)) for src, dst in reader]
        except ValueError as e:
            raise PairingError(f"{path}: malformed row: {e}") from e

    size = m if m is not None else 1 + max((max(r) for r in rows), default=-1)
    p = np.zeros((size, size), dtype=PAIRING_DTYPE)
    for src, dst in rows:
        if not (0 <= src < size and 0 <= dst < size):
            raise PairingError(f"{path}: pair ({src},{dst}) out of range for M={size}")
        p[src, dst] += 1
    return p


@typechecked
def write_distance_csv(w: np.ndarray, path: Path) -> None:
    np.savetxt(path, w, fmt="%.9g", delimiter=",")


@typechecked
def read_distance_csv(path: Path, tol: float = 1e-6) -> np.ndarray:
    """Read a dense distance matrix and check symmetry, zero diagonal and sign."""
    if not path.exists():
        raise MissingInputError(f"distance file not found: {path}")

    w = np.atleast_2d(np.loadtxt(path, delimiter=",", dtype=np.float64))
    _check_square(w)
    if not np.allclose(w, w.T, rtol=0.0, atol=tol):
        raise PairingError(f"{path}: distance matrix is not symmetric")
    if np.any(np.diag(w) != 0.0) or np.any(w < 0.0):
        raise PairingError(f"{path}: distances need a zero diagonal and nonnegative entries")
    return w
