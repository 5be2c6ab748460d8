"""Deterministic example systems and probability-redistribution schedules."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BadParams, EmptySpec, UnknownExperiment
from .scales import Partition
from .tpm import Tpm, tpm_from_rows

SCHEDULE_KINDS = ("noise_axis", "common_cause_axis", "combined", "fig4_selfloop")


def _block_rows(block_sizes: Sequence[int]) -> np.ndarray:
    if not block_sizes:
        raise EmptySpec("need at least one block")
    if any(int(b) < 1 for b in block_sizes):
        raise BadParams(f"block sizes must be positive: {list(block_sizes)}")
    n = sum(block_sizes)
    a = np.zeros((n, n))
    start = 0
    for size in block_sizes:
        a[start:start + size, start:start + size] = 1.0 / size
        start += size
    return a


def make_block_model(block_sizes: Sequence[int]) -> Tpm:
    """Each state moves uniformly within its own block."""
    return tpm_from_rows(_block_rows(block_sizes))


def block_partition(block_sizes: Sequence[int]) -> Partition:
    return Partition(tuple(b for b, size in enumerate(block_sizes) for _ in range(size)))


def make_identity(n: int) -> Tpm:
    return tpm_from_rows(np.eye(n))


def make_uniform(n: int) -> Tpm:
    return tpm_from_rows(np.full((n, n), 1.0 / n))


def make_mesoscale_variant(block_sizes: Sequence[int] = (4, 4), delta: float = 0.2) -> Tpm:
    """Block model whose first state per block shifts ``delta`` onto the block's second state.

    The block-projected rows are unchanged, so the block coarse-grain stays
    strongly lumpable.
    """
    a = _block_rows(block_sizes)
    start = 0
    for size in block_sizes:
        if size < 2:
            raise BadParams("every perturbed block needs at least 2 states")
        if not 0 <= delta <= 1.0 / size:
            raise BadParams(f"delta must lie in [0, {1.0 / size}] for a block of {size}")
        a[start, start] -= delta
        a[start, start + 1] += delta
        start += size
    return tpm_from_rows(a)


@dataclass(frozen=True)
class Schedule:
    kind: str
    steps: int
    frames: tuple[Tpm, ...]


def _check(n: int, steps: int) -> None:
    if n < 2 or steps < 1:
        raise BadParams(f"need n >= 2 and steps >= 1 (got n={n}, steps={steps})")


def _toward_uniform(a: np.ndarray, frac: float) -> np.ndarray:
    # moves `frac` of the path from a one-hot row to the uniform row;
    # off-target entries receive equal shares of the drained mass
    n = a.shape[0]
    return (1.0 - frac) * a + frac / n


def noise_frame(n: int, t: int, steps: int) -> np.ndarray:
    return _toward_uniform(np.eye(n), t / steps)


def common_cause_frame(n: int, dups: int) -> np.ndarray:
    """Identity with rows 1..dups replaced by copies of row 0."""
    a = np.eye(n)
    dups = min(dups, n - 1)
    a[1:dups + 1] = a[0]
    return a


def noise_schedule(n: int, steps: int | None = None) -> Schedule:
    """Self-loop mass drained evenly onto the other states until all-to-all."""
    steps = n if steps is None else steps
    _check(n, steps)
    frames = tuple(tpm_from_rows(noise_frame(n, t, steps)) for t in range(steps + 1))
    return Schedule("noise_axis", steps, frames)


def common_cause_schedule(n: int, steps: int | None = None) -> Schedule:
    """One more row duplicates row 0 at each step until every row does."""
    steps = n - 1 if steps is None else steps
    _check(n, steps)
    frames = tuple(
        tpm_from_rows(common_cause_frame(n, math.ceil(t * (n - 1) / steps)))
        for t in range(steps + 1)
    )
    return Schedule("common_cause_axis", steps, frames)


def combined_frame(n: int, t: int, steps: int) -> np.ndarray:
    dups = math.ceil(t * (n - 1) / steps)
    return _toward_uniform(common_cause_frame(n, dups), t / steps)


def combined_schedule(n: int, steps: int | None = None) -> Schedule:
    """Duplicate rows first, then drain each row's peak toward uniform."""
    steps = n if steps is None else steps
    _check(n, steps)
    frames = tuple(tpm_from_rows(combined_frame(n, t, steps)) for t in range(steps + 1))
    return Schedule("combined", steps, frames)


def fig4_frame(block_sizes: Sequence[int], t: int, steps: int) -> np.ndarray:
    a = _block_rows(block_sizes)
    frac = t / steps
    start = 0
    for size in block_sizes:
        blk = a[start:start + size, start:start + size]
        blk *= 1.0 - frac
        blk[np.diag_indices(size)] = 1.0 / size + (1.0 - 1.0 / size) * frac
        start += size
    return a


def fig4_schedule(block_sizes: Sequence[int] = (4, 4), steps: int = 50) -> Schedule:
    """Within-block mass moved onto each self-loop, block model to identity."""
    if steps < 1:
        raise BadParams("steps must be at least 1")
    _block_rows(block_sizes)
    frames = tuple(tpm_from_rows(fig4_frame(block_sizes, t, steps)) for t in range(steps + 1))
    return Schedule("fig4_selfloop", steps, frames)


def make_schedule(kind: str, n: int = 8, steps: int | None = None, block_sizes: Sequence[int] = (4, 4)) -> Schedule:
    aliases = {
        "noise": "noise_axis",
        "common_cause": "common_cause_axis",
        "common-cause": "common_cause_axis",
        "fig4": "fig4_selfloop",
    }
    kind = aliases.get(kind, kind)
    if kind == "noise_axis":
        return noise_schedule(n, steps)
    if kind == "common_cause_axis":
        return common_cause_schedule(n, steps)
    if kind == "combined":
        return combined_schedule(n, steps)
    if kind == "fig4_selfloop":
        return fig4_schedule(block_sizes, 50 if steps is None else steps)
    raise UnknownExperiment(f"unknown schedule {kind!r}; expected one of {SCHEDULE_KINDS}")
