"""Coarse-grainings: partition enumeration, macro TPMs and consistency."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import islice
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import InvalidPartition, SizeMismatch, TooLarge
from .primitives import PrimitiveReport, system_primitives
from .tpm import InterventionDist, Tpm, _frozen, resolve_dist, tpm_from_rows, uniform_dist

DEFAULT_MAX_STATES = 12
CONSISTENCY_TOL = 1e-9
DEFAULT_HORIZON = 5


def default_max_states() -> int:
    env = os.environ.get("EMERGENCE_MAX_STATES")
    return int(env) if env else DEFAULT_MAX_STATES


@dataclass(frozen=True, order=True)
class Partition:
    """Set partition of ``range(n)`` as a restricted-growth string.

    Ordering is lexicographic on the assignment tuple.
    """

    assignment: tuple[int, ...]

    def __post_init__(self):
        a = tuple(int(x) for x in self.assignment)
        object.__setattr__(self, "assignment", a)
        if not a:
            raise InvalidPartition("partition of an empty set")
        top = -1
        for x in a:
            if x < 0 or x > top + 1:
                raise InvalidPartition(f"{list(a)} is not a restricted-growth string")
            top = max(top, x)

    @property
    def n(self) -> int:
        return len(self.assignment)

    @property
    def k(self) -> int:
        return max(self.assignment) + 1

    def blocks(self) -> list[tuple[int, ...]]:
        out: list[list[int]] = [[] for _ in range(self.k)]
        for i, b in enumerate(self.assignment):
            out[b].append(i)
        return [tuple(b) for b in out]

    def indicator(self) -> np.ndarray:
        m = np.zeros((self.n, self.k))
        m[np.arange(self.n), self.assignment] = 1.0
        return m

    def __str__(self) -> str:
        return ",".join(map(str, self.assignment))

    @classmethod
    def parse(cls, text: str) -> "Partition":
        try:
            return cls(tuple(int(x) for x in text.replace(" ", "").split(",")))
        except ValueError as exc:
            raise InvalidPartition(f"cannot parse partition {text!r}") from exc

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> "Partition":
        """Canonicalize an arbitrary block labeling."""
        seen: dict[int, int] = {}
        return cls(tuple(seen.setdefault(x, len(seen)) for x in labels))

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]], n: int | None = None) -> "Partition":
        blocks = [list(b) for b in blocks]
        size = n if n is not None else sum(len(b) for b in blocks)
        labels = [-1] * size
        for bi, b in enumerate(blocks):
            for i in b:
                labels[i] = bi
        if -1 in labels or sum(len(b) for b in blocks) != size:
            raise InvalidPartition(f"blocks {blocks} do not partition range({size})")
        return cls.from_labels(labels)

    @classmethod
    def singletons(cls, n: int) -> "Partition":
        return cls(tuple(range(n)))

    @classmethod
    def whole(cls, n: int) -> "Partition":
        return cls((0,) * n)


def enumerate_partitions(n: int, max_states: int | None = None) -> Iterator[Partition]:
    """All Bell(n) partitions of range(n), in lexicographic RGS order."""
    cap = default_max_states() if max_states is None else max_states
    if n < 1:
        raise InvalidPartition("n must be at least 1")
    if n > cap:
        raise TooLarge(
            f"{n} states exceeds the enumeration cap of {cap}; "
            "use the svd heuristic or raise --max-states"
        )
    a = [0] * n
    # prefix_max[i] = max(a[:i]) for i >= 1
    prefix_max = [0] * n
    while True:
        yield Partition(tuple(a))
        i = n - 1
        while i > 0 and a[i] > prefix_max[i]:
            i -= 1
        if i == 0:
            return
        a[i] += 1
        top = max(prefix_max[i], a[i])
        for j in range(i + 1, n):
            a[j] = 0
            prefix_max[j] = top


def refines(fine: Partition, coarse: Partition) -> bool:
    """True iff every block of ``fine`` lies inside a block of ``coarse``."""
    if fine.n != coarse.n:
        raise SizeMismatch(f"partitions of {fine.n} and {coarse.n} elements")
    image: dict[int, int] = {}
    for f, c in zip(fine.assignment, coarse.assignment):
        if image.setdefault(f, c) != c:
            return False
    return True


def _block_weights(w: np.ndarray, p: Partition) -> np.ndarray:
    """Row-aggregation weights, normalized within each block."""
    ind = p.indicator()
    totals = w @ ind
    wm = ind * w[:, None]
    for b in np.flatnonzero(totals <= 0):
        # zero-mass block: fall back to a plain average
        wm[:, b] = ind[:, b]
        totals[b] = ind[:, b].sum()
    return wm / totals


def coarsen(micro: Tpm, p: Partition, pc: InterventionDist | str | None = None) -> Tpm:
    """Macro TPM: pc-weighted average of member rows, summed over target blocks."""
    if p.n != micro.n:
        raise SizeMismatch(f"partition of {p.n} elements for a {micro.n}-state TPM")
    w = resolve_dist(micro, pc).weights
    ind = p.indicator()
    macro = _block_weights(w, p).T @ micro.rows @ ind
    macro /= macro.sum(axis=1, keepdims=True)
    labels = [frozenset().union(*(micro.labels[i] for i in blk)) for blk in p.blocks()]
    return tpm_from_rows(macro, labels)


def aggregate_dist(pc: InterventionDist, p: Partition) -> InterventionDist:
    """Intervention distribution at the macroscale induced by ``p``.

    Uniform stays uniform over macrostates; other kinds sum their block mass.
    """
    if pc.kind == "uniform":
        return uniform_dist(p.k)
    return InterventionDist(pc.kind, _frozen(pc.weights @ p.indicator()))


def _kl_rows(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Row-wise KL(p || q) in bits; +inf where p has mass and q has none."""
    live = p > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(live, p * np.log2(np.where(live, p, 1.0) / q), 0.0)
    terms = np.where(live & (q <= 0), np.inf, terms)
    return terms.sum(axis=1)


def _matrix_powers(a: np.ndarray, horizon: int) -> list[np.ndarray]:
    out = []
    cur = np.eye(a.shape[0])
    for _ in range(horizon):
        cur = cur @ a
        out.append(cur)
    return out


def _profile(powers: list[np.ndarray], macro: np.ndarray, p: Partition) -> np.ndarray:
    ind = p.indicator()
    start = np.asarray(p.assignment)
    steps = np.empty(len(powers))
    cur = np.eye(macro.shape[0])
    for t, tp in enumerate(powers):
        cur = cur @ macro
        steps[t] = _kl_rows(tp @ ind, cur[start]).sum()
    return np.maximum(steps, 0.0)


def consistency_profile(
    micro: Tpm,
    p: Partition,
    pc: InterventionDist | str | None = None,
    horizon: int = DEFAULT_HORIZON,
) -> np.ndarray:
    """Per-step KL divergence between projected micro walkers and macro walkers.

    Entry t-1 sums KL(projected micro || macro) over every micro start state
    after t steps.
    """
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    macro = coarsen(micro, p, pc)
    return _profile(_matrix_powers(micro.rows, horizon), macro.rows, p)


def consistency_divergence(
    micro: Tpm,
    p: Partition,
    pc: InterventionDist | str | None = None,
    horizon: int = DEFAULT_HORIZON,
) -> float:
    """Total walker inconsistency of ``p`` summed over starts and steps."""
    return float(consistency_profile(micro, p, pc, horizon).sum())


@dataclass(frozen=True)
class ScaleNode:
    partition: Partition
    macro_tpm: Tpm
    divergence: float
    primitives: PrimitiveReport | None

    @property
    def k(self) -> int:
        return self.partition.k

    @property
    def valid(self) -> bool:
        return self.divergence <= CONSISTENCY_TOL

    def cp(self, kind: str) -> float | None:
        return None if self.primitives is None else self.primitives.cp(kind)


def build_node(
    micro: Tpm,
    p: Partition,
    pc: InterventionDist,
    horizon: int = DEFAULT_HORIZON,
    powers: list[np.ndarray] | None = None,
) -> ScaleNode:
    macro = coarsen(micro, p, pc)
    if powers is None:
        powers = _matrix_powers(micro.rows, horizon)
    div = float(_profile(powers, macro.rows, p).sum())
    prims = system_primitives(macro, aggregate_dist(pc, p)) if p.k >= 2 else None
    return ScaleNode(p, macro, div, prims)


def canonical_key(node: ScaleNode) -> tuple:
    return (-node.k, node.partition.assignment)


def valid_macroscales(
    micro: Tpm,
    pc: InterventionDist | str | None = None,
    horizon: int = DEFAULT_HORIZON,
    tol: float = CONSISTENCY_TOL,
    max_states: int | None = None,
    threads: int = 1,
) -> list[ScaleNode]:
    """Every dynamically consistent coarse-graining, microscale included.

    Sorted by k descending, then lexicographically by partition.
    """
    pc = resolve_dist(micro, pc)
    parts = enumerate_partitions(micro.n, max_states)
    powers = _matrix_powers(micro.rows, horizon)

    def scan(chunk: list[Partition]) -> list[ScaleNode]:
        out = []
        for p in chunk:
            macro = coarsen(micro, p, pc)
            div = float(_profile(powers, macro.rows, p).sum())
            if div <= tol:
                prims = system_primitives(macro, aggregate_dist(pc, p)) if p.k >= 2 else None
                out.append(ScaleNode(p, macro, div, prims))
        return out

    chunks = _chunked(parts, 512)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            found = [node for part in pool.map(scan, chunks) for node in part]
    else:
        found = [node for chunk in chunks for node in scan(chunk)]
    return sorted(found, key=canonical_key)


def _chunked(it: Iterable, size: int) -> Iterator[list]:
    it = iter(it)
    while chunk := list(islice(it, size)):
        yield chunk
