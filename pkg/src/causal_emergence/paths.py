"""Micro-to-macro paths, causal apportioning and emergent complexity."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidEndpoint, NoGain, Unreachable
from .primitives import entropy_bits, system_primitives
from .scales import Partition, ScaleNode, refines as _refines
from .tpm import InterventionDist, Tpm

CP_KINDS = ("detspec", "primitive")
TIE_TOL = 1e-9


@dataclass(frozen=True)
class MicroMacroPath:
    nodes: tuple[ScaleNode, ...]
    cp_kind: str = "detspec"

    def __post_init__(self):
        if self.cp_kind not in CP_KINDS:
            raise ValueError(f"unknown cp kind {self.cp_kind!r}")
        nodes = self.nodes
        if not nodes:
            raise Unreachable("empty path")
        if nodes[0].partition != Partition.singletons(nodes[0].partition.n):
            raise Unreachable("path must start at the microscale")
        for a, b in zip(nodes, nodes[1:]):
            if b.k >= a.k or not _refines(a.partition, b.partition):
                raise Unreachable(f"{a.partition} -> {b.partition} is not a coarsening step")
        if any(not nd.valid for nd in nodes):
            raise Unreachable("path contains an inconsistent scale")

    @property
    def cps(self) -> list[float]:
        return [float(nd.cp(self.cp_kind)) for nd in self.nodes]


def select_endpoint(scales: Sequence[ScaleNode], cp_kind: str = "detspec") -> ScaleNode:
    """Node with maximal CP; ties go to the largest k, then the smallest partition.

    The single-block partition never qualifies since CP needs log2 n > 0.
    """
    cands = [nd for nd in scales if nd.k >= 2 and nd.primitives is not None]
    if not cands:
        raise InvalidEndpoint("no scale with at least two states to choose from")
    best = max(nd.cp(cp_kind) for nd in cands)
    tied = [nd for nd in cands if nd.cp(cp_kind) >= best - TIE_TOL]
    return min(tied, key=lambda nd: (-nd.k, nd.partition.assignment))


def _refinement_matrix(parts: list[Partition]) -> np.ndarray:
    """R[i, j] is True iff parts[i] refines parts[j]."""
    assign = np.array([p.assignment for p in parts])
    m = len(parts)
    out = np.zeros((m, m), dtype=bool)
    for i, p in enumerate(parts):
        ok = np.ones(m, dtype=bool)
        for blk in p.blocks():
            if len(blk) > 1:
                cols = assign[:, blk]
                ok &= np.all(cols == cols[:, :1], axis=1)
        out[i] = ok
    return out


def longest_path(
    micro: ScaleNode,
    endpoint: ScaleNode,
    scales: Sequence[ScaleNode],
    cp_kind: str = "detspec",
) -> MicroMacroPath:
    """Longest refinement chain of valid scales from ``micro`` to ``endpoint``.

    Among equally long chains, each step takes the lexicographically
    smallest next partition.
    """
    if not micro.valid or not endpoint.valid:
        raise Unreachable("path endpoints must be consistent scales")
    if not _refines(micro.partition, endpoint.partition):
        raise Unreachable(f"{endpoint.partition} is not a coarsening of {micro.partition}")
    if micro.partition == endpoint.partition:
        return MicroMacroPath((micro,), cp_kind)

    # only scales sandwiched between micro and endpoint can lie on a chain
    pool = {nd.partition: nd for nd in scales if nd.valid}
    pool[micro.partition] = micro
    pool[endpoint.partition] = endpoint
    nodes = sorted(
        (nd for nd in pool.values()
         if _refines(micro.partition, nd.partition) and _refines(nd.partition, endpoint.partition)),
        key=lambda nd: (-nd.k, nd.partition.assignment),
    )
    parts = [nd.partition for nd in nodes]
    ks = np.array([p.k for p in parts])
    R = _refinement_matrix(parts) & (ks[:, None] > ks[None, :])

    end = parts.index(endpoint.partition)
    # remaining[i]: most edges from i to the endpoint (-1 if unreachable)
    remaining = np.full(len(parts), -1)
    remaining[end] = 0
    for i in range(len(parts) - 1, -1, -1):
        if i == end:
            continue
        succ = np.flatnonzero(R[i] & (remaining >= 0))
        if succ.size:
            remaining[i] = 1 + remaining[succ].max()

    start = parts.index(micro.partition)
    if remaining[start] < 0:
        raise Unreachable(f"no valid chain from {micro.partition} to {endpoint.partition}")
    chain = [start]
    cur = start
    while cur != end:
        succ = np.flatnonzero(R[cur] & (remaining == remaining[cur] - 1))
        # nodes are sorted by (k desc, lexicographic); pick smallest partition
        cur = min(succ, key=lambda j: parts[j].assignment)
        chain.append(cur)
    return MicroMacroPath(tuple(nodes[i] for i in chain), cp_kind)


def emergent_complexity(deltas: Sequence[float]) -> tuple[float, float]:
    """Entropy (bits) of the positive-part contribution distribution.

    Returns ``(ec_bits, ec_normalized)``; normalization is by log2 of the
    number of steps and is 0 for a single step. Raises NoGain when no step
    gains.
    """
    d = np.asarray(deltas, dtype=np.float64)
    if d.size < 1:
        raise NoGain("path has no steps")
    gains = np.clip(d, 0.0, None)
    total = gains.sum()
    if total <= 0:
        raise NoGain("no step has a positive gain")
    ec = entropy_bits(gains / total)
    norm = ec / np.log2(d.size) if d.size > 1 else 0.0
    return ec, float(norm)


def contribution_distribution(deltas: Sequence[float]) -> list[float]:
    gains = np.clip(np.asarray(deltas, dtype=np.float64), 0.0, None)
    total = gains.sum()
    if total <= 0:
        return [0.0] * len(gains)
    return (gains / total).tolist()


def diminishing_returns_stop(deltas: Sequence[float], epsilon: float = 1e-3, window: int = 3) -> int | None:
    """First step at which the gains enter diminishing returns.

    Either the gain drops below ``epsilon``, or the ratio of successive gains
    starts a run of ``window`` strict decreases. Returns None if neither
    happens.
    """
    if epsilon <= 0 or window < 2:
        raise ValueError("need epsilon > 0 and window >= 2")
    d = [float(x) for x in deltas]
    small = next((i for i, x in enumerate(d) if x < epsilon), None)

    ratios = [d[i + 1] / d[i] if d[i] > 0 else None for i in range(len(d) - 1)]
    shrinking = None
    for i in range(len(ratios) - window):
        run = ratios[i:i + window + 1]
        if all(r is not None for r in run) and all(a > b for a, b in zip(run, run[1:])):
            shrinking = i
            break
    hits = [i for i in (small, shrinking) if i is not None]
    return min(hits) if hits else None


@dataclass(frozen=True)
class ApportionReport:
    cp_kind: str
    partitions: list[str]
    ks: list[int]
    cps: list[float]
    deltas: list[float]
    total_ce: float
    p_dist: list[float]
    ec_bits: float | None
    ec_normalized: float | None
    path_length: int
    has_negative_delta: bool
    diminishing_returns_index: int | None = None
    upper_bound: float | None = None

    def to_dict(self) -> dict:
        return {
            "cp_kind": self.cp_kind,
            "partitions": self.partitions,
            "ks": self.ks,
            "cps": self.cps,
            "deltas": self.deltas,
            "total_ce": self.total_ce,
            "p_dist": self.p_dist,
            "ec_bits": self.ec_bits,
            "ec_normalized": self.ec_normalized,
            "path_length": self.path_length,
            "has_negative_delta": self.has_negative_delta,
            "diminishing_returns_index": self.diminishing_returns_index,
            "ce_upper_bound": self.upper_bound,
        }


def apportion(
    path: MicroMacroPath,
    epsilon_dr: float = 1e-3,
    window: int = 3,
) -> ApportionReport:
    """Per-step CP gains along ``path`` and their summary statistics."""
    cps = path.cps
    deltas = [float(b - a) for a, b in zip(cps, cps[1:])]
    try:
        ec, ec_norm = emergent_complexity(deltas)
    except NoGain:
        ec = ec_norm = None
    return ApportionReport(
        cp_kind=path.cp_kind,
        partitions=[str(nd.partition) for nd in path.nodes],
        ks=[nd.k for nd in path.nodes],
        cps=cps,
        deltas=deltas,
        total_ce=float(sum(deltas)),
        p_dist=contribution_distribution(deltas),
        ec_bits=ec,
        ec_normalized=ec_norm,
        path_length=len(deltas),
        has_negative_delta=any(x < 0 for x in deltas),
        diminishing_returns_index=diminishing_returns_stop(deltas, epsilon_dr, window) if deltas else None,
        upper_bound=float(1.0 - cps[0]),
    )


def ce_upper_bound(micro: Tpm, pc: InterventionDist | str | None = None, cp_kind: str = "detspec") -> float:
    """Distance of the microscale CP from its ceiling of 1."""
    return 1.0 - system_primitives(micro, pc).cp(cp_kind)


def find_node(scales: Sequence[ScaleNode], p: Partition) -> ScaleNode | None:
    return next((nd for nd in scales if nd.partition == p), None)
