"""Transition probability matrices and intervention distributions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    InvalidDistribution,
    InvalidLabels,
    NegativeEntry,
    NoConvergence,
    NonStochasticRow,
    NotSquare,
)

ATOL = 1e-9


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.float64, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Tpm:
    """A row-stochastic transition matrix over a labeled statespace.

    ``labels[i]`` is the frozenset of microstate indices that state ``i``
    stands for; at the microscale every label is a singleton.
    """

    rows: np.ndarray
    labels: tuple[frozenset[int], ...]

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Tpm):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.rows, other.rows)

    def __hash__(self) -> int:
        return hash((self.labels, self.rows.tobytes()))

    def __repr__(self) -> str:
        return f"Tpm(n={self.n}, rows={self.rows.tolist()!r})"


def tpm_from_rows(rows, labels: Sequence[Sequence[int]] | None = None) -> Tpm:
    """Validate ``rows`` and wrap them as a :class:`Tpm`.

    Raises NotSquare, NegativeEntry or NonStochasticRow on malformed input.
    """
    try:
        a = np.array(rows, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise NotSquare(f"rows are not a numeric matrix: {exc}") from exc
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise NotSquare(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonStochasticRow("matrix contains non-finite entries")
    if np.any(a < -ATOL):
        i, j = np.argwhere(a < -ATOL)[0]
        raise NegativeEntry(f"entry ({i},{j}) is negative: {a[i, j]}")
    if np.any(a > 1 + ATOL):
        i, j = np.argwhere(a > 1 + ATOL)[0]
        raise NonStochasticRow(f"entry ({i},{j}) exceeds 1: {a[i, j]}")
    sums = a.sum(axis=1)
    bad = np.flatnonzero(np.abs(sums - 1.0) > ATOL)
    if bad.size:
        raise NonStochasticRow(f"row {bad[0]} sums to {sums[bad[0]]!r}")
    a = np.clip(a, 0.0, 1.0)

    n = a.shape[0]
    if labels is None:
        labs = tuple(frozenset([i]) for i in range(n))
    else:
        labs = tuple(frozenset(int(x) for x in lab) for lab in labels)
        if len(labs) != n:
            raise InvalidLabels(f"{len(labs)} labels for {n} states")
        if any(not lab for lab in labs):
            raise InvalidLabels("labels must be non-empty")
        union = frozenset().union(*labs)
        if sum(len(lab) for lab in labs) != len(union):
            raise InvalidLabels("labels overlap")
        if union != frozenset(range(len(union))):
            raise InvalidLabels("labels do not cover 0..m-1")
    return Tpm(_frozen(a), labs)


def is_permutation(tpm: Tpm) -> bool:
    """True iff every row is one-hot and every column holds exactly one 1."""
    a = tpm.rows
    ones = np.abs(a - 1.0) <= ATOL
    zeros = np.abs(a) <= ATOL
    if not np.all(ones | zeros):
        return False
    return bool(np.all(ones.sum(axis=1) == 1) and np.all(ones.sum(axis=0) == 1))


@dataclass(frozen=True, eq=False)
class InterventionDist:
    """Distribution P(C) over candidate causes."""

    kind: str
    weights: np.ndarray

    def __post_init__(self):
        if self.kind not in ("uniform", "stationary", "custom"):
            raise InvalidDistribution(f"unknown kind {self.kind!r}")
        w = self.weights
        if w.ndim != 1 or w.size < 1:
            raise InvalidDistribution("weights must be a non-empty vector")
        if np.any(w < -ATOL) or abs(w.sum() - 1.0) > ATOL:
            raise InvalidDistribution("weights must be non-negative and sum to 1")
        if self.kind == "uniform" and np.any(np.abs(w - 1.0 / w.size) > ATOL):
            raise InvalidDistribution("uniform weights must all equal 1/n")

    @property
    def n(self) -> int:
        return self.weights.size

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, InterventionDist):
            return NotImplemented
        return self.kind == other.kind and np.array_equal(self.weights, other.weights)

    def __hash__(self) -> int:
        return hash((self.kind, self.weights.tobytes()))


def uniform_dist(n: int) -> InterventionDist:
    return InterventionDist("uniform", _frozen(np.full(n, 1.0 / n)))


def custom_dist(weights) -> InterventionDist:
    return InterventionDist("custom", _frozen(weights))


def stationary_distribution(tpm: Tpm, max_iters: int = 100_000, tol: float = 1e-12) -> InterventionDist:
    """Long-run distribution by power iteration from the uniform vector.

    Stops as soon as ``|w T - w|_1 <= tol``; periodic chains whose
    stationary vector is not reached from the uniform start raise
    NoConvergence.
    """
    a = tpm.rows
    w = np.full(tpm.n, 1.0 / tpm.n)
    for _ in range(max_iters):
        nxt = w @ a
        if np.abs(nxt - w).sum() <= tol:
            w = np.clip(w, 0.0, None)
            return InterventionDist("stationary", _frozen(w / w.sum()))
        w = nxt
    raise NoConvergence(f"power iteration did not converge in {max_iters} iterations")


def resolve_dist(tpm: Tpm, pc: InterventionDist | str | None) -> InterventionDist:
    """Accept a distribution, a kind name, or None (uniform)."""
    if pc is None or pc == "uniform":
        return uniform_dist(tpm.n)
    if pc == "stationary":
        return stationary_distribution(tpm)
    if isinstance(pc, InterventionDist):
        if pc.n != tpm.n:
            raise InvalidDistribution(f"distribution has {pc.n} weights for {tpm.n} states")
        return pc
    raise InvalidDistribution(f"cannot interpret {pc!r} as an intervention distribution")
