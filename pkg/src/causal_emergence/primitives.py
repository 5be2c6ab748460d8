"""Causal primitives: sufficiency, necessity and their entropy generalizations."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DegenerateSize, IndexOutOfRange, UndefinedConditional
from .tpm import InterventionDist, Tpm, resolve_dist

log = logging.getLogger(__name__)

FIELDS = (
    "sufficiency",
    "necessity",
    "determinism",
    "degeneracy",
    "specificity",
    "cp_primitive",
    "cp_detspec",
    "ei_bits",
)


@dataclass(frozen=True)
class PrimitiveReport:
    n: int
    sufficiency: float
    necessity: float
    determinism: float
    degeneracy: float
    specificity: float
    cp_primitive: float
    cp_detspec: float
    ei_bits: float

    @property
    def cp_out_of_bounds(self) -> bool:
        """Diagnostic flag: cp_primitive is reported unclamped."""
        return not (-1e-12 <= self.cp_primitive <= 1 + 1e-12)

    def cp(self, kind: str) -> float:
        if kind == "detspec":
            return self.cp_detspec
        if kind == "primitive":
            return self.cp_primitive
        raise ValueError(f"unknown cp kind {kind!r}")

    def to_dict(self) -> dict:
        return asdict(self)


def entropy_bits(p) -> float:
    """Shannon entropy in bits with 0 log 0 = 0."""
    p = np.asarray(p, dtype=np.float64)
    nz = p[p > 0]
    return float(-(nz * np.log2(nz)).sum()) + 0.0


def _row_entropies(a: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = np.where(a > 0, np.log2(np.where(a > 0, a, 1.0)), 0.0)
    return -(a * logs).sum(axis=1)


def _check_state(tpm: Tpm, *states: int) -> None:
    for s in states:
        if not 0 <= s < tpm.n:
            raise IndexOutOfRange(f"state {s} outside 0..{tpm.n - 1}")


def suff(tpm: Tpm, c: int, e: int) -> float:
    """Sufficiency of cause c for effect e: P(e|c)."""
    _check_state(tpm, c, e)
    return float(tpm.rows[c, e])


def _counterfactual_effects(a: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Row c holds P(E | C, not c) for every effect."""
    total = w.sum()
    rest = total - w
    if np.any(rest <= 1e-15):
        c = int(np.argmax(rest <= 1e-15))
        raise UndefinedConditional(f"intervention distribution puts all mass on state {c}")
    effect = w @ a
    return (effect[None, :] - w[:, None] * a) / rest[:, None]


def nec(tpm: Tpm, c: int, e: int, pc: InterventionDist | str | None = None) -> float:
    """Necessity of cause c for effect e: 1 - P(e | C, not c)."""
    _check_state(tpm, c, e)
    w = resolve_dist(tpm, pc).weights
    rest = w.sum() - w[c]
    if rest <= 1e-15:
        raise UndefinedConditional(f"intervention distribution puts all mass on state {c}")
    mask = np.ones(tpm.n, dtype=bool)
    mask[c] = False
    return float(1.0 - (w[mask] @ tpm.rows[mask, e]) / rest)


def system_primitives(tpm: Tpm, pc: InterventionDist | str | None = None) -> PrimitiveReport:
    """System-wide primitives, each averaged over causes under ``pc``."""
    n = tpm.n
    if n < 2:
        raise DegenerateSize("causal primitives need at least 2 states (log2 n > 0)")
    w = resolve_dist(tpm, pc).weights
    a = tpm.rows
    logn = float(np.log2(n))

    sufficiency = float(w @ (a * a).sum(axis=1))
    cf = _counterfactual_effects(a, w)
    necessity = float(w @ (a * (1.0 - cf)).sum(axis=1))

    determinism = float(w @ (1.0 - _row_entropies(a) / logn))
    degeneracy = 1.0 - entropy_bits(w @ a) / logn
    specificity = 1.0 - degeneracy
    cp_detspec = determinism + specificity - 1.0
    report = PrimitiveReport(
        n=n,
        sufficiency=sufficiency,
        necessity=necessity,
        determinism=determinism,
        degeneracy=degeneracy,
        specificity=specificity,
        cp_primitive=sufficiency + necessity - 1.0,
        cp_detspec=cp_detspec,
        ei_bits=cp_detspec * logn,
    )
    if report.cp_out_of_bounds:
        log.warning("cp_primitive=%r lies outside [0, 1]", report.cp_primitive)
    return report


def effective_information(tpm: Tpm, pc: InterventionDist | str | None = None) -> float:
    """EI in bits, i.e. effectiveness times log2 n."""
    return system_primitives(tpm, pc).ei_bits
