"""Singular-value estimates of causal emergence that skip partition search."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DecompositionFailure, DegenerateSize
from .tpm import Tpm


@dataclass(frozen=True)
class SvdReport:
    sigmas: list[float]
    gamma: float
    gamma_star: float
    ce2_estimate: float
    ce1_vague: float
    positive_contributions: list[float]
    epsilon: float

    def to_dict(self) -> dict:
        return {
            "sigmas": self.sigmas,
            "gamma": self.gamma,
            "gamma_star": self.gamma_star,
            "ce2_estimate": self.ce2_estimate,
            "ce1_vague": self.ce1_vague,
            "positive_contributions": self.positive_contributions,
            "epsilon": self.epsilon,
        }


def singular_values(tpm: Tpm) -> np.ndarray:
    if tpm.n < 2:
        raise DegenerateSize("svd heuristics need at least 2 states")
    try:
        s = np.linalg.svd(tpm.rows, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise DecompositionFailure(str(exc)) from exc
    return np.sort(s)[::-1]


def svd_report(tpm: Tpm, epsilon: float = 1e-9) -> SvdReport:
    """Singular-value summary of ``tpm``.

    ``gamma_star`` averages every singular value except the leading one
    (which is at least 1 for any stochastic matrix). The CE estimate is
    ``sigma_2 - gamma_star`` clamped at 0. A singular value counts as a
    contribution only if it beats ``gamma_star`` by more than ``epsilon``.
    """
    s = singular_values(tpm)
    gamma = float(s.mean())
    gamma_star = float(s[1:].mean())
    above = s[s > epsilon]
    sigma_bar = float(above.mean()) if above.size else 0.0
    contribs = [float(x - gamma_star) for x in s[1:] if x - gamma_star > epsilon]
    return SvdReport(
        sigmas=s.tolist(),
        gamma=gamma,
        gamma_star=gamma_star,
        ce2_estimate=max(float(s[1]) - gamma_star, 0.0),
        ce1_vague=sigma_bar - gamma,
        positive_contributions=contribs,
        epsilon=epsilon,
    )


def svd_multiscale_profile(tpm: Tpm, epsilon: float = 1e-9) -> list[tuple[int, float]]:
    """(1-based index, sigma_i - gamma_star) for every i >= 2 above gamma_star."""
    s = singular_values(tpm)
    gamma_star = s[1:].mean()
    return [(i + 1, float(s[i] - gamma_star)) for i in range(1, s.size) if s[i] - gamma_star > epsilon]
