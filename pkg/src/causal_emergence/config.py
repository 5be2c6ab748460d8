"""Analysis settings shared by every CLI command."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import BadParams
from .scales import default_max_states


@dataclass(frozen=True)
class AnalysisConfig:
    pc_kind: str = "uniform"
    cp_kind: str = "detspec"
    consistency_tol: float = 1e-9
    horizon: int = 5
    epsilon_svd: float = 1e-9
    epsilon_dr: float = 1e-3
    max_states: int = 12
    output_format: str = "json"
    threads: int = 1

    def __post_init__(self):
        if self.pc_kind not in ("uniform", "stationary"):
            raise BadParams(f"pc kind must be uniform or stationary, not {self.pc_kind!r}")
        if self.cp_kind not in ("detspec", "primitive"):
            raise BadParams(f"cp kind must be detspec or primitive, not {self.cp_kind!r}")
        if self.output_format not in ("json", "csv"):
            raise BadParams(f"format must be json or csv, not {self.output_format!r}")
        if min(self.consistency_tol, self.epsilon_svd, self.epsilon_dr) <= 0:
            raise BadParams("tolerances must be positive")
        if self.horizon < 1:
            raise BadParams("horizon must be at least 1")
        if self.max_states < 2:
            raise BadParams("max_states must be at least 2")
        if self.threads < 1:
            raise BadParams("threads must be at least 1")

    @classmethod
    def from_args(cls, ns) -> "AnalysisConfig":
        max_states = ns.max_states if ns.max_states is not None else default_max_states()
        return cls(
            pc_kind=ns.pc,
            cp_kind=ns.cp,
            consistency_tol=ns.tol,
            horizon=ns.horizon,
            epsilon_svd=ns.epsilon_svd,
            epsilon_dr=ns.epsilon_dr,
            max_states=max_states,
            output_format=ns.format,
            threads=ns.threads,
        )
