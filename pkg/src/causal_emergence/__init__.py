"""Causal emergence across coarse-grainings of discrete Markov chains."""

from .errors import EmergenceError
from .paths import (
    ApportionReport,
    MicroMacroPath,
    apportion,
    ce_upper_bound,
    diminishing_returns_stop,
    emergent_complexity,
    longest_path,
    select_endpoint,
)
from .primitives import PrimitiveReport, effective_information, nec, suff, system_primitives
from .scales import (
    Partition,
    ScaleNode,
    coarsen,
    consistency_divergence,
    enumerate_partitions,
    refines,
    valid_macroscales,
)
from .svd import SvdReport, svd_multiscale_profile, svd_report
from .tpm import (
    InterventionDist,
    Tpm,
    is_permutation,
    stationary_distribution,
    tpm_from_rows,
    uniform_dist,
)

__version__ = "0.1.0"
