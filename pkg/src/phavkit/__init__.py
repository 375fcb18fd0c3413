"""Phase-averaged coherent states and their beam-splitter superpositions.

Photon statistics, s-ordered quasiprobabilities, non-Gaussianity measures,
correlation functions, mutual information and a simulated photon-counting
Wigner reconstruction, each reachable by more than one numerical route.
"""

__version__ = "0.1.0"

from .exceptions import CapacityError, DomainError, NumericalError, PhavkitError
from .nongauss import NonGaussReport, measure_all
from .optics import (
    BeamSplitter,
    PhotocountDistribution,
    apply_loss,
    g_k,
    mutual_information,
    sample_photocounts,
)
from .phasespace import SOrderedPoint, two_phav_quasiprob, wigner
from .reconstruct import ReconstructionConfig, reconstruct_section
from .states import (
    CutoffPolicy,
    FockDiagonalState,
    PhavParams,
    ThermalParams,
    TwoPhavParams,
    count_fidelity,
    make_fock,
    make_phav,
    make_state,
    make_thermal,
    make_two_phav,
    make_vacuum,
    purity,
    von_neumann_entropy,
)

__all__ = [
    "__version__",
    "BeamSplitter",
    "CapacityError",
    "CutoffPolicy",
    "DomainError",
    "FockDiagonalState",
    "NonGaussReport",
    "NumericalError",
    "PhavParams",
    "PhavkitError",
    "PhotocountDistribution",
    "ReconstructionConfig",
    "SOrderedPoint",
    "ThermalParams",
    "TwoPhavParams",
    "apply_loss",
    "count_fidelity",
    "g_k",
    "make_fock",
    "make_phav",
    "make_state",
    "make_thermal",
    "make_two_phav",
    "make_vacuum",
    "measure_all",
    "mutual_information",
    "purity",
    "reconstruct_section",
    "sample_photocounts",
    "two_phav_quasiprob",
    "von_neumann_entropy",
    "wigner",
]
