"""Non-Gaussianity measures against the thermal reference state.

For a phase-insensitive state the first moments vanish and the covariance
matrix is ``(N + 1/2)`` times the identity, so the Gaussian state with the
same first and second moments is the thermal state of equal mean ``N``.
Both states are diagonal in the Fock basis and commute, which reduces all
three measures to sums over photon-number distributions.
"""

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .states import (
    FockDiagonalState,
    ThermalParams,
    make_thermal,
    purity,
    thermal_entropy,
    von_neumann_entropy,
)


@dataclass(frozen=True)
class NonGaussReport:
    eps_a: float
    eps_b: float
    eps_c: float
    reference_mean: float

    def to_dict(self):
        return asdict(self)

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)


def reference_thermal(state):
    return ThermalParams(state.mean)


def _paired(state):
    ref = make_thermal(reference_thermal(state))
    size = max(state.probs.size, ref.probs.size)
    rho = np.pad(state.probs, (0, size - state.probs.size))
    sigma = np.pad(ref.probs, (0, size - ref.probs.size))
    return rho, sigma


# rounding in the sums can leave values a few ulps below zero for thermal input
_ROUNDING_FLOOR = 1e-12


def _floor(value):
    return 0.0 if -_ROUNDING_FLOOR < value < 0.0 else value


def thermal_purity(mean):
    return 1.0 / (2.0 * mean + 1.0)


def phav_thermal_overlap(mean):
    """``Tr[rho sigma]`` for a PHAV and its thermal reference, in closed form."""
    return math.exp(-mean / (mean + 1.0)) / (mean + 1.0)


def overlap(state):
    """``kappa = Tr[rho sigma] = sum_n rho_nn sigma_nn``."""
    rho, sigma = _paired(state)
    return math.fsum(rho * sigma)


def eps_hilbert_schmidt(state: FockDiagonalState) -> float:
    """Squared Hilbert-Schmidt distance to the reference, divided by the purity."""
    mu = purity(state)
    mu_ref = thermal_purity(state.mean)
    return _floor((mu + mu_ref - 2.0 * overlap(state)) / (2.0 * mu))


def eps_relative_entropy(state: FockDiagonalState) -> float:
    """``S(sigma) - S(rho)`` in nats."""
    return _floor(thermal_entropy(state.mean) - von_neumann_entropy(state))


def eps_fidelity(state: FockDiagonalState) -> float:
    """``1 - sqrt(F)``; commuting states give ``sqrt(F) = sum_n sqrt(rho_nn sigma_nn)``."""
    rho, sigma = _paired(state)
    root_f = math.fsum(np.sqrt(rho * sigma))
    return _floor(1.0 - root_f)


def measure_all(state: FockDiagonalState) -> NonGaussReport:
    return NonGaussReport(
        eps_hilbert_schmidt(state),
        eps_relative_entropy(state),
        eps_fidelity(state),
        state.mean,
    )
