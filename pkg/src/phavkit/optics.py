"""Beam splitters, detection loss, correlation functions and count sampling."""

import math
from dataclasses import dataclass

import numpy as np

from . import specfun
from .exceptions import DomainError
from .states import (
    FockDiagonalState,
    PhavParams,
    TwoPhavParams,
    log_factorials,
    make_state,
    von_neumann_entropy,
)


@dataclass(frozen=True)
class BeamSplitter:
    tau: float = 0.5

    def __post_init__(self):
        tau = float(self.tau)
        if not 0.0 <= tau <= 1.0:
            raise DomainError(f"tau must lie in [0, 1], got {self.tau!r}")
        object.__setattr__(self, "tau", tau)


@dataclass(frozen=True, eq=False)
class PhotocountDistribution:
    """Probabilities ``probs[m]`` of detecting ``m`` photons at efficiency ``eta``.

    ``tail_bound`` bounds the mass beyond the last entry and ``error`` any
    per-entry numerical error of the producing routine.
    """

    probs: np.ndarray
    eta: float = 1.0
    tail_bound: float = 0.0
    error: float = 0.0

    def __post_init__(self):
        probs = np.array(self.probs, dtype=float)
        if probs.ndim != 1 or probs.size == 0 or np.any(probs < 0):
            raise DomainError("probs must be a non-empty 1-D array of non-negative values")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)
        _check_eta(self.eta)

    @classmethod
    def from_state(cls, state, eta=1.0):
        """Detected-count distribution of ``state`` behind a detector of efficiency ``eta``."""
        return cls(apply_loss(state, eta).probs, eta, state.tail_bound)

    @classmethod
    def from_counts(cls, counts, eta=1.0):
        counts = np.asarray(counts, dtype=float)
        return cls(counts / counts.sum(), eta)

    @property
    def mean(self):
        return math.fsum(np.arange(self.probs.size) * self.probs)

    @property
    def total(self):
        return math.fsum(self.probs)


@dataclass(frozen=True)
class SplitResult:
    """Reduced output states of a beam splitter fed by a state and vacuum."""

    out1: object
    out2: object
    joint_entropy: float


def _check_eta(eta):
    eta = float(eta)
    if not (0.0 < eta <= 1.0):
        raise DomainError(f"efficiency must lie in (0, 1], got {eta!r}")
    return eta


def binomial_thinning_matrix(nmax, eta):
    """``T[m, n] = C(n, m) eta^m (1-eta)^(n-m)`` for ``m, n <= nmax``."""
    n = np.arange(nmax + 1)
    logf = log_factorials(nmax)
    m = n[:, None]
    nn = n[None, :]
    valid = m <= nn
    out = np.zeros((nmax + 1, nmax + 1))
    if eta == 1.0:
        np.fill_diagonal(out, 1.0)
        return out
    with np.errstate(invalid="ignore"):
        logs = (
            logf[nn] - logf[m] - logf[np.where(valid, nn - m, 0)]
            + m * math.log(eta)
            + (nn - m) * math.log1p(-eta)
        )
    out[valid] = np.exp(logs[valid])
    return out


def apply_loss(state, eta):
    """Bernoulli thinning of the photon-number distribution."""
    eta = _check_eta(eta)
    if eta == 1.0:
        return state
    probs = binomial_thinning_matrix(state.cutoff, eta) @ state.probs
    params = dict(state.params)
    params["loss_eta"] = params.get("loss_eta", 1.0) * eta
    return FockDiagonalState(probs, state.tail_bound, state.kind, params)


def lossy(params, eta):
    """The family member reached by loss: every intensity scaled by ``eta``."""
    eta = _check_eta(eta)
    if isinstance(params, (PhavParams, TwoPhavParams)):
        return params.scaled(eta)
    raise DomainError(f"loss closure is only defined for PHAV families, got {type(params).__name__}")


def split_with_vacuum(params, bs):
    """Split a PHAV or 2-PHAV against vacuum.

    Each coherent component ``|gamma>`` leaves as ``|sqrt(tau) gamma> ⊗
    |sqrt(1-tau) gamma>``, so the phase average maps the family onto itself
    with intensities scaled by ``tau`` and ``1 - tau``. The bipartite output
    is a unitary image of the input and a pure ancilla, so its entropy is the
    input entropy.
    """
    if not isinstance(params, (PhavParams, TwoPhavParams)):
        raise DomainError(f"unsupported state family {type(params).__name__}")
    if not isinstance(bs, BeamSplitter):
        bs = BeamSplitter(bs)
    joint = von_neumann_entropy(make_state(params))
    return SplitResult(params.scaled(bs.tau), params.scaled(1.0 - bs.tau), joint)


def mutual_information(params, bs=None):
    """Von Neumann mutual information between the two outputs, in nats.

    The joint photocount distribution of these outputs factorises, so any
    correlation measured here lives in the coherences of the two-mode state.
    """
    bs = BeamSplitter() if bs is None else bs
    res = split_with_vacuum(params, bs)
    s1 = von_neumann_entropy(make_state(res.out1))
    s2 = von_neumann_entropy(make_state(res.out2))
    return s1 + s2 - res.joint_entropy


def joint_split_counts(state, bs):
    """Joint photon-number distribution ``P(m1, m2)`` of the two outputs.

    A Fock state ``|n>`` against vacuum splits binomially, ``n = m1 + m2``.
    """
    if not isinstance(bs, BeamSplitter):
        bs = BeamSplitter(bs)
    nmax = state.cutoff
    logf = log_factorials(nmax)
    joint = np.zeros((nmax + 1, nmax + 1))
    tau = bs.tau
    for n, p_n in enumerate(state.probs):
        if p_n == 0.0:
            continue
        m1 = np.arange(n + 1)
        m2 = n - m1
        with np.errstate(divide="ignore", invalid="ignore"):
            logs = logf[n] - logf[m1] - logf[m2]
            weights = np.exp(logs) * np.power(tau, m1) * np.power(1.0 - tau, m2)
        joint[m1, m2] += p_n * weights
    return joint


def ratio_state(m_total, ratio, eta=1.0, convention="detected"):
    """Detected-level 2-PHAV on a balanced splitter with ``|beta_1|/|beta_2| = ratio``.

    ``convention="detected"`` holds the detected output mean at ``m_total``;
    ``"incident"`` holds the incident mean there and applies ``eta`` after.
    """
    eta = _check_eta(eta)
    if convention == "detected":
        return TwoPhavParams.from_ratio(m_total, ratio)
    if convention == "incident":
        return TwoPhavParams.from_ratio(m_total, ratio).scaled(eta)
    raise DomainError(f"unknown energy convention {convention!r}")


def g_k(params, k):
    """Normalised correlation ``g^(k)(0) = u^k P_k(1/u)``."""
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    if isinstance(params, PhavParams):
        if params.mean == 0.0 and k >= 1:
            raise DomainError("g^(k) is undefined for vacuum")
        return 1.0
    if params.s_tot == 0.0 and k >= 1:
        raise DomainError("g^(k) is undefined when the output mean is zero")
    return float(specfun.legendre_scaled(k, params.u))


def sample_photocounts(dist, n_samples, seed):
    """Histogram of ``n_samples`` draws by inverse-CDF sampling.

    numpy's PCG64 generator seeded with ``seed``; identical seeds give
    identical histograms. Returns integer counts indexed by photon number.
    """
    if n_samples < 1:
        raise DomainError(f"n_samples must be >= 1, got {n_samples}")
    probs = np.asarray(getattr(dist, "probs", dist), dtype=float)
    cdf = np.cumsum(probs)
    cdf /= cdf[-1]
    rng = np.random.default_rng(seed)
    draws = np.searchsorted(cdf, rng.random(n_samples), side="right")
    draws = np.minimum(draws, probs.size - 1)
    return np.bincount(draws, minlength=probs.size)


def task_seeds(seed, n_tasks):
    """Independent per-task seeds derived from one master seed."""
    children = np.random.SeedSequence(seed).spawn(n_tasks)
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in children]
