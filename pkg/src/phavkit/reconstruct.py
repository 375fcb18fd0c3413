"""Simulated Wigner-function reconstruction by photon counting.

The state is mixed with a coherent probe of amplitude ``alpha`` and the
detected-photon distribution ``p_m`` of the displaced state gives the Wigner
function through the alternating sum ``(2/pi) sum_m (-1)^m p_m``. Values in
this module follow that pi-inclusive convention, i.e. they equal
``W(alpha) / pi`` for the ``W`` of :mod:`phavkit.phasespace`.

Probe amplitudes are incident values. The detector efficiency ``eta`` acts on
the probe and the signal alike, so the reconstruction at incident probe
``|alpha|`` samples the detected-level state at ``sqrt(eta) |alpha|``.
Imperfect mode overlap is emulated by letting only the ``sqrt(xi)`` part of a
field interfere and adding the rest incoherently to the count mean.
"""

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .exceptions import DomainError, NumericalError
from .optics import PhotocountDistribution, _check_eta, lossy
from .phasespace import SOrderedPoint, phav_quasiprob, two_phav_quasiprob
from .states import (
    PhavParams,
    TwoPhavParams,
    phase_average,
    poisson_cutoff,
    poisson_matrix,
    poisson_tail_bound,
)

# rounding floor added to every reported truncation bound
_ROUNDING = 1e-15


def _check_overlap(value, name):
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {value!r}")
    return value


@dataclass(frozen=True)
class ReconstructionConfig:
    probe_radii: tuple = tuple(np.round(np.linspace(0.0, 3.0, 31), 10))
    eta: float = 1.0
    xi: float = 1.0
    xi_p: float = 1.0
    xi_s: float = 1.0
    m_bar: int | None = None
    phase_nodes: int = 64

    def __post_init__(self):
        radii = tuple(float(r) for r in self.probe_radii)
        if any(r < 0 or not math.isfinite(r) for r in radii):
            raise DomainError("probe radii must be finite and >= 0")
        object.__setattr__(self, "probe_radii", radii)
        object.__setattr__(self, "eta", _check_eta(self.eta))
        for name in ("xi", "xi_p", "xi_s"):
            object.__setattr__(self, name, _check_overlap(getattr(self, name), name))
        if self.phase_nodes < 64:
            raise DomainError("phase_nodes must be >= 64")
        if self.m_bar is not None and self.m_bar < 0:
            raise DomainError("m_bar must be >= 0")

    def to_dict(self):
        d = asdict(self)
        d["probe_radii"] = list(self.probe_radii)
        return d


@dataclass(frozen=True)
class WignerEstimate:
    value: float
    trunc_bound: float


def _counts_from_means(mean_fn, max_mean, phase_nodes, eta, tol=1e-10):
    m_max = poisson_cutoff(max_mean)
    probs, change = phase_average(
        lambda phi: poisson_matrix(mean_fn(phi), m_max), tol=tol, start=phase_nodes
    )
    return PhotocountDistribution(
        np.clip(probs, 0.0, None), eta, poisson_tail_bound(max_mean, m_max), change
    )


def displaced_photocounts_phav(p, alpha_abs, eta=1.0, phase_nodes=64, xi=1.0):
    """Detected counts of a PHAV displaced by a probe of amplitude ``alpha_abs``.

    ``p_m = (1/2pi) int dphi Poisson(m; eta |alpha + beta e^{i phi}|^2)``
    by periodic trapezoid, nodes doubled from ``phase_nodes`` until no
    ``p_m`` moves by more than 1e-10.
    """
    p = p if isinstance(p, PhavParams) else PhavParams(p)
    eta = _check_eta(eta)
    xi = _check_overlap(xi, "xi")
    if phase_nodes < 64:
        raise DomainError("phase_nodes must be >= 64")
    a2 = eta * alpha_abs * alpha_abs
    b2 = eta * p.mean
    coherent = xi * a2 + b2
    cross = 2.0 * math.sqrt(xi * a2 * b2)
    extra = (1.0 - xi) * a2

    def means(phi):
        return np.maximum(coherent + cross * np.cos(phi), 0.0) + extra

    return _counts_from_means(means, coherent + cross + extra, phase_nodes, eta)


def displaced_photocounts_two_phav(p, alpha_abs, eta=1.0, phase_nodes=64, xi_p=1.0, xi_s=1.0):
    """Detected counts of a displaced 2-PHAV, averaged over both input phases.

    Tensor-product trapezoid in the two phases; the probe phase is fixed
    since only relative phases matter.
    """
    eta = _check_eta(eta)
    xi_p = _check_overlap(xi_p, "xi_p")
    xi_s = _check_overlap(xi_s, "xi_s")
    if phase_nodes < 64:
        raise DomainError("phase_nodes must be >= 64")
    a = math.sqrt(xi_p * eta) * alpha_abs
    c1 = math.sqrt(eta * p.part1)
    c2 = math.sqrt(xi_s * eta * p.part2)
    extra = (1.0 - xi_p) * eta * alpha_abs**2 + (1.0 - xi_s) * eta * p.part2
    m_max = poisson_cutoff((a + c1 + c2) ** 2 + extra)

    nodes = phase_nodes
    prev = None
    while nodes <= 1024:
        phi = 2.0 * np.pi * np.arange(nodes) / nodes
        f1 = c1 * np.exp(1j * phi)
        f2 = c2 * np.exp(1j * phi)
        field_ = a + f1[:, None] + f2[None, :]
        means = np.abs(field_).ravel() ** 2 + extra
        cur = poisson_matrix(means, m_max).mean(axis=0)
        if prev is not None:
            change = float(np.max(np.abs(cur - prev)))
            if change < 1e-10:
                return PhotocountDistribution(
                    np.clip(cur, 0.0, None),
                    eta,
                    poisson_tail_bound((a + c1 + c2) ** 2 + extra, m_max),
                    change,
                )
        prev = cur
        nodes *= 2
    raise NumericalError(
        "double phase average did not converge", nodes=nodes // 2, change=change
    )


def default_m_bar(dist):
    mean = dist.mean
    return int(math.ceil(mean + 12.0 * math.sqrt(mean) + 30.0))


def wigner_from_counts(dist, m_bar=None):
    """``(2/pi) sum_{m <= m_bar} (-1)^m p_m`` with a bound on what was left out.

    The bound covers the mass beyond ``m_bar``, the tail already missing from
    ``dist``, its per-entry numerical error, and a rounding floor.
    """
    probs = np.asarray(dist.probs, dtype=float)
    if m_bar is None:
        m_bar = default_m_bar(dist)
    kept = probs[: m_bar + 1]
    signs = np.where(np.arange(kept.size) % 2 == 0, 1.0, -1.0)
    value = 2.0 / math.pi * math.fsum(signs * kept)
    left_out = math.fsum(probs[m_bar + 1:]) + getattr(dist, "tail_bound", 0.0)
    quad = getattr(dist, "error", 0.0) * kept.size
    bound = 2.0 / math.pi * (left_out + quad) + _ROUNDING
    return WignerEstimate(value, bound)


def overlap_model_phav(p, alpha_abs, xi):
    """Attenuated Wigner prediction ``W(sqrt(xi) alpha) exp(-(|alpha| + |beta|) sqrt(1 - xi))``."""
    p = p if isinstance(p, PhavParams) else PhavParams(p)
    xi = _check_overlap(xi, "xi")
    w = phav_quasiprob(p, SOrderedPoint(math.sqrt(xi) * alpha_abs, 0.0))
    return w * math.exp(-(alpha_abs + p.amplitude) * math.sqrt(1.0 - xi))


def overlap_model_two_phav(p, alpha_abs, xi_p, xi_s):
    """2-PHAV counterpart with probe overlap ``xi_p`` and inter-component overlap ``xi_s``.

    The component amplitudes in the exponent are those reaching the output
    port, ``sqrt(tau) |beta_1|`` and ``sqrt(1 - tau) |beta_2|``.
    """
    xi_p = _check_overlap(xi_p, "xi_p")
    xi_s = _check_overlap(xi_s, "xi_s")
    w = two_phav_quasiprob(p, SOrderedPoint(math.sqrt(xi_p) * alpha_abs, 0.0))
    amps = math.sqrt(p.part1) + math.sqrt(p.part2)
    return w * math.exp(-alpha_abs * math.sqrt(1.0 - xi_p) - amps * math.sqrt(1.0 - xi_s))


@dataclass
class SectionTable:
    """One radial section: probe amplitude, reconstructed and model values, bound."""

    config: ReconstructionConfig
    params: object
    rows: list = field(default_factory=list)

    @property
    def max_deviation(self):
        return max((abs(r[1] - r[2]) for r in self.rows), default=0.0)

    @property
    def max_bound(self):
        return max((r[3] for r in self.rows), default=0.0)

    def column(self, i):
        return np.array([r[i] for r in self.rows])

    def to_csv(self, header_lines=()):
        buf = io.StringIO()
        for line in header_lines:
            buf.write(f"# {line}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["alpha_abs", "w_reconstructed", "w_model", "trunc_bound"])
        for row in self.rows:
            writer.writerow([format(v, ".17g") for v in row])
        return buf.getvalue()

    def to_dict(self):
        return {
            "config": self.config.to_dict(),
            "state": {"type": _family_name(self.params), "params": self.params.to_dict()},
            "max_deviation": self.max_deviation,
            "rows": [
                dict(zip(("alpha_abs", "w_reconstructed", "w_model", "trunc_bound"), r))
                for r in self.rows
            ],
        }

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)


def _family_name(params):
    return "phav" if isinstance(params, PhavParams) else "two_phav"


def reconstruct_point(cfg, params, alpha_abs):
    """One table row for incident probe amplitude ``alpha_abs``."""
    detected = lossy(params, cfg.eta)
    radius = math.sqrt(cfg.eta) * alpha_abs
    if isinstance(params, PhavParams):
        dist = displaced_photocounts_phav(params, alpha_abs, cfg.eta, cfg.phase_nodes, cfg.xi)
        model = overlap_model_phav(detected, radius, cfg.xi)
    elif isinstance(params, TwoPhavParams):
        dist = displaced_photocounts_two_phav(
            params, alpha_abs, cfg.eta, cfg.phase_nodes, cfg.xi_p, cfg.xi_s
        )
        model = overlap_model_two_phav(detected, radius, cfg.xi_p, cfg.xi_s)
    else:
        raise DomainError(f"unsupported state family {type(params).__name__}")
    est = wigner_from_counts(dist, cfg.m_bar)
    return (radius, est.value, model / math.pi, est.trunc_bound)


def reconstruct_section(cfg, params):
    """Run the counting protocol over every probe amplitude in ``cfg``.

    Rows are ``(alpha_abs, w_reconstructed, w_model, trunc_bound)`` with
    ``alpha_abs`` the detected-level probe amplitude and both Wigner columns
    in the pi-inclusive convention.
    """
    table = SectionTable(cfg, params)
    for alpha in cfg.probe_radii:
        table.rows.append(reconstruct_point(cfg, params, alpha))
    return table
