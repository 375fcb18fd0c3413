"""s-ordered characteristic functions and quasiprobabilities.

All states here are rotationally invariant, so only the radius ``|lambda|``
(or ``|z|``) enters. Quasiprobabilities are normalised as
``(1/pi) int W(z; s) d^2 z = 1``; the vacuum Wigner function is 2 at the
origin and ``Q(z) = W(z; -1) / pi``.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import specfun
from .exceptions import DomainError, NumericalError
from .quadrature import gaussian_cutoff, panel_rule
from .states import PhavParams, TwoPhavParams, make_phav, rho_from_radial

__all__ = [
    "SOrderedPoint",
    "RadialDeltaRing",
    "phav_cf",
    "phav_cf_series",
    "phav_quasiprob",
    "q_function",
    "wigner",
    "p_function_ring",
    "two_phav_cf",
    "two_phav_quasiprob",
    "quasiprob_from_cf",
    "rho_from_cf",
]


@dataclass(frozen=True)
class SOrderedPoint:
    radius: float
    s: float = 0.0

    def __post_init__(self):
        r, s = float(self.radius), float(self.s)
        if not (math.isfinite(r) and r >= 0):
            raise DomainError(f"radius must be finite and >= 0, got {self.radius!r}")
        if not -1.0 <= s <= 1.0:
            raise DomainError(f"s must lie in [-1, 1], got {self.s!r}")
        object.__setattr__(self, "radius", r)
        object.__setattr__(self, "s", s)


@dataclass(frozen=True)
class RadialDeltaRing:
    """The PHAV P function: a delta ring of radius ``|beta|`` with density ``1/(2 pi |beta|)``."""

    ring_radius: float
    weight: float

    def moment(self, k):
        """``int P(z) |z|^(2k) d^2 z``."""
        if k < 0:
            raise DomainError(f"k must be >= 0, got {k}")
        return self.ring_radius ** (2 * k)


def _phav(p):
    return p if isinstance(p, PhavParams) else PhavParams(p)


def _point(pt, s=None):
    if isinstance(pt, SOrderedPoint):
        return pt
    return SOrderedPoint(pt, 0.0 if s is None else s)


def _cf_radial(radius, s, amplitudes):
    r = np.asarray(radius, dtype=float)
    val = np.exp(-0.5 * (1.0 - s) * r * r)
    for amp in amplitudes:
        if amp > 0:
            val = val * specfun.bessel_j0(2.0 * amp * r)
    return val


def phav_cf(p, pt):
    """``exp(-(1-s)|lambda|^2/2) J0(2 |beta| |lambda|)``."""
    p, pt = _phav(p), _point(pt)
    return float(_cf_radial(pt.radius, pt.s, [p.amplitude]))


def phav_cf_series(p, pt, n_terms=None):
    """The PHAV characteristic function summed over Fock states, ``sum_n rho_nn L_n``.

    ``n_terms`` caps the number of Fock terms; by default the whole
    constructed distribution is used.
    """
    p, pt = _phav(p), _point(pt)
    probs = make_phav(p).probs
    if n_terms is not None:
        if n_terms > probs.size:
            raise DomainError(f"n_terms={n_terms} exceeds cutoff+1={probs.size}")
        probs = probs[:n_terms]
    x = pt.radius**2
    lag = specfun.laguerre_table(probs.size - 1, x)
    return math.exp(-0.5 * (1.0 - pt.s) * x) * math.fsum(probs * lag)


def _phav_w(mean, radius, s):
    if s >= 1.0:
        raise DomainError("s = 1 is the singular P function; use p_function_ring")
    c = 2.0 / (1.0 - s)
    b = math.sqrt(mean)
    r = np.asarray(radius, dtype=float)
    # c exp(-c(b^2 + r^2)) I0(2 c b r) rewritten with the scaled Bessel
    return c * np.exp(-c * (b - r) ** 2) * specfun.bessel_i0_scaled(2.0 * c * b * r)


def phav_quasiprob(p, pt):
    """s-ordered quasiprobability ``W(z; s)`` of a PHAV, ``s < 1``."""
    p, pt = _phav(p), _point(pt)
    return float(_phav_w(p.mean, pt.radius, pt.s))


def q_function(p, radius):
    return phav_quasiprob(p, SOrderedPoint(radius, -1.0)) / math.pi


def wigner(p, radius):
    """Wigner function (``s = 0``) of a PHAV or 2-PHAV."""
    if isinstance(p, TwoPhavParams):
        return two_phav_quasiprob(p, SOrderedPoint(radius, 0.0))
    return phav_quasiprob(p, SOrderedPoint(radius, 0.0))


def p_function_ring(p):
    p = _phav(p)
    b = p.amplitude
    weight = math.inf if b == 0.0 else 1.0 / (2.0 * math.pi * b)
    return RadialDeltaRing(b, weight)


def two_phav_cf(p, pt):
    """Product of the two input CFs evaluated at ``sqrt(tau) lambda`` and ``sqrt(1-tau) lambda``."""
    pt = _point(pt)
    return float(
        _cf_radial(pt.radius, pt.s, [math.sqrt(p.part1), math.sqrt(p.part2)])
    )


def _series_w(p, radius, s, rel_tol):
    # c e^{-x} sum_k (-y)^k/k! u^k P_k(1/u) L_k(x), c = 2/(1-s), x = c|a|^2, y = c s_tot;
    # the prefactor c (not 2) is what reduces to the PHAV form for s != 0
    c = 2.0 / (1.0 - s)
    x = c * radius * radius
    y = c * p.s_tot
    kmax = int(4 * y + 12 * math.sqrt(y + x) + 60)
    q = specfun.legendre_scaled_table(kmax, p.u)
    lag = specfun.laguerre_table(kmax, x)
    k = np.arange(kmax + 1)
    log_fact = np.concatenate(([0.0], np.cumsum(np.log(np.arange(1, kmax + 1)))))
    with np.errstate(divide="ignore"):
        mag = np.exp(k * math.log(y) - log_fact) if y > 0 else (k == 0).astype(float)
    terms = np.where(k % 2 == 0, 1.0, -1.0) * mag * q * lag
    absterms = np.abs(terms)
    # stop once three consecutive terms sit below 1e-14 of the running maximum
    running = np.maximum.accumulate(absterms)
    small = absterms < 1e-14 * running
    stop = None
    for i in range(2, kmax + 1):
        if small[i] and small[i - 1] and small[i - 2]:
            stop = i
            break
    if stop is None:
        raise NumericalError(
            "quasiprobability series did not settle",
            terms=kmax + 1,
            last_term=float(absterms[-1]),
        )
    value = c * math.exp(-x) * math.fsum(terms[: stop + 1])
    # rounding error grows with the largest term relative to the sum
    err = c * math.exp(-x) * (stop + 1) * 2.2e-16 * float(running[stop])
    if err > rel_tol * max(abs(value), 1e-300) and err > 1e-13:
        raise NumericalError(
            "quasiprobability series loses too many digits to cancellation",
            value=value,
            error_estimate=err,
            largest_term=float(running[stop]),
        )
    return value


def _phase_w(p, radius, s):
    a, b = p.part1, p.part2
    cross = 2.0 * math.sqrt(a * b)

    def at(phi):
        means = np.maximum(a + b + cross * np.cos(phi), 0.0)
        return _phav_w_vec(means, radius, s)

    nodes = 32
    prev = None
    while nodes <= 1 << 16:
        phi = 2.0 * np.pi * np.arange(nodes) / nodes
        cur = float(np.mean(at(phi)))
        if prev is not None and abs(cur - prev) < 1e-14 * max(1.0, abs(cur)):
            return cur
        prev = cur
        nodes *= 2
    raise NumericalError("phase average of PHAV quasiprobabilities did not converge")


def _phav_w_vec(means, radius, s):
    c = 2.0 / (1.0 - s)
    b = np.sqrt(means)
    return c * np.exp(-c * (b - radius) ** 2) * specfun.bessel_i0_scaled(2.0 * c * b * radius)


def two_phav_quasiprob(p, pt, method="auto", rel_tol=1e-10):
    """s-ordered quasiprobability of a 2-PHAV, ``s < 1``.

    ``method="series"`` sums the Legendre-Laguerre expansion and raises
    :class:`NumericalError` when rounding in its alternating terms could
    exceed ``rel_tol``; ``"phase"`` averages PHAV quasiprobabilities over the
    relative phase of the two inputs; ``"hankel"`` transforms the CF
    numerically. ``"auto"`` tries the series and falls back to ``"phase"``.
    """
    pt = _point(pt)
    if pt.s >= 1.0:
        raise DomainError("s must be < 1 for a quasiprobability density")
    if method == "series":
        return _series_w(p, pt.radius, pt.s, rel_tol)
    if method == "phase":
        return _phase_w(p, pt.radius, pt.s)
    if method == "hankel":
        return quasiprob_from_cf(p, pt)
    if method == "auto":
        try:
            return _series_w(p, pt.radius, pt.s, rel_tol)
        except NumericalError:
            return _phase_w(p, pt.radius, pt.s)
    raise DomainError(f"unknown method {method!r}")


def _amplitudes(p):
    if isinstance(p, TwoPhavParams):
        return [math.sqrt(p.part1), math.sqrt(p.part2)]
    return [_phav(p).amplitude]


def quasiprob_from_cf(p, pt, tol=1e-12):
    """``W(z; s) = 2 int_0^inf r chi(r; s) J0(2|z| r) dr`` by panel Gauss-Legendre.

    Independent of the closed forms: only the characteristic function is
    used. The rule is refined once and the two results must agree to ``tol``.
    """
    pt = _point(pt)
    if pt.s >= 1.0:
        raise DomainError("the transform needs s < 1 for a decaying CF")
    amps = _amplitudes(p)
    upper = gaussian_cutoff(0.5 * (1.0 - pt.s))
    k = 2.0 * (pt.radius + sum(amps))
    width = min(0.25, 0.5 * math.pi / max(k, 1e-9))

    def evaluate(w):
        r, wt = panel_rule(upper, w)
        f = _cf_radial(r, pt.s, amps) * specfun.bessel_j0(2.0 * pt.radius * r)
        return 2.0 * math.fsum(wt * r * f)

    coarse = evaluate(width)
    fine = evaluate(0.5 * width)
    if abs(fine - coarse) > tol:
        raise NumericalError(
            "CF transform did not converge", change=abs(fine - coarse), tol=tol
        )
    return fine


def rho_from_cf(p, n_cut):
    """Photon-number distribution recovered from the symmetric-order CF."""
    amps = _amplitudes(p)

    def integrand(r):
        return np.exp(-0.5 * r * r) * _cf_radial(r, 0.0, amps)

    return rho_from_radial(integrand, n_cut, 2.0 * sum(amps))
