"""Fock-diagonal states and their scalar functionals.

Every state handled by phavkit is diagonal in the photon-number basis, so a
state is just its photon-number distribution ``probs[n]`` truncated at a
cutoff, together with a bound on the probability mass left out.
"""

import json
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import specfun
from .exceptions import CapacityError, DomainError, NumericalError
from .quadrature import gaussian_cutoff, panel_rule

DEFAULT_HARD_CUTOFF = 4096
HARD_CUTOFF_ENV = "PHAVKIT_HARD_CUTOFF"

# u below this counts as balanced
_BALANCE_TOL = 1e-12


def _check_mean(value, name="mean"):
    value = float(value)
    if not math.isfinite(value) or value < 0:
        raise DomainError(f"{name} must be finite and >= 0, got {value!r}")
    return value


@dataclass(frozen=True)
class PhavParams:
    """Phase-averaged coherent state with ``mean = |beta|^2`` photons."""

    mean: float

    def __post_init__(self):
        object.__setattr__(self, "mean", _check_mean(self.mean))

    @property
    def amplitude(self):
        return math.sqrt(self.mean)

    def scaled(self, factor):
        """Same family with intensity multiplied by ``factor`` (loss, splitting)."""
        return PhavParams(self.mean * factor)

    def to_dict(self):
        return {"mean": self.mean}


@dataclass(frozen=True)
class TwoPhavParams:
    """One output port of a beam splitter fed by two independent PHAVs.

    ``mean1``, ``mean2`` are the input intensities ``|beta_1|^2``,
    ``|beta_2|^2`` and ``tau`` the intensity transmissivity.
    """

    mean1: float
    mean2: float
    tau: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "mean1", _check_mean(self.mean1, "mean1"))
        object.__setattr__(self, "mean2", _check_mean(self.mean2, "mean2"))
        tau = float(self.tau)
        if not 0.0 <= tau <= 1.0:
            raise DomainError(f"tau must lie in [0, 1], got {tau!r}")
        object.__setattr__(self, "tau", tau)

    @classmethod
    def from_total(cls, s_tot, u, tau=0.5):
        """Parameters with given output mean ``s_tot`` and balancing ``u`` (``tau`` in (0, 1))."""
        s_tot = _check_mean(s_tot, "s_tot")
        if not 0.0 <= u <= 1.0:
            raise DomainError(f"u must lie in [0, 1], got {u!r}")
        if not 0.0 < tau < 1.0:
            raise DomainError("from_total needs 0 < tau < 1")
        return cls(0.5 * s_tot * (1 + u) / tau, 0.5 * s_tot * (1 - u) / (1 - tau), tau)

    @classmethod
    def from_ratio(cls, s_tot, ratio):
        """Balanced beam splitter with amplitude ratio ``|beta_1|/|beta_2| = ratio``."""
        s_tot = _check_mean(s_tot, "s_tot")
        ratio = float(ratio)
        if not math.isfinite(ratio) or ratio <= 0:
            raise DomainError(f"ratio must be positive, got {ratio!r}")
        r2 = ratio * ratio
        return cls(2 * s_tot * r2 / (1 + r2), 2 * s_tot / (1 + r2), 0.5)

    @property
    def part1(self):
        """Intensity reaching the output from input 1, ``|beta_1|^2 tau``."""
        return self.mean1 * self.tau

    @property
    def part2(self):
        return self.mean2 * (1.0 - self.tau)

    @property
    def s_tot(self):
        return self.part1 + self.part2

    @property
    def u(self):
        s = self.s_tot
        if s == 0.0:
            return 0.0
        return abs(self.part1 - self.part2) / s

    @property
    def is_balanced(self):
        return self.u < _BALANCE_TOL

    @property
    def max_mean(self):
        """Largest intensity any coherent component of the mixture reaches."""
        return (math.sqrt(self.part1) + math.sqrt(self.part2)) ** 2

    def scaled(self, factor):
        return TwoPhavParams(self.mean1 * factor, self.mean2 * factor, self.tau)

    def to_dict(self):
        return {"mean1": self.mean1, "mean2": self.mean2, "tau": self.tau}


@dataclass(frozen=True)
class ThermalParams:
    mean: float

    def __post_init__(self):
        object.__setattr__(self, "mean", _check_mean(self.mean))

    def to_dict(self):
        return {"mean": self.mean}


@dataclass(frozen=True)
class CutoffPolicy:
    """How far to carry a photon-number distribution.

    The cutoff starts at ``ceil(M + 10 sqrt(M) + 25)`` and grows until the
    bound on the discarded mass is below ``tol``.
    """

    tol: float = 1e-16
    hard_limit: int | None = None

    def limit(self):
        if self.hard_limit is not None:
            return int(self.hard_limit)
        env = os.environ.get(HARD_CUTOFF_ENV)
        return int(env) if env else DEFAULT_HARD_CUTOFF

    def initial(self, mean):
        return math.ceil(mean + 10.0 * math.sqrt(mean) + 25.0)

    def check(self, n_cut):
        if n_cut > self.limit():
            raise CapacityError(
                f"cutoff {n_cut} exceeds hard limit {self.limit()} "
                f"(set {HARD_CUTOFF_ENV} to raise it)"
            )
        return n_cut


def _policy(policy):
    return CutoffPolicy() if policy is None else policy


@dataclass(frozen=True, eq=False)
class FockDiagonalState:
    """Photon-number distribution of a Fock-diagonal density matrix.

    ``probs[n]`` for ``n = 0..cutoff``; ``tail_bound`` bounds the mass beyond.
    ``kind`` and ``params`` record which constructor produced the state.
    """

    probs: np.ndarray
    tail_bound: float = 0.0
    kind: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        probs = np.array(self.probs, dtype=float)
        if probs.ndim != 1 or probs.size == 0:
            raise DomainError("probs must be a non-empty 1-D array")
        if np.any(probs < 0) or not np.all(np.isfinite(probs)):
            raise DomainError("probs must be finite and non-negative")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "tail_bound", float(self.tail_bound))
        object.__setattr__(self, "params", dict(self.params))

    @property
    def cutoff(self):
        return self.probs.size - 1

    @property
    def mean(self):
        return math.fsum(np.arange(self.probs.size) * self.probs)

    @property
    def total(self):
        return math.fsum(self.probs)

    def to_dict(self):
        return {
            "type": self.kind,
            "params": self.params,
            "probs": [float(p) for p in self.probs],
            "tail_bound": self.tail_bound,
        }

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data):
        return cls(
            np.asarray(data["probs"], dtype=float),
            tail_bound=data.get("tail_bound", 0.0),
            kind=data.get("type", "custom"),
            params=data.get("params", {}),
        )

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def __eq__(self, other):
        if not isinstance(other, FockDiagonalState):
            return NotImplemented
        return (
            self.kind == other.kind
            and self.params == other.params
            and self.tail_bound == other.tail_bound
            and np.array_equal(self.probs, other.probs)
        )

    __hash__ = None


def log_factorials(nmax):
    return np.concatenate(([0.0], np.cumsum(np.log(np.arange(1, nmax + 1)))))


def poisson_probs(mean, nmax):
    """Poisson probabilities ``exp(-M) M^n / n!`` for ``n = 0..nmax``."""
    probs = np.zeros(nmax + 1)
    if mean == 0.0:
        probs[0] = 1.0
        return probs
    n = np.arange(nmax + 1)
    return np.exp(-mean + n * math.log(mean) - log_factorials(nmax))


def poisson_tail_bound(mean, n_cut):
    """Upper bound on ``P(N > n_cut)`` for a Poisson variable of the given mean."""
    if mean == 0.0:
        return 0.0
    ratio = mean / (n_cut + 2)
    if ratio >= 1.0:
        return 1.0
    log_next = -mean + (n_cut + 1) * math.log(mean) - math.lgamma(n_cut + 2)
    return math.exp(log_next) / (1.0 - ratio)


def poisson_cutoff(mean, policy=None):
    """Smallest cutoff (from the policy's starting point) with Poisson tail below ``policy.tol``."""
    policy = _policy(policy)
    n_cut = policy.initial(mean)
    while poisson_tail_bound(mean, n_cut) >= policy.tol:
        n_cut = policy.check(n_cut + max(1, n_cut // 8))
    return policy.check(n_cut)


def _coerce(params, cls):
    if isinstance(params, cls):
        return params
    if isinstance(params, (int, float)):
        return cls(params)
    raise DomainError(f"expected {cls.__name__}, got {type(params).__name__}")


def make_vacuum():
    return FockDiagonalState(np.array([1.0]), 0.0, "vacuum", {})


def make_fock(n):
    if n < 0:
        raise DomainError(f"photon number must be >= 0, got {n}")
    probs = np.zeros(n + 1)
    probs[n] = 1.0
    return FockDiagonalState(probs, 0.0, "fock", {"n": int(n)})


def make_phav(params, policy=None):
    """Poissonian photon-number distribution of a PHAV."""
    p = _coerce(params, PhavParams)
    policy = _policy(policy)
    if p.mean == 0.0:
        return FockDiagonalState(np.array([1.0]), 0.0, "phav", p.to_dict())
    n_cut = poisson_cutoff(p.mean, policy)
    return FockDiagonalState(
        poisson_probs(p.mean, n_cut),
        poisson_tail_bound(p.mean, n_cut),
        "phav",
        p.to_dict(),
    )


def make_thermal(params, policy=None):
    """Geometric distribution ``M^n / (M+1)^(n+1)``."""
    p = _coerce(params, ThermalParams)
    policy = _policy(policy)
    m = p.mean
    if m == 0.0:
        return FockDiagonalState(np.array([1.0]), 0.0, "thermal", p.to_dict())
    q = m / (m + 1.0)
    n_cut = policy.initial(m)
    while q ** (n_cut + 1) >= policy.tol:
        n_cut = policy.check(n_cut + max(1, n_cut // 8))
    policy.check(n_cut)
    n = np.arange(n_cut + 1)
    probs = np.exp(n * math.log(q)) / (m + 1.0)
    return FockDiagonalState(probs, q ** (n_cut + 1), "thermal", p.to_dict())


def _two_phav_closed(p, n_cut):
    s = p.s_tot
    if p.u == 1.0 or p.part1 == 0.0 or p.part2 == 0.0:
        return poisson_probs(s, n_cut)
    if not p.is_balanced:
        raise DomainError("closed form needs a balanced (u = 0) or single-input 2-PHAV")
    probs = np.empty(n_cut + 1)
    log_s = math.log(s)
    for n in range(n_cut + 1):
        log_pref = (
            specfun.log_double_factorial_odd(n) - 2.0 * math.lgamma(n + 1) + n * log_s
        )
        probs[n] = math.exp(log_pref) * specfun.hyp1f1_half_scaled(n, 2.0 * s)
    return probs


def two_phav_radial_integrand(p, r):
    """``exp(-r^2/2)`` times the symmetric-order CF of the 2-PHAV at radius ``r``."""
    return (
        np.exp(-r * r)
        * specfun.bessel_j0(2.0 * math.sqrt(p.part1) * r)
        * specfun.bessel_j0(2.0 * math.sqrt(p.part2) * r)
    )


def rho_from_radial(integrand, n_cut, max_wavenumber, tol=1e-10):
    """Diagonal elements ``2 int r f(r) L_n(r^2) dr`` for ``n = 0..n_cut``.

    ``integrand(r)`` must already include the ``exp(-r^2/2)`` of the
    displacement matrix element, so for a CF ``chi`` it is
    ``exp(-r^2/2) chi(r; 0)``. ``max_wavenumber`` bounds the oscillation rate
    of ``integrand`` in ``r``; panels are kept below half a local period.
    The rule is refined once and the two results must agree to ``tol``.
    """
    upper = gaussian_cutoff(0.5)
    k = max_wavenumber + math.sqrt(4.0 * n_cut + 2.0)
    width = min(0.25, 0.5 * math.pi / k)

    def evaluate(w):
        nodes, weights = panel_rule(upper, w)
        g = 2.0 * weights * nodes * integrand(nodes)
        return specfun.laguerre_table(n_cut, nodes * nodes) @ g

    coarse = evaluate(width)
    fine = evaluate(0.5 * width)
    change = float(np.max(np.abs(fine - coarse)))
    if change > tol:
        raise NumericalError(
            "radial quadrature for rho_nn did not converge",
            panel_width=0.5 * width,
            change=change,
            tol=tol,
            n_cut=n_cut,
        )
    return fine


def _two_phav_quadrature(p, n_cut):
    a1 = 2.0 * math.sqrt(p.part1)
    a2 = 2.0 * math.sqrt(p.part2)
    probs = rho_from_radial(lambda r: two_phav_radial_integrand(p, r), n_cut, a1 + a2)
    # quadrature noise can leave entries like -1e-17 in the far tail
    return np.clip(probs, 0.0, None)


def phase_average(fn, tol=1e-13, start=32, max_nodes=1 << 16):
    """Average ``fn(phi)`` over ``[0, 2 pi)`` by periodic trapezoid with node doubling.

    ``fn`` maps an array of phases to an array whose first axis runs over
    the phases. Returns ``(average, last_change)``.
    """
    nodes = start
    prev = None
    while nodes <= max_nodes:
        phi = 2.0 * np.pi * np.arange(nodes) / nodes
        cur = np.mean(fn(phi), axis=0)
        if prev is not None:
            change = float(np.max(np.abs(cur - prev)))
            if change < tol:
                return cur, change
        prev = cur
        nodes *= 2
    raise NumericalError(
        "phase average did not converge", nodes=nodes // 2, change=change, tol=tol
    )


def poisson_matrix(means, nmax):
    """``Poisson(n; means[j])`` with shape ``(len(means), nmax + 1)``; zero means allowed."""
    means = np.asarray(means, dtype=float)
    n = np.arange(nmax + 1)
    logf = log_factorials(nmax)
    out = np.zeros((means.size, nmax + 1))
    pos = means > 0
    if np.any(pos):
        m = means[pos][:, None]
        out[pos] = np.exp(-m + n[None, :] * np.log(m) - logf[None, :])
    out[~pos, 0] = 1.0
    return out


def _two_phav_phase(p, n_cut):
    a, b = p.part1, p.part2
    cross = 2.0 * math.sqrt(a * b)

    def fn(phi):
        return poisson_matrix(np.maximum(a + b + cross * np.cos(phi), 0.0), n_cut)

    probs, _ = phase_average(fn)
    return probs


_TWO_PHAV_ROUTES = {
    "closed": _two_phav_closed,
    "quadrature": _two_phav_quadrature,
    "phase": _two_phav_phase,
}


def make_two_phav(params, policy=None, route="auto"):
    """Photon-number distribution of a 2-PHAV.

    ``route`` selects the evaluation path: ``"closed"`` (hypergeometric
    form, balanced or single-input only), ``"quadrature"`` (radial integral
    of the characteristic function), ``"phase"`` (trapezoidal average of
    Poissonians over the relative phase), or ``"auto"`` which takes the
    closed form when it applies and the phase average otherwise. The phase
    average keeps every entry to full relative precision; quadrature leaves
    an absolute noise floor near 1e-16 in the far tail.
    """
    if not isinstance(params, TwoPhavParams):
        raise DomainError(f"expected TwoPhavParams, got {type(params).__name__}")
    policy = _policy(policy)
    if params.s_tot == 0.0:
        return FockDiagonalState(np.array([1.0]), 0.0, "two_phav", params.to_dict())
    upper = params.max_mean
    n_cut = poisson_cutoff(upper, policy)
    if route == "auto":
        single = params.part1 == 0.0 or params.part2 == 0.0
        route = "closed" if (single or params.is_balanced) else "phase"
    try:
        fn = _TWO_PHAV_ROUTES[route]
    except KeyError:
        raise DomainError(f"unknown route {route!r}") from None
    probs = fn(params, n_cut)
    return FockDiagonalState(
        probs, poisson_tail_bound(upper, n_cut), "two_phav", params.to_dict()
    )


def make_state(descriptor, policy=None, **kwargs):
    """Build the state for a parameter object."""
    if isinstance(descriptor, PhavParams):
        return make_phav(descriptor, policy)
    if isinstance(descriptor, TwoPhavParams):
        return make_two_phav(descriptor, policy, **kwargs)
    if isinstance(descriptor, ThermalParams):
        return make_thermal(descriptor, policy)
    raise DomainError(f"unsupported state family {type(descriptor).__name__}")


def mean_for_purity(target, family="phav", tol=1e-13):
    """Mean photon number at which a PHAV (or balanced 2-PHAV) has purity ``target``.

    Purity falls strictly from 1 at vacuum, so bisection on the mean works.
    """
    if not 0.0 < target <= 1.0:
        raise DomainError(f"purity must lie in (0, 1], got {target!r}")
    if target == 1.0:
        return 0.0

    def pur(m):
        if family == "phav":
            return phav_purity(m)
        if family == "two_phav":
            return purity(make_two_phav(TwoPhavParams.from_total(m, 0.0)))
        raise DomainError(f"unknown family {family!r}")

    lo, hi = 0.0, 1.0
    while pur(hi) > target:
        hi *= 2.0
        if hi > 1e6:
            raise DomainError(f"purity {target} not reachable")
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if pur(mid) > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def two_phav_moment(params, k):
    """Normally ordered moment ``<a^+k a^k> = s_tot^k u^k P_k(1/u)``."""
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    return params.s_tot**k * float(specfun.legendre_scaled(k, params.u))


def moment_series_rho(params, n, tol=Fraction(1, 10**40), max_terms=2000):
    """``rho_nn`` from the alternating series over normally ordered moments.

    Evaluated in exact rational arithmetic from the float inputs, since in
    floating point the series cancels catastrophically once ``s_tot`` is of
    order one. Only meant for cross-checking other routes at small energy.
    """
    s = Fraction(params.s_tot)
    if s == 0:
        return 1.0 if n == 0 else 0.0
    a, b = Fraction(params.part1), Fraction(params.part2)
    u2 = (a - b) ** 2 / (s * s)
    # q[k] = u^k P_k(1/u), exact
    q_prev, q_cur = Fraction(1), Fraction(1)
    q = [q_prev, q_cur]
    total = Fraction(0)
    for k in range(n, n + max_terms):
        while len(q) <= k:
            j = len(q) - 1
            q.append(((2 * j + 1) * q[j] - j * u2 * q[j - 1]) / (j + 1))
        term = Fraction((-1) ** (k - n), math.factorial(k - n)) * s**k * q[k]
        total += term
        if k > n + 2 * s and abs(term) < tol:
            return float(total / math.factorial(n))
    raise NumericalError("moment series did not converge", n=n, terms=max_terms)


def _probs(state):
    probs = getattr(state, "probs", state)
    return np.asarray(probs, dtype=float)


def purity(state):
    """``sum_n rho_nn^2``."""
    p = _probs(state)
    return math.fsum(p * p)


def phav_purity(mean):
    """Closed-form PHAV purity ``exp(-2M) I0(2M)``."""
    return specfun.bessel_i0_scaled(2.0 * _check_mean(mean))


def von_neumann_entropy(state):
    """Entropy in nats; for a diagonal state this is the Shannon entropy of ``probs``."""
    p = _probs(state)
    p = p[p > 0]
    return max(0.0, -math.fsum(p * np.log(p)))


def thermal_entropy(mean):
    """``(M+1) ln(M+1) - M ln M`` in nats."""
    m = _check_mean(mean)
    if m == 0.0:
        return 0.0
    return (m + 1.0) * math.log1p(m) - m * math.log(m)


def normally_ordered_moment(state, k):
    """``<(a^+)^k a^k> = sum_n rho_nn n!/(n-k)!``."""
    p = _probs(state)
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    if k > p.size - 1:
        raise DomainError(f"k={k} exceeds the state cutoff {p.size - 1}")
    n = np.arange(k, p.size)
    logf = log_factorials(p.size - 1)
    falling = np.exp(logf[n] - logf[n - k])
    return math.fsum(p[k:] * falling)


def count_fidelity(p, q):
    """Bhattacharyya overlap ``sum_m sqrt(p_m q_m)`` of two count distributions.

    Accepts arrays or objects with a ``probs`` attribute; the shorter one is
    zero-padded.
    """
    a, b = _probs(p), _probs(q)
    size = max(a.size, b.size)
    a = np.pad(a, (0, size - a.size))
    b = np.pad(b, (0, size - b.size))
    return math.fsum(np.sqrt(a * b))
