"""Multi-route consistency checks run by ``phavkit validate``.

Each check compares two independent evaluations (or an evaluation against a
structural property) and records the worst error against its tolerance.
"""

import math
import time
from dataclasses import dataclass

import numpy as np

from . import nongauss, optics, phasespace, reconstruct, specfun, states
from .quadrature import gaussian_cutoff, panel_rule


@dataclass
class CheckResult:
    name: str
    error: float
    tol: float
    seconds: float = 0.0

    @property
    def passed(self):
        return bool(self.error <= self.tol)

    @property
    def margin(self):
        return self.tol - self.error

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{status}  {self.name:<44s} err={self.error:.3e}  tol={self.tol:.1e}"
            f"  margin={self.margin:+.3e}  ({self.seconds:.2f}s)"
        )


def _bool_error(ok):
    # structural checks: 0 when the property holds, 1 otherwise
    return 0.0 if ok else 1.0


def check_i0_series():
    x = np.linspace(0.0, 50.0, 201)
    err = 0.0
    for xv in x:
        term, total, k = 1.0, 1.0, 0
        while term > 1e-18 * total:
            k += 1
            term *= (xv / 2.0) ** 2 / (k * k)
            total += term
        got = specfun.bessel_i0_scaled(xv) * math.exp(xv)
        err = max(err, abs(got - total) / total)
    return err, 1e-12


def check_laguerre_generating():
    err = 0.0
    for x in (0.1, 0.5, 1.0):
        for z in (0.2, 1.0, 3.0):
            total, weight = 0.0, 1.0
            for n in range(80):
                total += float(specfun.laguerre(n, z)) * weight
                weight *= x / (n + 1)
            exact = math.exp(x) * specfun.bessel_j0(2.0 * math.sqrt(x * z))
            err = max(err, abs(total - exact))
    return err, 1e-10


def check_hyp1f1_bessel():
    err = 0.0
    for z in np.linspace(0.0, 40.0, 81):
        lhs = specfun.hyp1f1_half_scaled(0, z)
        rhs = specfun.bessel_i0_scaled(z / 2.0)
        err = max(err, abs(lhs - rhs) / rhs)
    return err, 1e-12


def check_normalization(perturb=0.0):
    builders = [
        lambda: states.make_vacuum(),
        lambda: states.make_phav(1.97),
        lambda: states.make_phav(10.0),
        lambda: states.make_thermal(2.0),
        lambda: states.make_two_phav(states.TwoPhavParams(1.0, 1.0)),
        lambda: states.make_two_phav(states.TwoPhavParams(1.03, 0.91)),
    ]
    err = 0.0
    for build in builders:
        st = build()
        probs = np.array(st.probs)
        probs[0] += perturb
        total = math.fsum(probs)
        # sum must lie in [1 - 1e-12, 1]; 1e-14 of slack above 1 for rounding
        if total > 1.0 + 1e-14:
            err = max(err, total - 1.0 + 1e-12)
        err = max(err, 1.0 - total, st.tail_bound)
    return err, 1e-12


def check_purity_closed_form():
    err = 0.0
    for m in (0.1, 0.5, 1.0, 2.0, 5.0, 10.0):
        err = max(err, abs(states.purity(states.make_phav(m)) - states.phav_purity(m)))
    return err, 1e-10


def check_purity_decreasing():
    grid = np.linspace(0.2, 10.0, 50)
    pur = [states.purity(states.make_phav(m)) for m in grid]
    return _bool_error(np.all(np.diff(pur) < 0)), 0.5


def check_two_phav_routes():
    err = 0.0
    for m in (0.5, 1.0, 2.0):
        p = states.TwoPhavParams(m, m, 0.5)
        closed = states.make_two_phav(p, route="closed").probs
        quad = states.make_two_phav(p, route="quadrature").probs
        phase = states.make_two_phav(p, route="phase").probs
        err = max(err, np.max(np.abs(closed - quad)), np.max(np.abs(closed - phase)))
    return float(err), 1e-8


def check_moment_series_small():
    err = 0.0
    for m in (0.1, 0.25):
        p = states.TwoPhavParams(m, m, 0.5)
        probs = states.make_two_phav(p).probs
        for n in range(8):
            err = max(err, abs(states.moment_series_rho(p, n) - probs[n]))
    return err, 1e-12


def check_phav_moments():
    err = 0.0
    for m in (0.5, 1.97, 5.0):
        st = states.make_phav(m)
        for k in range(7):
            err = max(err, abs(states.normally_ordered_moment(st, k) - m**k) / m**k)
    return err, 1e-10


def check_cf_dual_route():
    err = 0.0
    for m in (0.5, 1.97):
        for s in (-1.0, 0.0, 1.0):
            for r in np.linspace(0.0, 4.0, 20):
                pt = phasespace.SOrderedPoint(r, s)
                err = max(err, abs(phasespace.phav_cf_series(m, pt) - phasespace.phav_cf(m, pt)))
    return err, 1e-10


def check_cf_transform(quick=False):
    err = 0.0
    radii = np.linspace(0.0, 4.0, 9 if quick else 21)
    for m in (0.5, 1.97):
        for s in (-1.0, 0.0):
            for r in radii:
                pt = phasespace.SOrderedPoint(r, s)
                err = max(
                    err,
                    abs(phasespace.quasiprob_from_cf(m, pt) - phasespace.phav_quasiprob(m, pt)),
                )
    return err, 1e-8


def _radial_norm(fn, s):
    upper = gaussian_cutoff(1.0 / (1.0 - s)) + 6.0
    r, w = panel_rule(upper, 0.25)
    return 2.0 * math.fsum(w * r * np.array([fn(x) for x in r]))


def check_quasiprob_normalization(quick=False):
    err = 0.0
    svals = (-1.0, 0.0) if quick else (-1.0, -0.5, 0.0)
    for s in svals:
        for m in (0.5, 1.97):
            val = _radial_norm(lambda x: float(phasespace._phav_w(m, x, s)), s)
            err = max(err, abs(val - 1.0))
        if not quick:
            p = states.TwoPhavParams(1.03, 0.91)
            val = _radial_norm(
                lambda x: phasespace.two_phav_quasiprob(p, phasespace.SOrderedPoint(x, s)), s
            )
            err = max(err, abs(val - 1.0))
    return err, 1e-8


def check_marginal_consistency():
    err = 0.0
    for p in (states.PhavParams(1.97), states.TwoPhavParams(1.03, 0.91)):
        probs = states.make_state(p).probs
        rec = phasespace.rho_from_cf(p, probs.size - 1)
        err = max(err, float(np.max(np.abs(rec - probs))))
    return err, 1e-8


def check_dip_and_peak():
    radii = np.linspace(0.0, 3.0, 61)
    phav = [phasespace.wigner(states.PhavParams(1.97), r) for r in radii]
    two = [phasespace.wigner(states.TwoPhavParams(1.03, 0.91), r) for r in radii]
    ok = phav[0] < max(phav) and int(np.argmax(phav)) > 0
    ok = ok and int(np.argmax(two)) == 0 and two[1] < two[0]
    return _bool_error(ok), 0.5


def check_nongauss_properties():
    ok = True
    for m in (0.5, 1.0, 2.0, 4.0):
        r1 = nongauss.measure_all(states.make_phav(m))
        r2 = nongauss.measure_all(states.make_two_phav(states.TwoPhavParams.from_total(m, 0.0)))
        ok &= r2.eps_a < r1.eps_a and r2.eps_b < r1.eps_b and r2.eps_c < r1.eps_c
    for s_tot in (0.5, 1.0, 2.0):
        rows = [
            nongauss.measure_all(states.make_two_phav(states.TwoPhavParams.from_total(s_tot, u)))
            for u in np.linspace(1.0, 0.0, 11)
        ]
        for name in ("eps_a", "eps_b", "eps_c"):
            ok &= bool(np.all(np.diff([getattr(r, name) for r in rows]) <= 0))
    grid = np.linspace(0.1, 10.0, 25)
    reports = [nongauss.measure_all(states.make_phav(m)) for m in grid]
    for r in reports:
        ok &= min(r.eps_a, r.eps_b, r.eps_c) >= 0
    signs = np.sign(np.diff([[r.eps_a, r.eps_b, r.eps_c] for r in reports], axis=0))
    ok &= bool(np.all(signs == signs[:, :1]))
    return _bool_error(ok), 0.5


def check_thermal_zero():
    err = 0.0
    for m in (0.5, 2.0, 7.3):
        r = nongauss.measure_all(states.make_thermal(m))
        err = max(err, abs(r.eps_a), abs(r.eps_b), abs(r.eps_c))
    return err, 1e-12


def check_loss_closure():
    err = 0.0
    for eta in (0.5, 0.8):
        for p in (
            states.PhavParams(0.5),
            states.PhavParams(2.0),
            states.TwoPhavParams(0.5, 0.5),
            states.TwoPhavParams(1.0, 1.0),
        ):
            thinned = optics.apply_loss(states.make_state(p), eta).probs
            rescaled = states.make_state(optics.lossy(p, eta)).probs
            size = max(thinned.size, rescaled.size)
            diff = np.pad(thinned, (0, size - thinned.size)) - np.pad(
                rescaled, (0, size - rescaled.size)
            )
            err = max(err, float(np.max(np.abs(diff))))
    return err, 1e-10


def check_mutual_information():
    grid = np.linspace(0.2, 10.0, 50)
    mi = [optics.mutual_information(states.PhavParams(m)) for m in grid]
    ok = min(mi) > 0 and bool(np.all(np.diff(mi) > 0))
    ok &= optics.mutual_information(states.PhavParams(0.0)) == 0.0
    err = 0.0
    for r in (0.25, 0.5, 0.8):
        a = optics.mutual_information(optics.ratio_state(1.0, r))
        b = optics.mutual_information(optics.ratio_state(1.0, 1.0 / r))
        err = max(err, abs(a - b))
        ok &= a > 0
    return max(err, _bool_error(ok)), 1e-12


def check_joint_factorization():
    st = states.make_phav(2.0)
    joint = optics.joint_split_counts(st, 0.5)
    marg = states.poisson_probs(1.0, st.cutoff)
    return float(np.max(np.abs(joint - np.outer(marg, marg)))), 1e-12


def check_gk():
    err = 0.0
    for u in np.linspace(0.0, 1.0, 11):
        p = states.TwoPhavParams.from_total(1.0, u)
        st = states.make_two_phav(p)
        mean = st.mean
        for k in range(1, 9):
            err = max(err, abs(optics.g_k(p, k) - states.normally_ordered_moment(st, k) / mean**k))
    bal = states.TwoPhavParams(1.0, 1.0)
    for k in range(9):
        err = max(err, abs(optics.g_k(bal, k) - specfun.double_factorial_odd(k) / math.factorial(k)))
        err = max(err, abs(optics.g_k(states.TwoPhavParams(1.0, 0.0), k) - 1.0))
    return err, 1e-8


def check_reconstruction(quick=False):
    radii = np.linspace(0.0, 3.0, 7 if quick else 16)
    cfg = reconstruct.ReconstructionConfig(probe_radii=tuple(radii))
    worst = 0.0
    cases = [states.PhavParams(0.5), states.PhavParams(1.97)]
    if not quick:
        cases.append(states.TwoPhavParams(1.03, 0.91))
    for p in cases:
        table = reconstruct.reconstruct_section(cfg, p)
        for _, rec, model, bound in table.rows:
            # error relative to the reported bound; must stay below 1
            worst = max(worst, abs(rec - model) / bound)
        if table.max_bound >= 1e-6:
            worst = max(worst, 2.0)
    return worst, 1.0


def check_loss_covariance():
    radii = np.linspace(0.0, 3.0, 7)
    err = 0.0
    for eta in (0.5, 0.8):
        cfg = reconstruct.ReconstructionConfig(probe_radii=tuple(radii), eta=eta)
        table = reconstruct.reconstruct_section(cfg, states.PhavParams(1.97))
        det = states.PhavParams(1.97 * eta)
        for radius, rec, _, _ in table.rows:
            err = max(err, abs(rec - phasespace.wigner(det, radius) / math.pi))
    return err, 1e-10


def check_truncation_honesty():
    worst = 0.0
    for p, alpha in ((states.PhavParams(1.97), 1.2), (states.PhavParams(1.0), 0.0)):
        dist = reconstruct.displaced_photocounts_phav(p, alpha)
        for m_bar in (4, 8, 12, 20):
            a = reconstruct.wigner_from_counts(dist, m_bar)
            b = reconstruct.wigner_from_counts(dist, 2 * m_bar)
            worst = max(worst, abs(a.value - b.value) / a.trunc_bound)
    return worst, 1.0


CHECKS = [
    ("specfun: I0 vs ascending series", check_i0_series, True),
    ("specfun: Laguerre generating function", check_laguerre_generating, True),
    ("specfun: 1F1(1/2;1;z) vs I0", check_hyp1f1_bessel, True),
    ("states: normalization", check_normalization, True),
    ("states: PHAV purity closed form", check_purity_closed_form, True),
    ("states: PHAV purity decreasing", check_purity_decreasing, True),
    ("states: 2-PHAV closed/quadrature/phase", check_two_phav_routes, True),
    ("states: 2-PHAV exact moment series", check_moment_series_small, False),
    ("states: PHAV moments M^k", check_phav_moments, True),
    ("phasespace: CF series vs closed form", check_cf_dual_route, True),
    ("phasespace: CF transform vs W(z;s)", check_cf_transform, False),
    ("phasespace: quasiprob normalization", check_quasiprob_normalization, False),
    ("phasespace: rho_nn from CF", check_marginal_consistency, True),
    ("phasespace: dip (PHAV) and peak (2-PHAV)", check_dip_and_peak, True),
    ("nongauss: ordering properties", check_nongauss_properties, False),
    ("nongauss: thermal gives zero", check_thermal_zero, True),
    ("optics: loss closure", check_loss_closure, True),
    ("optics: mutual information shape", check_mutual_information, False),
    ("optics: joint counts factorize", check_joint_factorization, True),
    ("optics: g^(k) vs Fock moments", check_gk, True),
    ("reconstruct: ideal exactness", check_reconstruction, False),
    ("reconstruct: loss covariance", check_loss_covariance, True),
    ("reconstruct: truncation bound honesty", check_truncation_honesty, True),
]

_TAKES_QUICK = {check_cf_transform, check_quasiprob_normalization, check_reconstruction}


def run_checks(quick=False, perturb=0.0):
    """Run the registered checks; ``quick`` restricts to the fast subset.

    ``perturb`` is added to ``rho_00`` inside the normalization check only,
    as a negative control.
    """
    results = []
    for name, fn, in_quick in CHECKS:
        if quick and not in_quick:
            continue
        start = time.perf_counter()
        if fn is check_normalization:
            error, tol = fn(perturb)
        elif fn in _TAKES_QUICK:
            error, tol = fn(quick)
        else:
            error, tol = fn()
        results.append(CheckResult(name, float(error), tol, time.perf_counter() - start))
    return results
