"""Acceptance criteria, one test each, at their stated tolerances.

Each test records a PASS/FAIL line with its worst error and runtime; the
lines are printed in the terminal summary (see conftest.py) and also when
this file is run directly with ``python3 tests/test_acceptance.py``.
"""

import math
import subprocess
import sys
import time
from pathlib import Path

import mpmath
import numpy as np
import pytest
import scipy.special as sc

from phavkit import cli, nongauss, optics, phasespace, reconstruct, states
from phavkit.phasespace import SOrderedPoint
from phavkit.states import PhavParams, TwoPhavParams

RESULTS = []


def record(number, title, ok, detail, seconds):
    line = f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {title}: {detail} ({seconds:.2f}s)"
    RESULTS.append(line)
    return line


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.start


def pad_diff(a, b):
    n = max(a.size, b.size)
    return float(np.max(np.abs(np.pad(a, (0, n - a.size)) - np.pad(b, (0, n - b.size)))))


def test_01_purity_closed_form():
    with Timer() as t:
        err = 0.0
        for m in (0.1, 0.5, 1.0, 2.0, 5.0, 10.0):
            fock_sum = states.purity(states.make_phav(m))
            err = max(err, abs(fock_sum - states.phav_purity(m)), abs(fock_sum - sc.i0e(2 * m)))
    ok = err < 1e-10 and t.seconds < 1.0
    print(record(1, "purity closed form", ok, f"max err {err:.2e} < 1e-10", t.seconds))
    assert ok


def test_02_cf_dual_route():
    with Timer() as t:
        err = 0.0
        for m in (0.5, 1.97):
            for s in (-1.0, 0.0, 1.0):
                for r in np.linspace(0.0, 4.0, 20):
                    pt = SOrderedPoint(r, s)
                    err = max(err, abs(phasespace.phav_cf_series(m, pt) - phasespace.phav_cf(m, pt)))
    ok = err < 1e-10 and t.seconds < 1.0
    print(record(2, "CF series vs closed form", ok, f"max err {err:.2e} < 1e-10", t.seconds))
    assert ok


def test_03_quasiprob_transform():
    with Timer() as t:
        err = 0.0
        for m in (0.5, 1.97):
            for s in (-1.0, 0.0):
                for r in np.linspace(0.0, 4.0, 41):
                    pt = SOrderedPoint(r, s)
                    err = max(err, abs(phasespace.quasiprob_from_cf(m, pt) - phasespace.phav_quasiprob(m, pt)))
    ok = err < 1e-8 and t.seconds < 10.0
    print(record(3, "Hankel transform of CF vs W(z;s)", ok, f"max err {err:.2e} < 1e-8", t.seconds))
    assert ok


def _mp_moment_series(part, n, dps=50):
    # balanced: <a^+k a^k> = s^k (2k-1)!!/k!, rho_n = (1/n!) sum_j (-1)^j/j! <a^+(n+j) a^(n+j)>
    mpmath.mp.dps = dps
    s = mpmath.mpf(2 * part)
    total = mpmath.mpf(0)
    for j in range(200):
        k = n + j
        mom = s**k * mpmath.fac2(2 * k - 1) / mpmath.factorial(k)
        total += (-1) ** j * mom / mpmath.factorial(j)
    return float(total / mpmath.factorial(n))


def test_04_two_phav_triple_route():
    with Timer() as t:
        err_routes = err_moments = err_series = err_mom = 0.0
        for m in (0.5, 1.0, 2.0):
            p = TwoPhavParams(m, m, 0.5)
            closed = states.make_two_phav(p, route="closed").probs
            quad = states.make_two_phav(p, route="quadrature").probs
            phase = states.make_two_phav(p, route="phase").probs
            err_routes = max(err_routes, np.max(np.abs(closed[:31] - quad[:31])),
                             np.max(np.abs(closed[:31] - phase[:31])))
            # rho_nn rebuilt from the normally ordered moments, exact arithmetic
            for n in range(31):
                err_moments = max(err_moments, abs(states.moment_series_rho(p, n) - closed[n]))
            st = states.make_two_phav(p)
            for k in range(1, 9):
                rel = abs(states.normally_ordered_moment(st, k) / states.two_phav_moment(p, k) - 1)
                err_mom = max(err_mom, rel)
        for m in (0.1, 0.25):
            p = TwoPhavParams(m, m, 0.5)
            closed = states.make_two_phav(p, route="closed").probs
            for n in range(8):
                err_series = max(err_series, abs(_mp_moment_series(p.part1, n) - closed[n]))
    err = max(err_routes, err_moments, err_series, err_mom)
    ok = err < 1e-8 and t.seconds < 30.0
    detail = (f"routes {err_routes:.1e}, moment series {err_moments:.1e}, "
              f"extended precision {err_series:.1e}, moments {err_mom:.1e} < 1e-8")
    print(record(4, "2-PHAV triple route", ok, detail, t.seconds))
    assert ok


def test_05_gk_anchors():
    with Timer() as t:
        bal = TwoPhavParams(1.0, 1.0)
        exact = (optics.g_k(bal, 2), optics.g_k(bal, 3), optics.g_k(bal, 4)) == (1.5, 2.5, 4.375)
        st = states.make_two_phav(bal)
        err = 0.0
        for k, ref in ((2, 1.5), (3, 2.5), (4, 4.375)):
            err = max(err, abs(states.normally_ordered_moment(st, k) / st.mean**k - ref))
        single = TwoPhavParams(2.0, 0.0)
        st1 = states.make_two_phav(single)
        for k in range(1, 9):
            err = max(err, abs(optics.g_k(single, k) - 1.0),
                      abs(states.normally_ordered_moment(st1, k) / st1.mean**k - 1.0))
    ok = exact and err < 1e-8
    print(record(5, "g^(k) anchors", ok, f"closed forms exact={exact}, Fock-moment err {err:.2e} < 1e-8", t.seconds))
    assert ok


def test_06_reconstruction_exactness():
    with Timer() as t:
        cfg = reconstruct.ReconstructionConfig()
        worst_ratio = worst_bound = 0.0
        for p in (PhavParams(1.97), TwoPhavParams(1.03, 0.91)):
            table = reconstruct.reconstruct_section(cfg, p)
            for radius, rec, _, bound in table.rows:
                exact = phasespace.wigner(p, radius) / math.pi
                worst_ratio = max(worst_ratio, abs(rec - exact) / bound)
                worst_bound = max(worst_bound, bound)
    ok = worst_ratio <= 1.0 and worst_bound < 1e-6 and t.seconds < 30.0
    detail = f"max |err|/bound {worst_ratio:.2f} <= 1, max bound {worst_bound:.1e} < 1e-6"
    print(record(6, "reconstruction exactness", ok, detail, t.seconds))
    assert ok


def test_07_dip_and_peak():
    with Timer() as t:
        radii = np.linspace(0.0, 3.0, 301)
        phav = np.array([phasespace.wigner(PhavParams(1.97), r) for r in radii])
        two = np.array([phasespace.wigner(TwoPhavParams(1.03, 0.91), r) for r in radii])
        i = int(np.argmax(phav))
        interior = 0 < i < radii.size - 1 and phav[i] > phav[i - 1] and phav[i] > phav[i + 1]
        peak_at_origin = int(np.argmax(two)) == 0 and two[0] > two[1]
    ok = interior and peak_at_origin
    detail = f"PHAV max at |z|={radii[i]:.2f} (W(0)={phav[0]:.3f} < {phav[i]:.3f}); 2-PHAV max at |z|={radii[int(np.argmax(two))]:.2f}"
    print(record(7, "dip/peak signature", ok, detail, t.seconds))
    assert ok


def test_08_nongauss_ordering():
    with Timer() as t:
        def eps(st):
            r = nongauss.measure_all(st)
            return np.array([r.eps_a, r.eps_b, r.eps_c])

        grid = np.linspace(0.05, 10.0, 40)
        nonneg = all(np.all(eps(states.make_phav(m)) >= 0) for m in grid)
        nonneg &= all(np.all(eps(states.make_two_phav(TwoPhavParams.from_total(m, 0.0))) >= 0) for m in grid)
        thermal = max(np.max(np.abs(eps(states.make_thermal(m)))) for m in (0.1, 0.5, 1.0, 2.0, 5.0, 10.0))
        below = all(
            np.all(eps(states.make_two_phav(TwoPhavParams.from_total(m, 0.0))) < eps(states.make_phav(m)))
            for m in (0.5, 1.0, 2.0, 4.0)
        )
        monotone = True
        for s_tot in (0.5, 1.0, 2.0):
            rows = np.array([eps(states.make_two_phav(TwoPhavParams.from_total(s_tot, u)))
                             for u in np.linspace(1.0, 0.0, 11)])
            monotone &= bool(np.all(np.diff(rows, axis=0) <= 0))
    ok = nonneg and thermal <= 1e-12 and below and monotone and t.seconds < 10.0
    detail = f"eps>=0 {nonneg}, thermal {thermal:.1e}, 2-PHAV<PHAV {below}, non-increasing in balancing {monotone}"
    print(record(8, "non-Gaussianity ordering", ok, detail, t.seconds))
    assert ok


def _poisson_entropy(m):
    k = np.arange(int(m + 20 * math.sqrt(m + 1) + 40))
    logp = -m + k * math.log(m) - sc.gammaln(k + 1)
    p = np.exp(logp)
    return -math.fsum(p * logp)


def test_09_mutual_information():
    with Timer() as t:
        vac = optics.mutual_information(PhavParams(0.0))
        grid = np.linspace(0.1, 10.0, 100)
        mi = np.array([optics.mutual_information(PhavParams(m)) for m in grid])
        ref = np.array([2 * _poisson_entropy(m / 2) - _poisson_entropy(m) for m in grid])
        err = float(np.max(np.abs(mi - ref)))
        shape = bool(np.all(mi > 0) and np.all(np.diff(mi) > 0))
        sym = 0.0
        positive = True
        for r in np.linspace(0.1, 0.95, 12):
            a = optics.mutual_information(optics.ratio_state(2.0, r))
            b = optics.mutual_information(optics.ratio_state(2.0, 1 / r))
            sym = max(sym, abs(a - b))
            positive &= bool(math.isfinite(a) and a > 0)
    ok = vac == 0.0 and err < 1e-10 and shape and positive and sym < 1e-10
    detail = f"MI(vac)={vac}, entropy-sum err {err:.1e}, increasing {shape}, R<->1/R err {sym:.1e}"
    print(record(9, "mutual information", ok, detail, t.seconds))
    assert ok


def test_10_loss_closure():
    with Timer() as t:
        err = 0.0
        for eta in (0.5, 0.8):
            for p in (PhavParams(0.5), PhavParams(1.97), PhavParams(5.0),
                      TwoPhavParams(0.5, 0.5), TwoPhavParams(1.0, 1.0), TwoPhavParams(2.0, 2.0)):
                thinned = optics.apply_loss(states.make_state(p), eta).probs
                err = max(err, pad_diff(thinned, states.make_state(p.scaled(eta)).probs))
    ok = err < 1e-10
    print(record(10, "loss-model closure", ok, f"max err {err:.2e} < 1e-10", t.seconds))
    assert ok


def test_11_sampling_fidelity():
    with Timer() as t:
        st = states.make_phav(1.0)
        counts = optics.sample_photocounts(st, 1_000_000, 1234)
        fid = states.count_fidelity(st, counts / counts.sum())
        again = np.array_equal(counts, optics.sample_photocounts(st, 1_000_000, 1234))
    ok = fid >= 0.9999 and again
    print(record(11, "sampling fidelity", ok, f"fidelity {fid:.7f} >= 0.9999, deterministic {again}", t.seconds))
    assert ok


REPLAY_RUNS = [
    ["photon-dist", "--purity", "0.13,0.20,0.39"],
    ["photon-dist", "--state", "2phav", "--purity", "0.09,0.13,0.21", "--samples", "100000", "--seed", "5"],
    ["wigner", "--mean", "1.97", "--xi", "0.999"],
    ["wigner", "--state", "2phav", "--mean1", "1.03", "--mean2", "0.91", "--xi-p", "0.95", "--xi-s", "1"],
    ["nongauss", "--grid", "0:4:21"],
    ["nongauss", "--state", "2phav", "--over", "u", "--mean", "1", "--grid", "1:0:11"],
    ["mutual-info", "--grid", "0:10:21"],
    ["mutual-info", "--state", "2phav", "--over", "ratio", "--mean", "2", "--grid", "0.2:5:13"],
    ["gk", "--state", "2phav", "--over", "u", "--mean", "1"],
    ["reconstruct", "--mean", "1.97", "--xi", "0.999", "--grid", "0:3:13"],
    ["sample", "--mean", "1", "--samples", "100000", "--seed", "1234"],
]


def test_12_end_to_end_determinism(tmp_path):
    with Timer() as t:
        proc = subprocess.run([sys.executable, "-m", "phavkit", "validate"],
                              capture_output=True, text=True, check=False)
        validate_ok = proc.returncode == 0
        identical = 0
        for i, argv in enumerate(REPLAY_RUNS):
            path = tmp_path / f"run{i}.csv"
            if cli.main(argv + ["--out", str(path)]) != 0:
                continue
            original = path.read_bytes()
            text, code = cli.regenerate(cli.read_embedded_config(original.decode()))
            if code == 0 and text.encode() == original:
                identical += 1
    ok = validate_ok and identical == len(REPLAY_RUNS)
    detail = f"validate exit {proc.returncode}, {identical}/{len(REPLAY_RUNS)} CSVs byte-identical on replay"
    print(record(12, "end-to-end determinism", ok, detail, t.seconds))
    if not validate_ok:
        print(proc.stdout)
    assert ok


if __name__ == "__main__":
    import tempfile

    for name, fn in sorted(globals().items()):
        if not name.startswith("test_"):
            continue
        try:
            if name == "test_12_end_to_end_determinism":
                with tempfile.TemporaryDirectory() as d:
                    fn(Path(d))
            else:
                fn()
        except AssertionError:
            pass
    print(f"{sum(line.startswith('[PASS]') for line in RESULTS)}/{len(RESULTS)} criteria passed")
