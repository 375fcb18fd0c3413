import math

import numpy as np
import pytest
import scipy.special as sc
import scipy.stats as ss
from hypothesis import given, settings
from hypothesis import strategies as st

from phavkit import nongauss as ng
from phavkit import states
from phavkit.states import TwoPhavParams


def eps_all(state):
    r = ng.measure_all(state)
    return np.array([r.eps_a, r.eps_b, r.eps_c])


class TestReference:
    def test_means(self):
        assert ng.reference_thermal(states.make_vacuum()).mean == 0.0
        assert ng.reference_thermal(states.make_phav(2.0)).mean == pytest.approx(2.0)
        p = TwoPhavParams(1.0, 1.0)
        assert ng.reference_thermal(states.make_two_phav(p)).mean == pytest.approx(p.s_tot)

    def test_overlap_closed_form(self):
        for m in (0.3, 1.0, 4.0):
            assert ng.overlap(states.make_phav(m)) == pytest.approx(ng.phav_thermal_overlap(m), rel=1e-12)


class TestMeasures:
    def test_thermal_zero(self):
        for m in (0.0, 0.5, 2.0, 9.0):
            assert np.all(np.abs(eps_all(states.make_thermal(m))) <= 1e-12)

    def test_vacuum_and_small_mean(self):
        assert np.all(eps_all(states.make_phav(0.0)) == 0.0)
        assert np.all(eps_all(states.make_phav(1e-6)) < 1e-6)

    def test_hs_phav_closed_forms(self):
        m = 1.0
        mu = math.exp(-2 * m) * sc.i0(2 * m)
        ref = (mu + 1 / (2 * m + 1) - 2 * ng.phav_thermal_overlap(m)) / (2 * mu)
        assert ng.eps_hilbert_schmidt(states.make_phav(m)) == pytest.approx(ref, rel=1e-12)

    def test_relative_entropy_fock_one(self):
        assert ng.eps_relative_entropy(states.make_fock(1)) == pytest.approx(2 * math.log(2))

    def test_relative_entropy_phav(self):
        ref = states.thermal_entropy(1.0) - ss.poisson(1.0).entropy()
        assert ng.eps_relative_entropy(states.make_phav(1.0)) == pytest.approx(ref, rel=1e-12)

    def test_fidelity_brute_force(self):
        n = np.arange(200)
        pois = ss.poisson.pmf(n, 2.0)
        geom = 2.0**n / 3.0 ** (n + 1)
        ref = 1.0 - math.fsum(np.sqrt(pois * geom))
        assert ng.eps_fidelity(states.make_phav(2.0)) == pytest.approx(ref, abs=1e-13)

    @given(st.floats(0.0, 12.0))
    @settings(max_examples=40, deadline=None)
    def test_non_negative(self, m):
        assert np.all(eps_all(states.make_phav(m)) >= 0)

    def test_balanced_below_phav(self):
        for m in (0.5, 1.0, 2.0, 4.0):
            bal = eps_all(states.make_two_phav(TwoPhavParams.from_total(m, 0.0)))
            assert np.all(bal < eps_all(states.make_phav(m)))

    @pytest.mark.parametrize("s_tot", [0.5, 1.0, 2.0])
    def test_non_increasing_toward_balance(self, s_tot):
        rows = [eps_all(states.make_two_phav(TwoPhavParams.from_total(s_tot, u)))
                for u in np.linspace(1.0, 0.0, 11)]
        assert np.all(np.diff(np.array(rows), axis=0) <= 0)

    def test_phav_curves_increase(self):
        rows = np.array([eps_all(states.make_phav(m)) for m in np.linspace(0.1, 4.0, 40)])
        assert np.all(np.diff(rows, axis=0) > 0)

    def test_report_json(self):
        r = ng.measure_all(states.make_phav(1.0))
        assert '"eps_a"' in r.to_json()
        assert r.reference_mean == pytest.approx(1.0)
