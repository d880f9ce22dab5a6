import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sidelink_sps import AnalyticParams, ConfigurationError, p_col_sps, p_col_spsla, sci_extra_bits

DEFAULTS = dict(n_subchannels=25, t1=1, t2=100, c1=5, c2=15)


class TestPColSpsla:
    def test_zero_load_is_zero(self):
        assert p_col_spsla(AnalyticParams(**DEFAULTS, cbr=0.0)) == 0.0

    def test_single_expiring_ue_is_zero(self):
        # n_subch * cbr / mean_counter == 1: only the UE itself expired
        assert p_col_spsla(AnalyticParams(**DEFAULTS, cbr=0.4)) == 0.0

    def test_pinned_value_at_half_load(self):
        # evaluated independently at high precision before implementation
        got = p_col_spsla(AnalyticParams(**DEFAULTS, cbr=0.5))
        assert got == pytest.approx(2.00060028015e-4, rel=1e-10)

    def test_cbr_one_rejected(self):
        with pytest.raises(ConfigurationError):
            AnalyticParams(**DEFAULTS, cbr=1.0)


class TestPColSps:
    def test_zero_load_is_zero(self):
        assert p_col_sps(AnalyticParams(**DEFAULTS, cbr=0.0)) == 0.0

    def test_pinned_value_at_half_load(self):
        got = p_col_sps(AnalyticParams(**DEFAULTS, cbr=0.5))
        assert got == pytest.approx(4.92589439193e-2, rel=1e-10)

    def test_single_subframe_window_reduces_to_closed_form(self):
        # T = 1 collapses the product to 1 - (1-p)^n'
        params = AnalyticParams(n_subchannels=25, t1=1, t2=1, c1=5, c2=15, cbr=0.5)
        p = params.pick_probability
        n = params.expiring_per_subframe
        assert p_col_sps(params) == pytest.approx(1.0 - (1.0 - p) ** n, rel=1e-12)

    def test_order_of_magnitude_gap(self):
        # the lookahead curve sits more than 10x below across the whole range
        for cbr in np.arange(0.1, 0.91, 0.05):
            params = AnalyticParams(**DEFAULTS, cbr=float(cbr))
            sps = p_col_sps(params)
            la = p_col_spsla(params)
            assert sps > 0
            assert la == 0.0 or sps / la > 10


@settings(max_examples=80, deadline=None)
@given(
    cbr_lo=st.floats(0.0, 0.94),
    delta=st.floats(0.001, 0.05),
    n_sub=st.integers(5, 50),
)
def test_monotone_in_load(cbr_lo, delta, n_sub):
    cbr_hi = min(cbr_lo + delta, 0.95)
    lo = AnalyticParams(n_subchannels=n_sub, t1=1, t2=100, c1=5, c2=15, cbr=cbr_lo)
    hi = AnalyticParams(n_subchannels=n_sub, t1=1, t2=100, c1=5, c2=15, cbr=cbr_hi)
    assert p_col_sps(hi) >= p_col_sps(lo) - 1e-15
    assert p_col_spsla(hi) >= p_col_spsla(lo) - 1e-15


@settings(max_examples=80, deadline=None)
@given(
    cbr=st.floats(0.0, 0.95),
    n_sub=st.integers(2, 60),
    t2=st.integers(2, 120),
)
def test_full_window_dominates_single_subframe(cbr, n_sub, t2):
    params = AnalyticParams(n_subchannels=n_sub, t1=1, t2=t2, c1=5, c2=15, cbr=cbr)
    assert p_col_sps(params) >= p_col_spsla(params) - 1e-15


class TestMicroMonteCarlo:
    def test_matches_one_shot_simulation(self):
        # simulate a single reselection under the model's own assumptions:
        # per window subframe, a stochastically rounded count of contenders
        # each landing on the chosen resource with probability (T-k)/T * p
        params = AnalyticParams(**DEFAULTS, cbr=0.5)
        p = params.pick_probability
        n = params.expiring_per_subframe
        t = params.window
        lo = math.floor(n)
        frac = n - lo
        rng = np.random.default_rng(123)
        trials = 1_000_000
        chunk = 100_000
        total = 0.0
        total_sq = 0.0
        for _ in range(trials // chunk):
            survive = np.ones(chunk)
            for k in range(t):
                contenders = lo + (rng.random(chunk) < frac)
                survive *= (1.0 - (t - k) / t * p) ** contenders
            collide = 1.0 - survive
            total += collide.sum()
            total_sq += (collide ** 2).sum()
        mean = total / trials
        var = total_sq / trials - mean ** 2
        se = math.sqrt(var / trials)
        assert abs(mean - p_col_sps(params)) < 3 * max(se, 1e-12)


class TestSciExtraBits:
    def test_reference_points(self):
        assert sci_extra_bits(25) == 9
        assert sci_extra_bits(25, include_offset=True) == 19
        assert sci_extra_bits(1) == 0

    def test_invalid_input(self):
        with pytest.raises(ConfigurationError):
            sci_extra_bits(0)

    def test_exact_against_big_integer_oracle(self):
        # smallest b with 2**b >= n(n+1)/2, found by direct comparison
        for n in range(1, 1001):
            pairs = n * (n + 1) // 2
            b = 0
            while 2 ** b < pairs:
                b += 1
            assert sci_extra_bits(n) == b
            assert sci_extra_bits(n, include_offset=True) == b + 10

    def test_nondecreasing(self):
        values = [sci_extra_bits(n) for n in range(1, 1001)]
        assert all(b >= a for a, b in zip(values, values[1:]))
