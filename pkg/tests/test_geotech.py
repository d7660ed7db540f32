import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vibroident.errors import DomainError, GeometryError, ParseError
from vibroident.geotech import (
    CptSounding,
    Footprint,
    bearing_capacity,
    bearing_utilization,
    parse_cpt_csv,
    vs_andrus,
    vs_average,
    vs_mayne,
    vs_profile_csv,
    vs_robertson,
)


class TestMayne:
    def test_unit_friction(self):
        assert vs_mayne(1.0) == pytest.approx(18.5)

    def test_hundred_kpa(self):
        assert vs_mayne(100.0) == pytest.approx(256.1)

    def test_zero_rejected(self):
        with pytest.raises(DomainError):
            vs_mayne(0.0)

    @given(st.floats(min_value=0.1, max_value=1e4))
    @settings(max_examples=30, deadline=None)
    def test_monotone(self, fs):
        assert vs_mayne(fs * 1.5) > vs_mayne(fs)


class TestAndrus:
    def test_all_ones(self):
        assert vs_andrus(1.0, 1.0, 1.0) == pytest.approx(3.62)

    def test_site_values(self):
        # direct evaluation: 2.62*5750^0.395 + 2^0.912 * 5.8^0.124
        assert vs_andrus(5750.0, 2.0, 5.8) == pytest.approx(82.39155193283261, rel=1e-12)

    def test_multiplicative_variant(self):
        assert vs_andrus(5750.0, 2.0, 5.8, multiplicative=True) == pytest.approx(
            187.31584561673395, rel=1e-12
        )

    def test_sf_one_indifferent_to_exponent(self):
        assert vs_andrus(100.0, 2.0, 3.0, sf=1.0, a=0.0) == vs_andrus(
            100.0, 2.0, 3.0, sf=1.0, a=1.0
        )

    def test_domain(self):
        with pytest.raises(DomainError):
            vs_andrus(0.0, 1.0, 1.0)


class TestRobertson:
    def test_pa_cancellation(self):
        # qt - sigma_v = Pa, Ic = 0: sqrt(10^1.68) = 6.9183
        assert vs_robertson(101.325 + 50.0, 50.0, 0.0) == pytest.approx(
            6.918309709189365, rel=1e-12
        )

    def test_equal_stress_rejected(self):
        with pytest.raises(DomainError):
            vs_robertson(100.0, 100.0, 1.5)

    def test_ic_decade_step(self):
        # increasing Ic by 2/0.55 multiplies the result by 10
        v1 = vs_robertson(500.0, 100.0, 1.0)
        v2 = vs_robertson(500.0, 100.0, 1.0 + 2.0 / 0.55)
        assert v2 == pytest.approx(10.0 * v1, rel=1e-12)


class TestAverage:
    def test_mean_of_three(self):
        s = CptSounding(depth=[5.8], qt=[5750.0], fs=[100.0], sigma_v=[90.0], ic=[2.0])
        rows = vs_average(s)
        r = rows[0]
        assert not r.gap
        assert r.vs_avg == pytest.approx((r.vs_mayne + r.vs_andrus + r.vs_robertson) / 3)
        assert min(r.vs_mayne, r.vs_andrus, r.vs_robertson) <= r.vs_avg
        assert r.vs_avg <= max(r.vs_mayne, r.vs_andrus, r.vs_robertson)

    def test_gap_flag_on_bad_friction(self):
        s = CptSounding(depth=[1.0, 2.0], qt=[500.0, 600.0], fs=[0.0, 20.0],
                        sigma_v=[18.0, 36.0], ic=[2.0, 2.0])
        rows = vs_average(s)
        assert rows[0].gap and rows[0].vs_avg is None
        assert not rows[1].gap

    def test_realistic_profile_in_reported_envelope(self):
        # stiff-site inputs: means should fall between the loosest and
        # stiffest velocities reported for these formations (185-834 m/s)
        depth = np.arange(1.0, 10.0, 1.0)
        qt = 4000.0 + 1500.0 * depth
        fs = 40.0 + 25.0 * depth
        sigma_v = 18.0 * depth
        ic = np.full_like(depth, 1.8)
        rows = vs_average(CptSounding(depth=depth, qt=qt, fs=fs, sigma_v=sigma_v, ic=ic))
        mean_vs = np.mean([r.vs_avg for r in rows])
        assert 185.0 <= mean_vs <= 834.0


class TestBearing:
    def test_surface(self):
        assert bearing_capacity(0.0) == 191.0

    def test_one_meter(self):
        assert bearing_capacity(1.0) == 348.0

    def test_cap(self):
        assert bearing_capacity(5.0) == 479.0
        assert bearing_capacity(100.0) == 479.0

    def test_negative_rejected(self):
        with pytest.raises(DomainError):
            bearing_capacity(-0.1)

    def test_continuity_at_cap(self):
        d_cap = (479.0 - 191.0) / 157.0
        assert bearing_capacity(d_cap - 1e-9) == pytest.approx(479.0, abs=1e-5)
        assert bearing_capacity(d_cap + 1e-9) == 479.0


class TestUtilization:
    def test_full_capacity(self):
        fp = Footprint(10.0, 10.0)
        force = bearing_capacity(6.0) * fp.net_area
        assert bearing_utilization(force, fp, 6.0) == pytest.approx(100.0)

    def test_reaction_mass_case(self):
        # 1360 kN over the block footprint less the default shear-key
        # exclusion: about half a percent of capacity at 6 m depth
        fp = Footprint(33.12, 16.91, excluded_area=20.0)
        util = bearing_utilization(1360.0, fp, 6.0)
        assert util == pytest.approx(0.45, abs=0.1)

    def test_zero_force(self):
        assert bearing_utilization(0.0, Footprint(10.0, 10.0), 2.0) == 0.0

    def test_bad_area(self):
        with pytest.raises(GeometryError):
            bearing_utilization(10.0, Footprint(1.0, 1.0, excluded_area=2.0), 1.0)

    @given(st.floats(min_value=0.0, max_value=1e5))
    @settings(max_examples=30, deadline=None)
    def test_linear_in_force(self, f):
        fp = Footprint(33.12, 16.91, excluded_area=20.0)
        base = bearing_utilization(1.0, fp, 6.0)
        assert bearing_utilization(f, fp, 6.0) == pytest.approx(f * base, rel=1e-9)


class TestCptCsv:
    CSV = (
        "depth_m,qt_kpa,fs_kpa,sigma_v_kpa,ic\n"
        "1.0,500,20,18,2.0\n"
        "2.0,900,0,36,2.1\n"
        "3.0,1500,55,54,1.9\n"
    )

    def test_parse_and_profile(self):
        sounding = parse_cpt_csv(self.CSV)
        assert len(sounding) == 3
        rows = vs_average(sounding)
        assert rows[1].gap and not rows[0].gap
        text = vs_profile_csv(rows)
        lines = text.strip().splitlines()
        assert lines[0].startswith("depth_m,")
        assert len(lines) == 4
        assert lines[2].endswith(",1")  # gap row flagged

    def test_values_match_direct_calls(self):
        sounding = parse_cpt_csv(self.CSV)
        rows = vs_average(sounding)
        assert rows[0].vs_mayne == pytest.approx(vs_mayne(20.0), rel=1e-12)
        assert rows[0].vs_andrus == pytest.approx(vs_andrus(500.0, 2.0, 1.0), rel=1e-12)
        assert rows[0].vs_robertson == pytest.approx(vs_robertson(500.0, 18.0, 2.0), rel=1e-12)

    def test_bad_header(self):
        with pytest.raises(ParseError):
            parse_cpt_csv("a,b,c\n1,2,3\n")
