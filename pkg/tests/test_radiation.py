import math

import numba
import numpy as np
import pytest

from rooftopsolar.grids import GridError
from rooftopsolar.horizon import HorizonProfile, horizon_angles
from rooftopsolar.radiation import (SOLAR_CONSTANT_W_M2, AtmosphereParams,
                                    CellContext, cell_insolation,
                                    diffuse_insolation, direct_insolation,
                                    global_insolation_grid, incidence_cosine,
                                    relative_optical_path, sky_global_normal)
from rooftopsolar.sunsky import (SunSector, TimeConfig, build_sky_map,
                                 build_sun_map)
from rooftopsolar.terrain import aspect as aspect_of
from rooftopsolar.terrain import slope as slope_of

from conftest import make_grid
from test_horizon import brute_gap_fraction

OPEN_PROFILE = HorizonProfile(np.zeros(32))


def one_sector(zenith, azimuth, duration, dz=10.0, da=10.0):
    return SunSector(zenith_deg=zenith, azimuth_deg=azimuth,
                     zenith_bounds=(max(zenith - dz / 2, 0.0),
                                    min(zenith + dz / 2, 90.0)),
                     azimuth_bounds=(azimuth - da / 2, azimuth + da / 2),
                     duration_h=duration, sample_count=1)


def flat_ctx(elevation=0.0, slope=0.0, aspect=-1.0, profile=OPEN_PROFILE):
    return CellContext(elevation_m=elevation, slope_deg=slope,
                       aspect_deg=aspect, horizon=profile, latitude_deg=23.0)


class TestOpticalPath:
    def test_zenith_sea_level(self):
        assert relative_optical_path(0.0, 0.0) == 1.0

    def test_sixty_degrees(self):
        assert relative_optical_path(60.0, 0.0) == pytest.approx(2.0)

    def test_elevation_correction(self):
        # exp(-0.000118*1000 - 1.638e-9*1000^2) = exp(-0.119638)
        assert relative_optical_path(0.0, 1000.0) == pytest.approx(0.8873,
                                                                   abs=5e-4)

    def test_zenith_clamped_near_horizon(self):
        assert relative_optical_path(89.9, 0.0) == \
            relative_optical_path(80.0, 0.0)

    def test_invalid_zenith(self):
        with pytest.raises(ValueError):
            relative_optical_path(90.0)


class TestIncidenceCosine:
    def test_horizontal_surface(self):
        for zen in (0.0, 30.0, 75.0):
            assert incidence_cosine(zen, 123.0, 0.0, 45.0) == \
                pytest.approx(math.cos(math.radians(zen)))

    def test_panel_normal_to_sun(self):
        assert incidence_cosine(35.0, 140.0, 35.0, 140.0) == pytest.approx(1.0)

    def test_hand_computed_example(self):
        # cos30 cos20 + sin30 sin20 cos(180-90)
        got = incidence_cosine(30.0, 180.0, 20.0, 90.0)
        assert got == pytest.approx(0.8138, abs=2e-4)

    def test_backside_clamped(self):
        assert incidence_cosine(80.0, 0.0, 60.0, 180.0) == 0.0

    def test_flat_sentinel_treated_horizontal(self):
        assert incidence_cosine(40.0, 10.0, 55.0, -1.0) == \
            pytest.approx(math.cos(math.radians(40.0)))


class TestDirectInsolation:
    def test_all_factors_unity(self):
        sun_map = [one_sector(0.0, 180.0, 1.0)]
        atm = AtmosphereParams(0.3, 1.0)
        got = direct_insolation(flat_ctx(slope=0.0, aspect=-1.0), sun_map, atm)
        assert got == pytest.approx(1367.0)

    def test_attenuated_oblique_sector(self):
        # beta=0.5 at zenith 60 (m=2): 1367 * 0.25 * cos60
        sun_map = [one_sector(60.0, 180.0, 1.0)]
        got = direct_insolation(flat_ctx(), sun_map, AtmosphereParams(0.3, 0.5))
        assert got == pytest.approx(1367.0 * 0.25 * 0.5, rel=1e-12)

    def test_fully_shaded_is_zero(self):
        blocked = HorizonProfile(np.full(32, 90.0))
        sun_map = build_sun_map(23.0, TimeConfig(mode="month", month=3))
        got = direct_insolation(flat_ctx(profile=blocked), sun_map,
                                AtmosphereParams.ideal())
        assert got == 0.0

    def test_empty_sun_map_rejected(self):
        with pytest.raises(ValueError):
            direct_insolation(flat_ctx(), [], AtmosphereParams.ideal())

    def test_monotone_in_transmissivity(self):
        sun_map = build_sun_map(23.0, TimeConfig(mode="month", month=6))
        ctx = flat_ctx(slope=15.0, aspect=200.0)
        values = [direct_insolation(ctx, sun_map, AtmosphereParams(0.3, b))
                  for b in (0.2, 0.4, 0.6, 0.8)]
        assert all(b > a for a, b in zip(values, values[1:]))


class TestDiffuseInsolation:
    def test_zero_diffuse_proportion(self):
        sky = build_sky_map(8, 16)
        atm = AtmosphereParams(0.0, 0.5)
        assert diffuse_insolation(flat_ctx(), sky, atm, 5000.0) == 0.0

    def test_blocked_hemisphere(self):
        sky = build_sky_map(8, 16)
        blocked = HorizonProfile(np.full(32, 90.0))
        got = diffuse_insolation(flat_ctx(profile=blocked), sky,
                                 AtmosphereParams.ideal(), 5000.0)
        assert got == 0.0

    def test_single_sector_closed_form(self):
        (sec,) = sky = build_sky_map(1, 1)
        atm = AtmosphereParams(0.3, 0.5)
        rglb = 4000.0
        got = diffuse_insolation(flat_ctx(), sky, atm, rglb)
        want = rglb * 0.3 * 1.0 * math.cos(math.radians(sec.zenith_deg))
        assert got == pytest.approx(want, rel=1e-12)

    def test_negative_rglb_rejected(self):
        with pytest.raises(ValueError):
            diffuse_insolation(flat_ctx(), build_sky_map(2, 4),
                               AtmosphereParams.ideal(), -1.0)


def brute_force_cell(dem, slope, aspect, r, c, sun_map, sky_map, atm, rglb,
                     n_directions=32, max_radius=500.0, k=16):
    """Straight-line re-summation over every sector with explicit lattice
    gap sampling; shares no code with the grid kernel."""
    prof = horizon_angles(dem, r, c, n_directions, max_radius)
    sl = slope.values[r, c]
    asp = aspect.values[r, c]
    elev = dem.values[r, c]
    direct = 0.0
    for sec in sun_map:
        zen = min(sec.zenith_deg, 80.0)
        m = math.exp(-0.000118 * elev - 1.638e-9 * elev ** 2) / \
            math.cos(math.radians(zen))
        gap = brute_gap_fraction(prof, sec.zenith_bounds, sec.azimuth_bounds, k)
        if asp < 0:
            cos_inc = math.cos(math.radians(sec.zenith_deg))
        else:
            cos_inc = (math.cos(math.radians(sec.zenith_deg))
                       * math.cos(math.radians(sl))
                       + math.sin(math.radians(sec.zenith_deg))
                       * math.sin(math.radians(sl))
                       * math.cos(math.radians(sec.azimuth_deg - asp)))
        cos_inc = max(cos_inc, 0.0)
        direct += 1367.0 * atm.transmissivity ** m * sec.duration_h * gap * cos_inc
    diffuse = 0.0
    for sec in sky_map:
        gap = brute_gap_fraction(prof, sec.zenith_bounds, sec.azimuth_bounds, k)
        if asp < 0:
            cos_inc = math.cos(math.radians(sec.zenith_deg))
        else:
            cos_inc = (math.cos(math.radians(sec.zenith_deg))
                       * math.cos(math.radians(sl))
                       + math.sin(math.radians(sec.zenith_deg))
                       * math.sin(math.radians(sl))
                       * math.cos(math.radians(sec.azimuth_deg - asp)))
        cos_inc = max(cos_inc, 0.0)
        diffuse += rglb * atm.diffuse_proportion * sec.weight * gap * cos_inc
    return direct, diffuse


@pytest.fixture(scope="module")
def small_scene():
    z = np.array([
        [0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 3.0, 3.0, 0.0, 0.0],
        [0.0, 3.0, 9.0, 1.0, 0.0],
        [0.0, 0.0, 1.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 2.0],
    ])
    dem = make_grid(z)
    return dem, slope_of(dem), aspect_of(dem)


class TestGridEvaluation:
    def test_constant_dem_uniform_output(self):
        dem = make_grid(np.full((9, 9), 7.0))
        slope = slope_of(dem)
        aspect = aspect_of(dem)
        sun_map = build_sun_map(23.0, TimeConfig(mode="month", month=4))
        sky = build_sky_map(8, 16)
        direct, diffuse, total = global_insolation_grid(
            dem, slope, aspect, None, sun_map, sky, AtmosphereParams.ideal())
        vals = total.values
        assert np.all(vals > 0)
        assert np.ptp(vals) / vals.mean() < 1e-9

    def test_global_is_exact_sum(self, small_scene):
        dem, slope, aspect = small_scene
        sun_map = build_sun_map(23.0, TimeConfig(mode="month", month=1))
        sky = build_sky_map(4, 8)
        direct, diffuse, total = global_insolation_grid(
            dem, slope, aspect, None, sun_map, sky, AtmosphereParams.ideal())
        np.testing.assert_array_equal(total.values,
                                      direct.values + diffuse.values)

    def test_matches_bruteforce_oracle(self, small_scene):
        dem, slope, aspect = small_scene
        sun_map = build_sun_map(23.0, TimeConfig(mode="month", month=1))
        sky = build_sky_map(4, 8)
        atm = AtmosphereParams.ideal()
        direct, diffuse, _ = global_insolation_grid(
            dem, slope, aspect, None, sun_map, sky, atm)
        rglb = sky_global_normal(sun_map, atm,
                                 float(dem.values.mean()))
        for r in range(5):
            for c in range(5):
                want_dir, want_dif = brute_force_cell(
                    dem, slope, aspect, r, c, sun_map, sky, atm, rglb)
                assert direct.values[r, c] == pytest.approx(want_dir, rel=1e-6)
                assert diffuse.values[r, c] == pytest.approx(want_dif, rel=1e-6)

    def test_shading_monotonicity(self, small_scene):
        dem, slope, aspect = small_scene
        sun_map = build_sun_map(23.0, TimeConfig(mode="month", month=1))
        sky = build_sky_map(4, 8)
        atm = AtmosphereParams.ideal()
        _, _, base = global_insolation_grid(dem, slope, aspect, None,
                                            sun_map, sky, atm)
        taller = dem.like(dem.values.copy())
        taller.values[2, 2] = 30.0
        slope_t = slope_of(taller)
        aspect_t = aspect_of(taller)
        # shading comparison wants geometry fixed; only the obstacle grows
        _, _, shaded = global_insolation_grid(taller, slope, aspect, None,
                                              sun_map, sky, atm)
        others = np.ones((5, 5), dtype=bool)
        others[2, 2] = False
        assert np.all(shaded.values[others] <= base.values[others] + 1e-9)

    def test_geometry_mismatch_rejected(self, small_scene):
        dem, slope, aspect = small_scene
        other = make_grid(np.zeros((4, 4)))
        with pytest.raises(GridError):
            global_insolation_grid(dem, slope_of(other), aspect, None,
                                   build_sun_map(23.0, TimeConfig(mode="month",
                                                                  month=1)),
                                   build_sky_map(2, 4),
                                   AtmosphereParams.ideal())

    def test_thread_count_determinism(self, small_scene):
        dem, slope, aspect = small_scene
        sun_map = build_sun_map(23.0, TimeConfig(mode="month", month=5))
        sky = build_sky_map(8, 16)
        atm = AtmosphereParams.ideal()
        threads_hi = min(8, numba.config.NUMBA_NUM_THREADS)
        results = []
        for threads in (1, threads_hi):
            numba.set_num_threads(threads)
            results.append(global_insolation_grid(dem, slope, aspect, None,
                                                  sun_map, sky, atm))
        for a, b in zip(results[0], results[1]):
            np.testing.assert_array_equal(a.values, b.values)


def test_seasonal_trend_jan_to_may():
    from rooftopsolar.sunsky import DAYS_IN_MONTH
    atm = AtmosphereParams.ideal()
    sky = build_sky_map(8, 16)
    ctx = flat_ctx()
    monthly = []
    for month in range(1, 6):
        sun_map = build_sun_map(23.0, TimeConfig(mode="month", month=month))
        res = cell_insolation(ctx, sun_map, sky, atm)
        monthly.append(res.global_wh_m2 * DAYS_IN_MONTH[month - 1])
    assert all(b > a for a, b in zip(monthly, monthly[1:]))
