"""Direct, diffuse, and global insolation per cell.

Direct beam insolation sums, over sun-map sectors, the solar constant
attenuated along the relative optical path, weighted by sector duration,
gap fraction, and incidence on the tilted surface.  Diffuse insolation
uses a uniform-sky model over the sky-map sectors: each sector carries a
share of the diffuse part of the global normal radiation proportional to
its solid angle, reduced by its gap fraction and incidence.  Global is
their sum, in Wh/m^2 for the sampled period.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .grids import Grid, GridError
from .horizon import (HorizonProfile, _gap_fraction, gap_fraction,
                      horizon_grid)
from .sunsky import SkySector, SunSector
from .terrain import FLAT_ASPECT

__all__ = ["AtmosphereParams", "CellContext", "InsolationResult",
           "SOLAR_CONSTANT_W_M2", "relative_optical_path", "incidence_cosine",
           "direct_insolation", "diffuse_insolation", "sky_global_normal",
           "global_insolation_grid"]

SOLAR_CONSTANT_W_M2 = 1367.0

# beyond this zenith the flat-atmosphere 1/cos path diverges; beam
# attenuation has already wiped out the contribution
_ZENITH_CLAMP_DEG = 80.0


@dataclass(frozen=True)
class AtmosphereParams:
    """Diffuse proportion and one-zenith-path transmissivity."""

    diffuse_proportion: float = 0.3
    transmissivity: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.diffuse_proportion < 1.0:
            raise ValueError(f"diffuse_proportion must be in [0, 1), "
                             f"got {self.diffuse_proportion}")
        if not 0.0 < self.transmissivity <= 1.0:
            raise ValueError(f"transmissivity must be in (0, 1], "
                             f"got {self.transmissivity}")

    @classmethod
    def ideal(cls) -> "AtmosphereParams":
        """Clear-sky defaults: d = 0.3, transmissivity = 0.5."""
        return cls(0.3, 0.5)


@dataclass
class CellContext:
    """Everything location-specific the insolation formulas need."""

    elevation_m: float
    slope_deg: float
    aspect_deg: float
    horizon: HorizonProfile
    latitude_deg: float


@dataclass
class InsolationResult:
    direct_wh_m2: float
    diffuse_wh_m2: float

    @property
    def global_wh_m2(self) -> float:
        return self.direct_wh_m2 + self.diffuse_wh_m2


@numba.njit(cache=True)
def _optical_path(zenith_deg, elevation_m):
    z = zenith_deg if zenith_deg < _ZENITH_CLAMP_DEG else _ZENITH_CLAMP_DEG
    scale = math.exp(-0.000118 * elevation_m - 1.638e-9 * elevation_m ** 2)
    return scale / math.cos(math.radians(z))


def relative_optical_path(zenith_deg: float, elevation_m: float = 0.0) -> float:
    """Atmospheric path length relative to the zenith path, with the
    elevation correction; zenith clamped at 80 degrees."""
    if not 0 <= zenith_deg < 90:
        raise ValueError(f"zenith must be in [0, 90), got {zenith_deg}")
    return _optical_path(zenith_deg, elevation_m)


@numba.njit(cache=True)
def _incidence_cos(sector_zenith_deg, sector_azimuth_deg, slope_deg, aspect_deg):
    if aspect_deg < 0.0:  # flat sentinel
        slope_deg = 0.0
        aspect_deg = 0.0
    tz = math.radians(sector_zenith_deg)
    s = math.radians(slope_deg)
    c = (math.cos(tz) * math.cos(s)
         + math.sin(tz) * math.sin(s)
         * math.cos(math.radians(sector_azimuth_deg - aspect_deg)))
    return c if c > 0.0 else 0.0


def incidence_cosine(sector_zenith_deg: float, sector_azimuth_deg: float,
                     slope_deg: float, aspect_deg: float) -> float:
    """cos of the angle between the sector centroid direction and the
    surface normal; backside illumination clamps to 0.  Flat cells
    (aspect sentinel -1) are treated as horizontal."""
    return _incidence_cos(sector_zenith_deg, sector_azimuth_deg,
                          slope_deg, aspect_deg)


def direct_insolation(ctx: CellContext, sun_map: list[SunSector],
                      atm: AtmosphereParams, gap_subsamples: int = 16) -> float:
    """Beam insolation in Wh/m^2 summed over the sun-map sectors."""
    if not sun_map:
        raise ValueError("sun map is empty")
    total = 0.0
    for sec in sun_map:
        m = _optical_path(sec.zenith_deg, ctx.elevation_m)
        gap = gap_fraction(ctx.horizon, sec.zenith_bounds, sec.azimuth_bounds,
                           gap_subsamples)
        cos_inc = _incidence_cos(sec.zenith_deg, sec.azimuth_deg,
                                 ctx.slope_deg, ctx.aspect_deg)
        total += (SOLAR_CONSTANT_W_M2 * atm.transmissivity ** m
                  * sec.duration_h * gap * cos_inc)
    return total


def sky_global_normal(sun_map: list[SunSector], atm: AtmosphereParams,
                      elevation_m: float = 0.0) -> float:
    """Global normal radiation over the period, Wh/m^2.

    Duration-weighted beam attenuation times total daylight hours,
    inflated to a global (beam + diffuse) value by 1 / (1 - d).
    """
    total_dur = sum(sec.duration_h for sec in sun_map)
    if total_dur <= 0:
        return 0.0
    beam = sum(atm.transmissivity ** _optical_path(sec.zenith_deg, elevation_m)
               * sec.duration_h for sec in sun_map)
    return SOLAR_CONSTANT_W_M2 * beam / (1.0 - atm.diffuse_proportion)


def diffuse_insolation(ctx: CellContext, sky_map: list[SkySector],
                       atm: AtmosphereParams, global_normal_wh_m2: float,
                       gap_subsamples: int = 16) -> float:
    """Uniform-sky diffuse insolation in Wh/m^2."""
    if global_normal_wh_m2 < 0:
        raise ValueError("global normal radiation must be >= 0")
    total = 0.0
    for sec in sky_map:
        gap = gap_fraction(ctx.horizon, sec.zenith_bounds, sec.azimuth_bounds,
                           gap_subsamples)
        cos_inc = _incidence_cos(sec.zenith_deg, sec.azimuth_deg,
                                 ctx.slope_deg, ctx.aspect_deg)
        total += (global_normal_wh_m2 * atm.diffuse_proportion
                  * sec.weight * gap * cos_inc)
    return total


def cell_insolation(ctx: CellContext, sun_map, sky_map, atm,
                    gap_subsamples: int = 16) -> InsolationResult:
    rglb = sky_global_normal(sun_map, atm, ctx.elevation_m)
    return InsolationResult(
        direct_wh_m2=direct_insolation(ctx, sun_map, atm, gap_subsamples),
        diffuse_wh_m2=diffuse_insolation(ctx, sky_map, atm, rglb,
                                         gap_subsamples))


# ---------------------------------------------------------------------------
# Grid evaluation

@numba.njit(parallel=True, cache=True)
def _radiation_kernel(dem, slope, aspect, compute, horizon_angles,
                      sun_thc, sun_alc, sun_th1, sun_th2, sun_a1, sun_a2,
                      sun_dur, period_start,
                      sky_thc, sky_alc, sky_th1, sky_th2, sky_a1, sky_a2,
                      sky_w, beta, diffuse_prop, rglb, k):
    rows, cols = dem.shape
    n_periods = period_start.size - 1
    n_sky = sky_w.size
    direct = np.full((n_periods, rows, cols), np.nan)
    diffuse = np.full((n_periods, rows, cols), np.nan)
    for r in numba.prange(rows):
        for c in range(cols):
            if not compute[r, c]:
                continue
            profile = horizon_angles[r, c]
            sl = slope[r, c]
            asp = aspect[r, c]
            elev = dem[r, c]
            # sky factor is period-independent
            sky_sum = 0.0
            for j in range(n_sky):
                gap = _gap_fraction(profile, sky_th1[j], sky_th2[j],
                                    sky_a1[j], sky_a2[j], k)
                cos_inc = _incidence_cos(sky_thc[j], sky_alc[j], sl, asp)
                sky_sum += sky_w[j] * gap * cos_inc
            for p in range(n_periods):
                acc = 0.0
                for i in range(period_start[p], period_start[p + 1]):
                    m = _optical_path(sun_thc[i], elev)
                    gap = _gap_fraction(profile, sun_th1[i], sun_th2[i],
                                        sun_a1[i], sun_a2[i], k)
                    cos_inc = _incidence_cos(sun_thc[i], sun_alc[i], sl, asp)
                    acc += (SOLAR_CONSTANT_W_M2 * beta[p] ** m
                            * sun_dur[i] * gap * cos_inc)
                direct[p, r, c] = acc
                diffuse[p, r, c] = rglb[p] * diffuse_prop[p] * sky_sum
    return direct, diffuse


def _pack_sun_maps(sun_maps: list[list[SunSector]]):
    period_start = np.zeros(len(sun_maps) + 1, dtype=np.int64)
    flat: list[SunSector] = []
    for p, smap in enumerate(sun_maps):
        flat.extend(smap)
        period_start[p + 1] = len(flat)
    def arr(f):
        return np.array([f(s) for s in flat], dtype=np.float64)
    return (arr(lambda s: s.zenith_deg), arr(lambda s: s.azimuth_deg),
            arr(lambda s: s.zenith_bounds[0]), arr(lambda s: s.zenith_bounds[1]),
            arr(lambda s: s.azimuth_bounds[0]), arr(lambda s: s.azimuth_bounds[1]),
            arr(lambda s: s.duration_h), period_start)


def _pack_sky_map(sky_map: list[SkySector]):
    def arr(f):
        return np.array([f(s) for s in sky_map], dtype=np.float64)
    return (arr(lambda s: s.zenith_deg), arr(lambda s: s.azimuth_deg),
            arr(lambda s: s.zenith_bounds[0]), arr(lambda s: s.zenith_bounds[1]),
            arr(lambda s: s.azimuth_bounds[0]), arr(lambda s: s.azimuth_bounds[1]),
            arr(lambda s: s.weight))


def global_insolation_grid(dem: Grid, slope: Grid, aspect: Grid,
                           mask: "ZoneGrid | Grid | None",
                           sun_maps, sky_map,
                           atmospheres, *,
                           n_directions: int = 32, max_radius_m: float = 500.0,
                           gap_subsamples: int = 16,
                           horizon_angles_grid: np.ndarray | None = None,
                           ) -> list[tuple[Grid, Grid, Grid]]:
    """Evaluate insolation rasters for one or more periods.

    ``sun_maps`` is one sun map or a list of them; ``atmospheres``
    matches its shape.  All periods share the horizon profiles and the
    per-cell sky factor, so multi-month runs pay the shading cost once.
    Returns one (direct, diffuse, global) grid triple per period, in
    Wh/m^2 for each period's sampled days.
    """
    single = isinstance(sun_maps[0], SunSector)
    if single:
        sun_maps = [sun_maps]
        atmospheres = [atmospheres]
    if len(sun_maps) != len(atmospheres):
        raise ValueError("need one atmosphere per sun map")
    for g in (slope, aspect):
        if not dem.same_geometry(g):
            raise GridError("slope/aspect geometry does not match the DEM")

    valid = dem.valid_mask()
    compute = valid.copy()
    if mask is not None:
        mask_grid = getattr(mask, "grid", mask)
        if not dem.same_geometry(mask_grid):
            raise GridError("mask geometry does not match the DEM")
        compute &= mask_grid.values > 0

    if horizon_angles_grid is None:
        horizon_angles_grid = horizon_grid(dem, n_directions, max_radius_m,
                                           compute_mask=compute)

    ref_elev = float(dem.values[valid].mean()) if valid.any() else 0.0
    rglb = np.array([sky_global_normal(sm, atm, ref_elev)
                     for sm, atm in zip(sun_maps, atmospheres)])
    beta = np.array([a.transmissivity for a in atmospheres])
    dprop = np.array([a.diffuse_proportion for a in atmospheres])

    sun_args = _pack_sun_maps(sun_maps)
    sky_args = _pack_sky_map(sky_map)
    direct, diffuse = _radiation_kernel(
        dem.values, slope.values, aspect.values, compute, horizon_angles_grid,
        *sun_args, *sky_args, beta, dprop, rglb, gap_subsamples)

    out = []
    for p in range(len(sun_maps)):
        dvals = np.where(np.isnan(direct[p]), dem.nodata, direct[p])
        fvals = np.where(np.isnan(diffuse[p]), dem.nodata, diffuse[p])
        gvals = np.where(np.isnan(direct[p]), dem.nodata,
                         direct[p] + diffuse[p])
        out.append((dem.like(dvals), dem.like(fvals), dem.like(gvals)))
    return out[0] if single else out
