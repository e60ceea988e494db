"""End-to-end run orchestration: DEM in, building electricity table out.

Stages run in order: ingest -> terrain -> sun/sky + horizon -> radiation
-> suitability -> per-building power.  Every resolved parameter and an
input checksum land in a run manifest so reruns are reproducible and
byte-identical.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
import os
from dataclasses import dataclass, field

import numpy as np
import yaml

from . import __version__
from .calibration import (calibrate_from_station_csv, calibrate_records,
                          read_station_csv, write_calibration_report)
from .footprints import read_footprints, rasterize_zones
from .grids import read_raster, write_raster
from .horizon import horizon_grid
from .power import (DEFAULT_PANEL_YIELD, DEFAULT_PERFORMANCE_RATIO,
                    MIN_ROOF_AREA_M2, building_filter, building_records,
                    rank_top_n, write_building_csv, write_top_n_geojson,
                    zonal_stats)
from .radiation import AtmosphereParams, global_insolation_grid
from .suitability import SuitabilityCriteria, suitable_cell_mask
from .sunsky import DAYS_IN_MONTH, TimeConfig, build_sky_map, build_sun_map
from .terrain import aspect as aspect_of
from .terrain import slope as slope_of

log = logging.getLogger(__name__)

__all__ = ["RunConfig", "PipelineError", "run_pipeline", "load_config"]


class PipelineError(RuntimeError):
    """A stage failure, tagged with the stage name."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


@dataclass
class RunConfig:
    dem_path: str = ""
    footprints_path: str | None = None
    station_csv: str | None = None
    output_dir: str = "output"

    latitude_deg: float | None = None

    # time configuration
    mode: str = "annual"            # annual | month
    month: int | None = None
    hour_interval_h: float = 0.5

    # atmosphere: ideal | calibrated | explicit
    atmosphere: str = "ideal"
    station_id: str | None = None   # restrict calibration to one station
    diffuse_proportion: float | None = None
    transmissivity: float | None = None

    # hemisphere discretization
    n_zenith: int = 8
    n_azimuth: int = 16

    # horizon / shading
    n_directions: int = 32
    max_radius_m: float = 500.0
    gap_subsamples: int = 16

    # terrain
    slope_window: int = 3

    # suitability
    preset: str = "3D"
    max_slope_deg: float = 45.0
    flat_slope_deg: float = 10.0
    min_radiation_kwh_m2: float | None = None

    # power
    panel_yield: float = DEFAULT_PANEL_YIELD
    performance_ratio: float = DEFAULT_PERFORMANCE_RATIO
    min_area_m2: float = MIN_ROOF_AREA_M2
    area_basis: str = "suitable"
    top_n: int = 10

    mask_to_footprints: bool = True
    workers: int = 0                # 0 = all available cores

    def validate(self) -> None:
        if not self.dem_path or not os.path.exists(self.dem_path):
            raise PipelineError("config", f"DEM not found: {self.dem_path!r}")
        for name in ("footprints_path", "station_csv"):
            p = getattr(self, name)
            if p is not None and not os.path.exists(p):
                raise PipelineError("config", f"{name} not found: {p!r}")
        if self.mode not in ("annual", "month"):
            raise PipelineError("config", f"mode must be annual or month, "
                                          f"got {self.mode!r}")
        if self.mode == "month" and not (self.month and 1 <= self.month <= 12):
            raise PipelineError("config", f"month mode needs month 1..12, "
                                          f"got {self.month}")
        if self.atmosphere not in ("ideal", "calibrated", "explicit"):
            raise PipelineError("config", f"unknown atmosphere mode "
                                          f"{self.atmosphere!r}")
        if self.atmosphere == "calibrated" and not self.station_csv:
            raise PipelineError("config", "calibrated atmosphere needs station_csv")
        if self.atmosphere == "explicit" and (self.diffuse_proportion is None
                                              or self.transmissivity is None):
            raise PipelineError("config", "explicit atmosphere needs "
                                          "diffuse_proportion and transmissivity")

    def resolved(self) -> dict:
        return dataclasses.asdict(self)


def load_config(path: str, **overrides) -> RunConfig:
    """RunConfig from a YAML document plus keyword overrides."""
    with open(path) as fh:
        doc = yaml.safe_load(fh) or {}
    known = {f.name for f in dataclasses.fields(RunConfig)}
    unknown = set(doc) - known
    if unknown:
        raise PipelineError("config", f"unknown config keys: {sorted(unknown)}")
    doc.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig(**doc)


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _monthly_atmospheres(config: RunConfig, months: list[int]
                         ) -> dict[int, AtmosphereParams]:
    if config.atmosphere == "ideal":
        return {m: AtmosphereParams.ideal() for m in months}
    if config.atmosphere == "explicit":
        atm = AtmosphereParams(config.diffuse_proportion, config.transmissivity)
        return {m: atm for m in months}
    if config.station_id:
        records = [r for r in read_station_csv(config.station_csv)
                   if r.station_id == config.station_id]
        if not records:
            raise PipelineError("calibrate", f"no rows for station "
                                             f"{config.station_id!r}")
        table = calibrate_records(records)
    else:
        table = calibrate_from_station_csv(config.station_csv)
    out = {}
    for m in months:
        if m in table:
            out[m] = table[m]
        else:
            log.warning("no station data for month %d; using ideal atmosphere", m)
            out[m] = AtmosphereParams.ideal()
    return out


def run_pipeline(config: RunConfig) -> dict:
    """Execute the full pipeline; returns a dict of artifact paths.

    Outputs land in config.output_dir: slope/aspect rasters, per-period
    direct/diffuse/global radiation rasters (Wh/m^2), suitability mask,
    building CSV, top-N GeoJSON, optional calibration report, and the
    run manifest.
    """
    config.validate()
    import numba
    if config.workers > 0:
        numba.set_num_threads(min(config.workers,
                                  numba.config.NUMBA_NUM_THREADS))

    os.makedirs(config.output_dir, exist_ok=True)
    out = {}

    def outpath(name: str) -> str:
        out[os.path.splitext(name)[0]] = path = os.path.join(
            config.output_dir, name)
        return path

    # ingest
    try:
        dem = read_raster(config.dem_path)
    except Exception as exc:
        raise PipelineError("ingest", str(exc)) from exc
    latitude = config.latitude_deg
    if latitude is None:
        latitude = dem.center_latitude()
    if latitude is None:
        raise PipelineError("ingest", "latitude_deg not set and the DEM CRS "
                                      "is not geographic; set it in the config")

    footprints = []
    zones = None
    if config.footprints_path:
        try:
            footprints = read_footprints(config.footprints_path)
            zones = rasterize_zones(footprints, dem)
        except Exception as exc:
            raise PipelineError("ingest", str(exc)) from exc

    # terrain
    try:
        slope = slope_of(dem, config.slope_window)
        aspect = aspect_of(dem, config.slope_window)
    except Exception as exc:
        raise PipelineError("terrain", str(exc)) from exc
    write_raster(slope, outpath("slope.tif"))
    write_raster(aspect, outpath("aspect.tif"))

    # radiation
    months = [config.month] if config.mode == "month" else list(range(1, 13))
    atmospheres = _monthly_atmospheres(config, months)
    if config.atmosphere == "calibrated":
        write_calibration_report(atmospheres, outpath("calibration.csv"))
    try:
        mask = zones if (zones is not None and config.mask_to_footprints) else None
        compute_mask = None
        if mask is not None:
            compute_mask = mask.grid.values > 0
        horizon = horizon_grid(dem, config.n_directions, config.max_radius_m,
                               compute_mask=compute_mask)
        sun_maps = [build_sun_map(latitude,
                                  TimeConfig(mode="month", month=m,
                                             hour_interval_h=config.hour_interval_h),
                                  config.n_zenith, config.n_azimuth)
                    for m in months]
        sky_map = build_sky_map(config.n_zenith, config.n_azimuth)
        triples = global_insolation_grid(
            dem, slope, aspect, mask, sun_maps, sky_map,
            [atmospheres[m] for m in months],
            n_directions=config.n_directions, max_radius_m=config.max_radius_m,
            gap_subsamples=config.gap_subsamples, horizon_angles_grid=horizon)
    except PipelineError:
        raise
    except Exception as exc:
        raise PipelineError("radiation", str(exc)) from exc

    # scale representative days to full periods and aggregate
    direct_sum = diffuse_sum = None
    for m, (dgrid, fgrid, _) in zip(months, triples):
        days = DAYS_IN_MONTH[m - 1]
        valid = dgrid.valid_mask()
        dvals = np.where(valid, dgrid.values * days, dgrid.nodata)
        fvals = np.where(valid, fgrid.values * days, fgrid.nodata)
        if direct_sum is None:
            direct_sum = dvals.copy()
            diffuse_sum = fvals.copy()
            period_valid = valid
        else:
            direct_sum = np.where(valid, direct_sum + dvals, dgrid.nodata)
            diffuse_sum = np.where(valid, diffuse_sum + fvals, dgrid.nodata)
            period_valid &= valid
    direct = dem.like(direct_sum)
    diffuse = dem.like(diffuse_sum)
    global_vals = np.where(period_valid, direct_sum + diffuse_sum, dem.nodata)
    global_rad = dem.like(global_vals)
    write_raster(direct, outpath("direct_wh_m2.tif"))
    write_raster(diffuse, outpath("diffuse_wh_m2.tif"))
    write_raster(global_rad, outpath("global_wh_m2.tif"))

    # suitability (criteria thresholds are kWh/m^2)
    try:
        criteria = SuitabilityCriteria(
            max_slope_deg=config.max_slope_deg,
            flat_slope_deg=config.flat_slope_deg,
            min_radiation_kwh_m2=config.min_radiation_kwh_m2,
            period="annual" if config.mode == "annual" else "monthly",
            preset=config.preset)
        global_kwh = global_rad.like(
            np.where(global_rad.valid_mask(), global_rad.values / 1000.0,
                     global_rad.nodata))
        suitable = suitable_cell_mask(global_kwh, slope, aspect, criteria)
    except Exception as exc:
        raise PipelineError("suitability", str(exc)) from exc
    write_raster(suitable, outpath("suitable_mask.tif"))

    # power
    records = []
    if zones is not None:
        try:
            stats = zonal_stats(global_kwh, zones, suitable)
            records = building_records(
                stats, zones, footprints, config.panel_yield,
                config.performance_ratio, config.area_basis)
            records = building_filter(records, config.min_area_m2)
            records.sort(key=lambda r: (-r.usable_electricity_kwh, r.building_id))
        except Exception as exc:
            raise PipelineError("power", str(exc)) from exc
        write_building_csv(records, outpath("buildings.csv"))
        write_top_n_geojson(rank_top_n(records, config.top_n)
                            if records else [], outpath("top_buildings.geojson"))

    # manifest
    manifest = {
        "version": __version__,
        "config": config.resolved(),
        "latitude_deg": latitude,
        "months": months,
        "atmospheres": {m: {"diffuse_proportion": a.diffuse_proportion,
                            "transmissivity": a.transmissivity}
                        for m, a in atmospheres.items()},
        "inputs": {p: _sha256(p) for p in
                   [config.dem_path, config.footprints_path, config.station_csv]
                   if p},
        "building_count": len(records),
    }
    with open(outpath("manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
    return out
