"""Per-building aggregation, filtering, usable electricity, and ranking."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from .footprints import BuildingFootprint, ZoneGrid
from .grids import Grid, GridError

__all__ = ["ZoneStats", "BuildingSolarRecord", "zonal_stats",
           "building_records", "building_filter", "usable_electricity",
           "rank_top_n", "write_building_csv", "write_top_n_geojson",
           "MIN_ROOF_AREA_M2"]

# 1500 ft^2 in m^2
MIN_ROOF_AREA_M2 = 1500 * 0.09290304

DEFAULT_PANEL_YIELD = 0.15
DEFAULT_PERFORMANCE_RATIO = 0.8

CSV_COLUMNS = ["building_id", "height_m", "footprint_area_m2", "suitable_count",
               "suitable_area_m2", "mean_radiation_kwh_m2",
               "usable_electricity_kwh", "lon", "lat"]


@dataclass
class ZoneStats:
    zone: int
    count: int
    area_m2: float
    mean: float | None


@dataclass
class BuildingSolarRecord:
    building_id: str
    height_m: float | None
    footprint_area_m2: float
    suitable_count: int
    suitable_area_m2: float
    mean_radiation_kwh_m2: float | None
    usable_electricity_kwh: float
    lon: float
    lat: float


def zonal_stats(value: Grid, zones: ZoneGrid, mask: Grid | None = None
                ) -> list[ZoneStats]:
    """count / area / mean of the value raster per nonzero zone.

    Cells count when they hold valid data and (if a mask is given) the
    mask is 1.  Zones with no counted cells report a null mean.
    """
    if not value.same_geometry(zones.grid):
        raise GridError("value and zone grids have different geometry")
    include = value.valid_mask()
    if mask is not None:
        if not value.same_geometry(mask):
            raise GridError("mask geometry does not match the value grid")
        include &= mask.valid_mask() & (mask.values > 0)
    labels = zones.values.astype(np.int64)
    cell_area = value.cell_size ** 2
    out = []
    for zone in sorted(zones.labels):
        sel = (labels == zone) & include
        count = int(np.count_nonzero(sel))
        mean = float(value.values[sel].mean()) if count else None
        out.append(ZoneStats(zone=zone, count=count,
                             area_m2=count * cell_area, mean=mean))
    return out


def usable_electricity(area_m2: float, radiation_kwh_m2: float,
                       panel_yield: float = DEFAULT_PANEL_YIELD,
                       performance_ratio: float = DEFAULT_PERFORMANCE_RATIO
                       ) -> float:
    """E = A * H * r * PR, in kWh."""
    if min(area_m2, radiation_kwh_m2, panel_yield, performance_ratio) < 0:
        raise ValueError("all inputs must be >= 0")
    if panel_yield > 1 or performance_ratio > 1:
        raise ValueError("panel_yield and performance_ratio must be <= 1")
    return area_m2 * radiation_kwh_m2 * panel_yield * performance_ratio


def building_records(stats: list[ZoneStats], zones: ZoneGrid,
                     footprints: list[BuildingFootprint],
                     panel_yield: float = DEFAULT_PANEL_YIELD,
                     performance_ratio: float = DEFAULT_PERFORMANCE_RATIO,
                     area_basis: str = "suitable") -> list[BuildingSolarRecord]:
    """Join zonal statistics back onto their footprints.

    ``area_basis`` selects the A of the electricity formula: 'suitable'
    uses the suitable-cell area (only panel-eligible cells generate),
    'footprint' the full rooftop outline area.
    """
    if area_basis not in ("suitable", "footprint"):
        raise ValueError(f"area_basis must be suitable or footprint, "
                         f"got {area_basis}")
    by_id = {fp.id: fp for fp in footprints}
    out = []
    for st in stats:
        fid = zones.labels[st.zone]
        fp = by_id[fid]
        cx, cy = fp.centroid()
        mean = st.mean
        if st.count == 0 or mean is None:
            energy = 0.0
        else:
            area = fp.area_m2() if area_basis == "footprint" else st.area_m2
            energy = usable_electricity(area, mean, panel_yield,
                                        performance_ratio)
        out.append(BuildingSolarRecord(
            building_id=fid, height_m=fp.height_m,
            footprint_area_m2=fp.area_m2(), suitable_count=st.count,
            suitable_area_m2=st.area_m2, mean_radiation_kwh_m2=mean,
            usable_electricity_kwh=energy, lon=cx, lat=cy))
    return out


def building_filter(records: list[BuildingSolarRecord],
                    min_area_m2: float = MIN_ROOF_AREA_M2
                    ) -> list[BuildingSolarRecord]:
    """Keep buildings whose footprint area reaches min_area_m2
    (default 1500 ft^2)."""
    return [r for r in records if r.footprint_area_m2 >= min_area_m2]


def rank_top_n(records: list[BuildingSolarRecord], n: int
               ) -> list[BuildingSolarRecord]:
    """Top n by usable electricity, ties broken by building id."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    ordered = sorted(records,
                     key=lambda r: (-r.usable_electricity_kwh, r.building_id))
    return ordered[:n]


def write_building_csv(records: list[BuildingSolarRecord], path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in records:
            writer.writerow([
                r.building_id,
                "" if r.height_m is None else repr(r.height_m),
                repr(r.footprint_area_m2), r.suitable_count,
                repr(r.suitable_area_m2),
                "" if r.mean_radiation_kwh_m2 is None
                else repr(r.mean_radiation_kwh_m2),
                repr(r.usable_electricity_kwh), repr(r.lon), repr(r.lat)])


def write_top_n_geojson(records: list[BuildingSolarRecord], path: str) -> None:
    """Ranked records as GeoJSON points with the CSV columns as properties."""
    features = []
    for r in records:
        props = {
            "building_id": r.building_id, "height_m": r.height_m,
            "footprint_area_m2": r.footprint_area_m2,
            "suitable_count": r.suitable_count,
            "suitable_area_m2": r.suitable_area_m2,
            "mean_radiation_kwh_m2": r.mean_radiation_kwh_m2,
            "usable_electricity_kwh": r.usable_electricity_kwh,
        }
        features.append({"type": "Feature",
                         "geometry": {"type": "Point",
                                      "coordinates": [r.lon, r.lat]},
                         "properties": props})
    with open(path, "w") as fh:
        json.dump({"type": "FeatureCollection", "features": features}, fh,
                  indent=2)
