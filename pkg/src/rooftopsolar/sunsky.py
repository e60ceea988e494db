"""Solar geometry: sun positions, discretized sun map, and sky map.

The sun map records how much time the sun spends in each hemisphere
sector over the configured period; the sky map partitions the hemisphere
into equal-angle sectors with solid-angle weights.  Positions use solar
time (hour angle from solar noon); an optional longitude/UTC correction
is available for point validation against clock-time references.
"""

from __future__ import annotations

import datetime
import math
from dataclasses import dataclass

import numpy as np

__all__ = ["TimeConfig", "SunSector", "SkySector", "solar_declination",
           "solar_position", "build_sun_map", "build_sky_map",
           "DAYS_IN_MONTH", "representative_day"]

# non-leap year; monthly runs scale one representative day by these
DAYS_IN_MONTH = (31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31)


def representative_day(month: int) -> int:
    """Day of year of the 15th of the given month (non-leap)."""
    return datetime.date(2021, month, 15).timetuple().tm_yday


@dataclass
class TimeConfig:
    """Which days and hours get sampled.

    mode 'annual' samples one representative day per month (the 15th)
    unless ``day_step`` is set, in which case every day_step-th day of
    the year is sampled.  mode 'month' samples the representative day of
    ``month``; mode 'day' samples ``day_of_year``.
    """

    mode: str = "annual"
    month: int | None = None
    day_of_year: int | None = None
    hour_interval_h: float = 0.5
    day_step: int | None = None

    def __post_init__(self):
        if not 0 < self.hour_interval_h <= 2:
            raise ValueError(f"hour_interval_h must be in (0, 2], "
                             f"got {self.hour_interval_h}")
        if self.mode == "month":
            if self.month is None or not 1 <= self.month <= 12:
                raise ValueError(f"month mode needs month in 1..12, got {self.month}")
        elif self.mode == "day":
            if self.day_of_year is None or not 1 <= self.day_of_year <= 366:
                raise ValueError(f"day mode needs day_of_year in 1..366, "
                                 f"got {self.day_of_year}")
        elif self.mode != "annual":
            raise ValueError(f"unknown time mode {self.mode!r}")

    def days(self) -> list[int]:
        if self.mode == "day":
            return [self.day_of_year]
        if self.mode == "month":
            return [representative_day(self.month)]
        if self.day_step:
            return list(range(1, 366, self.day_step))
        return [representative_day(m) for m in range(1, 13)]


@dataclass
class SunSector:
    """A hemisphere sector with accumulated sun presence."""

    zenith_deg: float
    azimuth_deg: float
    zenith_bounds: tuple[float, float]
    azimuth_bounds: tuple[float, float]
    duration_h: float = 0.0
    sample_count: int = 0


@dataclass
class SkySector:
    zenith_bounds: tuple[float, float]
    azimuth_bounds: tuple[float, float]
    zenith_deg: float
    azimuth_deg: float
    weight: float


def solar_declination(day_of_year: int) -> float:
    """Solar declination in degrees via the Spencer trigonometric series."""
    if not 1 <= day_of_year <= 366:
        raise ValueError(f"day_of_year must be in 1..366, got {day_of_year}")
    g = 2.0 * math.pi * (day_of_year - 1) / 365.0
    decl = (0.006918
            - 0.399912 * math.cos(g) + 0.070257 * math.sin(g)
            - 0.006758 * math.cos(2 * g) + 0.000907 * math.sin(2 * g)
            - 0.002697 * math.cos(3 * g) + 0.00148 * math.sin(3 * g))
    return math.degrees(decl)


def solar_position(latitude_deg: float, day_of_year: int,
                   solar_time_h: float) -> tuple[float, float]:
    """(zenith, azimuth) in degrees; azimuth clockwise from north.

    Zenith > 90 means the sun is below the horizon; callers filter.
    Latitudes beyond +/-66 (polar day/night) are out of scope.
    """
    if abs(latitude_deg) > 66:
        raise ValueError(f"latitude {latitude_deg} outside supported +/-66 range")
    if not 0 <= solar_time_h < 24:
        raise ValueError(f"solar_time_h must be in [0, 24), got {solar_time_h}")
    phi = math.radians(latitude_deg)
    delta = math.radians(solar_declination(day_of_year))
    hour_angle = math.radians(15.0 * (solar_time_h - 12.0))
    up = math.sin(phi) * math.sin(delta) + \
        math.cos(phi) * math.cos(delta) * math.cos(hour_angle)
    east = -math.cos(delta) * math.sin(hour_angle)
    north = math.cos(phi) * math.sin(delta) - \
        math.sin(phi) * math.cos(delta) * math.cos(hour_angle)
    zenith = math.degrees(math.acos(max(-1.0, min(1.0, up))))
    azimuth = math.degrees(math.atan2(east, north)) % 360.0
    return zenith, azimuth


def daylight_hours(latitude_deg: float, day_of_year: int) -> float:
    """Astronomical day length from the sunset hour angle."""
    phi = math.radians(latitude_deg)
    delta = math.radians(solar_declination(day_of_year))
    x = -math.tan(phi) * math.tan(delta)
    x = max(-1.0, min(1.0, x))
    return 2.0 * math.degrees(math.acos(x)) / 15.0


def build_sun_map(latitude_deg: float, config: TimeConfig,
                  n_zenith: int = 8, n_azimuth: int = 16) -> list[SunSector]:
    """Accumulate sampled sun positions into hemisphere sectors.

    Every in-daylight sample adds hour_interval_h to its sector, so the
    total duration equals (daylight samples) * interval.  Only sectors
    that received samples are returned.
    """
    if n_zenith < 1 or n_azimuth < 4:
        raise ValueError("need n_zenith >= 1 and n_azimuth >= 4")
    dz = 90.0 / n_zenith
    da = 360.0 / n_azimuth
    sectors: dict[tuple[int, int], SunSector] = {}
    n_samples = int(math.ceil(24.0 / config.hour_interval_h))
    for day in config.days():
        for i in range(n_samples):
            t = i * config.hour_interval_h
            if t >= 24.0:
                break
            zenith, azimuth = solar_position(latitude_deg, day, t)
            if zenith < 90.0:
                iz = min(int(zenith / dz), n_zenith - 1)
                ia = min(int(azimuth / da), n_azimuth - 1)
                sec = sectors.get((iz, ia))
                if sec is None:
                    sec = SunSector(
                        zenith_deg=(iz + 0.5) * dz, azimuth_deg=(ia + 0.5) * da,
                        zenith_bounds=(iz * dz, (iz + 1) * dz),
                        azimuth_bounds=(ia * da, (ia + 1) * da))
                    sectors[(iz, ia)] = sec
                sec.duration_h += config.hour_interval_h
                sec.sample_count += 1
    if not sectors:
        raise ValueError(f"no daylight sampled at latitude {latitude_deg}")
    return [sectors[key] for key in sorted(sectors)]


def build_sky_map(n_zenith: int = 8, n_azimuth: int = 16) -> list[SkySector]:
    """Equal-angle hemisphere partition with solid-angle weights.

    Sector weight is (cos(z1) - cos(z2)) / n_azimuth, so the weights sum
    to 1 over the hemisphere.
    """
    if n_zenith < 1 or n_azimuth < 1:
        raise ValueError("sector counts must be >= 1")
    dz = 90.0 / n_zenith
    da = 360.0 / n_azimuth
    sectors = []
    for iz in range(n_zenith):
        z1, z2 = iz * dz, (iz + 1) * dz
        w = (math.cos(math.radians(z1)) - math.cos(math.radians(z2))) / n_azimuth
        for ia in range(n_azimuth):
            a1, a2 = ia * da, (ia + 1) * da
            sectors.append(SkySector(zenith_bounds=(z1, z2),
                                     azimuth_bounds=(a1, a2),
                                     zenith_deg=(z1 + z2) / 2.0,
                                     azimuth_deg=(a1 + a2) / 2.0,
                                     weight=w))
    return sectors


def sun_map_to_rows(sun_map: list[SunSector]) -> list[dict]:
    """Flatten a sun map for the diagnostic CSV."""
    return [{"zenith_deg": s.zenith_deg, "azimuth_deg": s.azimuth_deg,
             "duration_h": s.duration_h, "sample_count": s.sample_count}
            for s in sun_map]
