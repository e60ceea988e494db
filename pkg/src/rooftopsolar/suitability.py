"""Suitable-rooftop cell filtering.

A cell is suitable when it is not too steep, receives enough radiation
for the analysis period, and does not face north.  Flat roofs are exempt
from the aspect test: their aspect is numerical noise.  The 2D preset
disables the geometric filters entirely (height-free rasters have no
meaningful slope or aspect) and keeps only the radiation threshold.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .grids import Grid, GridError
from .terrain import FLAT_ASPECT

log = logging.getLogger(__name__)

__all__ = ["SuitabilityCriteria", "suitable_cell_mask"]

# annual kWh/m^2 above this is almost certainly a Wh/kWh mix-up
_ANNUAL_SANITY_KWH = 3000.0


@dataclass
class SuitabilityCriteria:
    max_slope_deg: float = 45.0
    flat_slope_deg: float = 10.0
    aspect_min_deg: float = 22.5
    aspect_max_deg: float = 337.5
    min_radiation_kwh_m2: float | None = None
    period: str = "annual"      # 'annual' or 'monthly'
    preset: str = "3D"          # '3D' applies geometric filters; '2D' skips them

    def __post_init__(self):
        if self.period not in ("annual", "monthly"):
            raise ValueError(f"period must be annual or monthly, got {self.period}")
        if self.preset not in ("2D", "3D"):
            raise ValueError(f"preset must be 2D or 3D, got {self.preset}")
        if self.min_radiation_kwh_m2 is None:
            self.min_radiation_kwh_m2 = 800.0 if self.period == "annual" else 50.0
        if not 0 < self.flat_slope_deg < self.max_slope_deg <= 90:
            raise ValueError("need 0 < flat_slope_deg < max_slope_deg <= 90")
        if self.min_radiation_kwh_m2 <= 0:
            raise ValueError("min_radiation_kwh_m2 must be positive")


def suitable_cell_mask(radiation: Grid, slope: Grid, aspect: Grid,
                       criteria: SuitabilityCriteria) -> Grid:
    """1/0 mask of suitable cells; nodata propagates from the inputs.

    Radiation must be kWh/m^2 for the criteria period.  Suspiciously
    large annual values trigger a units warning.
    """
    for g in (slope, aspect):
        if not radiation.same_geometry(g):
            raise GridError("radiation/slope/aspect geometries differ")
    valid = radiation.valid_mask() & slope.valid_mask() & aspect.valid_mask()
    rad = radiation.values
    if criteria.period == "annual" and np.any(valid & (rad > _ANNUAL_SANITY_KWH)):
        log.warning("annual radiation exceeds %g kWh/m^2 on some cells; "
                    "input may be in Wh/m^2", _ANNUAL_SANITY_KWH)

    ok = rad >= criteria.min_radiation_kwh_m2
    if criteria.preset == "3D":
        sl = slope.values
        asp = aspect.values
        ok &= sl <= criteria.max_slope_deg
        not_north = ((sl <= criteria.flat_slope_deg)
                     | (asp == FLAT_ASPECT)
                     | ((asp >= criteria.aspect_min_deg)
                        & (asp <= criteria.aspect_max_deg)))
        ok &= not_north
    out = np.where(valid, ok.astype(np.float64), radiation.nodata)
    return radiation.like(out)
