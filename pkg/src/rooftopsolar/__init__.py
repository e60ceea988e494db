"""Rooftop solar potential estimation from digital elevation models.

Computes per-cell solar insolation over a DEM with hemisphere sun/sky
maps and horizon shading, calibrates atmosphere parameters from ground
station radiation data, filters suitable rooftop cells, and estimates
usable electricity per building.
"""

__version__ = "0.1.0"

from .calibration import (calibrate_from_station_csv, diffuse_proportion,
                          transmissivity_from_diffuse)
from .footprints import (BuildingFootprint, ZoneGrid, rasterize_zones,
                         read_footprints)
from .grids import Grid, GridError, downsample, read_raster, write_raster
from .horizon import HorizonProfile, gap_fraction, horizon_angles, horizon_grid
from .power import (BuildingSolarRecord, building_filter, building_records,
                    rank_top_n, usable_electricity, zonal_stats)
from .radiation import (AtmosphereParams, CellContext, InsolationResult,
                        cell_insolation, diffuse_insolation, direct_insolation,
                        global_insolation_grid, incidence_cosine,
                        relative_optical_path, sky_global_normal)
from .suitability import SuitabilityCriteria, suitable_cell_mask
from .sunsky import (SkySector, SunSector, TimeConfig, build_sky_map,
                     build_sun_map, solar_declination, solar_position)
from .terrain import FLAT_ASPECT, aspect, slope, terrain_derivatives
from .pipeline import RunConfig, load_config, run_pipeline
