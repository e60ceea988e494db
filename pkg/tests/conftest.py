import json
import os

import numpy as np
import pytest

from rooftopsolar.grids import Grid


@pytest.fixture
def rng():
    return np.random.default_rng(20210615)


# one line per acceptance criterion, shown after the test summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance report")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def make_grid(values, cell_size=1.0, nodata=-9999.0, crs_id="", origin=(0.0, None)):
    values = np.asarray(values, dtype=float)
    ox, oy = origin
    return Grid.from_array(values, origin_x=ox, origin_y=oy,
                           cell_size=cell_size, nodata=nodata, crs_id=crs_id)


def square_feature(x0, y0, size, props=None):
    ring = [[x0, y0], [x0 + size, y0], [x0 + size, y0 + size],
            [x0, y0 + size], [x0, y0]]
    return {"type": "Feature", "properties": props or {},
            "geometry": {"type": "Polygon", "coordinates": [ring]}}


def feature_collection(features):
    return {"type": "FeatureCollection", "features": features}


def write_geojson(path, features):
    with open(path, "w") as fh:
        json.dump(feature_collection(features), fh)
    return str(path)


@pytest.fixture
def synthetic_city(tmp_path):
    """64x64 1 m DEM with four buildings and matching footprints.

    Heights: two tall blocks that pass the 1500 ft^2 roof-area filter,
    one that passes, one small building below it.
    """
    z = np.zeros((64, 64))
    buildings = [
        # (id, row0, col0, rows, cols, height)
        ("b_big_north", 8, 8, 16, 16, 12.0),      # 256 m^2
        ("b_big_south", 40, 30, 14, 14, 9.0),     # 196 m^2
        ("b_mid", 12, 40, 12, 12, 6.0),           # 144 m^2
        ("b_small", 48, 8, 8, 8, 5.0),            # 64 m^2, filtered out
    ]
    features = []
    for bid, r0, c0, nr, nc, h in buildings:
        z[r0:r0 + nr, c0:c0 + nc] = h
        x0, y1 = float(c0), float(64 - r0)
        x1, y0 = float(c0 + nc), float(64 - (r0 + nr))
        ring = [[x0, y0], [x1, y0], [x1, y1], [x0, y1], [x0, y0]]
        features.append({"type": "Feature",
                         "properties": {"osm_id": bid, "height_m": h},
                         "geometry": {"type": "Polygon", "coordinates": [ring]}})
    dem = Grid.from_array(z, cell_size=1.0, crs_id="EPSG:32643")
    dem_path = tmp_path / "city_dem.tif"
    fp_path = tmp_path / "city_footprints.geojson"
    from rooftopsolar.grids import write_raster
    write_raster(dem, str(dem_path))
    write_geojson(fp_path, features)
    return {"dem": dem, "dem_path": str(dem_path), "fp_path": str(fp_path),
            "buildings": buildings}
