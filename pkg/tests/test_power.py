import csv
import json

import numpy as np
import pytest

from rooftopsolar.footprints import BuildingFootprint, rasterize_zones
from rooftopsolar.grids import GridError
from rooftopsolar.power import (CSV_COLUMNS, MIN_ROOF_AREA_M2,
                                BuildingSolarRecord, building_filter,
                                building_records, rank_top_n,
                                usable_electricity, write_building_csv,
                                write_top_n_geojson, zonal_stats)

from conftest import make_grid


def rect_footprint(fid, x0, y0, w, h, height=None):
    ring = [(x0, y0), (x0 + w, y0), (x0 + w, y0 + h), (x0, y0 + h), (x0, y0)]
    return BuildingFootprint(id=fid, polygon=[ring], height_m=height)


def record(fid, area, energy, height=10.0):
    return BuildingSolarRecord(
        building_id=fid, height_m=height, footprint_area_m2=area,
        suitable_count=int(area), suitable_area_m2=area,
        mean_radiation_kwh_m2=1000.0, usable_electricity_kwh=energy,
        lon=0.0, lat=0.0)


class TestUsableElectricity:
    def test_formula(self):
        # A=100, H=1000, r=0.15, PR=0.8 -> 12000 kWh
        assert usable_electricity(100.0, 1000.0) == pytest.approx(12000.0)

    def test_custom_factors(self):
        assert usable_electricity(50.0, 800.0, 0.2, 0.9) == \
            pytest.approx(50.0 * 800.0 * 0.18)

    def test_zero_area(self):
        assert usable_electricity(0.0, 1200.0) == 0.0

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            usable_electricity(-1.0, 100.0)
        with pytest.raises(ValueError):
            usable_electricity(10.0, 100.0, panel_yield=1.2)


def test_min_roof_area_constant():
    # 1500 ft^2 expressed in m^2
    assert MIN_ROOF_AREA_M2 == pytest.approx(139.35, abs=0.01)


class TestZonalStats:
    @pytest.fixture
    def scene(self):
        ref = make_grid(np.zeros((10, 10)), origin=(0.0, 10.0))
        fps = [rect_footprint("a", 1.0, 6.0, 3.0, 3.0, height=8.0),
               rect_footprint("b", 5.0, 1.0, 4.0, 2.0, height=12.0)]
        zones = rasterize_zones(fps, ref)
        rad = make_grid(np.full((10, 10), 1000.0), origin=(0.0, 10.0))
        return ref, fps, zones, rad

    def test_counts_and_means(self, scene):
        ref, fps, zones, rad = scene
        rad.values[:] = 0.0
        rad.values[zones.values == 1] = 900.0
        rad.values[zones.values == 2] = 1100.0
        stats = {s.zone: s for s in zonal_stats(rad, zones)}
        assert stats[1].count == 9 and stats[1].mean == pytest.approx(900.0)
        assert stats[2].count == 8 and stats[2].mean == pytest.approx(1100.0)
        assert stats[1].area_m2 == pytest.approx(9.0)

    def test_mask_restricts_cells(self, scene):
        ref, fps, zones, rad = scene
        mask = make_grid(np.zeros((10, 10)), origin=(0.0, 10.0))
        mask.values[zones.values == 1] = 1.0  # only zone 1 cells suitable
        stats = {s.zone: s for s in zonal_stats(rad, zones, mask)}
        assert stats[1].count == 9
        assert stats[2].count == 0 and stats[2].mean is None

    def test_nodata_cells_excluded(self, scene):
        ref, fps, zones, rad = scene
        cells = np.argwhere(zones.values == 1)
        r, c = cells[0]
        rad.values[r, c] = rad.nodata
        stats = {s.zone: s for s in zonal_stats(rad, zones)}
        assert stats[1].count == 8

    def test_geometry_mismatch(self, scene):
        ref, fps, zones, rad = scene
        bad = make_grid(np.zeros((5, 5)))
        with pytest.raises(GridError):
            zonal_stats(bad, zones)


class TestBuildingRecords:
    def test_join_and_energy(self):
        ref = make_grid(np.zeros((10, 10)), origin=(0.0, 10.0))
        fps = [rect_footprint("a", 1.0, 6.0, 3.0, 3.0, height=8.0)]
        zones = rasterize_zones(fps, ref)
        rad = make_grid(np.full((10, 10), 1200.0), origin=(0.0, 10.0))
        mask = make_grid(np.ones((10, 10)), origin=(0.0, 10.0))
        stats = zonal_stats(rad, zones, mask)
        (rec,) = building_records(stats, zones, fps)
        assert rec.building_id == "a"
        assert rec.height_m == 8.0
        assert rec.footprint_area_m2 == pytest.approx(9.0)
        assert rec.suitable_area_m2 == pytest.approx(9.0)
        # E = 9 * 1200 * 0.15 * 0.8
        assert rec.usable_electricity_kwh == pytest.approx(1296.0)
        assert (rec.lon, rec.lat) == (pytest.approx(2.5), pytest.approx(7.5))

    def test_footprint_area_basis(self):
        ref = make_grid(np.zeros((10, 10)), origin=(0.0, 10.0))
        fps = [rect_footprint("a", 1.0, 6.0, 3.0, 3.0)]
        zones = rasterize_zones(fps, ref)
        rad = make_grid(np.full((10, 10), 1000.0), origin=(0.0, 10.0))
        mask = make_grid(np.zeros((10, 10)), origin=(0.0, 10.0))
        sel = zones.values == 1
        idx = np.argwhere(sel)[:4]
        mask.values[tuple(idx.T)] = 1.0  # only 4 of 9 cells suitable
        stats = zonal_stats(rad, zones, mask)
        (suit,) = building_records(stats, zones, fps, area_basis="suitable")
        (full,) = building_records(stats, zones, fps, area_basis="footprint")
        assert suit.usable_electricity_kwh == pytest.approx(4 * 1000 * 0.12)
        assert full.usable_electricity_kwh == pytest.approx(9 * 1000 * 0.12)

    def test_no_suitable_cells_zero_energy(self):
        ref = make_grid(np.zeros((10, 10)), origin=(0.0, 10.0))
        fps = [rect_footprint("a", 1.0, 6.0, 3.0, 3.0)]
        zones = rasterize_zones(fps, ref)
        rad = make_grid(np.full((10, 10), 1000.0), origin=(0.0, 10.0))
        mask = make_grid(np.zeros((10, 10)), origin=(0.0, 10.0))
        (rec,) = building_records(zonal_stats(rad, zones, mask), zones, fps)
        assert rec.usable_electricity_kwh == 0.0
        assert rec.mean_radiation_kwh_m2 is None

    def test_bad_area_basis(self):
        with pytest.raises(ValueError):
            building_records([], None, [], area_basis="roof")


class TestFilterAndRank:
    def test_area_filter_boundary(self):
        recs = [record("small", MIN_ROOF_AREA_M2 - 0.01, 10.0),
                record("exact", MIN_ROOF_AREA_M2, 20.0),
                record("big", 500.0, 30.0)]
        kept = building_filter(recs)
        assert [r.building_id for r in kept] == ["exact", "big"]

    def test_rank_order_and_ties(self):
        recs = [record("c", 200.0, 50.0), record("a", 200.0, 80.0),
                record("b", 200.0, 80.0), record("d", 200.0, 90.0)]
        top = rank_top_n(recs, 3)
        assert [r.building_id for r in top] == ["d", "a", "b"]

    def test_rank_n_larger_than_population(self):
        recs = [record("a", 200.0, 1.0)]
        assert len(rank_top_n(recs, 10)) == 1

    def test_rank_invalid_n(self):
        with pytest.raises(ValueError):
            rank_top_n([], 0)


class TestOutputs:
    def test_csv_columns_and_values(self, tmp_path):
        recs = [record("a", 250.0, 36000.0, height=19.0)]
        path = tmp_path / "buildings.csv"
        write_building_csv(recs, str(path))
        with open(path) as fh:
            rows = list(csv.DictReader(fh))
        assert list(rows[0]) == CSV_COLUMNS
        assert rows[0]["building_id"] == "a"
        assert float(rows[0]["usable_electricity_kwh"]) == 36000.0
        assert float(rows[0]["height_m"]) == 19.0

    def test_csv_is_deterministic(self, tmp_path):
        recs = [record("a", 1.0 / 3.0, 2.0 / 7.0)]
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        write_building_csv(recs, str(p1))
        write_building_csv(recs, str(p2))
        assert p1.read_bytes() == p2.read_bytes()
        # full float precision survives the roundtrip
        with open(p1) as fh:
            row = next(csv.DictReader(fh))
        assert float(row["footprint_area_m2"]) == 1.0 / 3.0

    def test_geojson_points(self, tmp_path):
        recs = [record("a", 250.0, 100.0), record("b", 250.0, 50.0)]
        path = tmp_path / "top.geojson"
        write_top_n_geojson(recs, str(path))
        with open(path) as fh:
            doc = json.load(fh)
        assert doc["type"] == "FeatureCollection"
        assert [f["properties"]["building_id"] for f in doc["features"]] == \
            ["a", "b"]
        assert doc["features"][0]["geometry"]["type"] == "Point"
