"""Building footprint ingestion and rasterization to zone grids."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

import numpy as np

from .grids import Grid, GridError

log = logging.getLogger(__name__)

__all__ = ["BuildingFootprint", "ZoneGrid", "read_footprints", "rasterize_zones"]


@dataclass
class BuildingFootprint:
    """A single building outline (one polygon part).

    ``polygon`` is a list of rings; the first is the outer boundary,
    any further rings are holes.  Coordinates are map units in the
    dataset CRS.
    """

    id: str
    polygon: list  # list of rings, each a list of (x, y)
    height_m: float | None = None
    attributes: dict = field(default_factory=dict)
    id_synthesized: bool = False

    def area_m2(self) -> float:
        """Shoelace area; holes subtract."""
        total = 0.0
        for i, ring in enumerate(self.polygon):
            a = _ring_area(ring)
            total += a if i == 0 else -a
        return total

    def centroid(self) -> tuple[float, float]:
        """Area centroid of the outer ring."""
        ring = np.asarray(self.polygon[0], dtype=float)
        x, y = ring[:, 0], ring[:, 1]
        x1, y1 = np.roll(x, -1), np.roll(y, -1)
        cross = x * y1 - x1 * y
        a = cross.sum() / 2.0
        if abs(a) < 1e-12:
            return float(x.mean()), float(y.mean())
        cx = ((x + x1) * cross).sum() / (6.0 * a)
        cy = ((y + y1) * cross).sum() / (6.0 * a)
        return float(cx), float(cy)


def _ring_area(ring) -> float:
    pts = np.asarray(ring, dtype=float)
    x, y = pts[:, 0], pts[:, 1]
    return abs(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y)) / 2.0


@dataclass
class ZoneGrid:
    """Integer zone labels on the geometry of a reference grid; 0 = no building."""

    grid: Grid
    labels: dict  # zone label -> footprint id
    overlaps: int = 0

    @property
    def values(self) -> np.ndarray:
        return self.grid.values


def read_footprints(path: str) -> list[BuildingFootprint]:
    """Read building footprints from a GeoJSON FeatureCollection.

    One footprint per polygon part; MultiPolygon parts share the feature
    id with a ``/part{k}`` suffix.  The id comes from the ``osm_id`` or
    ``uid`` property, else the file-order index (flagged as synthesized).
    Non-polygon geometries are skipped with a warning count.
    """
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("type") != "FeatureCollection":
        raise ValueError(f"{path}: expected a GeoJSON FeatureCollection")
    out: list[BuildingFootprint] = []
    skipped = 0
    for index, feature in enumerate(doc.get("features", [])):
        geom = feature.get("geometry") or {}
        props = feature.get("properties") or {}
        gtype = geom.get("type")
        if gtype not in ("Polygon", "MultiPolygon"):
            skipped += 1
            continue
        fid = props.get("osm_id") or props.get("uid")
        synthesized = fid is None
        if synthesized:
            fid = str(index)
        fid = str(fid)
        height = props.get("height_m")
        height = float(height) if height is not None else None
        polys = [geom["coordinates"]] if gtype == "Polygon" else geom["coordinates"]
        for k, rings in enumerate(polys):
            part_id = fid if len(polys) == 1 else f"{fid}/part{k}"
            rings = [[(float(x), float(y)) for x, y in ring] for ring in rings]
            out.append(BuildingFootprint(id=part_id, polygon=rings,
                                         height_m=height, attributes={
                                             str(k): str(v) for k, v in props.items()},
                                         id_synthesized=synthesized))
    if skipped:
        log.warning("%s: skipped %d non-polygon features", path, skipped)
    return out


def _point_in_rings(px, py, rings):
    """Even-odd rule over all rings (vectorized over points)."""
    inside = np.zeros(px.shape, dtype=bool)
    for ring in rings:
        pts = np.asarray(ring, dtype=float)
        x0, y0 = pts[:-1, 0], pts[:-1, 1]
        x1, y1 = pts[1:, 0], pts[1:, 1]
        for xa, ya, xb, yb in zip(x0, y0, x1, y1):
            if ya == yb:
                continue
            cond = ((ya > py) != (yb > py)) & \
                   (px < (xb - xa) * (py - ya) / (yb - ya) + xa)
            inside ^= cond
    return inside


def rasterize_zones(footprints: list[BuildingFootprint], reference: Grid) -> ZoneGrid:
    """Label each cell whose center falls inside a footprint polygon.

    Later features win where footprints overlap; the overlap cell count
    is reported on the result.  Labels are 1-based in input order.
    """
    zones = np.zeros((reference.rows, reference.cols), dtype=np.float64)
    labels: dict[int, str] = {}
    overlaps = 0
    for label, fp in enumerate(footprints, start=1):
        labels[label] = fp.id
        outer = np.asarray(fp.polygon[0], dtype=float)
        xmin, ymin = outer.min(axis=0)
        xmax, ymax = outer.max(axis=0)
        # candidate cell-center window
        c0 = int(np.floor((xmin - reference.origin_x) / reference.cell_size - 0.5))
        c1 = int(np.ceil((xmax - reference.origin_x) / reference.cell_size + 0.5))
        r0 = int(np.floor((reference.origin_y - ymax) / reference.cell_size - 0.5))
        r1 = int(np.ceil((reference.origin_y - ymin) / reference.cell_size + 0.5))
        c0, c1 = max(c0, 0), min(c1, reference.cols)
        r0, r1 = max(r0, 0), min(r1, reference.rows)
        if c0 >= c1 or r0 >= r1:
            continue
        rr, cc = np.meshgrid(np.arange(r0, r1), np.arange(c0, c1), indexing="ij")
        px = reference.origin_x + (cc + 0.5) * reference.cell_size
        py = reference.origin_y - (rr + 0.5) * reference.cell_size
        closed = [list(r) + ([r[0]] if r[0] != r[-1] else []) for r in fp.polygon]
        inside = _point_in_rings(px, py, closed)
        window = zones[r0:r1, c0:c1]
        overlaps += int(np.count_nonzero(window[inside]))
        window[inside] = label
    if overlaps:
        log.warning("rasterize_zones: %d cells claimed by more than one footprint",
                    overlaps)
    zone_grid = Grid(rows=reference.rows, cols=reference.cols,
                     origin_x=reference.origin_x, origin_y=reference.origin_y,
                     cell_size=reference.cell_size, crs_id=reference.crs_id,
                     nodata=-1.0, values=zones)
    return ZoneGrid(grid=zone_grid, labels=labels, overlaps=overlaps)
