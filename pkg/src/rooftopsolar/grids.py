"""Georeferenced single-band raster grids and their file formats.

Two formats are supported: ESRI ASCII grid (dependency-light, used heavily
in tests) and single-band GeoTIFF (real elevation products).  GeoTIFF I/O
is built on tifffile with the GeoTIFF tags written/read directly, since a
full GDAL stack is not required for north-up, square-pixel rasters.
"""

from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass, field

import numpy as np

__all__ = ["Grid", "GridError", "read_raster", "write_raster", "downsample"]

# GeoTIFF / GDAL tag codes
_TAG_MODEL_PIXEL_SCALE = 33550
_TAG_MODEL_TIEPOINT = 33922
_TAG_GEO_KEY_DIRECTORY = 34735
_TAG_GEO_ASCII_PARAMS = 34737
_TAG_GDAL_NODATA = 42113

_GEOKEY_MODEL_TYPE = 1024
_GEOKEY_CITATION = 1026
_GEOKEY_GEOGRAPHIC_TYPE = 2048
_GEOKEY_PROJECTED_TYPE = 3072


class GridError(ValueError):
    """Raised for malformed rasters or unusable raster files."""


@dataclass
class Grid:
    """A georeferenced single-band raster of 64-bit reals.

    ``origin_x``/``origin_y`` are the map coordinates of the upper-left
    corner of the upper-left cell; rows run north to south.  ``nodata``
    is a sentinel never used as a valid measurement.
    """

    rows: int
    cols: int
    origin_x: float
    origin_y: float
    cell_size: float
    crs_id: str
    nodata: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise GridError(f"grid must be at least 1x1, got {self.rows}x{self.cols}")
        if not self.cell_size > 0:
            raise GridError(f"cell_size must be positive, got {self.cell_size}")
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (self.rows, self.cols):
            raise GridError(
                f"values shape {self.values.shape} does not match "
                f"{self.rows}x{self.cols}"
            )

    @classmethod
    def from_array(cls, values, origin_x=0.0, origin_y=None, cell_size=1.0,
                   crs_id="", nodata=-9999.0):
        values = np.asarray(values, dtype=np.float64)
        rows, cols = values.shape
        if origin_y is None:
            origin_y = rows * cell_size
        return cls(rows=rows, cols=cols, origin_x=origin_x, origin_y=origin_y,
                   cell_size=cell_size, crs_id=crs_id, nodata=nodata,
                   values=values)

    def valid_mask(self) -> np.ndarray:
        """Boolean mask of cells holding actual measurements."""
        with np.errstate(invalid="ignore"):
            return ~(np.isnan(self.values) | (self.values == self.nodata))

    def is_nodata(self, row: int, col: int) -> bool:
        v = self.values[row, col]
        return bool(np.isnan(v) or v == self.nodata)

    def same_geometry(self, other: "Grid", tol: float = 1e-9) -> bool:
        return (self.rows == other.rows and self.cols == other.cols
                and abs(self.origin_x - other.origin_x) <= tol
                and abs(self.origin_y - other.origin_y) <= tol
                and abs(self.cell_size - other.cell_size) <= tol)

    def like(self, values: np.ndarray, nodata: float | None = None) -> "Grid":
        """New grid with this grid's geometry and the given values."""
        return Grid(rows=self.rows, cols=self.cols, origin_x=self.origin_x,
                    origin_y=self.origin_y, cell_size=self.cell_size,
                    crs_id=self.crs_id,
                    nodata=self.nodata if nodata is None else nodata,
                    values=values)

    def cell_center(self, row: int, col: int) -> tuple[float, float]:
        x = self.origin_x + (col + 0.5) * self.cell_size
        y = self.origin_y - (row + 0.5) * self.cell_size
        return x, y

    def center_latitude(self) -> float | None:
        """Latitude of the raster center, if the CRS is geographic."""
        if _is_geographic_crs(self.crs_id):
            return self.origin_y - 0.5 * self.rows * self.cell_size
        return None


def _is_geographic_crs(crs_id: str) -> bool:
    code = _epsg_code(crs_id)
    if code is None:
        return False
    return 4000 <= code < 5000


def _epsg_code(crs_id: str) -> int | None:
    if crs_id and crs_id.upper().startswith("EPSG:"):
        try:
            return int(crs_id.split(":", 1)[1])
        except ValueError:
            return None
    return None


# ---------------------------------------------------------------------------
# ESRI ASCII grid

def _read_ascii(path: str) -> Grid:
    header = {}
    with open(path) as fh:
        pos = fh.tell()
        while True:
            pos = fh.tell()
            line = fh.readline()
            if not line:
                raise GridError(f"{path}: truncated ASCII grid header")
            parts = line.split()
            if len(parts) == 2 and not _is_number(parts[0]):
                header[parts[0].lower()] = parts[1]
            else:
                fh.seek(pos)
                break
        for key in ("ncols", "nrows", "cellsize"):
            if key not in header:
                raise GridError(f"{path}: ASCII grid header missing '{key}'")
        cols = int(header["ncols"])
        rows = int(header["nrows"])
        cell = float(header["cellsize"])
        nodata = float(header.get("nodata_value", -9999))
        if "xllcorner" in header:
            xll = float(header["xllcorner"])
            yll = float(header["yllcorner"])
        elif "xllcenter" in header:
            xll = float(header["xllcenter"]) - cell / 2
            yll = float(header["yllcenter"]) - cell / 2
        else:
            raise GridError(f"{path}: ASCII grid has no georeference")
        values = np.loadtxt(fh, dtype=np.float64, ndmin=2)
    if values.shape != (rows, cols):
        values = values.reshape(rows, cols)
    return Grid(rows=rows, cols=cols, origin_x=xll, origin_y=yll + rows * cell,
                cell_size=cell, crs_id="", nodata=nodata, values=values)


def _is_number(token: str) -> bool:
    try:
        float(token)
        return True
    except ValueError:
        return False


def _write_ascii(grid: Grid, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(f"ncols {grid.cols}\n")
        fh.write(f"nrows {grid.rows}\n")
        fh.write(f"xllcorner {grid.origin_x!r}\n")
        fh.write(f"yllcorner {grid.origin_y - grid.rows * grid.cell_size!r}\n")
        fh.write(f"cellsize {grid.cell_size!r}\n")
        fh.write(f"NODATA_value {grid.nodata!r}\n")
        # row-at-a-time keeps memory flat for very large rasters
        for r in range(grid.rows):
            fh.write(" ".join(repr(float(v)) for v in grid.values[r]))
            fh.write("\n")


# ---------------------------------------------------------------------------
# GeoTIFF

def _crs_to_geokeys(crs_id: str):
    code = _epsg_code(crs_id)
    keys = []
    ascii_params = ""
    if code is not None:
        if _is_geographic_crs(crs_id):
            keys.append((_GEOKEY_MODEL_TYPE, 0, 1, 2))
            keys.append((_GEOKEY_GEOGRAPHIC_TYPE, 0, 1, code))
        else:
            keys.append((_GEOKEY_MODEL_TYPE, 0, 1, 1))
            keys.append((_GEOKEY_PROJECTED_TYPE, 0, 1, code))
    elif crs_id:
        ascii_params = crs_id + "|"
        keys.append((_GEOKEY_CITATION, _TAG_GEO_ASCII_PARAMS, len(ascii_params), 0))
    directory = [1, 1, 0, len(keys)]
    for k in keys:
        directory.extend(k)
    return directory, ascii_params


def _geokeys_to_crs(directory, ascii_params) -> str:
    if directory is None:
        return ""
    directory = list(directory)
    nkeys = directory[3]
    citation = ""
    for i in range(nkeys):
        key_id, tag, count, value = directory[4 + 4 * i: 8 + 4 * i]
        if key_id in (_GEOKEY_PROJECTED_TYPE, _GEOKEY_GEOGRAPHIC_TYPE) and tag == 0:
            if 0 < value < 32767:
                return f"EPSG:{value}"
        if key_id == _GEOKEY_CITATION and tag == _TAG_GEO_ASCII_PARAMS and ascii_params:
            citation = str(ascii_params)[:count].rstrip("|")
    return citation


def _read_geotiff(path: str) -> Grid:
    import tifffile

    with tifffile.TiffFile(path) as tif:
        page = tif.pages[0]
        if page.samplesperpixel != 1:
            raise GridError(f"{path}: expected single-band raster, "
                            f"got {page.samplesperpixel} samples per pixel")
        scale_tag = page.tags.get(_TAG_MODEL_PIXEL_SCALE)
        tiepoint_tag = page.tags.get(_TAG_MODEL_TIEPOINT)
        if scale_tag is None or tiepoint_tag is None:
            raise GridError(f"{path}: GeoTIFF georeference tags missing")
        sx, sy = float(scale_tag.value[0]), float(scale_tag.value[1])
        if not math.isclose(sx, sy, rel_tol=1e-9):
            raise GridError(f"{path}: non-square pixels ({sx} x {sy}) "
                            "are not supported")
        tp = tiepoint_tag.value
        origin_x = float(tp[3]) - float(tp[0]) * sx
        origin_y = float(tp[4]) + float(tp[1]) * sy
        nodata_tag = page.tags.get(_TAG_GDAL_NODATA)
        nodata = float(nodata_tag.value) if nodata_tag is not None else -9999.0
        geokeys = page.tags.get(_TAG_GEO_KEY_DIRECTORY)
        ascii_params = page.tags.get(_TAG_GEO_ASCII_PARAMS)
        crs_id = _geokeys_to_crs(
            geokeys.value if geokeys is not None else None,
            ascii_params.value if ascii_params is not None else "")
        values = page.asarray()
    if values.ndim != 2:
        raise GridError(f"{path}: expected a 2-d raster, got shape {values.shape}")
    rows, cols = values.shape
    return Grid(rows=rows, cols=cols, origin_x=origin_x, origin_y=origin_y,
                cell_size=sx, crs_id=crs_id, nodata=nodata,
                values=values.astype(np.float64))


def _write_geotiff(grid: Grid, path: str, rows_per_strip: int = 256) -> None:
    import tifffile

    directory, ascii_params = _crs_to_geokeys(grid.crs_id)
    extratags = [
        (_TAG_MODEL_PIXEL_SCALE, "d", 3, (grid.cell_size, grid.cell_size, 0.0), True),
        (_TAG_MODEL_TIEPOINT, "d", 6,
         (0.0, 0.0, 0.0, grid.origin_x, grid.origin_y, 0.0), True),
        (_TAG_GDAL_NODATA, "s", 0, repr(grid.nodata), True),
    ]
    if len(directory) > 4:
        extratags.append((_TAG_GEO_KEY_DIRECTORY, "H", len(directory),
                          tuple(directory), True))
    if ascii_params:
        extratags.append((_TAG_GEO_ASCII_PARAMS, "s", 0, ascii_params, True))

    # strip layout keeps compression buffers bounded on large tiles
    tifffile.imwrite(path, np.ascontiguousarray(grid.values),
                     rowsperstrip=rows_per_strip, compression="zlib",
                     extratags=extratags)


# ---------------------------------------------------------------------------
# Public I/O

def read_raster(path: str) -> Grid:
    """Read a single-band GeoTIFF or ESRI ASCII grid.

    The format is chosen by extension (.tif/.tiff vs anything else).
    Multi-band files, non-square pixels and missing georeference are
    rejected with a diagnostic.
    """
    if not os.path.exists(path):
        raise GridError(f"raster file not found: {path}")
    try:
        if path.lower().endswith((".tif", ".tiff")):
            return _read_geotiff(path)
        return _read_ascii(path)
    except GridError:
        raise
    except Exception as exc:
        raise GridError(f"could not read raster {path}: {exc}") from exc


def write_raster(grid: Grid, path: str) -> None:
    """Write a grid losslessly; read_raster(write_raster(g)) == g.

    GeoTIFF output is written in strips so rasters of tens of millions
    of cells never need a second in-memory copy.
    """
    try:
        if path.lower().endswith((".tif", ".tiff")):
            _write_geotiff(grid, path)
        else:
            _write_ascii(grid, path)
    except OSError as exc:
        raise GridError(f"could not write raster {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# Resampling

def downsample(grid: Grid, factor: int, method: str = "mean") -> Grid:
    """Aggregate factor x factor blocks, ignoring nodata within each block.

    Supports the coarse-resolution comparison experiments (1 m vs 10 m vs
    30 m inputs).  Partial blocks at the south/east edges aggregate over
    the cells that exist.
    """
    if int(factor) != factor or factor < 2:
        raise GridError(f"downsample factor must be an integer >= 2, got {factor}")
    factor = int(factor)
    if factor > grid.rows and factor > grid.cols:
        raise GridError(f"factor {factor} exceeds both grid dimensions "
                        f"{grid.rows}x{grid.cols}")
    if method not in ("mean", "min", "max"):
        raise GridError(f"unknown aggregation method {method!r}")

    out_rows = -(-grid.rows // factor)
    out_cols = -(-grid.cols // factor)
    padded = np.full((out_rows * factor, out_cols * factor), np.nan)
    vals = np.where(grid.valid_mask(), grid.values, np.nan)
    padded[:grid.rows, :grid.cols] = vals
    blocks = padded.reshape(out_rows, factor, out_cols, factor)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        if method == "mean":
            agg = np.nanmean(blocks, axis=(1, 3))
        elif method == "min":
            agg = np.nanmin(blocks, axis=(1, 3))
        else:
            agg = np.nanmax(blocks, axis=(1, 3))
    agg = np.where(np.isnan(agg), grid.nodata, agg)
    return Grid(rows=out_rows, cols=out_cols, origin_x=grid.origin_x,
                origin_y=grid.origin_y, cell_size=grid.cell_size * factor,
                crs_id=grid.crs_id, nodata=grid.nodata, values=agg)
