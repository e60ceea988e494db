"""Slope and aspect rasters derived from a DEM.

Gradients use weighted central differences over an odd window (Horn
weighting for the 3x3 case); border cells fall back to one-sided
differences.  Planar (projected-CRS) geometry is assumed; on metre-scale
urban tiles the geodesic correction is far below the sector resolution
of the radiation model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grids import Grid, GridError

__all__ = ["TerrainDerivatives", "slope", "aspect", "gradients",
           "FLAT_ASPECT"]

# aspect sentinel for cells with no measurable downhill direction
FLAT_ASPECT = -1.0

_FLAT_GRADIENT = 1e-8


@dataclass
class TerrainDerivatives:
    slope_deg: Grid
    aspect_deg: Grid


def _check_window(dem: Grid, window: int) -> int:
    if window % 2 == 0 or not 3 <= window <= 15:
        raise GridError(f"window must be an odd integer in 3..15, got {window}")
    if dem.rows < window or dem.cols < window:
        raise GridError(f"DEM {dem.rows}x{dem.cols} smaller than window {window}")
    return window // 2


def gradients(dem: Grid, window: int = 3) -> tuple[np.ndarray, np.ndarray]:
    """Per-cell (dz/dx eastward, dz/dy northward), nodata cells -> nan.

    Each gradient is a weighted mean of centred pair differences
    (z[+k] - z[-k]) / (2 k s) with weights smooth_j * k^2, which is exact
    on planes for any window.  For window=3 the cross-row smoothing uses
    Horn's 1-2-1 weights.  Pairs touching nodata are dropped and the
    remaining weights renormalized; cells left with no centred pair
    (borders, data gaps) use one-sided differences to the nearest
    neighbor.
    """
    half = _check_window(dem, window)
    z = np.where(dem.valid_mask(), dem.values, np.nan)
    s = dem.cell_size
    pad = np.full((dem.rows + 2 * half, dem.cols + 2 * half), np.nan)
    pad[half:half + dem.rows, half:half + dem.cols] = z

    smooth = np.array([2.0, 1.0] if window == 3 else [1.0] * (half + 1))
    # smooth[j] indexes |row offset| (resp. |col offset|) for the cross axis

    def axis_gradient(transposed: bool) -> np.ndarray:
        zz = pad.T if transposed else pad
        num = np.zeros_like(z if not transposed else z.T)
        den = np.zeros_like(num)
        rows, cols = num.shape
        for j in range(-half, half + 1):
            wj = smooth[abs(j)] if window == 3 else 1.0
            for k in range(1, half + 1):
                plus = zz[half + j:half + j + rows, half + k:half + k + cols]
                minus = zz[half + j:half + j + rows, half - k:half - k + cols]
                est = (plus - minus) / (2.0 * k * s)
                w = wj * k * k
                ok = ~np.isnan(est)
                num[ok] += w * est[ok]
                den[ok] += w
        grad = np.where(den > 0, num / np.where(den > 0, den, 1.0), np.nan)
        # one-sided fallback where no centred pair was available
        need = np.isnan(grad) & ~np.isnan(zz[half:half + rows, half:half + cols])
        if need.any():
            here = zz[half:half + rows, half:half + cols]
            fwd = (zz[half:half + rows, half + 1:half + 1 + cols] - here) / s
            bwd = (here - zz[half:half + rows, half - 1:half - 1 + cols]) / s
            both = ~np.isnan(fwd) & ~np.isnan(bwd)
            one = np.where(both, (fwd + bwd) / 2.0,
                           np.where(~np.isnan(fwd), fwd, bwd))
            grad[need] = one[need]
        return grad.T if transposed else grad

    dz_dx = axis_gradient(False)          # column axis = east
    dz_drow = axis_gradient(True)         # row axis, increasing southward
    dz_dnorth = -dz_drow
    invalid = np.isnan(z)
    dz_dx[invalid] = np.nan
    dz_dnorth[invalid] = np.nan
    return dz_dx, dz_dnorth


def slope(dem: Grid, window: int = 3) -> Grid:
    """Slope in degrees [0, 90]; nodata propagates from the DEM."""
    gx, gy = gradients(dem, window)
    mag = np.hypot(gx, gy)
    deg = np.degrees(np.arctan(mag))
    out = np.where(np.isnan(deg), dem.nodata, deg)
    return dem.like(out)


def aspect(dem: Grid, window: int = 3) -> Grid:
    """Downhill direction, degrees clockwise from north; flat cells -> -1."""
    gx, gy = gradients(dem, window)
    mag = np.hypot(gx, gy)
    az = np.degrees(np.arctan2(-gx, -gy)) % 360.0
    out = np.where(mag < _FLAT_GRADIENT, FLAT_ASPECT, az)
    out = np.where(np.isnan(mag), dem.nodata, out)
    return dem.like(out)


def terrain_derivatives(dem: Grid, window: int = 3) -> TerrainDerivatives:
    return TerrainDerivatives(slope_deg=slope(dem, window),
                              aspect_deg=aspect(dem, window))
