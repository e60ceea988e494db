"""Slope, aspect, and horizon profiles on a small synthetic terrain.

Builds a 60 x 60 m tile with a ridge and a tower, derives the terrain
rasters, and prints the horizon profile seen from a cell in the tower's
shadow.  Run directly; no inputs needed.
"""

import numpy as np

from rooftopsolar import (Grid, aspect, gap_fraction, horizon_angles, slope)

# a north-south ridge rising to 6 m plus a 25 m tower
n = 60
rr, cc = np.mgrid[0:n, 0:n]
z = 6.0 * np.exp(-((cc - 20.0) ** 2) / 80.0)
z[28:32, 40:44] = 25.0
dem = Grid.from_array(z, cell_size=1.0, crs_id="EPSG:32643")

slope_deg = slope(dem)
aspect_deg = aspect(dem)
print("slope  min/max:", slope_deg.values.min(), slope_deg.values.max())
print("aspect at (30, 15):", aspect_deg.values[30, 15],
      " (west flank of the ridge drains west, 270)")

# horizon profile for a cell just east of the tower
prof = horizon_angles(dem, 30, 50, n_directions=32)
step = 360.0 / prof.angles_deg.size
print("\nazimuth -> horizon elevation (deg):")
for i, h in enumerate(prof.angles_deg):
    if h > 1.0:
        print(f"  {i * step:5.1f}  {h:5.1f}")

# the tower blocks a low western sky sector almost completely
west_low = gap_fraction(prof, (60.0, 90.0), (250.0, 290.0))
west_high = gap_fraction(prof, (0.0, 30.0), (250.0, 290.0))
print(f"\ngap fraction, low western sector:  {west_low:.3f}")
print(f"gap fraction, high western sector: {west_high:.3f}")
