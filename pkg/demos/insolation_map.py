"""Monthly insolation rasters over a synthetic city block.

Shows the shading signal: a tall slab south of a low roof cuts its
January insolation, while the June sun climbs high enough to clear it.
Run directly; no inputs needed.
"""

import numpy as np

from rooftopsolar import (AtmosphereParams, Grid, TimeConfig, aspect,
                          build_sky_map, build_sun_map,
                          global_insolation_grid, slope)

# flat ground, a 4 m roof, and an 18 m slab 6 m to its south
n = 50
z = np.zeros((n, n))
z[20:24, 20:28] = 4.0     # the roof we watch
z[30:33, 16:32] = 18.0    # the slab (rows grow southward)
dem = Grid.from_array(z, cell_size=1.0, crs_id="EPSG:32643")
slope_deg, aspect_deg = slope(dem), aspect(dem)

sky = build_sky_map(8, 16)
atm = AtmosphereParams.ideal()
latitude = 23.0
roof = (22, 24)
ground = (10, 10)

for month, name in ((1, "January"), (6, "June")):
    sun = build_sun_map(latitude, TimeConfig(mode="month", month=month))
    _, _, total = global_insolation_grid(dem, slope_deg, aspect_deg, None,
                                         sun, sky, atm)
    r = total.values
    shade = 1.0 - r[roof] / r[ground]
    print(f"{name}: open ground {r[ground]:7.0f} Wh/m2/day, "
          f"roof {r[roof]:7.0f} Wh/m2/day, slab costs {100 * shade:4.1f}%")

# the same run, all 12 months sharing one horizon computation
sun_maps = [build_sun_map(latitude, TimeConfig(mode="month", month=m))
            for m in range(1, 13)]
triples = global_insolation_grid(dem, slope_deg, aspect_deg, None,
                                 sun_maps, sky, [atm] * 12)
days = [31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31]
annual = sum(t.values[roof] * d for (_, _, t), d in zip(triples, days))
print(f"annual roof insolation: {annual / 1000.0:.0f} kWh/m2")
