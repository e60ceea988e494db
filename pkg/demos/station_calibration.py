"""Atmosphere calibration from the bundled 2021 station dataset.

Turns monthly mean global/diffuse radiation into per-month diffuse
proportion and transmissivity, per station and merged.  Run directly.
"""

import importlib.resources

from rooftopsolar import transmissivity_from_diffuse
from rooftopsolar.calibration import (calibrate_by_station,
                                      calibrate_records, read_station_csv)

csv_path = str(importlib.resources.files("rooftopsolar") / "data" /
               "imd_monthly_2021.csv")
records = read_station_csv(csv_path)
print(f"{len(records)} station-month records from {csv_path}\n")

print("station       month      d     tau")
for station, months in calibrate_by_station(records).items():
    for month, atm in sorted(months.items()):
        print(f"{station:<12}  {month:>4}  {atm.diffuse_proportion:5.3f}"
              f"  {atm.transmissivity:5.3f}")

# months covered by several stations average their d values
merged = calibrate_records(records)
print("\nmerged January d:", round(merged[1].diffuse_proportion, 3))

# the linear law behind tau: clear sky d=0.3 anchors tau=0.5
for d in (0.0, 0.3, 0.6, 0.9):
    print(f"d={d:.1f} -> tau={transmissivity_from_diffuse(d):.3f}")
