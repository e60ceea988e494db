"""Monthly atmosphere parameters from ground-station radiation records.

The station CSV carries monthly mean global and diffuse radiation in any
consistent unit; only their ratio is used.  Transmissivity follows a
linear law in the diffuse proportion, anchored so that d = 0.3 maps to
the clear-sky transmissivity 0.5.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass

from .radiation import AtmosphereParams

log = logging.getLogger(__name__)

__all__ = ["StationRecord", "diffuse_proportion", "transmissivity_from_diffuse",
           "calibrate_from_station_csv", "calibrate_records",
           "calibrate_by_station", "read_station_csv",
           "write_calibration_report", "write_station_report"]

_D_CLAMP = 0.99
_TAU_SLOPE = 5.0 / 7.0

_REQUIRED_COLUMNS = ("month", "year", "station_id", "mean_global", "mean_diffuse")


@dataclass
class StationRecord:
    month: int
    year: int
    station_id: str
    mean_global: float
    mean_diffuse: float

    def __post_init__(self):
        if not 1 <= self.month <= 12:
            raise ValueError(f"month must be 1..12, got {self.month}")
        if self.mean_global <= 0:
            raise ValueError(f"mean_global must be positive, got {self.mean_global}")
        if self.mean_diffuse < 0:
            raise ValueError(f"mean_diffuse must be >= 0, got {self.mean_diffuse}")
        if self.mean_diffuse > self.mean_global:
            log.warning("station %s %d-%02d: diffuse %g exceeds global %g",
                        self.station_id, self.year, self.month,
                        self.mean_diffuse, self.mean_global)


def diffuse_proportion(mean_diffuse: float, mean_global: float) -> float:
    """d = diffuse / global, clamped into [0, 0.99]."""
    if mean_global <= 0:
        raise ValueError(f"mean_global must be positive, got {mean_global}")
    d = mean_diffuse / mean_global
    if d < 0.0:
        d = 0.0
    if d > _D_CLAMP:
        log.warning("diffuse proportion %.3f clamped to %.2f", d, _D_CLAMP)
        d = _D_CLAMP
    return d


def transmissivity_from_diffuse(d: float) -> float:
    """Linear inverse relation tau = (5/7) * (1 - d).

    Passes exactly through the clear-sky anchor (d = 0.3 -> tau = 0.5)
    and decreases monotonically to 0 as the sky becomes fully diffuse.
    """
    if not 0 <= d < 1:
        raise ValueError(f"diffuse proportion must be in [0, 1), got {d}")
    return _TAU_SLOPE * (1.0 - d)


def calibrate_records(records: list[StationRecord]) -> dict[int, AtmosphereParams]:
    """Per-month atmosphere parameters; multiple records for a month are
    averaged (on the monthly d values)."""
    by_month: dict[int, list[float]] = {}
    for rec in records:
        d = diffuse_proportion(rec.mean_diffuse, rec.mean_global)
        by_month.setdefault(rec.month, []).append(d)
    out = {}
    for month, ds in sorted(by_month.items()):
        d = sum(ds) / len(ds)
        out[month] = AtmosphereParams(diffuse_proportion=d,
                                      transmissivity=transmissivity_from_diffuse(d))
    return out


def read_station_csv(path: str) -> list[StationRecord]:
    records = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ValueError(f"{path}: empty station CSV")
        missing = [c for c in _REQUIRED_COLUMNS if c not in reader.fieldnames]
        if missing:
            raise ValueError(f"{path}: missing columns {missing}")
        for lineno, row in enumerate(reader, start=2):
            try:
                records.append(StationRecord(
                    month=int(row["month"]), year=int(row["year"]),
                    station_id=row["station_id"],
                    mean_global=float(row["mean_global"]),
                    mean_diffuse=float(row["mean_diffuse"])))
            except (TypeError, ValueError) as exc:
                log.warning("%s:%d: skipping row (%s)", path, lineno, exc)
    return records


def calibrate_from_station_csv(path: str) -> dict[int, AtmosphereParams]:
    """Month -> AtmosphereParams from a station CSV.

    Unparseable rows are skipped with a per-row diagnostic; the run
    continues as long as at least one row is valid.
    """
    records = read_station_csv(path)
    if not records:
        raise ValueError(f"{path}: no valid station records")
    return calibrate_records(records)


def calibrate_by_station(records: list[StationRecord]
                         ) -> dict[str, dict[int, AtmosphereParams]]:
    """Per-station monthly atmosphere parameters (one row per station
    and month, matching how station reports are published)."""
    by_station: dict[str, list[StationRecord]] = {}
    for rec in records:
        by_station.setdefault(rec.station_id, []).append(rec)
    return {sid: calibrate_records(recs)
            for sid, recs in sorted(by_station.items())}


def write_calibration_report(params: dict[int, AtmosphereParams], path: str,
                             station_id: str = "") -> None:
    """Emit the month / d / tau table as CSV."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["station_id", "month", "diffuse_proportion",
                         "transmissivity"])
        for month, atm in sorted(params.items()):
            writer.writerow([station_id, month,
                             f"{atm.diffuse_proportion:.4f}",
                             f"{atm.transmissivity:.4f}"])


def write_station_report(records: list[StationRecord], path: str) -> None:
    """Per-station calibration report: one CSV row per (station, month)."""
    table = calibrate_by_station(records)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["station_id", "month", "diffuse_proportion",
                         "transmissivity"])
        for sid, months in table.items():
            for month, atm in sorted(months.items()):
                writer.writerow([sid, month,
                                 f"{atm.diffuse_proportion:.4f}",
                                 f"{atm.transmissivity:.4f}"])
