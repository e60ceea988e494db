"""Command-line entry point.

Subcommands mirror the pipeline stages so each can be rerun on its own:
run, terrain, radiation, calibrate, suitability, power, downsample.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .pipeline import PipelineError, RunConfig, load_config, run_pipeline


def _parse_atmosphere(spec: str) -> dict:
    """'ideal', 'calibrated', or 'd=X,tau=Y'."""
    if spec in ("ideal", "calibrated"):
        return {"atmosphere": spec}
    try:
        parts = dict(p.split("=", 1) for p in spec.split(","))
        return {"atmosphere": "explicit",
                "diffuse_proportion": float(parts["d"]),
                "transmissivity": float(parts["tau"])}
    except (KeyError, ValueError) as exc:
        raise argparse.ArgumentTypeError(
            f"atmosphere must be ideal, calibrated, or d=X,tau=Y: {spec!r}"
        ) from exc


def _add_run_overrides(p: argparse.ArgumentParser) -> None:
    p.add_argument("--workers", type=int, help="bound for all worker pools")
    p.add_argument("--month", type=int, help="run a single month (1-12)")
    p.add_argument("--annual", action="store_true", help="run the whole year")
    p.add_argument("--atmosphere", type=_parse_atmosphere,
                   help="ideal | calibrated | d=X,tau=Y")
    p.add_argument("--output", help="output directory")


def _cmd_run(args) -> int:
    overrides = {}
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.month is not None:
        overrides.update(mode="month", month=args.month)
    if args.annual:
        overrides["mode"] = "annual"
    if args.atmosphere:
        overrides.update(args.atmosphere)
    if args.output:
        overrides["output_dir"] = args.output
    config = load_config(args.config, **overrides)
    artifacts = run_pipeline(config)
    for name, path in sorted(artifacts.items()):
        print(f"{name}: {path}")
    return 0


def _cmd_terrain(args) -> int:
    from .grids import read_raster, write_raster
    from .terrain import aspect, slope
    dem = read_raster(args.dem)
    write_raster(slope(dem, args.window), args.out_slope)
    write_raster(aspect(dem, args.window), args.out_aspect)
    return 0


def _cmd_radiation(args) -> int:
    config = _config_from_args(args)
    config.preset = "2D"  # no suitability filtering in this stage command
    run_pipeline(config)
    return 0


def _cmd_calibrate(args) -> int:
    from .calibration import read_station_csv, write_station_report
    records = read_station_csv(args.station_csv)
    if not records:
        raise PipelineError("calibrate", f"no valid rows in {args.station_csv}")
    write_station_report(records, args.out)
    print(f"calibrated {len(records)} station-months -> {args.out}")
    return 0


def _cmd_suitability(args) -> int:
    from .grids import read_raster, write_raster
    from .suitability import SuitabilityCriteria, suitable_cell_mask
    criteria = SuitabilityCriteria(period=args.period, preset=args.preset,
                                   min_radiation_kwh_m2=args.min_radiation)
    mask = suitable_cell_mask(read_raster(args.radiation),
                              read_raster(args.slope),
                              read_raster(args.aspect), criteria)
    write_raster(mask, args.out)
    return 0


def _cmd_power(args) -> int:
    from .footprints import read_footprints, rasterize_zones
    from .grids import read_raster
    from .power import (building_filter, building_records, rank_top_n,
                        write_building_csv, write_top_n_geojson, zonal_stats)
    radiation = read_raster(args.radiation)
    mask = read_raster(args.mask) if args.mask else None
    footprints = read_footprints(args.footprints)
    zones = rasterize_zones(footprints, radiation)
    stats = zonal_stats(radiation, zones, mask)
    records = building_filter(building_records(stats, zones, footprints,
                                               area_basis=args.area_basis),
                              args.min_area)
    records.sort(key=lambda r: (-r.usable_electricity_kwh, r.building_id))
    write_building_csv(records, args.out_csv)
    if args.out_geojson:
        write_top_n_geojson(rank_top_n(records, args.top_n) if records else [],
                            args.out_geojson)
    return 0


def _cmd_downsample(args) -> int:
    from .grids import downsample, read_raster, write_raster
    grid = read_raster(args.input)
    write_raster(downsample(grid, args.factor, args.method), args.output)
    return 0


def _config_from_args(args) -> RunConfig:
    if args.config:
        config = load_config(args.config)
    else:
        config = RunConfig(dem_path=args.dem or "")
    if getattr(args, "dem", None):
        config.dem_path = args.dem
    if getattr(args, "footprints", None):
        config.footprints_path = args.footprints
    if args.output:
        config.output_dir = args.output
    if args.month is not None:
        config.mode, config.month = "month", args.month
    if args.annual:
        config.mode = "annual"
    if args.atmosphere:
        for k, v in args.atmosphere.items():
            setattr(config, k, v)
    if args.workers is not None:
        config.workers = args.workers
    return config


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rooftopsolar",
        description="Rooftop solar potential from a DEM and building footprints")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="full pipeline from a config file")
    p.add_argument("--config", required=True)
    _add_run_overrides(p)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("terrain", help="slope and aspect rasters from a DEM")
    p.add_argument("--dem", required=True)
    p.add_argument("--window", type=int, default=3)
    p.add_argument("--out-slope", required=True)
    p.add_argument("--out-aspect", required=True)
    p.set_defaults(func=_cmd_terrain)

    p = sub.add_parser("radiation", help="insolation rasters for a DEM")
    p.add_argument("--config")
    p.add_argument("--dem")
    p.add_argument("--footprints")
    _add_run_overrides(p)
    p.set_defaults(func=_cmd_radiation)

    p = sub.add_parser("calibrate",
                       help="atmosphere parameters from station data")
    p.add_argument("--station-csv", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_calibrate)

    p = sub.add_parser("suitability", help="suitable-cell mask")
    p.add_argument("--radiation", required=True,
                   help="radiation raster in kWh/m^2 for the period")
    p.add_argument("--slope", required=True)
    p.add_argument("--aspect", required=True)
    p.add_argument("--period", choices=("annual", "monthly"), default="annual")
    p.add_argument("--preset", choices=("2D", "3D"), default="3D")
    p.add_argument("--min-radiation", type=float, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_suitability)

    p = sub.add_parser("power", help="per-building electricity table")
    p.add_argument("--radiation", required=True,
                   help="radiation raster in kWh/m^2 for the period")
    p.add_argument("--footprints", required=True)
    p.add_argument("--mask", help="suitability mask raster")
    p.add_argument("--area-basis", choices=("suitable", "footprint"),
                   default="suitable")
    p.add_argument("--min-area", type=float, default=139.3546)
    p.add_argument("--top-n", type=int, default=10)
    p.add_argument("--out-csv", required=True)
    p.add_argument("--out-geojson")
    p.set_defaults(func=_cmd_power)

    p = sub.add_parser("downsample", help="block-aggregate a raster")
    p.add_argument("--input", required=True)
    p.add_argument("--factor", type=int, required=True)
    p.add_argument("--method", choices=("mean", "min", "max"), default="mean")
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_downsample)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except PipelineError as exc:
        print(f"error {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
