"""Command-line entry point: trace, extract, gen, rssi, ber, presets.

Every subcommand is a deterministic composition of the library operations;
re-running with the same configuration and seed produces byte-identical
output files. The seed falls back to the ``IDS_CHAN_SEED`` environment
variable, then to a fixed constant.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import extract, genchan, linksim, params, pathdata, tracer

DEFAULT_SEED = 12345


def _seed_from_env(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get("IDS_CHAN_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ValueError(f"IDS_CHAN_SEED={env!r} is not an integer") from None
    return DEFAULT_SEED


def _parse_ebn0(text: str) -> list[float]:
    """start:step:stop (inclusive) or a comma list of values, in dB."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"expected start:step:stop, got {text!r}")
        start, step, stop = (float(p) for p in parts)
        if step <= 0:
            raise ValueError("ebn0 step must be positive")
        n = int((stop - start) / step + 1e-9) + 1
        return [start + i * step for i in range(n)]
    return [float(p) for p in text.split(",") if p.strip()]


def _fmt(x: float) -> str:
    return repr(float(x))


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="\n") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def cmd_trace(args) -> int:
    budget_kwargs = {}
    if args.scene:
        scene, extras = tracer.scene_from_json(args.scene)
        if "sensitivity_dbm" in extras:
            budget_kwargs["sensitivity_dbm"] = extras["sensitivity_dbm"]
        if args.max_reflections is not None:
            scene = replace(scene, max_reflections=args.max_reflections)
    else:
        if args.preset is None:
            raise ValueError("trace needs --preset or --scene")
        scene = tracer.build_scenario(
            tracer.ScenarioPreset(args.preset),
            max_reflections=3 if args.max_reflections is None else args.max_reflections,
        )
    if args.sensitivity is not None:
        budget_kwargs["sensitivity_dbm"] = args.sensitivity
    budget = linksim.LinkBudget(**budget_kwargs)
    ds = tracer.trace_scenario(scene, budget, threads=args.threads)
    pathdata.save_dataset(ds, args.out)
    print(f"wrote {len(ds.records)} records to {args.out}")
    return 0


def cmd_extract(args) -> int:
    ds = pathdata.load_dataset(args.infile)
    summary = extract.summarize(ds)
    out = Path(args.out)
    params.write_params_csv([summary.params], out)
    ratios_path = out.with_suffix(".ratios.csv")
    params.write_ratios_csv([(ds.scenario_name, summary.ratios)], ratios_path)
    print(f"wrote {out} and {ratios_path}")
    return 0


def cmd_gen(args) -> int:
    pset = params.preset(args.preset)
    cond = pathdata.Condition(args.cond)
    seed = _seed_from_env(args.seed)
    reals = [
        genchan.draw_realization(pset, cond, n_taps=args.taps, rng_seed=seed + i)
        for i in range(args.count)
    ]
    ds = genchan.realizations_to_dataset(reals, f"{pset.name}-{cond.value}", linksim.LinkBudget())
    pathdata.save_dataset(ds, args.out)
    print(f"wrote {args.count} realizations to {args.out}")
    return 0


def cmd_rssi(args) -> int:
    ds = pathdata.load_dataset(args.infile)
    points = linksim.rssi_map(ds)
    rows = []
    for p in points:
        rssi = "-INF" if p.rssi_dbm == -float("inf") else _fmt(p.rssi_dbm)
        snr = "-INF" if p.snr_db == -float("inf") else _fmt(p.snr_db)
        rows.append(
            [p.rx_id, _fmt(p.position_m[0]), _fmt(p.position_m[1]), _fmt(p.position_m[2]),
             p.condition.value, rssi, snr]
        )
    _write_csv(Path(args.out), ["rx_id", "x", "y", "z", "condition", "rssi_dbm", "snr_db"], rows)
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def cmd_ber(args) -> int:
    names = [n.strip() for n in args.presets.split(",") if n.strip()]
    if not names:
        raise ValueError("--presets must name at least one parameter set")
    sets = [params.preset(n) for n in names]
    cond = pathdata.Condition(args.cond)
    grid = _parse_ebn0(args.ebn0)
    seed = _seed_from_env(args.seed)
    sweep = linksim.ber_sweep(
        sets, cond, grid, args.bits, seed, block_bits=args.block_bits, threads=args.threads
    )
    rows = []
    for ps in sets:
        for pt in sweep.curves[ps.name]:
            rows.append(
                [ps.name, cond.value, _fmt(pt.ebn0_db), _fmt(pt.ber), _fmt(pt.ci95), pt.n_bits]
            )
    _write_csv(Path(args.out), ["preset", "condition", "ebn0_db", "ber", "ci95", "n_bits"], rows)
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            gap = sweep.gap_db(sets[i].name, sets[j].name, args.target_ber)
            shown = "unavailable" if gap is None else f"{gap:.2f} dB"
            print(f"gap at BER {args.target_ber:g}: {sets[i].name} vs {sets[j].name}: {shown}")
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def cmd_presets(args) -> int:
    params.write_params_csv(list(params.PRESETS.values()), args.out)
    print(f"wrote presets to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="idschan",
        description="Cabin mmWave multipath toolkit: synthesize, ingest, extract, generate, simulate.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("trace", help="ray-trace a scenario into a dataset CSV")
    p.add_argument("--preset", choices=[s.value for s in tracer.ScenarioPreset])
    p.add_argument("--scene", help="scene config JSON (overrides --preset)")
    p.add_argument("--out", required=True)
    p.add_argument("--max-reflections", type=int, default=None)
    p.add_argument("--sensitivity", type=float, default=None, help="path cull threshold, dBm")
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("extract", help="fit channel parameters from a dataset CSV")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True, help="parameter table CSV; ratios go to <out>.ratios.csv")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("gen", help="draw channel realizations from a preset")
    p.add_argument("--preset", required=True)
    p.add_argument("--cond", choices=["LOS", "NLOS"], default="LOS")
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--taps", type=int, default=20)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("rssi", help="per-receiver RSSI/SNR table from a dataset CSV")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_rssi)

    p = sub.add_parser("ber", help="Monte-Carlo BPSK BER sweep over presets")
    p.add_argument("--presets", required=True, help="comma-separated preset names")
    p.add_argument("--cond", choices=["LOS", "NLOS"], default="LOS")
    p.add_argument("--ebn0", default="0:2:20", help="start:step:stop in dB, or comma list")
    p.add_argument("--bits", type=int, default=200_000)
    p.add_argument("--block-bits", type=int, default=100)
    p.add_argument("--target-ber", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ber)

    p = sub.add_parser("presets", help="dump the built-in parameter tables")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_presets)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SystemExit:
        raise
    except (
        pathdata.DatasetFormatError,
        pathdata.DatasetValidationError,
        tracer.GeometryError,
        extract.FitError,
        KeyError,
        ValueError,
        OSError,
    ) as exc:
        msg = exc.args[0] if exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
