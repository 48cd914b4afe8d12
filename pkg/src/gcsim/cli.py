"""Command-line front end.

    gcsim simulate --config all-sram --out out/
    gcsim gen-trace --kind loop --working-set 12MB --iterations 2 --out loop.trace
    gcsim scale --level L1 --tech GC --from 28 --to 7
    gcsim compare out/all-gc-cap.report out/all-sram.report
    gcsim sweep --config all-sram all-gc-cap all-gc-area --out out/

``--config`` takes a path or the name of a shipped config. The catalog
override file is read from $GCSIM_CATALOG (or ``--catalog``).
"""
import argparse
import dataclasses
import os
import sys
from importlib import resources
from pathlib import Path

from . import catalog as catalog_mod
from . import plots, report
from .catalog import Level, TechClass, scale
from .config import load_run_config
from .engine import simulate_run
from .errors import GcsimError
from .trace import gen_loop, gen_random, gen_stream, replicate, write_trace
from .units import parse_size


def shipped_configs():
    root = resources.files("gcsim") / "configs"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".cfg"))


def resolve_config_path(name):
    path = Path(name)
    if path.exists():
        return path
    candidate = resources.files("gcsim") / "configs" / f"{name}.cfg"
    if candidate.is_file():
        return Path(str(candidate))
    raise GcsimError(f"no config file {name!r} and no shipped config of that name "
                     f"(shipped: {', '.join(shipped_configs())})")


def _write(path, text):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path


def run_one(config_name, out_dir, seed=None, figures=True):
    """Simulate one config and write its report, CSV series and figure."""
    rc = load_run_config(resolve_config_path(config_name))
    if seed is not None:
        rc = dataclasses.replace(rc, seed=seed)
    rep = simulate_run(rc)
    text = report.render(rep)
    out = Path(out_dir or rc.output_dir or ".")
    stem = rc.label
    _write(out / f"{stem}.report", text)
    parsed = report.parse(text)
    _write(out / f"{stem}.energy.csv", report.energy_csv(parsed))
    _write(out / f"{stem}.levels.csv", report.levels_csv(parsed))
    if figures:
        plots.energy_breakdown(parsed, out / f"{stem}.energy.png")
    return parsed


def cmd_simulate(args):
    parsed = run_one(args.config, args.out, args.seed, not args.no_plots)
    sys.stdout.write(report.summary_table(parsed))
    return 0


def cmd_sweep(args):
    results = [run_one(name, args.out, args.seed, not args.no_plots) for name in args.config]
    base = results[0]
    out = Path(args.out or ".")
    for parsed in results[1:]:
        rows = report.compare(parsed, base)
        stem = f"{parsed['label']}_vs_{base['label']}"
        _write(out / f"{stem}.csv", report.compare_csv(rows))
        if not args.no_plots:
            plots.normalized(rows, out / f"{stem}.png", parsed["label"], base["label"])
    labels = [p["label"] for p in results]
    for parsed in results:
        sys.stdout.write(report.summary_table(parsed))
    if not args.no_plots:
        plots.sweep_bars(labels, [int(p["energy.total_aj"]) / 1e12 for p in results],
                         out / "sweep_energy.png", "total energy (uJ)")
    return 0


def cmd_compare(args):
    a, b = report.load(args.a), report.load(args.b)
    rows = report.compare(a, b)
    sys.stdout.write(report.format_compare(rows, a["label"], b["label"]))
    if args.out:
        out = Path(args.out)
        stem = f"{a['label']}_vs_{b['label']}"
        _write(out / f"{stem}.csv", report.compare_csv(rows))
        if not args.no_plots:
            plots.normalized(rows, out / f"{stem}.png", a["label"], b["label"])
    return 0


def cmd_scale(args):
    params = catalog_mod.builtin_params(Level(args.level), TechClass(args.tech.upper()), args.hybrid)
    scaled = scale(params, args.from_nm, args.to_nm)
    print(f"# {args.level} {scaled.tech.value} scaled {args.from_nm} nm -> {args.to_nm} nm")
    for f in dataclasses.fields(scaled):
        value = getattr(scaled, f.name)
        if value is None:
            continue
        if f.name == "tech":
            value = value.value
        print(f"{f.name} = {value}")
    return 0


def cmd_gen_trace(args):
    common = dict(write_ratio=args.write_ratio, seed=args.seed, gap=args.gap, data=args.data)
    if args.kind == "loop":
        if args.working_set is None:
            raise GcsimError("--kind loop needs --working-set")
        trace = gen_loop(parse_size(args.working_set), args.stride, args.iterations, **common)
    elif args.kind == "stream":
        if args.count is None:
            raise GcsimError("--kind stream needs --count")
        trace = gen_stream(args.count, args.stride, **common)
    else:
        if args.count is None or args.hot is None:
            raise GcsimError("--kind random needs --count and --hot")
        trace = gen_random(args.count, parse_size(args.hot), parse_size(args.cold or 0),
                           args.hot_fraction, ifetch_ratio=args.ifetch_ratio, **common)
    if args.cores > 1:
        trace = replicate(trace, args.cores)
    write_trace(trace, args.out, binary=args.binary)
    return 0


def cmd_configs(args):
    for name in shipped_configs():
        print(name)
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="gcsim", description="Cache hierarchy energy/latency simulator.")
    p.add_argument("--catalog", help="technology catalog override file (default: $GCSIM_CATALOG)")
    sub = p.add_subparsers(dest="command", metavar="command")

    s = sub.add_parser("simulate", help="run one config and write its report")
    s.add_argument("--config", required=True, help="config path or shipped config name")
    s.add_argument("--out", help="output directory (default: config output.dir or .)")
    s.add_argument("--seed", type=int, help="override the config seed")
    s.add_argument("--no-plots", action="store_true", help="skip PNG figures")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("sweep", help="run several configs, normalize to the first")
    s.add_argument("--config", required=True, nargs="+", help="config paths or shipped names")
    s.add_argument("--out", help="output directory")
    s.add_argument("--seed", type=int)
    s.add_argument("--no-plots", action="store_true")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("compare", help="normalize report A against report B")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--out", help="also write the ratio table as CSV (and a figure) here")
    s.add_argument("--no-plots", action="store_true")
    s.set_defaults(func=cmd_compare)

    s = sub.add_parser("scale", help="print technology parameters scaled to another node")
    s.add_argument("--level", required=True, choices=[lv.value for lv in Level])
    s.add_argument("--tech", required=True, help="SRAM, GC, EDRAM or STTRAM")
    s.add_argument("--from", dest="from_nm", type=int, default=28)
    s.add_argument("--to", dest="to_nm", type=int, required=True)
    s.add_argument("--hybrid", action="store_true", help="use the hybrid-LLC way parameters")
    s.set_defaults(func=cmd_scale)

    s = sub.add_parser("gen-trace", help="write a synthetic trace file")
    s.add_argument("--kind", required=True, choices=["loop", "random", "stream"])
    s.add_argument("--out", required=True, help="output trace path")
    s.add_argument("--working-set", help="loop: working set size, e.g. 12MB")
    s.add_argument("--iterations", type=int, default=1)
    s.add_argument("--stride", type=int, default=64)
    s.add_argument("--count", type=int, help="random/stream: number of records")
    s.add_argument("--hot", help="random: hot region size")
    s.add_argument("--cold", help="random: cold region size")
    s.add_argument("--hot-fraction", type=float, default=1.0)
    s.add_argument("--ifetch-ratio", type=float, default=0.0)
    s.add_argument("--write-ratio", type=float, default=0.0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--gap", type=int, default=0)
    s.add_argument("--cores", type=int, default=1)
    s.add_argument("--data", choices=["none", "random", "zero", "sparse"], help="payload kind")
    s.add_argument("--binary", action="store_true", help="write the length-prefixed binary form")
    s.set_defaults(func=cmd_gen_trace)

    s = sub.add_parser("configs", help="list shipped configs")
    s.set_defaults(func=cmd_configs)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    if args.catalog:
        os.environ["GCSIM_CATALOG"] = args.catalog
    try:
        return args.func(args)
    except (GcsimError, OSError, ValueError) as exc:
        print(f"gcsim: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
