"""Command-line interface.

Subcommands: build, export-qasm, simulate, bounds, sweep, cumulative, plot.
Sweep-style commands take a JSON config file plus flag overrides; the output
directory may also be overridden with the FIDBOUNDS_OUTPUT_DIR env var.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .circuits import MeasurementBasis, cnot_count, depth, to_qasm
from .bounds import dicke_lower_bound, ghz_lower_bound
from .dicke import DickeSpec
from .ghz import GhzSpec
from .harness import (
    ExperimentConfig,
    build_state_circuit,
    cumulative_for_state,
    export_all_qasm,
    file_slug,
    read_summary_csv,
    run_sweep,
    settings_for,
    simulate_setting,
    shots_for,
    write_cumulative_csv,
)
from .simulator import NoiseSpec, derive_seed


def _state_spec(args) -> DickeSpec | GhzSpec:
    if args.family == "dicke":
        if args.k is None:
            raise SystemExit("--k is required for dicke states")
        return DickeSpec(args.n, args.k)
    layout = "linear" if args.family == "ghz-linear" else "logarithmic"
    return GhzSpec(args.n, layout)


def _add_state_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", required=True, choices=["dicke", "ghz-linear", "ghz-log"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=None, help="Hamming weight (dicke only)")


def _add_run_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--shots", type=int, default=None, help="override the built-in shot rule")
    p.add_argument("--p1", type=float, default=None,
                   help="1-qubit depolarizing probability (default: package default)")
    p.add_argument("--p2", type=float, default=None,
                   help="2-qubit depolarizing probability (default: package default)")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out", type=str, default=None)


def _add_config_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=str, default=None, help="JSON experiment config")
    p.add_argument("--family", choices=["dicke", "ghz-linear", "ghz-log"], default=None)
    p.add_argument("--n-min", type=int, default=None)
    p.add_argument("--n-max", type=int, default=None)
    p.add_argument("--k-rule", type=str, default=None)
    p.add_argument("--shots", type=int, default=None)
    p.add_argument("--p1", type=float, default=None)
    p.add_argument("--p2", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", type=str, default=None)


def _config_from_args(args) -> ExperimentConfig:
    base = {}
    noise = {}
    if args.config:
        base = json.loads(Path(args.config).read_text())
        noise = base.pop("noise", {})
    if args.family is not None:
        base["family"] = args.family
    if args.n_min is not None or args.n_max is not None:
        lo, hi = base.get("n_range", (2, 2))
        base["n_range"] = (args.n_min if args.n_min is not None else lo,
                           args.n_max if args.n_max is not None else hi)
    if getattr(args, "k_rule", None) is not None:
        base["k_rule"] = args.k_rule
    if args.shots is not None:
        base["shots_rule"] = args.shots
    if args.p1 is not None:
        noise["p1"] = args.p1
    if args.p2 is not None:
        noise["p2"] = args.p2
    if args.seed is not None:
        base["seed"] = args.seed
    if args.out is not None:
        base["output_dir"] = args.out
    if "family" not in base or "n_range" not in base:
        raise SystemExit("need --config or both --family and --n-min/--n-max")
    base["n_range"] = tuple(base["n_range"])
    return ExperimentConfig(noise=NoiseSpec(**noise), **base)


def _report_json(row_or_report) -> str:
    return json.dumps(dataclasses.asdict(row_or_report), indent=2, default=str)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="fidbounds", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build one circuit and print its stats")
    _add_state_args(p)
    p.add_argument("--qasm", type=str, default=None, help="also write OpenQASM to this path")

    p = sub.add_parser("export-qasm", help="write .qasm files for a sweep")
    _add_config_args(p)

    p = sub.add_parser("simulate", help="sample shots for one state and print them")
    _add_state_args(p)
    _add_run_args(p)
    p.add_argument("--basis", choices=["X", "Y", "Z"], default="Z")

    p = sub.add_parser("bounds", help="estimate bounds for one state")
    _add_state_args(p)
    _add_run_args(p)

    p = sub.add_parser("sweep", help="run a full sweep: CSVs + SVG plots")
    _add_config_args(p)

    p = sub.add_parser("cumulative", help="cumulative-by-shot curves for one state")
    _add_state_args(p)
    _add_run_args(p)

    p = sub.add_parser("plot", help="re-render plots from an existing summary.csv")
    p.add_argument("summary", type=str)
    p.add_argument("--out", type=str, default=".")

    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _dispatch(args) -> int:
    if args.command == "build":
        circuit = build_state_circuit(_state_spec(args))
        print(f"{circuit.label}: width={circuit.width} gates={len(circuit)} "
              f"cnots={cnot_count(circuit)} depth={depth(circuit)}")
        if args.qasm:
            Path(args.qasm).write_text(to_qasm(circuit))
            print(f"wrote {args.qasm}")
        return 0

    if args.command == "export-qasm":
        for path in export_all_qasm(_config_from_args(args)):
            print(path)
        return 0

    if args.command == "simulate":
        spec = _state_spec(args)
        circuit = build_state_circuit(spec)
        noise = _noise_from_args(args)
        shots = args.shots or shots_for(_mini_cfg(args, spec), spec)
        table = simulate_setting(circuit, MeasurementBasis(args.basis), shots, noise, args.seed)
        for i, outcome in enumerate(table.outcomes):
            print(f"{i},{outcome}")
        return 0

    if args.command == "bounds":
        spec = _state_spec(args)
        cfg = _mini_cfg(args, spec)
        circuit = build_state_circuit(spec)
        shots = args.shots or shots_for(cfg, spec)
        tables = {
            basis: simulate_setting(circuit, basis, shots, cfg.noise, cfg.seed)
            for basis in settings_for(spec)
        }
        ci_seed = derive_seed(cfg.seed, circuit.label, "ci")
        if isinstance(spec, DickeSpec):
            report = dicke_lower_bound(tables, spec.k_weight, spec.n, seed=ci_seed)
        else:
            report = ghz_lower_bound(
                tables[MeasurementBasis.X], tables[MeasurementBasis.Z], spec.n, seed=ci_seed
            )
        text = _report_json(report)
        print(text)
        if args.out:
            Path(args.out).write_text(text + "\n")
        return 0

    if args.command == "sweep":
        cfg = _config_from_args(args)
        rows = run_sweep(cfg)
        out = cfg.resolved_output_dir()
        print(f"wrote {len(rows)} states to {out}/summary.csv (+shots/, *.svg)")
        return 0

    if args.command == "cumulative":
        spec = _state_spec(args)
        cfg = _mini_cfg(args, spec)
        series = cumulative_for_state(cfg, spec)
        out = cfg.resolved_output_dir()
        out.mkdir(parents=True, exist_ok=True)
        slug = file_slug(spec)
        write_cumulative_csv(series, build_state_circuit(spec).label, out / f"{slug}_cumulative.csv")
        from .plots import emit_plots

        emit_plots(series=series, output_dir=out, stem=f"{slug}_")
        print(f"wrote {out}/{slug}_cumulative.csv and {out}/{slug}_cumulative.svg")
        return 0

    if args.command == "plot":
        rows = read_summary_csv(args.summary)
        from .plots import emit_plots

        for path in emit_plots(rows=rows, output_dir=args.out):
            print(path)
        return 0

    raise SystemExit(f"unknown command {args.command}")


def _noise_from_args(args) -> NoiseSpec:
    kwargs = {}
    if args.p1 is not None:
        kwargs["p1"] = args.p1
    if args.p2 is not None:
        kwargs["p2"] = args.p2
    return NoiseSpec(**kwargs)


def _mini_cfg(args, spec) -> ExperimentConfig:
    family = "dicke" if isinstance(spec, DickeSpec) else (
        "ghz-linear" if spec.layout == "linear" else "ghz-log"
    )
    return ExperimentConfig(
        family=family,
        n_range=(spec.n, spec.n),
        shots_rule=args.shots if args.shots else "auto",
        noise=_noise_from_args(args),
        seed=args.seed,
        output_dir=args.out or "fidbounds-out",
    )


if __name__ == "__main__":
    sys.exit(main())
