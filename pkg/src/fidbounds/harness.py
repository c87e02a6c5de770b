"""Batch runner: builds state-preparation circuits, simulates shots per
measurement setting, estimates bounds, and writes CSV/QASM/SVG artifacts.

Outputs are fully deterministic: per-(state, basis, shot) seeds are derived
by hashing the master seed with context labels, CSV floats use shortest
round-trip formatting, and SVG rendering is salted and date-free.
"""
from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field, replace
from math import comb
from pathlib import Path
from typing import Iterable

from .circuits import Circuit, MeasurementBasis, cnot_count, depth, to_qasm
from .bounds import BoundReport, dicke_lower_bound, dicke_shot_matrices, ghz_lower_bound, ghz_shot_matrices
from .dicke import DickeSpec, build_dicke_circuit
from .ghz import GhzSpec, build_ghz
from .simulator import NoiseSpec, ShotTable, derive_seed, rotate_to_basis, run, run_trajectory, sample
from .stats import CumulativeSeries, cumulative_series

FAMILIES = ("dicke", "ghz-linear", "ghz-log")
DICKE_MAX_N = 12
GHZ_MAX_N = 20

SUMMARY_HEADER = (
    "label,n,k,cnots,depth,lb,lb_ci_lo,lb_ci_hi,somma_lb,msp,msp_ci_lo,msp_ci_hi,"
    "aux1,aux2,shots,seed"
)
SHOTS_HEADER = "label,basis,shot_index,bitstring"


@dataclass(frozen=True)
class ExperimentConfig:
    family: str
    n_range: tuple[int, int]
    k_rule: str = "half"  # dicke: "half" = 1..floor(N/2), or "K=a,b,.."
    shots_rule: str | int = "auto"  # auto: dicke max(150, 4*C(N,K)); ghz 200
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    seed: int = 7
    output_dir: str = "fidbounds-out"
    ci_level: float = 0.68
    resamples: int = 1000

    def validate(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}")
        lo, hi = self.n_range
        if lo < 1 or hi < lo:
            raise ValueError(f"bad n_range {self.n_range}")
        cap = DICKE_MAX_N if self.family == "dicke" else GHZ_MAX_N
        if hi > cap:
            raise ValueError(f"{self.family} sweeps are capped at N <= {cap}")
        if isinstance(self.shots_rule, int):
            if self.shots_rule < 1:
                raise ValueError("explicit shot count must be >= 1")
        elif self.shots_rule != "auto":
            raise ValueError('shots_rule must be "auto" or a positive integer')
        if not 0.0 < self.ci_level < 1.0:
            raise ValueError("ci_level must be in (0,1)")

    @classmethod
    def from_json(cls, path: str | Path, **overrides) -> "ExperimentConfig":
        raw = json.loads(Path(path).read_text())
        noise = NoiseSpec(**raw.pop("noise", {}))
        raw["n_range"] = tuple(raw["n_range"])
        cfg = cls(noise=noise, **raw)
        return replace(cfg, **overrides) if overrides else cfg

    def resolved_output_dir(self) -> Path:
        return Path(os.environ.get("FIDBOUNDS_OUTPUT_DIR", self.output_dir))


@dataclass
class SweepRow:
    label: str
    n: int
    k: str  # Dicke weight or GHZ layout
    cnots: int
    depth: int
    report: BoundReport
    shots: int
    seed: int
    family: str

    def csv_fields(self) -> list[str]:
        r = self.report
        is_dicke = self.family == "dicke"
        somma = _fmt(r.somma_lower_bound) if is_dicke else ""
        aux1 = _fmt(r.sj2_term) if is_dicke else _fmt(r.sgx)
        aux2 = "" if is_dicke else _fmt(r.sgz)
        return [
            self.label,
            str(self.n),
            self.k,
            str(self.cnots),
            str(self.depth),
            _fmt(r.lower_bound),
            _fmt(r.lb_ci_lo),
            _fmt(r.lb_ci_hi),
            somma,
            _fmt(r.msp),
            _fmt(r.msp_ci_lo),
            _fmt(r.msp_ci_hi),
            aux1,
            aux2,
            str(self.shots),
            str(self.seed),
        ]


def _fmt(x: float | None) -> str:
    return "" if x is None else repr(float(x))


def state_specs(cfg: ExperimentConfig) -> list[DickeSpec | GhzSpec]:
    lo, hi = cfg.n_range
    specs: list[DickeSpec | GhzSpec] = []
    if cfg.family == "dicke":
        for n in range(max(lo, 2), hi + 1):
            if cfg.k_rule == "half":
                ks = range(1, n // 2 + 1)
            else:
                ks = [int(s) for s in cfg.k_rule.split(",") if 0 < int(s) <= n]
            specs.extend(DickeSpec(n, k) for k in ks)
    else:
        layout = "linear" if cfg.family == "ghz-linear" else "logarithmic"
        specs.extend(GhzSpec(n, layout) for n in range(max(lo, 2), hi + 1))
    return specs


def shots_for(cfg: ExperimentConfig, spec: DickeSpec | GhzSpec) -> int:
    if isinstance(cfg.shots_rule, int):
        return cfg.shots_rule
    if isinstance(spec, DickeSpec):
        return max(150, 4 * comb(spec.n, spec.k_weight))
    return 200


def build_state_circuit(spec: DickeSpec | GhzSpec) -> Circuit:
    return build_dicke_circuit(spec) if isinstance(spec, DickeSpec) else build_ghz(spec)


def settings_for(spec: DickeSpec | GhzSpec) -> tuple[MeasurementBasis, ...]:
    if isinstance(spec, DickeSpec):
        return (MeasurementBasis.X, MeasurementBasis.Y, MeasurementBasis.Z)
    return (MeasurementBasis.X, MeasurementBasis.Z)


def simulate_setting(
    circuit: Circuit,
    basis: MeasurementBasis,
    shots: int,
    noise: NoiseSpec,
    seed: int,
) -> ShotTable:
    """Shots for one measurement setting: one fresh trajectory per shot, one
    sample per trajectory, so outcomes are i.i.d. draws from the mixed state."""
    rotated = rotate_to_basis(circuit, basis)
    if noise.is_noiseless:
        sv = run(rotated)
        return sample(sv, shots, derive_seed(seed, circuit.label, basis.value), basis, circuit.label)
    outcomes = []
    for i in range(shots):
        traj = run_trajectory(rotated, noise, derive_seed(seed, circuit.label, basis.value, i))
        one = sample(traj, 1, derive_seed(seed, circuit.label, basis.value, i, "m"), basis, circuit.label)
        outcomes.append(one.outcomes[0])
    return ShotTable(basis=basis, outcomes=outcomes, seed=seed, circuit_label=circuit.label)


def run_state(cfg: ExperimentConfig, spec: DickeSpec | GhzSpec) -> tuple[SweepRow, dict[MeasurementBasis, ShotTable]]:
    circuit = build_state_circuit(spec)
    shots = shots_for(cfg, spec)
    tables = {
        basis: simulate_setting(circuit, basis, shots, cfg.noise, cfg.seed)
        for basis in settings_for(spec)
    }
    ci_seed = derive_seed(cfg.seed, circuit.label, "ci")
    if isinstance(spec, DickeSpec):
        report = dicke_lower_bound(
            tables, spec.k_weight, spec.n, level=cfg.ci_level, resamples=cfg.resamples, seed=ci_seed
        )
        k_field = str(spec.k_weight)
    else:
        report = ghz_lower_bound(
            tables[MeasurementBasis.X],
            tables[MeasurementBasis.Z],
            spec.n,
            level=cfg.ci_level,
            resamples=cfg.resamples,
            seed=ci_seed,
        )
        k_field = spec.layout
    row = SweepRow(
        label=circuit.label,
        n=spec.n,
        k=k_field,
        cnots=cnot_count(circuit),
        depth=depth(circuit),
        report=report,
        shots=shots,
        seed=cfg.seed,
        family=cfg.family,
    )
    return row, tables


def file_slug(spec: DickeSpec | GhzSpec) -> str:
    if isinstance(spec, DickeSpec):
        return f"dicke_{spec.n}_{spec.k_weight}"
    short = "linear" if spec.layout == "linear" else "log"
    return f"ghz_{spec.n}_{short}"


def write_summary_csv(rows: Iterable[SweepRow], path: Path) -> None:
    ordered = sorted(rows, key=lambda r: (r.cnots, r.n, r.k))
    with open(path, "w", newline="") as fh:
        fh.write(SUMMARY_HEADER + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        for row in ordered:
            writer.writerow(row.csv_fields())


def write_shots_csv(tables: dict[MeasurementBasis, ShotTable], label: str, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(SHOTS_HEADER + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        for basis in sorted(tables, key=lambda b: b.value):
            for i, outcome in enumerate(tables[basis].outcomes):
                writer.writerow([label, basis.value, str(i), outcome])


def run_sweep(cfg: ExperimentConfig, write_plots: bool = True) -> list[SweepRow]:
    """Run every state in the sweep and write summary/shot CSVs and plots."""
    cfg.validate()
    out = cfg.resolved_output_dir()
    (out / "shots").mkdir(parents=True, exist_ok=True)
    rows = []
    for spec in state_specs(cfg):
        row, tables = run_state(cfg, spec)
        rows.append(row)
        write_shots_csv(tables, row.label, out / "shots" / f"{file_slug(spec)}_shots.csv")
    write_summary_csv(rows, out / "summary.csv")
    if write_plots:
        from .plots import emit_plots

        emit_plots(rows=rows, output_dir=out)
    return rows


def export_all_qasm(cfg: ExperimentConfig) -> list[Path]:
    """One .qasm file per state in the sweep; byte-identical across runs."""
    cfg.validate()
    out = cfg.resolved_output_dir() / "qasm"
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for spec in state_specs(cfg):
        path = out / f"{file_slug(spec)}.qasm"
        path.write_text(to_qasm(build_state_circuit(spec)))
        paths.append(path)
    return paths


def cumulative_for_state(
    cfg: ExperimentConfig, spec: DickeSpec | GhzSpec
) -> dict[str, CumulativeSeries]:
    """Cumulative-by-shot bound estimates for one state."""
    cfg.validate()
    circuit = build_state_circuit(spec)
    shots = shots_for(cfg, spec)
    tables = {
        basis: simulate_setting(circuit, basis, shots, cfg.noise, cfg.seed)
        for basis in settings_for(spec)
    }
    ci_seed = derive_seed(cfg.seed, circuit.label, "cumci")
    out: dict[str, CumulativeSeries] = {}
    if isinstance(spec, DickeSpec):
        from .bounds import dicke_sj2_term

        mats = dicke_shot_matrices(tables, spec.k_weight, spec.n)
        n = spec.n
        combiners = {
            "lower_bound": lambda m: m["Z"][..., 0] + dicke_sj2_term(m, n),
            "somma_lower_bound": lambda m: m["Z"][..., 1] + dicke_sj2_term(m, n),
            "msp": lambda m: m["Z"][..., 0],
            "sj2_term": lambda m: dicke_sj2_term(m, n),
        }
    else:
        mats = ghz_shot_matrices(tables[MeasurementBasis.X], tables[MeasurementBasis.Z])
        n = spec.n
        combiners = {
            "lower_bound": lambda m: 0.5 * (m["X"][..., 0] + m["Z"][..., 0] - (n - 2)),
            "msp": lambda m: m["Z"][..., 1],
            "sgx": lambda m: m["X"][..., 0],
            "sgz": lambda m: m["Z"][..., 0],
        }
    for name, comb_fn in combiners.items():
        out[name] = cumulative_series(
            mats, comb_fn, quantity=name, level=cfg.ci_level,
            resamples=min(cfg.resamples, 200), seed=ci_seed,
        )
    return out


def read_summary_csv(path: str | Path) -> list[SweepRow]:
    """Load sweep rows back from a summary CSV (for re-plotting)."""
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for rec in reader:
            is_dicke = rec["label"].startswith("D(")
            opt = lambda s: float(s) if s else None
            report = BoundReport(
                lower_bound=float(rec["lb"]),
                lb_ci_lo=float(rec["lb_ci_lo"]),
                lb_ci_hi=float(rec["lb_ci_hi"]),
                msp=float(rec["msp"]),
                msp_ci_lo=float(rec["msp_ci_lo"]),
                msp_ci_hi=float(rec["msp_ci_hi"]),
                shots_per_setting=int(rec["shots"]),
                somma_lower_bound=opt(rec["somma_lb"]),
                sj2_term=opt(rec["aux1"]) if is_dicke else None,
                sgx=None if is_dicke else opt(rec["aux1"]),
                sgz=None if is_dicke else opt(rec["aux2"]),
            )
            rows.append(
                SweepRow(
                    label=rec["label"],
                    n=int(rec["n"]),
                    k=rec["k"],
                    cnots=int(rec["cnots"]),
                    depth=int(rec["depth"]),
                    report=report,
                    shots=int(rec["shots"]),
                    seed=int(rec["seed"]),
                    family="dicke" if is_dicke else "ghz",
                )
            )
    return rows


def write_cumulative_csv(series: dict[str, CumulativeSeries], label: str, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("label,quantity,shot_index,value,ci_lo,ci_hi\n")
        writer = csv.writer(fh, lineterminator="\n")
        for name in sorted(series):
            s = series[name]
            for i, v, lo, hi in zip(s.shot_indices, s.values, s.ci_lo, s.ci_hi):
                writer.writerow([label, name, str(int(i)), _fmt(v), _fmt(lo), _fmt(hi)])
