"""Command-line experiment runner.

Every primary output file embeds the schema version and the resolved config;
wall-clock timing is written only to ``record.json`` so that the primary files
are byte-identical across runs with the same config and seed.
"""
from __future__ import annotations

import argparse
import concurrent.futures
import csv
import io
import json
import math
import sys
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import chsh as chsh_mod
from . import config as cfgmod
from .circuit import PhysicalCircuitParams, derive_effective, h_co, h_int, validate_charge_regime
from .config import ExperimentConfig
from .dissipation import BathSpec, evolve, fit_decay, pure_dephasing_rates
from .errors import ChargePairError, ConfigError, NoCommensurateSolution, RankDeficient
from .gates import u_free
from .prep import bell_density, bell_state, prepare_bell, state_fidelity
from .tomo import PARAM_LABELS, DEFAULT_SCHEDULE, ProjectiveKind, ScheduleRow, build_inversion_map, reconstruct

OUTPUT_SCHEMA = "chargepair-output/1"
EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_NUMERIC = 0, 2, 3, 4


@dataclass
class Table:
    columns: list[str]
    rows: list[list]


@dataclass
class RunRecord:
    config: dict
    tables: dict[str, Table] = field(default_factory=dict)
    documents: dict[str, dict] = field(default_factory=dict)
    summary: dict = field(default_factory=dict)
    duration_s: float = 0.0


def _bath(cfg: ExperimentConfig) -> BathSpec:
    b = cfg.bath
    return BathSpec(eta=b.eta, omega_c=b.omega_c_rad_per_s, temperature=b.temperature_K,
                    gamma_phi=b.gamma_phi_per_s, beta_xt=b.beta, gamma_xt=b.gamma,
                    calibration=b.calibration, lamb_shift=b.lamb_shift)


# ---------------------------------------------------------------- experiments

def run_prepare(cfg: ExperimentConfig, rec: RunRecord) -> None:
    e12 = cfg.circuit.e12_ueV
    rows, fids = [], []
    for target in cfg.prepare.targets:
        seq, ket = prepare_bell(target, e12)
        p1, p2 = seq.steps
        fid = state_fidelity(ket, bell_state(target))
        drift = 1 - state_fidelity(u_free(e12, 1.0).apply(ket), ket)
        fids.append(fid)
        rows.append([target, seq.theta1 / math.pi, p1.duration, p2.duration, seq.total_duration,
                     p1.params.ec1, p1.params.ej1, p2.params.ec2, p2.params.ej2, fid, drift])
    rec.tables["prepare"] = Table(
        ["target", "theta1_over_pi", "t1_ns", "t2_ns", "total_ns", "pulse1_ec1_ueV", "pulse1_ej1_ueV",
         "pulse2_ec2_ueV", "pulse2_ej2_ueV", "fidelity", "free_evolution_infidelity_1ns"], rows)
    rec.summary["min_fidelity"] = min(fids) if fids else math.nan


def run_tomo(cfg: ExperimentConfig, rec: RunRecord) -> None:
    e12, t = cfg.circuit.e12_ueV, cfg.tomo
    schedule = ([ScheduleRow(e.preop, ProjectiveKind(e.measurement)) for e in t.schedule]
                if t.schedule else list(DEFAULT_SCHEDULE))
    imap = build_inversion_map(schedule, e12, augment=t.augment)
    _, ket = prepare_bell(t.target, e12)
    rho = np.outer(ket, ket.conj())
    res = reconstruct(lambda: rho, imap, shots=cfg.shots, seed=cfg.seed, e12=e12)
    target = bell_state(t.target)
    fid = float(np.real(target.conj() @ res.rho_hat @ target))
    doc = res.as_dict()
    doc.update({
        "target": t.target,
        "fidelity": fid,
        "rho_hat_real": res.rho_hat.real.tolist(),
        "rho_hat_imag": res.rho_hat.imag.tolist(),
        "rank": imap.rank,
        "rows": [[r.preop, r.measurement.value, r.determines] for r in imap.rows],
        "augmented_rows": [[r.preop, r.measurement.value] for r in imap.augmented],
    })
    rec.documents["tomo"] = doc
    rec.tables["tomo_parameters"] = Table(["parameter", "value"],
                                          [[k, float(v)] for k, v in zip(PARAM_LABELS, res.params)])
    rec.summary.update(fidelity=fid, min_eigenvalue=res.min_eigenvalue,
                       condition_number=res.condition_number, augmented_rows=len(imap.augmented))


_COHERENCE = {"psi+": (0, 3), "psi-": (0, 3), "phi+": (1, 2), "phi-": (1, 2)}


def run_decay(cfg: ExperimentConfig, rec: RunRecord) -> None:
    d, spec = cfg.decay, _bath(cfg)
    ej = cfg.circuit.ej_ueV
    grid = np.linspace(0.0, d.t_max_us * 1e-6, d.n_points)
    oracle = pure_dephasing_rates(spec)
    ratios = d.em_over_ej or (None,)
    curve_rows, fit_rows = [], []
    elem_cols = [f"{part}_{a}{b}" for a in range(4) for b in range(4) for part in ("re", "im")]
    for r in ratios:
        e12 = cfg.circuit.e12_ueV if r is None else r * ej / 4
        h = h_co(ej, e12) if d.tunneling else h_int(e12)
        for label in d.states:
            traj = evolve(bell_density(label), h, spec, grid)
            ratio = "" if r is None else r
            for ti, ci, st in zip(traj.times, traj.concurrences, traj.states):
                vals = [x for a in range(4) for b in range(4) for x in (st[a, b].real, st[a, b].imag)]
                curve_rows.append([label, ratio, e12, float(ti), float(ci), float(np.trace(st).real)] + vals)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                try:
                    fit = fit_decay(traj)
                    a_fit, r2 = fit.A, fit.r_squared
                except ChargePairError:
                    a_fit, r2 = math.nan, math.nan
            i, k = _COHERENCE[label]
            a_oracle = float(oracle[i, k]) if not d.tunneling else math.nan
            c_probe = float(np.interp(d.probe_t_ns * 1e-9, traj.times, traj.concurrences))
            fit_rows.append([label, ratio, e12, a_fit, r2, a_oracle, c_probe])
            tag = label if r is None else f"{label}@{r:g}"
            rec.summary[f"A[{tag}]"] = a_fit
            rec.summary[f"r2[{tag}]"] = r2
            rec.summary[f"C_probe[{tag}]"] = c_probe
    rec.tables["decay"] = Table(["state", "em_over_ej", "e12_ueV", "t_s", "concurrence", "trace"] + elem_cols,
                                curve_rows)
    rec.tables["decay_fits"] = Table(["state", "em_over_ej", "e12_ueV", "A_fit_per_s", "r_squared",
                                      "A_oracle_per_s", "C_at_probe"], fit_rows)


def run_chsh(cfg: ExperimentConfig, rec: RunRecord) -> None:
    c = cfg.chsh
    a1 = tuple(x * math.pi for x in c.phi1_pi)
    a2 = tuple(x * math.pi for x in c.phi2_pi)
    rows = chsh_mod.table(c.em_over_ej, a1, a2, shots=cfg.shots, seed=cfg.seed,
                          ej=cfg.circuit.ej_ueV, label=c.state)
    rec.tables["chsh"] = Table(list(chsh_mod.TABLE_COLUMNS), [chsh_mod.table_row_values(r) for r in rows])
    for r in c.em_over_ej:
        rec.summary[f"f[{r:g}]"] = next(row.f for row in rows if row.em_over_ej == r)
    rec.summary["classical_bound"] = chsh_mod.classical_bound(a1, a2)


def run_validate(cfg: ExperimentConfig, rec: RunRecord) -> None:
    p = cfg.physical
    circ = PhysicalCircuitParams(
        eps_J1=p.eps_j1_ueV, eps_J2=p.eps_j2_ueV, C_sigma1=p.c_sigma1_fF, C_sigma2=p.c_sigma2_fF,
        C_m=p.c_m_fF, C_g1=p.c_g1_fF, C_g2=p.c_g2_fF, V1=p.v1_uV, V2=p.v2_uV,
        Phi1=p.phi1_flux, Phi2=p.phi2_flux, T=p.temperature_K)
    problems = validate_charge_regime(circ, p.delta_gap_ueV)
    ec1, ec2 = circ.charging_energies
    rec.documents["validate"] = {
        "effective": derive_effective(circ).as_dict(),
        "charging_energies_ueV": [ec1, ec2],
        "coupling_energy_ueV": circ.coupling_energy,
        "gate_charges": list(circ.n_g),
        "violations": problems,
        "regime_ok": not problems,
    }
    rec.summary["violations"] = len(problems)


def run_sweep(cfg: ExperimentConfig, rec: RunRecord) -> None:
    sw = cfg.sweep

    def one(value):
        sub = cfg.with_override(sw.parameter, value).with_override("experiment", sw.base)
        return run(sub).summary

    with concurrent.futures.ThreadPoolExecutor(max_workers=sw.workers) as pool:
        futures = [pool.submit(one, v) for v in sw.values]
        results = []
        for fut in futures:
            try:
                results.append(("ok", fut.result(), ""))
            except Exception as exc:  # collected per run, never fatal to the sweep
                results.append(("error", {}, f"{type(exc).__name__}: {exc}"))
    keys = sorted({k for _, s, _ in results for k in s})
    rows = [[i, json.dumps(v), status] + [s.get(k, "") for k in keys] + [err]
            for i, (v, (status, s, err)) in enumerate(zip(sw.values, results))]
    rec.tables["sweep_summary"] = Table(["index", sw.parameter, "status"] + keys + ["error"], rows)
    rec.summary.update(runs=len(rows), failures=sum(r[2] == "error" for r in rows))


EXPERIMENTS = {"prepare": run_prepare, "tomo": run_tomo, "decay": run_decay,
               "chsh": run_chsh, "sweep": run_sweep, "validate": run_validate}


def run(cfg: ExperimentConfig) -> RunRecord:
    if cfg.experiment not in EXPERIMENTS:
        raise ConfigError(f"no experiment selected (got {cfg.experiment!r})")
    start = time.perf_counter()
    rec = RunRecord(cfg.resolved())
    EXPERIMENTS[cfg.experiment](cfg, rec)
    rec.duration_s = time.perf_counter() - start
    return rec


# ---------------------------------------------------------------- output

def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def _header(config: dict) -> str:
    return (f"# schema: {OUTPUT_SCHEMA}\n"
            f"# config: {json.dumps(config, sort_keys=True)}\n")


def render_table(table: Table, config: dict, fmt: str) -> str:
    if fmt == "json":
        payload = {"schema": OUTPUT_SCHEMA, "config": config, "columns": table.columns,
                   "rows": [[_jsonable(c) for c in row] for row in table.rows]}
        return json.dumps(payload, sort_keys=True, indent=1) + "\n"
    buf = io.StringIO()
    buf.write(_header(config))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for row in table.rows:
        w.writerow([_cell(c) for c in row])
    return buf.getvalue()


def _jsonable(v):
    if isinstance(v, (float, np.floating)):
        return None if not math.isfinite(v) else float(v)
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def write_record(rec: RunRecord, out_dir: Path, fmt: str) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, table in rec.tables.items():
        path = out_dir / f"{name}.{fmt}"
        path.write_text(render_table(table, rec.config, fmt))
        written.append(path)
    for name, doc in rec.documents.items():
        path = out_dir / f"{name}.json"
        payload = {"schema": OUTPUT_SCHEMA, "config": rec.config, "result": _jsonable(doc)}
        path.write_text(json.dumps(payload, sort_keys=True, indent=1) + "\n")
        written.append(path)
    meta = {"schema": OUTPUT_SCHEMA, "config": rec.config, "outputs": [p.name for p in written],
            "summary": _jsonable(rec.summary), "wall_clock_s": rec.duration_s}
    (out_dir / "record.json").write_text(json.dumps(meta, sort_keys=True, indent=1) + "\n")
    return written


# ---------------------------------------------------------------- entry point

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chargepair", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in cfgmod.EXPERIMENTS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, help="TOML config file")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--out", type=Path, default=Path("results"), help="output directory")
        p.add_argument("--shots", type=int, help="shots per measurement (default: exact)")
        p.add_argument("--format", choices=("csv", "json"), help="table format")
    return parser


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    cfg = cfgmod.load(args.config)
    if args.config is not None and cfg.experiment not in ("", args.command):
        raise ConfigError(f"config declares experiment {cfg.experiment!r} but command is {args.command!r}")
    overrides = {"experiment": args.command, "seed": args.seed, "shots": args.shots, "format": args.format}
    for key, val in overrides.items():
        if val is not None:
            cfg = cfg.with_override(key, val)
    return cfg


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        rec = run(cfg)
        paths = write_record(rec, args.out, cfg.format)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NoCommensurateSolution, RankDeficient) as exc:
        print(f"solver failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (ChargePairError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    for p in paths:
        print(p)
    print(json.dumps(_jsonable(rec.summary), sort_keys=True))
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
