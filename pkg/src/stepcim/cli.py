"""Command-line front end.

Every subcommand loads the configuration (defaults when --config is
absent), writes ``<subcommand>.csv`` plus a ``resolved_config.json``
snapshot into the output directory, and optionally renders
``<subcommand>.svg`` with --svg. CSV output is locale-independent with
fixed headers. Exit codes: 0 success, 2 usage, 3 configuration error,
4 solver failure, 5 infeasible calibration.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .array import mac_column, monte_carlo_mac, sense_margin_curve
from .cell import truth_table
from .config import GlobalConfig, calibrate, load_config, save_resolved
from .device import sense_gap_shift
from .errors import (
    CalibrationInfeasibleError,
    ConfigError,
    SolverError,
    StepCimError,
)
from .ferro import FerroState, sweep
from .piezo import transduce
from .system import CostModel, area_report, default_organizations, run_benchmark
from .tmdfet import drain_current_at
from .workloads import load_suite

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_SOLVER = 4
EXIT_INFEASIBLE = 5


def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".9g")
    return str(x)


def _write_csv(path: Path, header: list[str], rows) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def _maybe_svg(args, name: str, plot_fn) -> None:
    if not args.svg:
        return
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig = plot_fn(plt)
    fig.savefig(Path(args.out) / f"{name}.svg", format="svg")
    plt.close(fig)


# ---------------------------------------------------------------- commands


def cmd_pe_loop(cfg: GlobalConfig, args) -> list[list]:
    p = cfg.device.ferro
    n = 600
    up = np.linspace(-3 * p.E_C, 3 * p.E_C, n)
    field = np.concatenate([up, up[::-1][1:]])
    P, branches, _ = sweep(FerroState.at_rest(p, -1), p, field)
    rows = [
        [e / 1e5, pv, br.value]          # V/m -> kV/cm
        for e, pv, br in zip(field, P, branches)
    ]

    def plot(plt):
        fig, ax = plt.subplots(figsize=(5, 4))
        ax.plot(field / 1e5, P, lw=1.2)
        ax.set_xlabel("E (kV/cm)")
        ax.set_ylabel("P (C/m$^2$)")
        ax.set_title("Polarization loop")
        ax.grid(True, alpha=0.3)
        return fig

    _maybe_svg(args, "pe-loop", plot)
    return rows


def cmd_strain_sweep(cfg: GlobalConfig, args) -> list[list]:
    dev = cfg.device
    v_max = 0.999 * dev.ferro.V_C
    volts = np.linspace(-min(v_max, 0.5), min(v_max, 0.5), 41)
    rows = []
    for p_sign in (+1, -1):
        for v in volts:
            r = transduce(p_sign, float(v), dev.piezo, dev.ferro)
            rows.append(
                [float(v), p_sign, r.S_PE, r.sigma_PE / 1e6, r.sigma_TMD / 1e6, r.dE_G * 1e3]
            )

    def plot(plt):
        fig, ax = plt.subplots(figsize=(5, 4))
        for p_sign, style in ((+1, "-"), (-1, "--")):
            de = [transduce(p_sign, float(v), dev.piezo, dev.ferro).dE_G * 1e3 for v in volts]
            ax.plot(volts, de, style, label=f"P = {p_sign:+d}")
        ax.set_xlabel("V_GB (V)")
        ax.set_ylabel("dE_G (meV)")
        ax.legend()
        ax.grid(True, alpha=0.3)
        return fig

    _maybe_svg(args, "strain-sweep", plot)
    return rows


def cmd_device_iv(cfg: GlobalConfig, args) -> list[list]:
    dev = cfg.device
    shift = sense_gap_shift(dev)
    rows = []
    vgs = np.linspace(0.0, dev.v_dd, 81)
    vds = np.linspace(0.0, dev.v_dd + 0.1, 91)
    for dEg in (-shift, 0.0, +shift):
        for v in vgs:
            i = float(drain_current_at(dev.fet, float(v), dev.v_dd, dEg))
            rows.append(["transfer", dEg * 1e3, float(v), dev.v_dd, i * 1e6])
        for v in vds:
            i = float(drain_current_at(dev.fet, dev.v_read, float(v), dEg))
            rows.append(["output", dEg * 1e3, dev.v_read, float(v), i * 1e6])

    def plot(plt):
        fig, axes = plt.subplots(1, 2, figsize=(9, 4))
        for dEg, label in ((+shift, "gap reduced"), (0.0, "baseline"), (-shift, "gap expanded")):
            axes[0].semilogy(vgs, [max(float(drain_current_at(dev.fet, float(v), dev.v_dd, dEg)), 1e-15) for v in vgs], label=label)
            axes[1].plot(vds, [float(drain_current_at(dev.fet, dev.v_read, float(v), dEg)) * 1e6 for v in vds], label=label)
        axes[0].set_xlabel("V_GS (V)")
        axes[0].set_ylabel("I_DS (A)")
        axes[1].set_xlabel("V_DS (V)")
        axes[1].set_ylabel("I_DS (uA)")
        axes[1].legend()
        for ax in axes:
            ax.grid(True, alpha=0.3)
        return fig

    _maybe_svg(args, "device-iv", plot)
    return rows


def cmd_cell_truth(cfg: GlobalConfig, args) -> list[list]:
    rows = []
    for w, i, i1, i2, o in truth_table(cfg.device):
        rows.append([w, i, f"{i1 * 1e6:.6f}", f"{i2 * 1e6:.6f}", o])
    return rows


def cmd_mac_sim(cfg: GlobalConfig, args) -> list[list]:
    if not args.vectors:
        raise ConfigError("mac-sim requires --vectors <csv> (columns: i, w1, w2, ...)")
    path = Path(args.vectors)
    try:
        with path.open() as fh:
            reader = csv.reader(fh)
            header = next(reader)
            data = [[int(v) for v in row] for row in reader if row]
    except OSError as exc:
        raise ConfigError(f"cannot read vectors file {path}: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"{path}: vector entries must be integers: {exc}") from exc
    if not header or header[0].strip().lower() != "i":
        raise ConfigError(f"{path}: first column must be the input vector 'i'")
    mat = np.array(data, dtype=int)
    inputs = mat[:, 0]
    rows = []
    for k, col in enumerate(header[1:], start=1):
        r = mac_column(mat[:, k], inputs, cfg.device, cfg.array)
        rows.append(
            [col, r.i_rbl1 * 1e6, r.i_rbl2 * 1e6, r.v_rbl1, r.v_rbl2, r.s_n, r.a, r.o, r.o_ideal]
        )
    return rows


def cmd_sense_margin(cfg: GlobalConfig, args) -> list[list]:
    curve = sense_margin_curve(cfg.device, cfg.array)
    rows = [
        [p.a, p.sm * 1e6, p.i_minload_1 * 1e6, p.i_minload_2 * 1e6,
         p.i_maxload_1 * 1e6, p.i_maxload_2 * 1e6]
        for p in curve
    ]

    def plot(plt):
        fig, ax = plt.subplots(figsize=(5, 4))
        ax.plot([p.a for p in curve], [p.sm * 1e6 for p in curve], "o-")
        ax.set_xlabel("output level a")
        ax.set_ylabel("sense margin (uA)")
        ax.grid(True, alpha=0.3)
        return fig

    _maybe_svg(args, "sense-margin", plot)
    return rows


def cmd_monte_carlo(cfg: GlobalConfig, args) -> list[list]:
    stats = monte_carlo_mac(cfg.device, cfg.array, cfg.variation)
    rows = [[lv.a, lv.p_error, lv.n_plus1, lv.n_minus1] for lv in stats.levels]

    def plot(plt):
        fig, ax = plt.subplots(figsize=(5, 4))
        ax.bar([lv.a for lv in stats.levels], [lv.p_error for lv in stats.levels])
        ax.set_xlabel("output level a")
        ax.set_ylabel("P(error)")
        ax.grid(True, alpha=0.3, axis="y")
        return fig

    _maybe_svg(args, "monte-carlo", plot)
    return rows


def cmd_system_eval(cfg: GlobalConfig, args) -> list[list]:
    suite = load_suite(args.suite)
    cost = cfg.cost
    if args.cost:
        try:
            doc = json.loads(Path(args.cost).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read cost file {args.cost}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(
                f"{args.cost}: line {exc.lineno}, col {exc.colno}: {exc.msg}"
            ) from exc
        known = {f.name for f in dataclasses.fields(CostModel)}
        bad = set(doc) - known
        if bad:
            raise ConfigError(f"{args.cost}: unknown cost key(s) {sorted(bad)}")
        cost = dataclasses.replace(cost, **doc)
    orgs = default_organizations()
    if args.org and args.org != "all":
        if args.org not in orgs:
            raise ConfigError(f"unknown organization {args.org!r}; choices: {sorted(orgs)}")
        orgs = {"step_cim": orgs["step_cim"], args.org: orgs[args.org]}
        if args.org == "step_cim":
            orgs = {"step_cim": orgs["step_cim"]}
    report = run_benchmark(suite, orgs, cost)
    rows = []
    for wl, per in report.per_workload.items():
        for org_name, est in per.items():
            rows.append([wl, org_name, est.latency, est.energy, est.counts["tiles"]])

    ar = area_report(default_organizations()["step_cim"], cost)
    lines = ["system evaluation", "=================", ""]
    lines.append(f"{'workload':<12}{'organization':<26}{'latency (ms)':>14}{'energy (mJ)':>14}")
    for wl, per in report.per_workload.items():
        for org_name, est in per.items():
            lines.append(
                f"{wl:<12}{org_name:<26}{est.latency * 1e3:>14.4f}{est.energy * 1e3:>14.4f}"
            )
    lines.append("")
    lines.append("mean speedups vs step_cim (geometric):")
    for k, v in report.speedups.items():
        lines.append(f"  {k:<26}{v:8.3f}x")
    lines.append("mean energy ratios vs step_cim (geometric):")
    for k, v in report.energy_ratios.items():
        lines.append(f"  {k:<26}{v:8.3f}x")
    lines.append("")
    lines.append(
        f"peak: {report.peak.tops:.1f} TOPS, {report.peak.tops_per_w:.1f} TOPS/W, "
        f"{report.peak.tops_per_mm2:.1f} TOPS/mm2"
    )
    lines.append(
        f"area: cell {ar.cell_area_step_f2}F^2 vs {ar.cell_area_sram_f2}F^2 "
        f"(ratio {ar.cell_area_ratio:.3f}); iso-area arrays {ar.iso_area_arrays}"
    )
    lines.append("reference accelerators (published constants):")
    for row in report.reference_rows:
        lines.append(
            f"  {row['name']:<20}{row['technology_nm']:>5} nm"
            f"{row['tops_per_w']:>10} TOPS/W{row['tops_per_mm2']:>10} TOPS/mm2"
        )
    out = Path(args.out) / "system-eval-report.txt"
    out.write_text("\n".join(lines) + "\n")

    def plot(plt):
        fig, axes = plt.subplots(1, 2, figsize=(10, 4))
        names = list(report.speedups)
        axes[0].bar(range(len(names)), [report.speedups[n] for n in names])
        axes[0].set_xticks(range(len(names)))
        axes[0].set_xticklabels(names, rotation=30, ha="right", fontsize=7)
        axes[0].set_ylabel("speedup vs baseline (x)")
        axes[1].bar(range(len(names)), [report.energy_ratios[n] for n in names], color="tab:green")
        axes[1].set_xticks(range(len(names)))
        axes[1].set_xticklabels(names, rotation=30, ha="right", fontsize=7)
        axes[1].set_ylabel("energy ratio vs step (x)")
        fig.tight_layout()
        return fig

    _maybe_svg(args, "system-eval", plot)
    return rows


def cmd_calibrate(cfg: GlobalConfig, args) -> tuple[GlobalConfig, list[list]]:
    new_cfg, rep = calibrate(cfg)
    rows = [
        ["calib_gain_Pa_per_V_per_m", rep.calib_gain],
        ["E_s_pos_eV", rep.E_s_pos],
        ["E_s_neg_eV", rep.E_s_neg],
        ["R_drv_ohm", rep.R_drv],
        ["gap_shift_eV", rep.gap_shift],
        ["stress_ratio", rep.stress_ratio],
        ["enhance", rep.enhance],
        ["suppress", rep.suppress],
        ["min_sense_margin_A", rep.min_sense_margin],
    ]
    return new_cfg, rows


_COMMANDS = {
    "pe-loop": (cmd_pe_loop, ["E_kV_per_cm", "P_C_per_m2", "branch"]),
    "strain-sweep": (
        cmd_strain_sweep,
        ["V_GB_V", "P_sign", "S_PE", "sigma_PE_MPa", "sigma_TMD_MPa", "dE_G_meV"],
    ),
    "device-iv": (cmd_device_iv, ["curve", "dE_G_meV", "V_GS_V", "V_DS_V", "I_DS_uA"]),
    "cell-truth": (cmd_cell_truth, ["w", "i", "I_RBL1_uA", "I_RBL2_uA", "o"]),
    "mac-sim": (
        cmd_mac_sim,
        ["column", "i_rbl1_uA", "i_rbl2_uA", "v_rbl1_V", "v_rbl2_V", "s_n", "a", "o", "o_ideal"],
    ),
    "sense-margin": (
        cmd_sense_margin,
        ["a", "SM_uA", "I_minload_1_uA", "I_minload_2_uA", "I_maxload_1_uA", "I_maxload_2_uA"],
    ),
    "monte-carlo": (cmd_monte_carlo, ["a", "p_error", "n_plus1", "n_minus1"]),
    "system-eval": (
        cmd_system_eval,
        ["workload", "organization", "latency_s", "energy_J", "tiles"],
    ),
    "calibrate": (cmd_calibrate, ["constant", "value"]),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stepcim",
        description="Ternary compute-in-memory device/array/system simulator",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        sp = sub.add_parser(name, help=f"run the {name} analysis")
        sp.add_argument("--config", default=None, help="JSON configuration file")
        sp.add_argument("--out", default=None, help="output directory")
        sp.add_argument("--seed", type=int, default=None, help="override the RNG seed")
        sp.add_argument("--svg", action="store_true", help="also render an SVG plot")
        if name == "monte-carlo":
            sp.add_argument("--iters", type=int, default=None, help="trials per output level")
        if name == "mac-sim":
            sp.add_argument("--vectors", default=None, help="CSV of ternary vectors (i, w1, ...)")
        if name == "system-eval":
            sp.add_argument("--suite", default=None, help="workload suite JSON")
            sp.add_argument("--org", default="all", help="baseline organization or 'all'")
            sp.add_argument("--cost", default=None, help="JSON cost-model overrides")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        # fold command-line overrides into the config so the resolved
        # snapshot reproduces the run exactly
        if args.seed is not None:
            cfg = dataclasses.replace(
                cfg,
                seed=args.seed,
                variation=dataclasses.replace(cfg.variation, seed=args.seed),
            )
        if getattr(args, "iters", None) is not None:
            cfg = dataclasses.replace(
                cfg, variation=dataclasses.replace(cfg.variation, iters=args.iters)
            )
        if args.out is None:
            args.out = cfg.output_dir
        else:
            cfg = dataclasses.replace(cfg, output_dir=str(args.out))
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)

        fn, header = _COMMANDS[args.command]
        if args.command == "calibrate":
            cfg, rows = fn(cfg, args)
        else:
            rows = fn(cfg, args)
        _write_csv(out_dir / f"{args.command}.csv", header, rows)
        save_resolved(cfg, out_dir / "resolved_config.json")
    except CalibrationInfeasibleError as exc:
        print(f"stepcim: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except SolverError as exc:
        print(f"stepcim: solver: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ConfigError as exc:
        print(f"stepcim: config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except StepCimError as exc:
        print(f"stepcim: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
