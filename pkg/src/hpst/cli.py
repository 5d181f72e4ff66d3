"""Command-line front end.

    hpst curve --config curve.json --out ten_node.csv
    hpst peaks --config row.json
    hpst optimize --config search.json --jobs 4
    hpst pst-check --config pst.json
    hpst currents solve --config target.json
    hpst currents field --config currents.json
    hpst reproduce-tables [--tables I,III]

Exit codes: 0 success, 2 configuration error, 3 numerical error,
4 reproduction mismatch.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import reproduction
from .config import ExperimentConfig
from .currents import CurrentSystem, field_from_currents, solve_currents_for_field
from .dynamics import check_pst_condition, iter_curve_chunks, scan_peaks
from .errors import ConfigError, DomainError, NumericalError
from .hamiltonian import build_sector_matrix
from .optimize import default_jobs, grid_search
from .spectral import decompose

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_MISMATCH = 4

NUM_FMT = "%.12g"

log = logging.getLogger("hpst")


@contextlib.contextmanager
def _open_out(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _spectrum(cfg: ExperimentConfig):
    return decompose(build_sector_matrix(cfg.chain, cfg.profile()))


def _fmt(cfg: ExperimentConfig, default: str) -> str:
    return cfg.output.get("format") or default


def _dump_json(obj, fh) -> None:
    json.dump(obj, fh, indent=2)
    fh.write("\n")


def curve_columns(cfg: ExperimentConfig) -> list[str]:
    cols = ["tau"]
    cols += [f"P_{cfg.source}_{t}" for t in cfg.curve_targets()]
    cols += [f"C_{a}_{b}" for a, b in cfg.curve_pairs()]
    return cols


def write_curve(cfg: ExperimentConfig, fh, fmt: str = "csv") -> int:
    """Stream the sampled curve to ``fh``; returns the number of rows."""
    spec = _spectrum(cfg)
    count = int(math.floor((cfg.window - cfg.tau_start) / cfg.tau_step + 1e-9)) + 1
    targets = cfg.curve_targets()
    pairs = [tuple(p) for p in cfg.curve_pairs()]
    chunks = iter_curve_chunks(
        spec, cfg.source, targets, pairs, (cfg.tau_start, cfg.tau_step, count)
    )
    cols = curve_columns(cfg)
    if fmt == "json":
        data = {c: [] for c in cols}
        for chunk in chunks:
            data["tau"] += chunk.taus.tolist()
            for t in targets:
                data[f"P_{cfg.source}_{t}"] += chunk.probabilities[t].tolist()
            for a, b in pairs:
                data[f"C_{a}_{b}"] += chunk.concurrences[(a, b)].tolist()
        _dump_json(data, fh)
        return count
    fh.write(",".join(cols) + "\n")
    for chunk in chunks:
        block = np.column_stack(
            [chunk.taus]
            + [chunk.probabilities[t] for t in targets]
            + [chunk.concurrences[p] for p in pairs]
        )
        np.savetxt(fh, block, fmt=NUM_FMT, delimiter=",")
    return count


def read_curve_csv(path) -> dict[str, np.ndarray]:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return {name: data[:, i] for i, name in enumerate(header)}


def _peaks_header() -> str:
    return "P      tau_P      C      tau_C      class"


def cmd_curve(cfg, args) -> int:
    fmt = _fmt(cfg, "csv")
    with _open_out(cfg.output.get("path")) as fh:
        rows = write_curve(cfg, fh, "json" if fmt == "json" else "csv")
    log.info("wrote %d curve samples", rows)
    return EXIT_OK


def cmd_peaks(cfg, args) -> int:
    report = scan_peaks(
        _spectrum(cfg), cfg.source, cfg.target, cfg.window, cfg.concurrence_window,
        tau_step=cfg.tau_step, threshold=cfg.threshold, pc_tolerance=cfg.pc_tolerance,
    )
    with _open_out(cfg.output.get("path")) as fh:
        if _fmt(cfg, "table") == "json":
            _dump_json(report.to_dict(), fh)
        else:
            fh.write(_peaks_header() + "\n")
            fh.write(f"{report.human_row()}  {report.classification.value}\n")
    return EXIT_OK


def cmd_optimize(cfg, args) -> int:
    space = cfg.search_space()
    log.info("grid search over %d points", space.grid_size())
    result = grid_search(cfg.chain, space, jobs=args.jobs)
    names = [p.name for p in space.parameters]
    with _open_out(cfg.output.get("path")) as fh:
        if _fmt(cfg, "table") == "json":
            _dump_json(result.to_dict(names), fh)
        else:
            values = "  ".join(f"{n}={v:.3f}" for n, v in zip(names, result.best_parameters))
            status = "found" if result.found else "no HPST found (best sub-threshold point)"
            fh.write(f"{values}  [{status}, {result.evaluations} evaluations]\n")
            fh.write(_peaks_header() + "\n")
            fh.write(f"{result.report.human_row()}  {result.report.classification.value}\n")
    return EXIT_OK


def cmd_pst_check(cfg, args) -> int:
    phi0 = cfg.pst.get("phi0")
    report = check_pst_condition(_spectrum(cfg), float(cfg.pst["tau0"]), phi0)
    with _open_out(cfg.output.get("path")) as fh:
        if _fmt(cfg, "table") == "json":
            _dump_json(report.to_dict(), fh)
        else:
            fh.write(f"tau0={report.tau0:.3f}  phi0={report.phi0:.3f}\n")
            fh.write("k   n_k   residual\n")
            for k, (n, r) in enumerate(zip(report.integers, report.residuals), start=1):
                fh.write(f"{k:<3} {n:<5} {r:.3e}\n")
            fh.write(f"max |residual| = {report.max_abs_residual:.3e}\n")
    return EXIT_OK


def cmd_currents(cfg, args) -> int:
    n = cfg.chain.n_nodes
    if args.action == "field":
        omegas = list(field_from_currents(cfg.field.current_system(n)).omegas)
        payload = {"omegas": omegas}
        table = "node  omega\n" + "".join(f"{m:<5} {w:.3f}\n" for m, w in enumerate(omegas, 1))
    else:
        target = cfg.profile()
        xis = [float(x) for x in cfg.currents_solve["xis"]]
        b = solve_currents_for_field(target, xis)
        produced = field_from_currents(CurrentSystem(tuple(zip(b.tolist(), xis)), n))
        residual = max(abs(p - t) for p, t in zip(produced.omegas, target.omegas))
        payload = {"b": b.tolist(), "xis": xis, "max_residual": residual}
        table = "k   xi        b\n" + "".join(
            f"{k:<3} {xi:<9.3f} {bk:.3f}\n" for k, (xi, bk) in enumerate(zip(xis, b), 1)
        ) + f"max residual = {residual:.3e}\n"
    with _open_out(cfg.output.get("path")) as fh:
        if _fmt(cfg, "table") == "json":
            _dump_json(payload, fh)
        else:
            fh.write(table)
    return EXIT_OK


def cmd_reproduce(args) -> int:
    rows = reproduction.select_rows(args.tables.split(",") if args.tables else None)
    results = []
    for row in rows:
        result = reproduction.run_row(
            row, threshold=args.threshold if args.threshold is not None else 0.9
        )
        results.append(result)
        if args.format != "json":
            print(reproduction.format_result(result), flush=True)
            if not result.skipped and not result.passed:
                print(reproduction.format_diff(result), flush=True)
    failed = [r for r in results if not r.skipped and not r.passed]
    if args.format == "json":
        _dump_json(
            [
                {
                    "row": r.row.key,
                    "label": r.row.label,
                    "field": r.row.field_description(),
                    "skipped": r.row.skip_reason,
                    "passed": None if r.skipped else r.passed,
                    "report": None if r.skipped else r.report.to_dict(),
                    "checks": [c.__dict__ for c in r.checks],
                }
                for r in results
            ],
            sys.stdout,
        )
    else:
        passed = sum(1 for r in results if not r.skipped and r.passed)
        skipped = sum(1 for r in results if r.skipped)
        print(f"{passed} passed, {len(failed)} failed, {skipped} skipped")
    return EXIT_MISMATCH if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="experiment configuration (JSON)")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--format", choices=["csv", "json", "table"])
    common.add_argument("--tau-step", type=float)
    common.add_argument("--window", type=float)
    common.add_argument("--threshold", type=float)
    common.add_argument("--jobs", type=int, default=None,
                        help="worker processes (default: $HPST_JOBS or 1)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="hpst", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("curve", parents=[common], help="sample P and C curves")
    sub.add_parser("peaks", parents=[common], help="peak amplitudes, times and HPST class")
    sub.add_parser("optimize", parents=[common], help="grid search over field parameters")
    sub.add_parser("pst-check", parents=[common], help="perfect-transfer eigenvalue condition")
    cur = sub.add_parser("currents", parents=[common], help="current-pair field synthesis")
    cur.add_argument("action", choices=["solve", "field"])
    rep = sub.add_parser("reproduce-tables", parents=[common], help="recompute reference HPST rows")
    rep.add_argument("--tables", help="comma-separated subset of I,II,III,IV")
    return parser


def load_config(args) -> ExperimentConfig:
    if not args.config:
        raise ConfigError("--config: required for this command")
    kind = args.command if args.command != "currents" else f"currents-{args.action}"
    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        raise ConfigError(f"config: cannot read {args.config}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON ({exc})") from None
    if isinstance(data, dict):
        for key, value in (("tau_step", args.tau_step), ("window", args.window),
                           ("threshold", args.threshold)):
            if value is not None:
                data[key] = value
        if args.out is not None or args.format is not None:
            out = dict(data.get("output") or {})
            if args.out is not None:
                out["path"] = args.out
            if args.format is not None:
                out["format"] = args.format
            data["output"] = out
    return ExperimentConfig.from_dict(data, kind)


COMMANDS = {
    "curve": cmd_curve,
    "peaks": cmd_peaks,
    "optimize": cmd_optimize,
    "pst-check": cmd_pst_check,
    "currents": cmd_currents,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        if args.jobs is None:
            args.jobs = default_jobs()
        if args.command == "reproduce-tables":
            return cmd_reproduce(args)
        cfg = load_config(args)
        return COMMANDS[args.command](cfg, args)
    except (ConfigError, DomainError) as exc:
        print(f"hpst: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"hpst: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
