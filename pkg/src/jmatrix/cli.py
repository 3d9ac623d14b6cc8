"""Command-line front end.

Commands
--------
scan        energy scan of the S-matrix, CSV/JSON output
phase       transformation-phase curve tau(E), closed form vs numeric
resonance   locate the sharp resonance inside the configured window
selfcheck   run every module's invariant suite at reduced density

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 no sharp resonance found.
"""

from __future__ import annotations

import argparse
import json
import sys

from .config import RunConfig, config_to_dict, load_config
from .errors import ConfigError, JMatrixError, NoResonanceError
from .report import (phase_to_csv, phase_to_json, render_phase_plot,
                     render_scan_plot, scan_to_csv, scan_to_json, write_text)
from .resonance import find_resonance
from .scattering import energy_scan, phase_scan
from .selfcheck import run_selfcheck

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_NO_RESONANCE = 4


def _add_common_options(parser: argparse.ArgumentParser):
    parser.add_argument("--config", metavar="PATH", help="JSON configuration file")
    parser.add_argument("--preset", metavar="NAME",
                        help="start from a shipped or user-defined preset")
    parser.add_argument("--lambda", dest="lam", type=float, metavar="X",
                        help="Laguerre basis scale (1/bohr)")
    parser.add_argument("--ell", type=int, help="orbital angular momentum")
    parser.add_argument("--charge", type=float, help="Coulomb charge Z")
    parser.add_argument("--mu", type=float,
                        help="ground-state coupling (one-parameter deformation)")
    parser.add_argument("--mu-plus", type=float, help="(0,0) deformation entry")
    parser.add_argument("--mu-minus", type=float,
                        help="(1,1) or (M,M) deformation entry")
    parser.add_argument("--mu-zero", type=float,
                        help="(0,1) or (0,M) deformation entry")
    parser.add_argument("--bridge-m", type=int,
                        help="bridge index M >= 2 (selects the bridge family)")
    parser.add_argument("--n-basis", type=int, help="model-space dimension N")
    parser.add_argument("--v0", type=float, help="potential strength")
    parser.add_argument("--power", type=int, help="potential power of r")
    parser.add_argument("--decay", type=float, help="potential exponential decay")
    parser.add_argument("--emin", type=float, help="grid start (hartree)")
    parser.add_argument("--emax", type=float, help="grid end (hartree)")
    parser.add_argument("--steps", type=int, help="number of grid points")
    parser.add_argument("--adaptive", action=argparse.BooleanOptionalAction,
                        default=None, help="refine the grid near sharp features")
    parser.add_argument("--mode", choices=("full", "truncated", "both"),
                        help="which S-matrix route(s) to evaluate")
    parser.add_argument("--out", metavar="PATH", help="output file")
    parser.add_argument("--format", dest="fmt", choices=("csv", "json"),
                        help="output format")
    parser.add_argument("--plot", metavar="PATH",
                        help="also render a PNG figure of the result")
    parser.add_argument("--tol", type=float,
                        help="resonance refinement tolerance (>= 1e-6)")


def _overrides(args: argparse.Namespace) -> dict:
    out: dict = {}

    def put(section, key, value):
        if value is not None:
            out.setdefault(section, {})[key] = value

    put("channel", "lambda", args.lam)
    put("channel", "ell", args.ell)
    put("channel", "charge", args.charge)
    put("potential", "v0", args.v0)
    put("potential", "power", args.power)
    put("potential", "decay", args.decay)
    put("grid", "emin", args.emin)
    put("grid", "emax", args.emax)
    put("grid", "steps", args.steps)
    put("grid", "adaptive", args.adaptive)
    deformation: dict = {}
    if args.mu is not None:
        deformation = {"kind": "one_parameter", "mu": args.mu}
    elif any(v is not None for v in (args.mu_plus, args.mu_minus,
                                     args.mu_zero, args.bridge_m)):
        kind = "bridge_three" if args.bridge_m is not None else "block_three"
        deformation["kind"] = kind
        for key, value in (("mu_plus", args.mu_plus),
                           ("mu_minus", args.mu_minus),
                           ("mu_zero", args.mu_zero),
                           ("bridge_m", args.bridge_m)):
            if value is not None:
                deformation[key] = value
    if deformation:
        out["deformation"] = deformation
    for key, value in (("n_basis", args.n_basis), ("mode", args.mode),
                       ("out", args.out), ("format", args.fmt),
                       ("plot", args.plot), ("tol", args.tol)):
        if value is not None:
            out[key] = value
    return out


def _load(args: argparse.Namespace) -> RunConfig:
    return load_config(path=args.config, preset=args.preset,
                       overrides=_overrides(args))


def _cmd_scan(args) -> int:
    config = _load(args)
    table = energy_scan(config.scatter_config(), config.grid, config.mode)
    echo = config_to_dict(config)
    out = config.out or "scan." + config.fmt
    text = scan_to_csv(table) if config.fmt == "csv" else scan_to_json(table, echo)
    write_text(out, text)
    if config.plot:
        render_scan_plot(table, config.plot)
    rows = len(table.points) * (2 if config.mode == "both" else 1)
    failed = sum(1 for p in table.points if p.failed)
    note = f" ({failed} failed points)" if failed else ""
    print(f"wrote {rows} rows to {out}{note}")
    return EXIT_NUMERICAL if failed == len(table.points) else EXIT_OK


def _cmd_phase(args) -> int:
    config = _load(args)
    rows = phase_scan(config.channel, config.deformation, config.grid)
    echo = config_to_dict(config)
    out = config.out or "phase." + config.fmt
    text = phase_to_csv(rows) if config.fmt == "csv" else phase_to_json(rows, echo)
    write_text(out, text)
    if config.plot:
        render_phase_plot(rows, config.plot)
    failed = sum(1 for r in rows if r.failed)
    note = f" ({failed} failed points)" if failed else ""
    print(f"wrote {len(rows)} rows to {out}{note}")
    return EXIT_NUMERICAL if failed == len(rows) else EXIT_OK


def _cmd_resonance(args) -> int:
    config = _load(args)
    route = "truncated" if config.mode == "truncated" else "full"
    estimate = find_resonance(config.scatter_config(),
                              (config.grid.emin, config.grid.emax),
                              config.tol, route=route)
    payload = {
        "energy": estimate.energy,
        "peak_height": estimate.peak_height,
        "refinement_width": estimate.refinement_width,
        "route": route,
        "config": config_to_dict(config),
    }
    if config.out:
        write_text(config.out, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(f"resonance: E_r = {estimate.energy:.6f} hartree, "
          f"|1 - S| = {estimate.peak_height:.4f}, "
          f"bracket {estimate.refinement_width:.2e}")
    return EXIT_OK


def _cmd_selfcheck(_args) -> int:
    results = run_selfcheck()
    for r in results:
        flag = "PASS" if r.passed else "FAIL"
        print(f"[{flag}] {r.name} ({r.seconds:.2f} s): {r.detail}")
    if all(r.passed for r in results):
        print(f"selfcheck: {len(results)} suites passed")
        return EXIT_OK
    print("selfcheck: FAILED")
    return EXIT_NUMERICAL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jmatrix",
        description="J-matrix potential scattering in a Laguerre basis "
                    "with deformed reference Hamiltonians")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func, text in (
            ("scan", _cmd_scan, "energy scan of the S-matrix"),
            ("phase", _cmd_phase, "transformation-phase curve tau(E)"),
            ("resonance", _cmd_resonance, "locate the sharp resonance"),
            ("selfcheck", _cmd_selfcheck, "run the invariant suites")):
        p = sub.add_parser(name, help=text)
        if name != "selfcheck":
            _add_common_options(p)
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NoResonanceError as exc:
        print(f"no sharp resonance: {exc}", file=sys.stderr)
        return EXIT_NO_RESONANCE
    except JMatrixError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
