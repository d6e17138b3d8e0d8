"""
Command Line Module.

Entry point of catron. Each subcommand reads the run settings, calls the
compute modules and writes deterministic CSV/JSON files plus a config echo
into the output directory.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np
import pandas as pd

from app import __version__
from app.core.analytic import (
    branch_cut_polylines,
    compare_matching,
    potential_grid,
    switching_locus,
    wigner_exact,
    wigner_wkb,
)
from app.core.errors import CatronError
from app.core.fock import (
    block_rates,
    build_liouvillian,
    match_kernel_to_wigner,
    spectrum_table,
)
from app.core.instanton import (
    CRITICAL_WINDOW,
    downhill_path,
    fixed_points,
    instanton_action,
    integrate_instanton,
    ln_rate_closed_form,
    phase_portrait,
    rate_sweep,
)
from app.core.model import parse_grid_spec
from app.core.validation import CRITERIA, FAULTS, liouvillian_exponents, run_acceptance
from app.data.config import RunConfig, Settings, load_settings
from app.data.export import write_frame, write_json, write_wigner

logger = logging.getLogger(__name__)

SOURCES = ("exact", "wkb", "potential", "fock")
# option values that may start with "-", e.g. a grid spec "-6:6:61,-6:6:61"
DASH_VALUED = ("--grid",)


def _meta(settings: Settings, **extra) -> Dict[str, object]:
    meta = {"G": settings.G, "Delta": settings.Delta, "eta": settings.eta}
    meta.update(extra)
    return meta


def cmd_wigner(settings: Settings, args: argparse.Namespace) -> List[Path]:
    params, grid, out = settings.params, settings.grid, Path(settings.out)
    source = args.source
    meta = _meta(settings, source=source)
    written: List[Path] = []
    if source == "exact":
        wg = wigner_exact(params, grid)
    elif source == "wkb":
        wg = wigner_wkb(params, grid, args.weights)
        meta["weights"] = args.weights
        locus = switching_locus(params, grid, args.weights)
        locus_frame = pd.DataFrame(locus, columns=["x", "p"])
        written.append(write_frame(locus_frame, out / "switching_locus.csv", meta))
        if args.compare:
            written.append(write_json(compare_matching(params, grid), out / "matching_report.json"))
    elif source == "potential":
        wg = potential_grid(params, grid)
        written.append(write_json(branch_cut_polylines(params, grid), out / "branch_cuts.json"))
    else:
        target = wigner_exact(params, grid)
        S = build_liouvillian(params, settings.fock_cutoff)
        _, wg, coeffs = match_kernel_to_wigner(S, target)
        meta.update(cutoff=settings.fock_cutoff, coefficients=np.round(coeffs, 12).tolist())
    written.extend(write_wigner(wg, out, source, meta))
    return written


def cmd_phase_portrait(settings: Settings, args: argparse.Namespace) -> List[Path]:
    params, out = settings.params, Path(settings.out)
    meta = _meta(settings)
    points = fixed_points(params)
    uphill = integrate_instanton(params, args.which)
    other = "minus_attractor" if args.which == "plus_attractor" else "plus_attractor"
    downhill = downhill_path(params, other)
    return [
        write_frame(phase_portrait(params, args.extent, args.samples), out / "phase_portrait.csv", meta),
        write_json({"fixed_points": points.as_list()}, out / "fixed_points.json"),
        write_frame(uphill.to_frame(), out / "instanton_uphill.csv", dict(meta, kind=uphill.kind)),
        write_frame(downhill.to_frame(), out / "downhill_path.csv", dict(meta, kind=downhill.kind)),
    ]


def cmd_rate(settings: Settings, args: argparse.Namespace) -> List[Path]:
    out = Path(settings.out)
    meta = {"eta": settings.eta, "G_list": args.G_list}
    written = [write_frame(rate_sweep(args.G_list, args.n_delta, settings.eta), out / "rate_sweep.csv", meta)]
    if args.critical_zoom:
        frames = []
        for G in args.G_list:
            gaps = np.geomspace(1e-4, CRITICAL_WINDOW, args.n_delta)
            frames.append(rate_sweep([G], eta=settings.eta, delta_grid=G * (1.0 - gaps)))
        zoom = pd.concat(frames, ignore_index=True)
        zoom.insert(2, "gap", zoom["G"] - zoom["Delta"])
        written.append(write_frame(zoom, out / "rate_critical.csv", meta))
    if args.compare_fock:
        rows = liouvillian_exponents(args.compare_fock, settings.eta)
        written.append(write_frame(pd.DataFrame(rows), out / "rate_fock.csv", meta))
    return written


def cmd_instanton(settings: Settings, args: argparse.Namespace) -> List[Path]:
    params, out = settings.params, Path(settings.out)
    traj = integrate_instanton(params, args.which)
    action = instanton_action(traj)
    rate = ln_rate_closed_form(params)
    summary = {
        "params": params.as_dict(),
        "which": args.which,
        "action": action,
        "ln_rate_closed_form": rate.ln_rate,
        "potential_form": rate.potential_form,
        "regime": rate.regime,
        "L_drift": traj.L_drift,
        "meta": traj.meta,
    }
    return [
        write_frame(traj.to_frame(), out / f"instanton_{args.which}.csv", _meta(settings, which=args.which)),
        write_json(summary, out / "instanton_summary.json"),
    ]


def cmd_spectrum(settings: Settings, args: argparse.Namespace) -> List[Path]:
    params, out = settings.params, Path(settings.out)
    S = build_liouvillian(params, settings.fock_cutoff)
    meta = _meta(settings, cutoff=settings.fock_cutoff)
    return [
        write_frame(spectrum_table(S, args.keep), out / "spectrum.csv", meta),
        write_json({"cutoff": settings.fock_cutoff, "block_rates": block_rates(S)}, out / "block_rates.json"),
    ]


def cmd_validate(settings: Settings, args: argparse.Namespace) -> List[Path]:
    report = run_acceptance(settings, args.only, args.inject_fault)
    path = write_json(report, Path(settings.out) / "validation_report.json")
    for entry in report["criteria"]:
        logger.info("%s: %s", entry["name"], "pass" if entry["passed"] else "FAIL")
    args.exit_code = 0 if report["passed"] else 1
    return [path]


COMMANDS: Dict[str, Callable[[Settings, argparse.Namespace], List[Path]]] = {
    "wigner": cmd_wigner,
    "phase-portrait": cmd_phase_portrait,
    "rate": cmd_rate,
    "instanton": cmd_instanton,
    "spectrum": cmd_spectrum,
    "validate": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="KEY=value configuration file")
    common.add_argument("--out", help="output directory")
    common.add_argument("--cutoff", type=int, help="Fock space dimension N")
    common.add_argument("--grid", help="phase grid 'xmin:xmax:nx,pmin:pmax:np'")
    common.add_argument("--seed", type=int, help="seed of random samples")
    common.add_argument("--G", type=float, dest="G")
    common.add_argument("--Delta", type=float, dest="Delta")
    common.add_argument("--eta", type=float, dest="eta")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging")

    parser = argparse.ArgumentParser(
        prog="catron", description="Stationary states and switching of a two-photon driven cavity"
    )
    parser.add_argument("--version", action="version", version=f"catron {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("wigner", parents=[common], help="stationary Wigner maps")
    p.add_argument("--source", choices=SOURCES, default="exact")
    p.add_argument("--weights", choices=("appendix", "main_text"), default="appendix")
    p.add_argument("--compare", action="store_true", help="report both WKB weightings against the exact map")

    p = sub.add_parser("phase-portrait", parents=[common], help="classical flow, fixed points and paths")
    p.add_argument("--which", choices=("plus_attractor", "minus_attractor"), default="plus_attractor")
    p.add_argument("--extent", type=float, default=4.0)
    p.add_argument("--samples", type=int, default=25)

    p = sub.add_parser("rate", parents=[common], help="switching-rate exponent sweeps")
    p.add_argument("--G-list", type=float, nargs="+", default=[5.0, 6.0, 7.0], dest="G_list")
    p.add_argument("--n-delta", type=int, default=200, dest="n_delta")
    p.add_argument("--critical-zoom", action="store_true", dest="critical_zoom")
    p.add_argument("--compare-fock", type=float, nargs="*", dest="compare_fock", metavar="G")

    p = sub.add_parser("instanton", parents=[common], help="instanton trajectory and action")
    p.add_argument("--which", choices=("plus_attractor", "minus_attractor"), default="plus_attractor")

    p = sub.add_parser("spectrum", parents=[common], help="Liouvillian spectrum per parity block")
    p.add_argument("--keep", type=int, default=20, help="eigenvalues kept per block")

    p = sub.add_parser("validate", parents=[common], help="acceptance suite")
    p.add_argument("--only", nargs="+", choices=sorted(CRITERIA))
    p.add_argument("--inject-fault", choices=FAULTS, dest="inject_fault")
    return parser


def configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def attach_dash_values(argv: List[str]) -> List[str]:
    """Rewrite ``--grid VALUE`` as ``--grid=VALUE`` so argparse never reads VALUE as an option."""
    out: List[str] = []
    tokens = iter(argv)
    for token in tokens:
        if token in DASH_VALUED:
            value = next(tokens, None)
            out.append(token if value is None else f"{token}={value}")
        else:
            out.append(token)
    return out


def main(argv: Optional[List[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(attach_dash_values(argv))
    configure_logging(args.verbose)
    try:
        overrides = {
            "G": args.G,
            "Delta": args.Delta,
            "eta": args.eta,
            "fock_cutoff": args.cutoff,
            "seed": args.seed,
            "out": args.out,
        }
        settings = load_settings(args.config, overrides)
        if args.grid:
            settings = settings.with_grid(parse_grid_spec(args.grid))
        if getattr(args, "compare_fock", None) == []:
            args.compare_fock = [4.0]
        out = Path(settings.out)
        out.mkdir(parents=True, exist_ok=True)
        options = {
            k: v
            for k, v in vars(args).items()
            if k not in ("config", "out", "cutoff", "grid", "seed", "G", "Delta", "eta", "verbose", "command")
        }
        RunConfig(settings, args.command, options).write_echo(out)
        args.exit_code = 0
        written = COMMANDS[args.command](settings, args)
    except CatronError as e:
        logger.error("%s: %s", type(e).__name__, e)
        print(f"error: {e}", file=sys.stderr)
        return 2
    logger.info("%d files written to %s", len(written), settings.out)
    return args.exit_code
