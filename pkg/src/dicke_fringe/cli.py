"""Command-line front end.

Units throughout: Omega in units of gamma, times in units of 1/gamma,
angles (delta, phi) in radians.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .acceptance import MC_BUDGET, MC_SEED, run_all
from .correlations import g1_intensity, g2_analytic, g2_numeric, g2_zero_delay
from .dynamics import steady_state, steady_state_closed_form
from .errors import DickeFringeError
from .figures import FIGURES, FRINGE_DELTAS, FIG_OMEGA
from .qcore import SystemParams
from .trajectories import DeltaWindow, coincidence_histogram, simulate_budget

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_ACCEPTANCE = 0, 1, 2, 3

UNITS = "Units: Omega in gamma, times (tau) in 1/gamma, angles (delta, phi) in radians."


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors with exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- argument types -----------------------------------------------------------

def grid(text: str) -> np.ndarray:
    """"a,b,c" or "start:stop:num" (inclusive, linspace)."""
    text = str(text).strip()
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise ValueError
            start, stop, num = float(parts[0]), float(parts[1]), int(parts[2])
            if num < 1:
                raise ValueError
            vals = np.linspace(start, stop, num)
        else:
            vals = np.array([float(x) for x in text.split(",") if x.strip()])
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid grid {text!r}; use a,b,c or start:stop:num") from None
    if vals.size == 0 or not np.all(np.isfinite(vals)):
        raise argparse.ArgumentTypeError(f"invalid grid {text!r}: empty or non-finite")
    return vals


def vector3(text: str) -> np.ndarray:
    try:
        v = np.array([float(x) for x in str(text).split(",")])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,y,z, got {text!r}") from None
    if v.shape != (3,):
        raise argparse.ArgumentTypeError(f"expected x,y,z, got {text!r}")
    return v


def nonneg_float(text: str) -> float:
    v = float(text)
    if not np.isfinite(v) or v < 0:
        raise argparse.ArgumentTypeError(f"expected a finite value >= 0, got {text!r}")
    return v


def read_config(path) -> dict[str, str]:
    """key=value lines; '#' starts a comment. Keys use option names (dashes or underscores)."""
    out = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{n}: expected key=value")
        out[key.strip().lstrip("-").replace("-", "_")] = val.strip()
    return out


# -- output -------------------------------------------------------------------

@dataclass
class Table:
    columns: list[str]
    rows: list[list[float]]
    params: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)


def _fmt(x) -> str:
    return format(float(x), ".12g")


def render_csv(table: Table) -> str:
    buf = io.StringIO()
    buf.write(f"# dicke-fringe v{__version__}\n")
    for key, val in {**table.params, **table.provenance}.items():
        buf.write(f"# {key}={val}\n")
    buf.write(",".join(table.columns) + "\n")
    for row in table.rows:
        buf.write(",".join(_fmt(x) for x in row) + "\n")
    return buf.getvalue()


def render_json(table: Table) -> str:
    def clean(x):
        x = float(x)
        return x if np.isfinite(x) else None

    obj = {
        "params": table.params,
        "columns": table.columns,
        "rows": [[clean(x) for x in row] for row in table.rows],
        "provenance": {"version": __version__, **table.provenance},
    }
    return json.dumps(obj, indent=1) + "\n"


def parse_csv(text: str) -> tuple[dict[str, str], list[str], np.ndarray]:
    """Inverse of :func:`render_csv`: header metadata, column names, values."""
    meta, columns, rows = {}, None, []
    for line in text.splitlines():
        if line.startswith("#"):
            key, sep, val = line[1:].strip().partition("=")
            if sep:
                meta[key.strip()] = val.strip()
        elif columns is None:
            columns = line.split(",")
        elif line:
            rows.append([float(x) for x in line.split(",")])
    return meta, columns or [], np.array(rows, dtype=float).reshape(-1, len(columns or []))


def emit(table: Table, args) -> None:
    text = render_json(table) if args.format == "json" else render_csv(table)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- commands -----------------------------------------------------------------

def _geometry(args, omega: float) -> SystemParams:
    if args.laser_dir is not None or args.separation is not None:
        laser = args.laser_dir if args.laser_dir is not None else np.array([0.0, 0.0, 1.0])
        sep = args.separation if args.separation is not None else np.zeros(3)
        norm = np.linalg.norm(laser)
        if norm == 0:
            raise UsageError("--laser-dir must be nonzero")
        return SystemParams(omega, laser / norm, sep)
    return SystemParams.from_phi(omega, args.phi)


def _geometry_meta(args) -> dict:
    if args.laser_dir is not None or args.separation is not None:
        return {"laser_dir": _vec_str(args.laser_dir if args.laser_dir is not None else [0, 0, 1]),
                "separation": _vec_str(args.separation if args.separation is not None else [0, 0, 0])}
    return {"phi": args.phi}


def _vec_str(v) -> str:
    return "none" if v is None else ",".join(_fmt(x) for x in v)


def cmd_steady_state(args) -> Table:
    cols = ["omega", "rho_gg", "rho_ss", "rho_aa", "rho_ee"]
    rows = []
    for w in args.omega:
        pops = list(steady_state_closed_form(_geometry(args, float(w))))
        row = [w, *pops]
        if args.verify:
            d = steady_state(_geometry(args, float(w))).entries.real
            num = [d[3, 3], d[1, 1], d[2, 2], d[0, 0]]
            row += [*num, max(abs(a - b) for a, b in zip(pops, num))]
        rows.append(row)
    if args.verify:
        cols += ["num_rho_gg", "num_rho_ss", "num_rho_aa", "num_rho_ee", "max_dev"]
    return Table(cols, rows, _geometry_meta(args), {"command": "steady-state", "method": "closed-form" + ("+numeric" if args.verify else "")})


def cmd_fringes(args) -> Table:
    params = _geometry(args, args.omega)
    deltas = args.delta
    if args.mode == "g1":
        rho = steady_state(params)
        vals = [g1_intensity(rho, d) for d in deltas]
    elif args.mode == "g2-single":
        vals = g2_zero_delay(params, deltas, deltas)
    else:
        vals = g2_zero_delay(params, args.delta1, deltas)
    meta = {"omega": args.omega, **_geometry_meta(args)}
    if args.mode == "g2-pair":
        meta["delta1"] = args.delta1
    rows = [[d, v] for d, v in zip(deltas, np.atleast_1d(vals))]
    return Table(["delta", "value"], rows, meta, {"command": f"fringes {args.mode}", "method": "closed-form"})


def _mc_column(params, args, taus):
    records = simulate_budget(params, args.budget, args.seed, args.traj_duration, args.burn_in, args.workers)
    w1, w2 = DeltaWindow(args.delta1, args.halfwidth), DeltaWindow(args.delta2, args.halfwidth)
    est, err = [], []
    for tau in taus:
        lo = max(0.0, tau - 0.5 * args.bin_width)
        h = coincidence_histogram(records, w1, w2, [lo, lo + args.bin_width], t_min=args.burn_in)
        est.append(h.estimate[0])
        err.append(h.stderr[0])
    return est, err


def cmd_g2(args) -> Table:
    params = _geometry(args, args.omega)
    taus = args.tau
    if np.any(taus < 0):
        raise UsageError("tau must be >= 0")
    method = args.method
    if method == "mc" and args.budget is None:
        raise UsageError("--method mc requires --budget (total simulated time in 1/gamma)")
    # "all" adds the Monte Carlo columns only when a budget is given
    with_mc = method == "mc" or (method == "all" and args.budget is not None)
    cols, columns = ["tau"], [list(taus)]
    if method in ("analytic", "all"):
        cols.append("g2")
        columns.append(list(np.atleast_1d(g2_analytic(params, args.delta1, args.delta2, taus))))
    if method in ("numeric", "all"):
        num = np.atleast_1d(g2_numeric(params, args.delta1, args.delta2, taus))
        if method == "all":
            cols += ["g2_numeric", "abs_diff"]
            columns += [list(num), list(np.abs(num - np.asarray(columns[1])))]
        else:
            cols.append("g2")
            columns.append(list(num))
    if with_mc:
        est, err = _mc_column(params, args, taus)
        cols += ["g2_mc", "stderr"]
        columns += [est, err]
    meta = {"omega": args.omega, "delta1": args.delta1, "delta2": args.delta2, **_geometry_meta(args)}
    prov = {"command": "g2", "method": method}
    if with_mc:
        prov.update(seed=args.seed, budget=args.budget, halfwidth=args.halfwidth, bin_width=args.bin_width,
                    traj_duration=args.traj_duration, burn_in=args.burn_in, workers=args.workers)
    return Table(cols, [list(r) for r in zip(*columns)], meta, prov)


def cmd_fig(args) -> Table:
    data = FIGURES[args.name]()
    cols = list(data)
    meta = {"figure": args.name}
    if args.name != "3":
        meta["omega"] = FIG_OMEGA
    if args.name in ("5", "6"):
        meta["delta1"] = 0.0 if args.name == "5" else float(np.pi)
    return Table(cols, [list(r) for r in zip(*data.values())], meta, {"command": "fig", "method": "closed-form"})


def cmd_check(args) -> int:
    results = run_all(fast=args.fast, mc_budget=args.budget, seed=args.seed, workers=args.workers)
    for r in results:
        print(r.line())
    n_pass = sum(r.passed for r in results)
    print(f"{n_pass}/{len(results)} criteria passed" + (" (Monte Carlo skipped)" if args.fast else ""))
    return EXIT_OK if n_pass == len(results) else EXIT_ACCEPTANCE


# -- parser -------------------------------------------------------------------

def _add_output(p):
    p.add_argument("--format", choices=("csv", "json"), default="csv", help="output format (default csv)")
    p.add_argument("--output", "-o", default=None, help="output file (default stdout)")


def _add_geometry(p):
    g = p.add_argument_group("geometry (radians / wavelengths)")
    g.add_argument("--phi", type=float, default=0.0,
                   help="laser phase phi = k_L.x12/2 in radians (default 0); laser along z")
    g.add_argument("--laser-dir", type=vector3, default=None, help="laser direction x,y,z (normalized internally)")
    g.add_argument("--separation", type=vector3, default=None,
                   help="atom separation x1-x2 as x,y,z in wavelengths; overrides --phi")


def _add_mc(p):
    g = p.add_argument_group("Monte Carlo")
    g.add_argument("--budget", type=nonneg_float, default=None, help="total simulated time in 1/gamma (required for mc)")
    g.add_argument("--seed", type=int, default=MC_SEED, help=f"master seed (default {MC_SEED})")
    g.add_argument("--halfwidth", type=nonneg_float, default=0.1, help="detector delta-window half width in radians")
    g.add_argument("--bin-width", type=nonneg_float, default=0.05, help="tau bin width in 1/gamma, centred on each tau")
    g.add_argument("--traj-duration", type=nonneg_float, default=2000.0, help="trajectory length in 1/gamma")
    g.add_argument("--burn-in", type=nonneg_float, default=20.0, help="discarded start of each trajectory in 1/gamma")
    g.add_argument("--workers", type=int, default=1, help="worker processes (results do not depend on this)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dicke-fringe", description=f"Two-atom resonance fluorescence simulator. {UNITS}",
                     epilog='Grids: "a,b,c" or "start:stop:num" (inclusive).')
    parser.add_argument("--version", action="version", version=f"dicke-fringe {__version__}")
    parser.add_argument("--config", default=None, help="key=value file of option defaults; flags override it")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("steady-state", help="steady-state populations vs Omega",
                       description=f"Steady-state populations rho_gg, rho_ss, rho_aa, rho_ee. {UNITS}")
    p.add_argument("--omega", type=grid, default=grid("0.05:5:100"), help="Omega/gamma grid")
    p.add_argument("--verify", action="store_true", help="add numeric master-equation columns and max deviation")
    _add_geometry(p)
    _add_output(p)
    p.set_defaults(func=cmd_steady_state)

    p = sub.add_parser("fringes", help="first- and second-order fringes vs delta",
                       description=f"Fringes at tau = 0 against the detection phase delta. {UNITS}")
    p.add_argument("mode", choices=("g1", "g2-single", "g2-pair"),
                   help="g1: G1(delta); g2-single: g2(delta,delta,0); g2-pair: g2(delta1,delta,0)")
    p.add_argument("--omega", type=nonneg_float, default=FIG_OMEGA, help="Omega/gamma")
    p.add_argument("--delta", type=grid, default=FRINGE_DELTAS, help="delta grid in radians (default 0:4pi:401)")
    p.add_argument("--delta1", type=float, default=0.0, help="first detector phase in radians (g2-pair)")
    _add_geometry(p)
    _add_output(p)
    p.set_defaults(func=cmd_fringes)

    p = sub.add_parser("g2", help="g2(delta1, 0; delta2, tau)",
                       description=f"Intensity correlation against delay tau. {UNITS}")
    p.add_argument("--omega", type=nonneg_float, default=FIG_OMEGA, help="Omega/gamma")
    p.add_argument("--delta1", type=float, default=0.0, help="detector 1 phase in radians")
    p.add_argument("--delta2", type=float, default=0.0, help="detector 2 phase in radians")
    p.add_argument("--tau", type=grid, default=grid("0:10:101"), help="delay grid in 1/gamma")
    p.add_argument("--method", choices=("analytic", "numeric", "mc", "all"), default="analytic",
                   help="closed form, quantum regression, Monte Carlo, or all (Monte Carlo only with --budget)")
    _add_geometry(p)
    _add_mc(p)
    _add_output(p)
    p.set_defaults(func=cmd_g2)

    p = sub.add_parser("fig", help="data behind figures 3-6 on the acceptance grids",
                       description=f"Figure data presets (Omega = {FIG_OMEGA} for 4-6). {UNITS}")
    p.add_argument("--name", choices=sorted(FIGURES), required=True, help="figure number")
    _add_output(p)
    p.set_defaults(func=cmd_fig)

    p = sub.add_parser("check", help="run the acceptance criteria",
                       description=f"Run the acceptance criteria; exit 3 if any fails. {UNITS}")
    p.add_argument("--fast", action="store_true", help="skip Monte Carlo criteria")
    p.add_argument("--budget", type=nonneg_float, default=MC_BUDGET, help="Monte Carlo time budget in 1/gamma")
    p.add_argument("--seed", type=int, default=MC_SEED, help="master seed")
    p.add_argument("--workers", type=int, default=1, help="worker processes")
    p.set_defaults(func=cmd_check)
    return parser


def _apply_config(parser: argparse.ArgumentParser, config: dict[str, str], command: str | None) -> None:
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    target = sub.choices.get(command)
    if target is None:
        return
    known = {a.dest: a for a in target._actions}
    defaults = {}
    for key, val in config.items():
        if key not in known:
            raise UsageError(f"config key {key!r} is not an option of {command!r}")
        action = known[key]
        if isinstance(action, argparse._StoreTrueAction):
            defaults[key] = val.lower() in ("1", "true", "yes", "on")
        elif action.type is not None:
            try:
                defaults[key] = action.type(val)
            except (argparse.ArgumentTypeError, ValueError) as exc:
                raise UsageError(f"config {key}: {exc}") from None
        else:
            defaults[key] = val
    target.set_defaults(**defaults)


def _parse(parser, argv):
    """Parsed namespace, or the exit code argparse asked for (--help, usage error)."""
    try:
        return parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = _parse(parser, argv)
        if isinstance(args, int):
            return args
        if args.config:
            _apply_config(parser, read_config(args.config), args.command)
            args = _parse(parser, argv)
        if args.command == "check":
            return args.func(args)
        emit(args.func(args), args)
    except UsageError as exc:
        print(f"dicke-fringe: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DickeFringeError as exc:
        print(f"dicke-fringe: error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
