"""Command-line front end: ``tautstring <subcommand> [flags]``.

Exit status is 0 on success, 2 on a usage error and 1 on a runtime error.
CSV output carries 17 significant digits; tables printed for humans carry 6.
"""
from __future__ import annotations

import argparse
import sys
from typing import Sequence

from . import experiments
from .closed_forms import integrate_against_p_inf, m_limit, p_infinity, q_limit
from .energy import energy, parse_phi
from .errors import ConfigurationError, InvalidParameterError
from .sojourn import ks_distance, sojourn_measure, tail_comparison_csv
from .taut_string import Boundary, TubeSpec, taut_string
from .truncated_variation import dtv_trunc, tv_trunc, utv_trunc
from .wiener import SampledPath, SeedSpec, add_drift, read_path_csv, simulate_wiener


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse would print and exit; we want to control the exit code ourselves
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def _add_path_flags(p, drift=True):
    p.add_argument("--T", type=float, default=100.0, help="horizon (default: 100)")
    p.add_argument("--steps", type=int, default=500, help="grid steps per unit time (default: 500)")
    p.add_argument("--seed", type=int, default=0, help="master seed (default: 0)")
    p.add_argument("--replicate", type=int, default=0, help="replicate index within the seed (default: 0)")
    if drift:
        p.add_argument("--mu", type=float, default=0.0, help="path is W(t) - mu t (default: 0)")
    p.add_argument("--path", default=None, help="read the path from a t,w CSV instead of simulating")


def _add_out(p):
    p.add_argument("--out", default=None, help="write CSV here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tautstring", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", metavar="subcommand", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("simulate", help="sample a Wiener path and write it as t,w CSV")
    _add_path_flags(p)
    _add_out(p)

    p = sub.add_parser("taut", help="taut string knots of a path as t,h CSV")
    _add_path_flags(p)
    p.add_argument("--r", type=float, default=1.0, help="tube width (default: 1)")
    p.add_argument("--mode", choices=[b.value for b in Boundary], default=Boundary.PINNED_BOTH.value,
                   help="end conditions (default: pinned)")
    p.add_argument("--derivative", action="store_true", help="write start,end,slope segments instead")
    _add_out(p)

    p = sub.add_parser("tv", help="truncated variations TV, UTV, DTV of a path")
    _add_path_flags(p)
    p.add_argument("--r", type=float, default=1.0, help="truncation level (default: 1)")
    _add_out(p)

    p = sub.add_parser("limits", help="closed-form limits m_r(mu), q_r(mu), p_inf(mu)")
    p.add_argument("--r", type=float, default=1.0, help="tube width (default: 1)")
    p.add_argument("--mu", type=float, default=0.0, help="drift / evaluation point (default: 0)")
    p.add_argument("--phi", default=None, help="also print the integral of phi against p_inf")

    p = sub.add_parser("energy", help="normalized taut-string energy against its limit")
    _add_path_flags(p, drift=False)
    p.add_argument("--r", type=float, default=1.0, help="tube width (default: 1)")
    p.add_argument("--phi", default="power:2", help="integrand descriptor (default: power:2)")

    p = sub.add_parser("sojourn", help="KS distance of the derivative's occupation measure to the limit law")
    _add_path_flags(p, drift=False)
    p.add_argument("--r", type=float, default=1.0, help="tube width (default: 1)")
    p.add_argument("--out", default=None, help="write the tail comparison v,empirical,limit as CSV")

    p = sub.add_parser("experiment", help="run a Monte Carlo experiment suite")
    p.add_argument("name", choices=experiments.EXPERIMENTS)
    p.add_argument("--config", default=None, help="flat 'key = value' file; flags override it")
    p.add_argument("--r", default=None, help="tube width (default: 1)")
    p.add_argument("--T", default=None, help="comma-separated horizons (default: 250,500,1000,2000)")
    p.add_argument("--steps", default=None, help="grid steps per unit time (default: 500)")
    p.add_argument("--replicates", default=None, help="number of replicates (default: 50)")
    p.add_argument("--seed", default=None, help="master seed (default: 0)")
    p.add_argument("--mu", default=None, help="comma-separated drifts for tv-lln (default: 0,0.5,1)")
    p.add_argument("--phi", default=None, help="';'-separated descriptors (default: power:2)")
    p.add_argument("--out", default=None, help="directory for <name>.csv and <name>.meta.txt")
    return parser


def _path_from(args) -> SampledPath:
    if args.path:
        with open(args.path) as fh:
            path = read_path_csv(fh)
    else:
        n = args.T * args.steps
        if abs(n - round(n)) > 1e-9 * max(n, 1):
            raise InvalidParameterError("--T times --steps must be an integer")
        path = simulate_wiener(args.T, int(round(n)), SeedSpec(args.seed, args.replicate))
    mu = getattr(args, "mu", 0.0)
    return add_drift(path, mu) if mu else path


def _emit(args, write) -> None:
    if args.out:
        with open(args.out, "w", newline="") as fh:
            write(fh)
    else:
        write(sys.stdout)


def _table(rows) -> str:
    width = max(len(k) for k, _ in rows)
    return "".join(f"{k:<{width}}  {v:.6g}\n" if isinstance(v, float) else f"{k:<{width}}  {v}\n"
                   for k, v in rows)


def _cmd_simulate(args):
    path = _path_from(args)
    _emit(args, path.to_csv)


def _cmd_taut(args):
    path = _path_from(args)
    pl = taut_string(path, TubeSpec(args.r, Boundary(args.mode)))
    _emit(args, pl.derivative_to_csv if args.derivative else pl.to_csv)


def _cmd_tv(args):
    path = _path_from(args)
    reports = [tv_trunc(path, args.r), utv_trunc(path, args.r), dtv_trunc(path, args.r)]
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("kind,r,value,n,T\n")
            fh.writelines(rep.csv_row() + "\n" for rep in reports)
    else:
        rows = [(rep.kind.value, rep.value) for rep in reports]
        rows += [(f"{rep.kind.value}/T", rep.value / path.T) for rep in reports]
        sys.stdout.write(_table(rows))


def _cmd_limits(args):
    rows = [
        ("m", m_limit(args.mu, args.r)),
        ("q", q_limit(args.mu, args.r)),
        (f"p_inf({args.mu:g})", p_infinity(args.mu, args.r)),
    ]
    if args.phi:
        phi = parse_phi(args.phi, args.r)
        rows.append((f"int {phi.descriptor} p_inf", integrate_against_p_inf(phi, args.r)))
    sys.stdout.write(_table(rows))


def _cmd_energy(args):
    path = _path_from(args)
    phi = parse_phi(args.phi, args.r)
    pl = taut_string(path, TubeSpec(args.r))
    sys.stdout.write(_table([
        ("phi", phi.descriptor),
        ("energy/T", energy(pl, phi) / path.T),
        ("limit", integrate_against_p_inf(phi, args.r)),
        ("knots", len(pl)),
    ]))


def _cmd_sojourn(args):
    path = _path_from(args)
    m = sojourn_measure(taut_string(path, TubeSpec(args.r)))
    if args.out:
        with open(args.out, "w") as fh:
            tail_comparison_csv(m, args.r, fh)
    sys.stdout.write(_table([("ks", ks_distance(m, args.r)), ("atoms", int(m.slopes.size))]))


def _cmd_experiment(args):
    values = experiments.read_config_file(args.config) if args.config else {}
    for key in ("r", "T", "steps", "replicates", "seed", "mu", "phi", "out"):
        flag = getattr(args, key)
        if flag is not None:
            values[key] = flag
    if "name" in values and values["name"] != args.name:
        raise ConfigurationError(f"config file is for {values['name']!r}, not {args.name!r}")
    cfg = experiments.config_from_mapping(args.name, values)
    result = experiments.run(cfg)
    if not cfg.out_dir:
        sys.stdout.write(result.to_csv())


_COMMANDS = {
    "simulate": _cmd_simulate,
    "taut": _cmd_taut,
    "tv": _cmd_tv,
    "limits": _cmd_limits,
    "energy": _cmd_energy,
    "sojourn": _cmd_sojourn,
    "experiment": _cmd_experiment,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        _COMMANDS[args.command](args)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"tautstring {args.command}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
