"""Command-line front end: ``liftlab <subcommand> ...``.

Exit codes: 0 success, 1 domain or verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .dynamics import run_admm, run_gd, write_trajectory_csv
from .errors import (
    InvalidInput,
    InvalidParameter,
    InvalidSize,
    LiftlabError,
    NotMixed,
)
from .experiments import beta_hats, sweep, sweep_summary, write_csv
from .export import export_lifting_pair
from .graphs import factor_graph, parse_graph_spec
from .lifting import collapse, lazy_cycle_chain, lift_cycle_chain, mixing_time, verify_lifting
from .operators import AdmmParams, build_lifting_pair, build_T_A, build_T_G
from .spectral import spectrum_report
from .tuning import SearchSpec, tune_admm, tune_gd_closed_form, tune_gd_search

USAGE_ERRORS = (InvalidSize, InvalidParameter, InvalidInput)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(2)


def _g6(x) -> str:
    if isinstance(x, float):
        return f"{x:.6g}"
    return str(x)


def _emit(args, payload: dict, human: list[tuple[str, object]]) -> None:
    if args.json:
        print(json.dumps(payload, default=_jsonable))
    else:
        for key, val in human:
            print(f"{key}: {_g6(val)}")


def _jsonable(x):
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"cannot serialize {type(x)}")


def _graph(args):
    g = parse_graph_spec(args.graph)
    return g, factor_graph(g)


def _seed() -> int:
    return int(os.environ.get("LIFTLAB_SEED", "0"))


# -- subcommands ---------------------------------------------------------------


def cmd_verify(args) -> int:
    g, fg = _graph(args)
    params = AdmmParams.uniform(fg, args.gamma, args.rho)
    pair = build_lifting_pair(fg, None, params)
    cert = verify_lifting(pair, fg.S, tol=args.tol)
    payload = {"inputs": vars_of(args), **cert.to_dict(args.graph, g.n), "passed": cert.passed}
    _emit(args, payload, [
        ("graph", args.graph),
        ("alpha", cert.alpha_used),
        ("residual_vec", cert.residual_vec),
        ("residual_mat", cert.residual_mat),
        ("min_entry_MA", cert.min_entry_MA),
        ("is_markov_lifting", cert.is_markov_lifting),
        ("passed", cert.passed),
    ])
    if not args.json:
        print(json.dumps(cert.to_dict(args.graph, g.n)))
    return 0 if cert.passed else 1


def cmd_rate(args) -> int:
    g, fg = _graph(args)
    if args.alg == "gd":
        if args.alpha is None:
            raise InvalidInput("--alpha is required for --alg gd")
        T = build_T_G(fg, None, args.alpha)
    else:
        if args.gamma is None or args.rho is None:
            raise InvalidInput("--gamma and --rho are required for --alg admm")
        T = build_T_A(fg, None, AdmmParams.uniform(fg, args.gamma, args.rho))
    rep = spectrum_report(T)
    top = rep.eigenvalues[: args.show]
    payload = {"inputs": vars_of(args), **rep.to_dict()}
    if not args.eigenvalues:
        payload.pop("eigenvalues")
        payload["leading_eigenvalues"] = [[float(z.real), float(z.imag)] for z in top]
    _emit(args, payload, [
        ("graph", args.graph),
        ("alg", args.alg),
        ("tau", rep.tau),
        ("R", rep.convergence_time),
        ("spectral_radius", rep.spectral_radius),
        ("unit_count", rep.unit_count),
        ("diverged", rep.diverged),
        ("leading |lambda|", ", ".join(f"{abs(z):.6g}" for z in top)),
    ])
    return 1 if rep.diverged else 0


def _spec_from_args(args) -> SearchSpec:
    overrides = {k: getattr(args, k) for k in (
        "gamma_min", "gamma_max", "gamma_points", "rho_min", "rho_max",
        "rho_points", "refine_tol", "refine_budget")}
    if args.config:
        return SearchSpec.from_file(args.config, **overrides)
    return SearchSpec(**{k: v for k, v in overrides.items() if v is not None})


def cmd_tune(args) -> int:
    g, fg = _graph(args)
    out = {"inputs": vars_of(args)}
    human = [("graph", args.graph)]
    ok = True
    if args.alg in ("gd", "both"):
        gd = tune_gd_search(fg) if args.gd_search else tune_gd_closed_form(fg)
        out["gd"] = gd.to_dict()
        human += [("alpha*", gd.params_opt["alpha"]), ("tau_G*", gd.tau_opt), ("R_G", gd.R_opt)]
    if args.alg in ("admm", "both"):
        spec = _spec_from_args(args)
        admm = tune_admm(fg, spec=spec, jobs=args.jobs)
        out["admm"] = admm.to_dict()
        out["search_spec"] = spec.to_dict()
        ok = admm.status != "failed"
        human += [
            ("gamma*", admm.params_opt.get("gamma", math.nan)),
            ("rho*", admm.params_opt.get("rho", math.nan)),
            ("tau_A*", admm.tau_opt),
            ("R_A", admm.R_opt),
            ("status", admm.status),
        ]
    _emit(args, out, human)
    return 0 if ok else 1


def cmd_sweep(args) -> int:
    if args.indices:
        indices = [int(s) for s in args.indices.split(",")]
    else:
        if args.start is None or args.stop is None:
            raise InvalidInput("give --indices or both --from and --to")
        indices = list(range(args.start, args.stop + 1, args.step))
    spec = _spec_from_args(args)
    records = sweep(args.family, indices, spec, jobs=args.jobs)
    betas = beta_hats(records, parity=args.parity) if len(records) >= 2 else None
    if args.out:
        write_csv(records, {args.family: betas} if betas else {}, args.out)
    summary = sweep_summary(args.family, records, betas) if betas else {
        "family": args.family, "indices": indices,
        "beta1_last": None, "beta2_last": None, "max_beta1": None,
    }
    if args.summary:
        with open(args.summary, "w") as fh:
            json.dump(summary, fh, indent=2)
    failed = [r.index for r in records if r.status == "failed"]
    payload = {"inputs": vars_of(args), "summary": summary, "failed": failed,
               "dominance": {r.index: r.dominates for r in records}}
    human = [("family", args.family), ("indices", indices)]
    for r in records:
        human.append((f"  {r.family}:{r.index} n={r.n}",
                      f"R_G={r.R_G:.6g} R_A={r.R_A:.6g} dominance={r.dominates}"))
    human += [("beta1_last", summary["beta1_last"]), ("beta2_last", summary["beta2_last"])]
    _emit(args, payload, human)
    return 1 if failed else 0


def cmd_simulate(args) -> int:
    g, fg = _graph(args)
    rng = np.random.default_rng(_seed() if args.seed is None else args.seed)
    z0 = rng.standard_normal(g.n)
    if args.alg == "gd":
        if args.alpha is None:
            raise InvalidInput("--alpha is required for --alg gd")
        traj = run_gd(fg, None, args.alpha, z0, args.steps)
        payload = {"inputs": vars_of(args), "final_residual": traj.residuals[-1],
                   "diverged": traj.diverged}
        human = [("final_residual", traj.residuals[-1]), ("diverged", traj.diverged)]
    else:
        params = AdmmParams.uniform(fg, args.gamma, args.rho)
        traj = run_admm(fg, None, params, z0, args.steps)
        payload = {"inputs": vars_of(args), "final_residual": traj.residuals[-1],
                   "max_relation_error": max(traj.relation_errors), "diverged": traj.diverged}
        human = [("final_residual", traj.residuals[-1]),
                 ("max_relation_error", max(traj.relation_errors)),
                 ("diverged", traj.diverged)]
        if args.check_linear:
            T = build_T_A(fg, None, params)
            v = traj.states[0].n
            dev = 0.0
            for st in traj.states[1:]:
                v = T @ v
                dev = max(dev, float(np.max(np.abs(st.n - v))))
            payload["max_linear_deviation"] = dev
            human.append(("max_linear_deviation", dev))
    if args.out:
        write_trajectory_csv(traj, args.out, full_state=args.full_state)
    _emit(args, payload, human)
    return 1 if traj.diverged else 0


def _parse_chain(spec: str, switch: float, stay: float):
    name, _, arg = spec.partition(":")
    try:
        n = int(arg)
    except ValueError:
        raise InvalidInput(f"bad chain spec {spec!r}") from None
    if name == "lifted-cycle":
        return lift_cycle_chain(n, switch)
    if name == "lazy-cycle":
        return lazy_cycle_chain(n, stay), None
    raise InvalidInput(f"unknown chain {name!r}; use lifted-cycle:N or lazy-cycle:N")


def cmd_mix(args) -> int:
    chain, S = _parse_chain(args.chain, args.switch, args.stay)
    payload = {"inputs": vars_of(args)}
    try:
        t = mixing_time(chain, args.eps, args.t_max)
    except NotMixed:
        _emit(args, {**payload, "mixing_time": None, "mixed": False}, [("mixed", False)])
        return 1
    payload["mixing_time"] = t
    human = [("mixing_time", t)]
    if S is not None and args.compare:
        base = collapse(chain, S)
        tb = mixing_time(base, args.eps, args.t_max)
        payload["collapsed_mixing_time"] = tb
        human.append(("collapsed_mixing_time", tb))
    _emit(args, payload, human)
    if not args.json:
        print(t)
    return 0


def cmd_export(args) -> int:
    g, fg = _graph(args)
    params = AdmmParams.uniform(fg, args.gamma, args.rho)
    pair = build_lifting_pair(fg, None, params)
    manifest = export_lifting_pair(pair, fg, None, args.outdir, graph_label=args.graph)
    _emit(args, {"inputs": vars_of(args), "manifest": manifest},
          [("outdir", args.outdir), ("files", len(manifest["matrices"]))])
    return 0


def vars_of(args) -> dict:
    return {k: v for k, v in vars(args).items() if k != "func"}


# -- parser --------------------------------------------------------------------


def _add_search_flags(p):
    p.add_argument("--config", help="key=value file with search settings")
    for name, typ in (("gamma-min", float), ("gamma-max", float), ("gamma-points", int),
                      ("rho-min", float), ("rho-max", float), ("rho-points", int),
                      ("refine-tol", float), ("refine-budget", int)):
        p.add_argument(f"--{name}", type=typ, default=None)
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="liftlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, graph=True):
        if graph:
            p.add_argument("--graph", required=True,
                           help="cycle:N | torus:K | barbell:K | k4minus | file:PATH")
        p.add_argument("--json", action="store_true", help="print one JSON line")

    p = sub.add_parser("verify", help="check the ADMM/GD lifting identity")
    common(p)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("rate", help="spectral rate of GD or ADMM")
    common(p)
    p.add_argument("--alg", choices=("gd", "admm"), required=True)
    p.add_argument("--alpha", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--rho", type=float)
    p.add_argument("--show", type=int, default=5, help="leading eigenvalues to list")
    p.add_argument("--eigenvalues", action="store_true", help="include the full spectrum in JSON")
    p.set_defaults(func=cmd_rate)

    p = sub.add_parser("tune", help="optimal parameters for GD and/or ADMM")
    common(p)
    p.add_argument("--alg", choices=("gd", "admm", "both"), default="both")
    p.add_argument("--gd-search", action="store_true", help="search instead of closed form")
    _add_search_flags(p)
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("sweep", help="tune both algorithms across a graph family")
    common(p, graph=False)
    p.add_argument("--family", required=True, choices=("cycle", "torus", "barbell"))
    p.add_argument("--from", dest="start", type=int)
    p.add_argument("--to", dest="stop", type=int)
    p.add_argument("--step", type=int, default=1)
    p.add_argument("--indices", help="comma-separated explicit indices")
    p.add_argument("--parity", action="store_true", help="difference beta2 within equal parity")
    p.add_argument("--out", help="CSV output path")
    p.add_argument("--summary", help="JSON summary output path")
    _add_search_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("simulate", help="run ADMM or GD from a random start")
    common(p)
    p.add_argument("--alg", choices=("gd", "admm"), default="admm")
    p.add_argument("--alpha", type=float)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--seed", type=int, help="defaults to $LIFTLAB_SEED or 0")
    p.add_argument("--check-linear", action="store_true",
                   help="compare the ADMM recursion with powers of T_A")
    p.add_argument("--out", help="trajectory CSV path")
    p.add_argument("--full-state", action="store_true", help="include state columns in CSV")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("mix", help="mixing time of a (lifted) cycle chain")
    common(p, graph=False)
    p.add_argument("--chain", required=True, help="lifted-cycle:N | lazy-cycle:N")
    p.add_argument("--switch", type=float, default=0.25)
    p.add_argument("--stay", type=float, default=0.5)
    p.add_argument("--eps", type=float, default=0.25)
    p.add_argument("--t-max", type=int, default=100_000)
    p.add_argument("--compare", action="store_true", help="also report the collapsed chain")
    p.set_defaults(func=cmd_mix)

    p = sub.add_parser("export-matrices", help="write all operators as CSV plus a JSON manifest")
    common(p)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--outdir", required=True)
    p.set_defaults(func=cmd_export)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except USAGE_ERRORS as exc:
        print(f"liftlab {args.command}: {exc}", file=sys.stderr)
        return 2
    except LiftlabError as exc:
        print(f"liftlab {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
