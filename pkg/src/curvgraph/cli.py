"""Command-line front end.

Exit codes: 0 success, 1 audit violation, 2 input or validation error,
3 solver failure, 4 I/O error.  Reports are written even when an audit
finds violations.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from .audit import ALL_SUITES, AuditConfig, run_full_audit
from .chains import (
    MarkovChain,
    graph_distance,
    read_chain_csv,
    read_chain_json,
    standard_chain,
    write_chain_json,
    write_distance_csv,
)
from .curvature import cd_curvature, cde_curvature_upper, coarse_ricci
from .errors import ChainValidationError, CurvGraphError, SolverError
from .functionals import entropy, fisher, fisher_bar, fisher_modified
from .transport import d_gamma, wasserstein_p, weak_transport


def _write_json(path: str | None, payload: dict) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if path is None or path == "-":
        print(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)
            fh.write("\n")


def _load_chain(path: str) -> MarkovChain:
    if path.endswith(".csv"):
        return read_chain_csv(path)
    return read_chain_json(path)


def _cmd_gen(args) -> int:
    chain = standard_chain(args.name, args.n)
    write_chain_json(chain, args.output, meta={"builder": args.name, "n": args.n,
                                               "version": __version__})
    return 0


def _cmd_analyze(args) -> int:
    chain = _load_chain(args.chain)
    what = [w.strip() for w in args.what.split(",") if w.strip()]
    unknown = set(what) - {"cd", "cde", "coarse", "dgamma", "functionals"}
    if unknown:
        raise ChainValidationError(f"unknown analyses: {sorted(unknown)}")
    out: dict = {"chain": {"n": chain.n, "states": list(chain.states)},
                 "version": __version__,
                 "config": vars(args).copy()}
    out["config"].pop("func", None)
    dg = graph_distance(chain)
    if "cd" in what:
        out["cd"] = cd_curvature(chain, threads=args.threads).to_dict()
    if "cde" in what:
        out["cde"] = cde_curvature_upper(chain, starts=args.starts, seed=args.seed,
                                         threads=args.threads).to_dict()
    if "coarse" in what:
        d = d_gamma(chain, threads=args.threads) if args.distance == "gamma" else dg
        pairs = "edges" if args.edges_only else "all"
        out["coarse"] = coarse_ricci(chain, d, pairs=pairs, threads=args.threads).to_dict()
    if "dgamma" in what:
        dm = d_gamma(chain, threads=args.threads)
        out["dgamma"] = {"kind": dm.kind, "matrix": dm.d.tolist()}
        if args.csv_out:
            write_distance_csv(dm, chain, args.csv_out)
    if "functionals" in what:
        if not args.density:
            raise ChainValidationError("functionals analysis needs --density FILE")
        with open(args.density) as fh:
            f = np.asarray(json.load(fh), dtype=float)
        chain.check_density(f)
        out["functionals"] = {
            "entropy": entropy(f, chain).value,
            "fisher": fisher(f, chain).value,
            "fisher_modified": fisher_modified(f, chain).value if (f > 0).all() else None,
            "fisher_bar": fisher_bar(f, chain).value,
        }
    _write_json(args.output, out)
    return 0


def _cmd_audit(args) -> int:
    chain = _load_chain(args.chain)
    suites = tuple(ALL_SUITES) if args.suites == "all" else tuple(
        s.strip() for s in args.suites.split(",") if s.strip())
    unknown = set(suites) - set(ALL_SUITES)
    if unknown:
        raise ChainValidationError(f"unknown suites: {sorted(unknown)}")
    config = AuditConfig(
        suites=suites,
        trials=args.trials,
        seed=args.seed,
        cde_starts=args.starts,
        kappa=args.kappa,
        kappa_e=args.kappa_e,
        kappa_c=args.kappa_c,
        threads=args.threads,
    )
    report = run_full_audit(chain, config)
    _write_json(args.output, report.to_dict())
    return 0 if report.passed else 1


def _cmd_transport(args) -> int:
    chain = _load_chain(args.chain)
    with open(args.mu) as fh:
        mu = np.asarray(json.load(fh), dtype=float)
    with open(args.nu) as fh:
        nu = np.asarray(json.load(fh), dtype=float)
    d = d_gamma(chain, threads=args.threads) if args.distance == "gamma" \
        else graph_distance(chain)
    out: dict = {"chain": {"n": chain.n}, "distance": args.distance,
                 "version": __version__}
    if args.weak:
        value, plan = weak_transport(nu, mu, d)
        out["weak_transport_squared"] = value
        out["kernel_family"] = plan.weights.tolist()
        out["meta"] = {k: v for k, v in plan.meta.items() if k != "dual_candidates"}
    else:
        value, plan = wasserstein_p(mu, nu, d, p=args.p)
        out["wasserstein"] = value
        out["p"] = args.p
        out["coupling"] = plan.weights.tolist()
        if plan.potential is not None:
            out["potential"] = plan.potential.tolist()
    _write_json(args.output, out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curvgraph",
        description="Curvature, transport costs and inequality audits for "
                    "finite reversible Markov chains.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a standard chain file")
    p.add_argument("name", choices=["two_point", "hypercube", "cycle", "complete"])
    p.add_argument("--n", type=int, default=1, help="size parameter")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("analyze", help="curvatures, distances and functionals")
    p.add_argument("chain")
    p.add_argument("--what", default="cd", help="comma list: cd,cde,coarse,dgamma,functionals")
    p.add_argument("--distance", choices=["graph", "gamma"], default="graph")
    p.add_argument("--edges-only", action="store_true",
                   help="restrict coarse Ricci to support edges (labelled as such)")
    p.add_argument("--density", help="JSON file with one density value per state")
    p.add_argument("--starts", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--csv-out", help="also write dgamma matrix as CSV")
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("audit", help="run the inequality audit suites")
    p.add_argument("chain")
    p.add_argument("--suites", default="all")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--starts", type=int, default=64)
    p.add_argument("--kappa", type=float, default=None, help="override the CD constant")
    p.add_argument("--kappa-e", type=float, default=None, help="override the CDE' constant")
    p.add_argument("--kappa-c", type=float, default=None, help="override the coarse constant")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=_cmd_audit)

    p = sub.add_parser("transport", help="transport costs between two measures")
    p.add_argument("chain")
    p.add_argument("--mu", required=True, help="JSON file, source measure")
    p.add_argument("--nu", required=True, help="JSON file, target measure")
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--weak", action="store_true", help="barycentric weak cost instead of W_p")
    p.add_argument("--distance", choices=["graph", "gamma"], default="graph")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=_cmd_transport)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ChainValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 3
    except CurvGraphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (OSError, json.JSONDecodeError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
