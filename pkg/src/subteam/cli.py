"""Command line: ``subteam {replace,bench,gen,ingest,curvature}``.

Exit codes: 0 success, 2 validation or configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from . import bench as bench_mod
from .baselines import BudgetExceeded, brute_force, iterative_replace, local_best
from .data import (BAConfig, IngestStats, generate_ba, ingest_records, network_summary,
                   read_records)
from .io import FormatError, read_network, read_skill_relevance, write_network
from .kernel import ConvergenceError, instance_decay
from .network import (ReplacementProblem, SkillRelevance, validate_network,
                      validate_problem)
from .reform import reform, supermodular_curvature

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_INVALID):
        super().__init__(message)
        self.code = code


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--safety", type=float, default=0.9, help="decay safety factor in (0, 1)")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--json", metavar="PATH", help="also write a JSON report")
    return p


def _network_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--edges", required=True)
    p.add_argument("--skills", required=True)
    p.add_argument("--W", dest="W", help="skill-relevance CSV (default: upper ones)")
    p.add_argument("--team", required=True, help="comma-separated node ids")
    p.add_argument("--out-of", dest="out_of", required=True,
                   help="comma-separated ids of the unavailable members")


def _ids(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def _load_problem(args):
    try:
        net = read_network(args.edges, args.skills)
        W = read_skill_relevance(args.W, net.l) if args.W else SkillRelevance.ones_upper(net.l)
    except (OSError, FormatError) as err:
        raise CliError(str(err)) from None
    rep = validate_network(net)
    wrep = W.validate()
    if not rep or not wrep:
        raise CliError(f"invalid input: {rep if not rep else wrep}")
    try:
        prob = ReplacementProblem.from_ids(net, _ids(args.team), _ids(args.out_of))
    except KeyError as err:
        raise CliError(str(err.args[0])) from None
    rep = validate_problem(net, prob)
    if not rep:
        raise CliError(f"invalid problem: {rep}")
    if not 0 < args.safety < 1:
        raise CliError("--safety must be in (0, 1)")
    params = instance_decay(net, prob.team, W, args.safety)
    return net, W, prob, params


def _emit(report: dict, args) -> None:
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2)


def cmd_replace(args) -> int:
    net, W, prob, params = _load_problem(args)
    ids = net.node_ids
    report = {"team": [ids[v] for v in prob.team], "out_of": [ids[v] for v in prob.subteam],
              "algorithm": args.algorithm, "decay": params.c}
    if args.algorithm == "reform":
        sol = reform(net, prob, W, params)
        members, score = sol.members, sol.final_score
        report["rounds"] = [{"pick": ids[v], "gain": g} for v, g in zip(sol.members, sol.scores)]
    else:
        run = {"iterative": lambda: iterative_replace(net, prob, W, params, rng_seed=args.seed),
               "local_best": lambda: local_best(net, prob, W, params),
               "brute": lambda: brute_force(net, prob, W, params, budget=args.budget)}
        try:
            res = run[args.algorithm]()
        except BudgetExceeded as err:
            raise CliError(str(err)) from None
        members, score = res.members, res.final_score
        report["rounds"] = [{"pick": ids[v]} for v in res.members]
    report["replacement"] = [ids[v] for v in members]
    report["score"] = score
    print("replacement:", ",".join(ids[v] for v in members))
    print(f"score: {score!r}")
    for k, rnd in enumerate(report["rounds"], 1):
        extra = f" gain={rnd['gain']!r}" if "gain" in rnd else ""
        print(f"round {k}: {rnd['pick']}{extra}")
    if args.bound:
        cert = _certificate(net, prob, W, params, args.pool_cap)
        g_plus = None
        try:
            g_plus = brute_force(net, prob, W, params, budget=args.budget).final_score
        except BudgetExceeded:
            pass
        if g_plus is not None:
            cert.with_optimum(g_plus)
            print(f"brute score: {g_plus!r}")
        report["certificate"] = _cert_dict(cert, ids)
        _print_cert(cert, ids)
    _emit(report, args)
    return EXIT_OK


def _certificate(net, prob, W, params, pool_cap):
    try:
        return supermodular_curvature(net, prob, W, params, pool_cap)
    except ValueError as err:
        raise CliError(str(err)) from None


def _cert_dict(cert, ids) -> dict:
    return {
        "kappa": cert.kappa,
        "argmin": None if cert.argmin_node is None else ids[cert.argmin_node],
        "valid": cert.valid,
        "pool": [ids[v] for v in cert.pool],
        "g_full": cert.g_full,
        "g_singletons": {ids[v]: g for v, g in cert.g_singletons.items()},
        "g_drop": {ids[v]: g for v, g in cert.g_drop.items()},
        "bound": cert.bound,
    }


def _print_cert(cert, ids) -> None:
    print(f"kappa: {cert.kappa!r}" + ("" if cert.valid else " (invalid for bound)"))
    if cert.argmin_node is not None:
        print(f"kappa argmin: {ids[cert.argmin_node]}")
    print(f"pool size: {len(cert.pool)}")
    bound = cert.bound
    print(f"bound: {bound!r}" if isinstance(bound, float) else f"bound: {bound}")


def cmd_curvature(args) -> int:
    net, W, prob, params = _load_problem(args)
    cert = _certificate(net, prob, W, params, args.pool_cap)
    _print_cert(cert, net.node_ids)
    _emit(_cert_dict(cert, net.node_ids), args)
    return EXIT_OK


def cmd_gen(args) -> int:
    try:
        cfg = BAConfig(n=args.n, attach=args.attach, l=args.skills, rate=args.rate,
                       seed=args.seed, seed_graph=args.seed_graph)
    except ValueError as err:
        raise CliError(str(err)) from None
    net = generate_ba(cfg)
    try:
        paths = write_network(net, args.out, SkillRelevance.ones_upper(cfg.l))
    except OSError as err:
        raise CliError(f"cannot write to {args.out}: {err}") from None
    summary = network_summary(net)
    print(f"n={summary['n']} m={summary['m']} density={summary['density']:.4f}")
    for kind, path in paths.items():
        print(f"{kind}: {path}")
    _emit({**summary, "files": {k: str(v) for k, v in paths.items()}}, args)
    return EXIT_OK


def cmd_ingest(args) -> int:
    stats = IngestStats()
    try:
        records = read_records(args.records, stats)
        net = ingest_records(records, args.skill_mode, args.base, stats)
    except OSError as err:
        raise CliError(str(err)) from None
    except ValueError as err:
        raise CliError(str(err)) from None
    try:
        paths = write_network(net, args.out, SkillRelevance.ones_upper(net.l))
    except OSError as err:
        raise CliError(f"cannot write to {args.out}: {err}") from None
    summary = network_summary(net)
    print(f"records={stats.records} skipped={stats.skipped} "
          f"n={summary['n']} m={summary['m']} l={summary['l']}")
    _emit({**summary, "records": stats.records, "skipped": stats.skipped,
           "files": {k: str(v) for k, v in paths.items()}}, args)
    return EXIT_OK


def cmd_bench(args) -> int:
    try:
        cfg = bench_mod.BatchConfig.from_json(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
    except (OSError, ValueError, TypeError) as err:
        raise CliError(f"bad config: {err}") from None
    try:
        rows = bench_mod.run_batch(cfg, threads=args.threads, timing_serial=args.timing_serial)
    except (OSError, FormatError) as err:
        raise CliError(str(err)) from None
    paths = bench_mod.write_results(rows, args.out)
    errors = sum(1 for r in rows if r.error)
    print(f"rows={len(rows)} errors={errors}")
    for kind, path in paths.items():
        print(f"{kind}: {path}")
    if args.audit:
        problems = bench_mod.audit(args.out)
        for p in problems:
            print("audit:", p)
        print("audit: ok" if not problems else f"audit: {len(problems)} mismatch(es)")
        if problems:
            return EXIT_INVALID
    _emit({"rows": len(rows), "errors": errors,
           "aggregate": bench_mod.aggregate(rows)}, args)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="subteam", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("replace", parents=[common], help="solve one instance")
    _network_args(p)
    p.add_argument("--algorithm", choices=["reform", "iterative", "local_best", "brute"],
                   default="reform")
    p.add_argument("--bound", action="store_true", help="print the curvature certificate")
    p.add_argument("--budget", type=int, default=2_000_000, help="brute-force evaluation budget")
    p.add_argument("--pool-cap", dest="pool_cap", type=int, default=60)
    p.set_defaults(func=cmd_replace)

    p = sub.add_parser("curvature", parents=[common], help="curvature certificate only")
    _network_args(p)
    p.add_argument("--pool-cap", dest="pool_cap", type=int, default=60)
    p.set_defaults(func=cmd_curvature)

    p = sub.add_parser("bench", parents=[common], help="run a batch experiment")
    p.add_argument("config", help="BatchConfig JSON file")
    p.add_argument("--out", default="bench_out")
    p.add_argument("--timing-serial", dest="timing_serial", action="store_true",
                   help="run instances one at a time for clean timings")
    p.add_argument("--audit", action="store_true",
                   help="recompute aggregates from the per-instance CSVs")
    p.set_defaults(func=cmd_bench, seed=None)

    p = sub.add_parser("gen", parents=[common], help="write a Barabasi-Albert network")
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--attach", type=int, default=3)
    p.add_argument("--skills", type=int, default=6)
    p.add_argument("--rate", type=float, default=1.0)
    p.add_argument("--seed-graph", dest="seed_graph", choices=["complete", "star"],
                   default="complete")
    p.add_argument("--out", default="network")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("ingest", parents=[common], help="build a network from JSON-lines records")
    p.add_argument("--records", required=True)
    p.add_argument("--skill-mode", dest="skill_mode", choices=["count", "decay"], default="count")
    p.add_argument("--base", type=float, default=0.95)
    p.add_argument("--out", default="network")
    p.set_defaults(func=cmd_ingest)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as err:
        print(f"error: {err}", file=sys.stderr)
        return err.code
    except (ConvergenceError, np.linalg.LinAlgError) as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
