"""Command line interface: solve single instances, sweep experiment
grids, run the exhaustive adversary checks, and replay failure bundles.

Exit code 0 means everything asked for verified."""

from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path

from .algorithms import AlgorithmParams
from .harness import (
    PLANTED_SHAPES,
    exhaustive_adversary_check,
    planted_coloring,
    random_coloring,
    replay_bundle,
    run_experiment,
    run_single,
    write_replay_bundle,
)
from .model import GameConfig, HiddenColoring, QueryKind, Target, load_coloring


def _config_from(args: argparse.Namespace) -> GameConfig:
    return GameConfig(
        n=args.n,
        q=args.q,
        c=args.c,
        query_kind=QueryKind(args.mode),
        target=Target(args.target),
    )


def _params_from(args: argparse.Namespace) -> AlgorithmParams:
    m = getattr(args, "m_override", None)
    return AlgorithmParams(m=m)


def _coloring_from(args: argparse.Namespace, config: GameConfig) -> HiddenColoring:
    spec = args.coloring
    if spec == "random":
        return random_coloring(config.n, config.c, random.Random(f"cli:{args.seed}"))
    if spec.startswith("file:"):
        coloring, c = load_coloring(Path(spec[5:]).read_text())
        if coloring.n != config.n or c > config.c:
            raise SystemExit("coloring file does not match --n/--c")
        return coloring
    if spec.startswith("planted:"):
        return planted_coloring(spec[8:], config.n, config.c, args.seed)
    raise SystemExit(f"unknown coloring spec {spec!r}")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=int, default=3)
    p.add_argument("--c", type=int, default=2)
    p.add_argument("--mode", choices=["majority", "plurality"], default="majority")
    p.add_argument(
        "--target", choices=["nonminority", "almostplurality"], default="nonminority"
    )
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--m-override", type=int, default=None, dest="m_override")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ballgames",
        description="Adaptive majority/plurality query games over colored balls",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve one instance and verify the claim")
    _add_common(p_solve)
    p_solve.add_argument(
        "--coloring",
        default="random",
        help="random | file:PATH | planted:NAME with NAME in " + ",".join(PLANTED_SHAPES),
    )
    p_solve.add_argument(
        "--policy", default="first", help="first | rotating | greedy | random:SEED"
    )
    p_solve.add_argument("--bundle-on-failure", default=None, metavar="PATH")

    p_exp = sub.add_parser("experiment", help="run a verified experiment grid")
    _add_common(p_exp)
    p_exp.add_argument("--trials", type=int, default=20)
    p_exp.add_argument(
        "--policy",
        default="first,rotating,greedy,random:1",
        help="comma-separated policy list",
    )
    p_exp.add_argument("--csv", default=None, metavar="PATH")
    p_exp.add_argument("--bundle-dir", default=None, metavar="DIR")
    p_exp.add_argument(
        "--rotate-policies",
        action="store_true",
        help="rotate policies over trials instead of running the full product",
    )

    p_adv = sub.add_parser(
        "adversary-check", help="exhaustive small-instance adversary search"
    )
    p_adv.add_argument(
        "--component", choices=["fallback", "median", "oracle"], default="fallback"
    )
    p_adv.add_argument("--n", type=int, default=5)
    p_adv.add_argument("--q", type=int, default=3)
    p_adv.add_argument("--c", type=int, default=2)
    p_adv.add_argument("--mode", choices=["majority", "plurality"], default="majority")
    p_adv.add_argument(
        "--target", choices=["nonminority", "almostplurality"], default="nonminority"
    )
    p_adv.add_argument("--u-size", type=int, default=7, dest="u_size")

    p_rep = sub.add_parser("replay", help="re-drive a recorded failure bundle")
    p_rep.add_argument("--bundle", required=True, metavar="PATH")

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "solve":
        config = _config_from(args)
        coloring = _coloring_from(args, config)
        params = _params_from(args)
        result, verdict, session, name = run_single(
            config, coloring, args.policy, params
        )
        print(f"algorithm: {name}")
        print(f"outcome:   {result.kind}" + (f" ball={result.ball}" if result.ball is not None else ""))
        print(f"queries:   {verdict.queries_used}")
        print(f"verified:  {verdict.correct}" + (f" ({verdict.detail})" if verdict.detail else ""))
        if not verdict.correct and args.bundle_on_failure:
            write_replay_bundle(
                args.bundle_on_failure, config, coloring, args.policy,
                args.seed, name, result, session.transcript,
            )
            print(f"bundle:    {args.bundle_on_failure}")
        return 0 if verdict.correct else 1

    if args.command == "experiment":
        config = _config_from(args)
        params = _params_from(args)
        policies = [p.strip() for p in args.policy.split(",") if p.strip()]
        records = run_experiment(
            [config],
            trials=args.trials,
            policies=policies,
            seed=args.seed,
            params=params,
            csv_path=args.csv,
            bundle_dir=args.bundle_dir,
            cross_policies=not args.rotate_policies,
        )
        bad = [r for r in records if not r.verified]
        total_q = sum(r.queries for r in records)
        print(f"records: {len(records)}  failures: {len(bad)}  queries: {total_q}")
        if args.csv:
            print(f"csv: {args.csv}")
        for r in bad[:10]:
            print(f"  FAILED {r.run_id} policy={r.policy} outcome={r.outcome}")
        return 0 if not bad else 1

    if args.command == "adversary-check":
        if args.component == "median":
            ok = exhaustive_adversary_check(component="median", u_size=args.u_size)
            print(f"median |U|={args.u_size}: {'ok' if ok else 'FAILED'}")
        else:
            config = GameConfig(
                n=args.n,
                q=args.q,
                c=args.c,
                query_kind=QueryKind(args.mode),
                target=Target(args.target),
            )
            ok = exhaustive_adversary_check(config, component=args.component)
            print(f"{args.component} n={args.n} q={args.q} c={args.c}: "
                  f"{'ok' if ok else 'FAILED'}")
        return 0 if ok else 1

    if args.command == "replay":
        result, verdict = replay_bundle(args.bundle)
        print(f"outcome:  {result.kind}" + (f" ball={result.ball}" if result.ball is not None else ""))
        print(f"verified: {verdict.correct}" + (f" ({verdict.detail})" if verdict.detail else ""))
        return 0 if verdict.correct else 1

    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
