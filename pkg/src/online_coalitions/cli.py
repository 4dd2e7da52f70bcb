"""Command-line entry point: ``online-coalitions <subcommand> ...``.

Exit codes: 0 success or stable, 1 usage error, 2 parse error,
3 unstable partition or failed property, 4 capacity guard hit.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import io
from .adversary import FAMILIES, FamilySpec, generate
from .algorithms import POLICIES, make_policy
from .errors import CapacityError, CoalitionError, ParseError, ProtocolViolation
from .game import Partition
from .harness import SCHEMA_VERSION, default_table_config, estimate_guarantee, table_matrix
from .online import run_online
from .oracle import Mode, all_stable, solve_minimax
from .stability import DEFAULT_PO_GUARD, Concept, Deviation, apply_deviation, is_stable

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_FAIL, EXIT_CAPACITY = 0, 1, 2, 3, 4

CONCEPTS = [c.value for c in Concept]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _rational(text: str) -> Fraction:
    try:
        return io.parse_rational(text if "/" in text else int(text), "argument")
    except (ValueError, ParseError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _order(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(a) for a in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"arrival order must be comma-separated integers, got {text!r}") from None


def _emit(args, payload: dict, text: str) -> None:
    if args.format == "json":
        print(json.dumps({"schema_version": SCHEMA_VERSION, **payload}, sort_keys=True))
    else:
        print(text)


def _blocks(partition: Partition) -> list[list[int]]:
    return [list(b) for b in partition.blocks]


def _witness(partition: Partition, witness):
    if isinstance(witness, Deviation):
        return {"agent": witness.agent, "target": witness.target, "after": _blocks(apply_deviation(partition, witness))}
    if isinstance(witness, Partition):
        return {"dominating": _blocks(witness)}
    return None


def cmd_check(args) -> int:
    game, _ = io.parse_instance(args.instance)
    partition = io.parse_partition(args.partition)
    concepts = CONCEPTS if args.concept == "all" else [args.concept]
    verdicts = {c: is_stable(game, partition, Concept(c), args.guard_n) for c in concepts}
    unstable = [c for c, v in verdicts.items() if not v.stable]
    payload = {
        "blocks": _blocks(partition),
        "verdicts": {c: {"stable": v.stable, "witness": _witness(partition, v.witness)} for c, v in verdicts.items()},
    }
    lines = []
    for c, v in verdicts.items():
        lines.append(f"{c}: {'stable' if v.stable else 'unstable'}" + ("" if v.stable else f" ({v.witness})"))
    lines.append(f"{partition}: " + ("stable for " + ", ".join(concepts) if not unstable else "unstable for " + ", ".join(unstable)))
    _emit(args, payload, "\n".join(lines))
    return EXIT_FAIL if unstable else EXIT_OK


def cmd_run(args) -> int:
    game, order = io.parse_instance(args.instance)
    order = args.order or order
    policy = make_policy(args.algorithm)
    trace = run_online(game, order, policy, seed=args.seed)
    concepts = CONCEPTS if args.concept == "all" else [args.concept]
    for t, p in enumerate(trace.partitions):
        record = {"schema_version": SCHEMA_VERSION, "step": t + 1, "agent": trace.order[t], "blocks": _blocks(p)}
        print(json.dumps(record) if args.format == "json" else f"{t + 1:>3}  agent {trace.order[t]:<3} {p}")
    checks = {c: is_stable(game, trace.final, Concept(c), args.guard_n).stable for c in concepts}
    summary = {
        "schema_version": SCHEMA_VERSION,
        "summary": True,
        "policy": policy.name,
        "seed": args.seed,
        "order": list(trace.order),
        "final": _blocks(trace.final),
        "checks": checks,
    }
    if args.format == "json":
        print(json.dumps(summary, sort_keys=True))
    else:
        print("final " + str(trace.final) + "  " + "  ".join(f"{c}={'yes' if ok else 'no'}" for c, ok in checks.items()))
    return EXIT_OK


def cmd_enumerate(args) -> int:
    game, _ = io.parse_instance(args.instance)
    found = all_stable(game, Concept(args.concept), args.guard_n)
    payload = {"concept": args.concept, "count": len(found), "partitions": [_blocks(p) for p in found]}
    _emit(args, payload, "\n".join([str(p) for p in found] + [f"{len(found)} {args.concept}-stable partitions"]))
    return EXIT_OK


def _family_spec(args) -> FamilySpec:
    return FamilySpec(args.family, k=args.k, x=args.x, y=args.y, seed=args.seed)


def cmd_gen(args) -> int:
    dist = generate(_family_spec(args))
    manifest = io.write_distribution(dist, args.out)
    _emit(args, {"manifest": str(manifest), "entries": len(dist)}, f"wrote {len(dist)} entries to {manifest}")
    return EXIT_OK


def cmd_solve(args) -> int:
    dist = io.read_distribution(args.instance_dir) if args.instance_dir else generate(_family_spec(args))
    mode = args.mode or ("expected" if dist.distributional else "worst")
    result = solve_minimax(dist, Concept(args.concept), mode, guard=args.guard_n)
    if args.dump_policy:
        table = {key.digest(): place for key, place in result.policy.items()}
        Path(args.dump_policy).write_text(json.dumps(table, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    payload = {"family": dist.family, "concept": args.concept, "mode": str(result.mode), "value": str(result.value), "nodes": result.nodes}
    _emit(args, payload, f"{dist.family} {args.concept} {result.mode}: {result.value}  ({result.nodes} observation nodes)")
    return EXIT_OK


def cmd_estimate(args) -> int:
    dist = generate(_family_spec(args))
    est = estimate_guarantee(make_policy(args.algorithm), dist, Concept(args.concept), args.trials, args.seed, args.guard_n, args.workers)
    lo, hi = est.wilson95
    text = f"{est.policy} on {est.family}: {est.successes}/{est.trials} = {float(est.p_hat):.4f}  wilson95 [{float(lo):.4f}, {float(hi):.4f}]"
    _emit(args, est.to_dict(), text)
    return EXIT_OK


def cmd_table(args) -> int:
    report = table_matrix(default_table_config(args.instances, args.n_max, args.seed, args.k))
    print(report.to_json() if args.format == "json" else report.to_text())
    return EXIT_OK if report.passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    # global flags are accepted before or after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="random seed (default 0)")
    common.add_argument("--guard-n", type=int, default=argparse.SUPPRESS, help=f"enumeration guard (default {DEFAULT_PO_GUARD})")
    common.add_argument("--format", choices=["text", "json"], default=argparse.SUPPRESS)

    parser = _Parser(prog="online-coalitions", description="Online coalition formation experiments.", parents=[common])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def family_args(p, required=True):
        p.add_argument("--family", choices=sorted(FAMILIES), required=required)
        p.add_argument("--k", type=int, default=1)
        p.add_argument("--x", type=_rational, default=Fraction(1))
        p.add_argument("--y", type=_rational, default=Fraction(1))

    p = sub.add_parser("check", parents=[common], help="check a partition against stability concepts")
    p.add_argument("instance")
    p.add_argument("partition")
    p.add_argument("--concept", choices=[*CONCEPTS, "all"], default="all")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("run", parents=[common], help="run an online algorithm on an instance")
    p.add_argument("instance")
    p.add_argument("--algorithm", choices=sorted(POLICIES), required=True)
    p.add_argument("--order", type=_order, help="arrival order, e.g. 2,0,1 (default: the file's, else 0..n-1)")
    p.add_argument("--concept", choices=[*CONCEPTS, "all"], default="all")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("enumerate", parents=[common], help="list every stable partition of an instance")
    p.add_argument("instance")
    p.add_argument("--concept", choices=CONCEPTS, required=True)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("gen", parents=[common], help="write an adversarial instance family to a directory")
    family_args(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", parents=[common], help="best deterministic online success value on a family")
    family_args(p, required=False)
    p.add_argument("--instance-dir")
    p.add_argument("--concept", choices=CONCEPTS, required=True)
    p.add_argument("--mode", choices=[m.value for m in Mode])
    p.add_argument("--dump-policy", metavar="PATH", help="write the optimal policy as {observation digest: placement}")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("estimate", parents=[common], help="Monte Carlo success rate with a Wilson interval")
    family_args(p)
    p.add_argument("--algorithm", choices=sorted(POLICIES), required=True)
    p.add_argument("--concept", choices=CONCEPTS, required=True)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("table", parents=[common], help="reproduce the concept x game-class matrix")
    p.add_argument("--instances", type=int, default=10, help="random games per positive cell")
    p.add_argument("--n-max", type=int, default=5)
    p.add_argument("--k", type=int, default=2)
    p.set_defaults(func=cmd_table)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for name, default in (("seed", 0), ("guard_n", DEFAULT_PO_GUARD), ("format", "text")):
        if not hasattr(args, name):
            setattr(args, name, default)
    if args.command == "solve" and not (args.family or args.instance_dir):
        parser.error("solve needs --family or --instance-dir")
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except CapacityError as exc:
        print(f"capacity guard: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except ProtocolViolation as exc:
        print(f"protocol violation: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except CoalitionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
