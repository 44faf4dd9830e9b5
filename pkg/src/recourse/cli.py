"""Command-line front end: classify, explain, interpolant, enumerate,
dualize, bench, and serve.

Exit status: 0 on success, 1 on a domain error (e.g. the instance already
gets the desired label), 2 on usage errors (argparse's default).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .bench import run_causal_comparison, run_domain_scaling, write_report
from .cfe import ControlSpec, enumerate_transitions
from .dual import dualize_program
from .errors import FixtureError, RecourseError
from .rulelang import parse_program, print_program
from .schema import Instance
from .service import (
    classify_payload,
    dump_payload,
    explain_payload,
    interpolant_payload,
)
from .workspace import (
    Workspace,
    list_fixtures,
    load_bench_config,
    load_workspace,
    load_workspace_from_files,
)


def _add_workspace_args(cmd: argparse.ArgumentParser) -> None:
    cmd.add_argument("--fixture", help="named fixture (see `recourse fixtures`)")
    cmd.add_argument("-s", "--schema", help="schema JSON file")
    cmd.add_argument("-r", "--rules", help="rule file")


def _add_instance_arg(cmd: argparse.ArgumentParser) -> None:
    cmd.add_argument("-i", "--instance", required=True, help="instance JSON file")


def _add_control_args(cmd: argparse.ArgumentParser) -> None:
    cmd.add_argument("--immutable", default="", help="comma-separated feature names")
    cmd.add_argument("--must-increase", default="", help="comma-separated numeric features")
    cmd.add_argument("--must-decrease", default="", help="comma-separated numeric features")
    cmd.add_argument("--must-change", default="", help="comma-separated categorical features")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="recourse",
        description="Counterfactual explanations for rule-based classifiers",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    cmd = sub.add_parser("classify", help="label an instance with its proof")
    _add_workspace_args(cmd)
    _add_instance_arg(cmd)
    cmd.add_argument("--json", action="store_true")

    cmd = sub.add_parser("explain", help="counterfactual explanations for an instance")
    _add_workspace_args(cmd)
    _add_instance_arg(cmd)
    _add_control_args(cmd)
    cmd.add_argument("--cost", type=int, help="restrict to exactly this intervention cost")
    cmd.add_argument("--limit", type=int, default=64, help="0 means unlimited")
    cmd.add_argument("--json", action="store_true")

    cmd = sub.add_parser("interpolant", help="minimal-cost explanation search")
    _add_workspace_args(cmd)
    _add_instance_arg(cmd)
    _add_control_args(cmd)
    cmd.add_argument("--json", action="store_true")

    cmd = sub.add_parser("enumerate", help="all decision-flipping transitions")
    _add_workspace_args(cmd)
    cmd.add_argument("--limit", type=int, default=64, help="0 means unlimited")
    cmd.add_argument("--json", action="store_true")

    cmd = sub.add_parser("dualize", help="print the dual program for a rule file")
    cmd.add_argument("-r", "--rules", required=True)

    cmd = sub.add_parser("bench", help="timing harness")
    bench_sub = cmd.add_subparsers(dest="bench_command", required=True)
    scaling = bench_sub.add_parser("scaling", help="time vs. categorical domain size")
    scaling.add_argument("--fixture", default="adult")
    scaling.add_argument("--feature", help="defaults to the fixture's scaling feature")
    scaling.add_argument("--sizes", default="2,3,4,5")
    scaling.add_argument("--reps", type=int, default=5)
    scaling.add_argument("--out-dir", default="bench_out")
    causal = bench_sub.add_parser("causal", help="causal vs. non-causal configuration")
    causal.add_argument("--fixture", default="adult")
    causal.add_argument("--baseline", default="adult3")
    causal.add_argument("--reps", type=int, default=5)
    causal.add_argument("--out-dir", default="bench_out")

    cmd = sub.add_parser("serve", help="run the JSON-over-HTTP service")
    _add_workspace_args(cmd)
    cmd.add_argument("--port", type=int, default=8000)
    cmd.add_argument("--host", default="127.0.0.1")

    sub.add_parser("fixtures", help="list available fixtures")
    return parser


def _workspace(args) -> Workspace:
    if args.fixture:
        return load_workspace(args.fixture)
    if args.schema and args.rules:
        return load_workspace_from_files(args.schema, args.rules)
    raise FixtureError("pass --fixture NAME or both -s schema.json and -r rules.lp")


def _instance(ws: Workspace, path: str) -> Instance:
    return Instance.from_raw(ws.schema, json.loads(Path(path).read_text()))


def _controls(args) -> ControlSpec:
    mapping: dict[str, str] = {}
    for flag, policy in (
        (args.immutable, "immutable"),
        (args.must_increase, "increase"),
        (args.must_decrease, "decrease"),
        (args.must_change, "change"),
    ):
        for name in filter(None, (part.strip() for part in flag.split(","))):
            mapping[name] = policy
    return ControlSpec.of(mapping)


def _emit(payload: dict) -> None:
    sys.stdout.buffer.write(dump_payload(payload))
    sys.stdout.buffer.write(b"\n")


def _print_result_table(ws: Workspace, results: list[dict]) -> None:
    names = ws.schema.names
    for i, result in enumerate(results, start=1):
        print(f"result {i} (cost {result['cost']}):")
        width = max(len(n) for n in names)
        for name in names:
            pre = result["factual"][name]
            post = result["counterfactual"]["values"][name]
            z = result["controls"][name]
            arrow = f"{pre} -> {post}" if z != 0 else f"{pre}"
            interval = result["counterfactual"]["intervals"].get(name)
            if z != 0 and interval and interval[0] != interval[1]:
                arrow += f"  (feasible [{interval[0]}, {interval[1]}])"
            marker = "*" if z != 0 else " "
            print(f"  {marker} {name:<{width}}  {arrow}")


def _cmd_classify(args) -> int:
    ws = _workspace(args)
    payload = classify_payload(ws, _instance(ws, args.instance))
    if args.json:
        _emit(payload)
    else:
        print(f"label: {payload['label']}")
        print(_render_tree_dict(payload["justification"]))
    return 0


def _render_tree_dict(node: dict, depth: int = 0) -> str:
    lines = [f"{'  ' * depth}{node['goal']} ← {node['outcome']}"]
    for child in node["children"]:
        lines.append(_render_tree_dict(child, depth + 1))
    return "\n".join(lines)


def _cmd_explain(args) -> int:
    ws = _workspace(args)
    limit = None if args.limit == 0 else args.limit
    payload = explain_payload(
        ws, _instance(ws, args.instance), _controls(args), args.cost, limit
    )
    if args.json:
        _emit(payload)
    else:
        if not payload["results"]:
            print("no counterfactual explanations under these controls")
        _print_result_table(ws, payload["results"])
    return 0


def _cmd_interpolant(args) -> int:
    ws = _workspace(args)
    payload = interpolant_payload(ws, _instance(ws, args.instance), _controls(args))
    if args.json:
        _emit(payload)
    elif payload.get("no_recourse"):
        print("no recourse: the control spec forbids every counterfactual world")
    else:
        print(f"minimal intervention cost X* = {payload['cost']}")
        _print_result_table(ws, payload["results"])
    return 0


def _cmd_enumerate(args) -> int:
    ws = _workspace(args)
    limit = None if args.limit == 0 else args.limit
    results = enumerate_transitions(
        ws.schema, ws.program, ws.causal, ws.decision, limit=limit
    )
    payload = {"results": [r.to_payload(ws.schema) for r in results]}
    if args.json:
        _emit(payload)
    else:
        print(f"{len(results)} transition(s)")
        _print_result_table(ws, payload["results"])
    return 0


def _cmd_dualize(args) -> int:
    program = parse_program(Path(args.rules).read_text())
    dp = dualize_program(
        program, roots=tuple((pred, arity) for pred, arity in program.defined_preds())
    )
    sys.stdout.write(print_program(dp.duals))
    return 0


def _cmd_bench(args) -> int:
    if args.bench_command == "scaling":
        ws = load_workspace(args.fixture)
        config = load_bench_config(args.fixture)
        feature = args.feature or config.get("scaling_feature")
        if not feature:
            raise FixtureError("no --feature given and fixture declares no scaling feature")
        sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
        instance = Instance.from_raw(ws.schema, config.get("instance") or {})
        report = run_domain_scaling(
            ws,
            feature,
            sizes,
            reps=args.reps,
            instance=instance,
            controls=ControlSpec.of(config.get("controls") or {}),
        )
        paths = write_report(report, args.out_dir, f"scaling_{args.fixture}_{feature}")
    else:
        causal_ws = load_workspace(args.fixture)
        plain_ws = load_workspace(args.baseline)
        report = run_causal_comparison(
            causal_ws,
            plain_ws,
            reps=args.reps,
            causal_config=load_bench_config(args.fixture),
            plain_config=load_bench_config(args.baseline),
        )
        paths = write_report(
            report, args.out_dir, f"causal_{args.fixture}_vs_{args.baseline}", kind="causal"
        )
    print(report.to_table())
    print(f"\nwrote {paths['data']} and {paths['figure']}")
    return 0


def _cmd_serve(args) -> int:
    from .service import serve

    ws = _workspace(args)
    print(f"serving fixture {ws.name!r} on http://{args.host}:{args.port}")
    serve(ws, port=args.port, host=args.host)
    return 0


def _cmd_fixtures(_args) -> int:
    for name in list_fixtures():
        print(name)
    return 0


_COMMANDS = {
    "classify": _cmd_classify,
    "explain": _cmd_explain,
    "interpolant": _cmd_interpolant,
    "enumerate": _cmd_enumerate,
    "dualize": _cmd_dualize,
    "bench": _cmd_bench,
    "serve": _cmd_serve,
    "fixtures": _cmd_fixtures,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except RecourseError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
