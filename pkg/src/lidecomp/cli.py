"""Command-line entry point tying the toolkit together for batch use.

Machine-readable JSON goes to the output path (or stdout), human diagnostics
to stderr. Every JSON payload embeds the resolved run manifest and the tool
version, and identical manifests reproduce byte-identical output. Exit codes:
0 success/true, 1 verified-false/fail, 2 rejected input, 3 budget exhausted
or inconclusive.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from lidecomp import __version__
from lidecomp.constants import (
    ConstantProfile,
    REFERENCE_PROFILE,
    check_profile,
    min_feasible_d,
    optimize_profile,
)
from lidecomp.dcs import DcsInstance, solve as dcs_solve
from lidecomp.errors import BudgetError, InputError
from lidecomp.exact import is_decomposable, min_parts, witness_parts
from lidecomp.graphs import (
    Graph,
    generate_circulant,
    generate_regular,
    read_graph,
    write_graph,
)
from lidecomp.pipeline import decompose_to_four, verify_decomposition
from lidecomp.rounding import FractionalEdgeWeights, balanced_round, verify_rounding


def _manifest(command: str, args: argparse.Namespace, keys: list[str]) -> dict:
    data = {"command": command}
    for key in keys:
        data[key] = getattr(args, key)
    return data


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _load_profile(path: str | None) -> ConstantProfile:
    if path is None:
        return REFERENCE_PROFILE
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read profile: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"profile is not valid JSON: {exc}") from None
    profile = ConstantProfile.from_json(data)
    profile.validate()
    return profile


def _load_json(path: str) -> dict | list:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def cmd_gen_regular(args: argparse.Namespace) -> tuple[dict, bool]:
    g = generate_regular(args.n, args.d, seed=args.seed)
    write_graph(g, args.out_graph)
    payload = {
        "manifest": _manifest("gen-regular", args, ["n", "d", "seed", "out_graph"]),
        "vertices": g.n,
        "edges": g.m,
        "path": args.out_graph,
    }
    return payload, True


def cmd_gen_circulant(args: argparse.Namespace) -> tuple[dict, bool]:
    try:
        offsets = [int(tok) for tok in args.offsets.split(",") if tok]
    except ValueError:
        raise InputError(f"offsets must be comma-separated integers: {args.offsets!r}") from None
    g = generate_circulant(args.n, offsets)
    write_graph(g, args.out_graph)
    payload = {
        "manifest": _manifest("gen-circulant", args, ["n", "offsets", "out_graph"]),
        "vertices": g.n,
        "edges": g.m,
        "degree": g.degrees[0] if g.n else 0,
        "path": args.out_graph,
    }
    return payload, True


def cmd_decompose(args: argparse.Namespace) -> tuple[dict, bool]:
    g = read_graph(args.input)
    profile = _load_profile(args.profile)
    result = decompose_to_four(
        g,
        profile,
        mode=args.mode,
        seed=args.seed,
        max_rounds=args.max_rounds,
        restarts=args.restarts,
    )
    payload = result.to_json()
    payload["manifest"] = _manifest(
        "decompose", args, ["input", "profile", "mode", "seed", "max_rounds", "restarts"]
    )
    return payload, result.success


def cmd_verify(args: argparse.Namespace) -> tuple[dict, bool]:
    g = read_graph(args.graph)
    data = _load_json(args.decomp)
    if not isinstance(data, dict) or "parts" not in data:
        raise InputError(f"{args.decomp}: expected a JSON object with a 'parts' field")
    try:
        parts = tuple(frozenset(int(i) for i in part) for part in data["parts"])
    except (TypeError, ValueError) as exc:
        raise InputError(f"{args.decomp}: malformed parts: {exc}") from None
    for part in parts:
        for i in part:
            if not 0 <= i < g.m:
                raise InputError(f"edge index {i} out of range for m={g.m}")
    cover_ok, verdicts, conflicts = verify_decomposition(g, parts)
    ok = cover_ok and all(verdicts)
    if not cover_ok:
        print("parts do not partition the edge set", file=sys.stderr)
    for part_idx, conf in enumerate(conflicts):
        for i in conf:
            u, v = g.edges[i]
            print(f"part {part_idx}: conflicting edge {i} = ({u},{v})", file=sys.stderr)
    payload = {
        "manifest": _manifest("verify", args, ["graph", "decomp"]),
        "cover_ok": cover_ok,
        "verdicts": list(verdicts),
        "conflicts": [list(c) for c in conflicts],
        "passed": ok,
    }
    return payload, ok


def cmd_exact(args: argparse.Namespace) -> tuple[dict, bool]:
    g = read_graph(args.input)
    payload: dict = {
        "manifest": _manifest(
            "exact", args, ["input", "k", "min_parts", "node_budget", "force"]
        )
    }
    if args.min_parts:
        best = min_parts(g, args.k, node_budget=args.node_budget, force=args.force)
        payload["min_parts"] = best
        return payload, best is not None
    ok, witness = is_decomposable(g, args.k, node_budget=args.node_budget, force=args.force)
    payload["decomposable"] = ok
    if ok and witness is not None:
        payload["parts"] = [sorted(p) for p in witness_parts(g, witness, args.k)]
        payload["verdicts"] = [True] * args.k
    return payload, ok


def cmd_round(args: argparse.Namespace) -> tuple[dict, bool]:
    g = read_graph(args.input)
    if (args.z is None) == (args.z_file is None):
        raise InputError("provide exactly one of --z and --z-file")
    if args.z is not None:
        try:
            weights = FractionalEdgeWeights.constant(g, Fraction(args.z))
        except (ValueError, ZeroDivisionError):
            raise InputError(f"cannot parse weight {args.z!r}") from None
    else:
        values = []
        with open(args.z_file, "r", encoding="utf-8") as fh:
            for ln, raw in enumerate(fh, start=1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                try:
                    values.append(Fraction(line))
                except (ValueError, ZeroDivisionError):
                    raise InputError(f"{args.z_file}: line {ln}: bad weight {line!r}") from None
        weights = FractionalEdgeWeights.from_values(g, values)
    labels = balanced_round(weights, seed=args.seed)
    report = verify_rounding(weights, labels)
    payload = {
        "manifest": _manifest("round", args, ["input", "z", "z_file", "seed"]),
        "x": list(labels.values),
        "passed": report.passed,
        "drifts": list(report.drifts),
    }
    return payload, report.passed


def cmd_dcs(args: argparse.Namespace) -> tuple[dict, bool]:
    g = read_graph(args.input)
    data = _load_json(args.t_file)
    if isinstance(data, dict):
        if "lambda" in data and args.lam is not None:
            raise InputError("instance file already fixes lambda; drop --lambda")
        if "lambda" in data:
            inst = DcsInstance.from_json(g, data)
        else:
            if args.lam is None:
                raise InputError("need --lambda when the instance file has none")
            inst = DcsInstance(g, (args.lam,) * g.n, tuple(int(x) for x in data["t"]))
    elif isinstance(data, list):
        if args.lam is None:
            raise InputError("need --lambda with a bare target list")
        inst = DcsInstance(g, (args.lam,) * g.n, tuple(int(x) for x in data))
    else:
        raise InputError(f"{args.t_file}: expected an object or list")
    cert = dcs_solve(inst, seed=args.seed, restarts=args.restarts, strict=not args.relaxed)
    payload = cert.to_json()
    payload["manifest"] = _manifest(
        "dcs", args, ["input", "lam", "t_file", "seed", "restarts", "relaxed"]
    )
    return payload, cert.passed


def cmd_constants_check(args: argparse.Namespace) -> tuple[dict, bool]:
    profile = _load_profile(args.profile)
    report = check_profile(profile, args.d)
    payload = report.to_json()
    payload["profile"] = profile.to_json()
    payload["manifest"] = _manifest("constants check", args, ["d", "profile"])
    return payload, report.passed


def cmd_constants_min_d(args: argparse.Namespace) -> tuple[dict, bool]:
    profile = _load_profile(args.profile)
    d = min_feasible_d(profile)
    payload = {
        "manifest": _manifest("constants min-d", args, ["profile"]),
        "profile": profile.to_json(),
        "min_d": d,
    }
    return payload, True


def cmd_constants_optimize(args: argparse.Namespace) -> tuple[dict, bool]:
    profile, d = optimize_profile(seed=args.seed, budget=args.budget)
    payload = {
        "manifest": _manifest("constants optimize", args, ["seed", "budget"]),
        "profile": profile.to_json(),
        "min_d": d,
    }
    return payload, True


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lidecomp",
        description="Decompose regular graphs into four locally irregular subgraphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-regular", help="sample a random regular graph")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", dest="out_graph", required=True, help="graph file to write")
    p.set_defaults(func=cmd_gen_regular, out=None)

    p = sub.add_parser("gen-circulant", help="build a deterministic circulant graph")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--offsets", required=True, help="comma-separated offsets in 1..n/2")
    p.add_argument("--out", dest="out_graph", required=True, help="graph file to write")
    p.set_defaults(func=cmd_gen_circulant, out=None)

    p = sub.add_parser("decompose", help="run the full four-part pipeline")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--profile", default=None, help="profile JSON (default: built-in constants)")
    p.add_argument("--mode", choices=["strict", "best-effort"], default="strict")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-rounds", type=int, default=200)
    p.add_argument("--restarts", type=int, default=50)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("verify", help="verify a decomposition JSON against a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--decomp", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("exact", help="exhaustive small-graph decomposability oracle")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--min-parts", action="store_true")
    p.add_argument("--node-budget", type=int, default=2_000_000)
    p.add_argument("--force", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("round", help="balanced 0/1 rounding of edge weights")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--z", default=None, help="constant weight, e.g. 0.5 or 1/2")
    p.add_argument("--z-file", default=None, help="file with one weight per edge")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_round)

    p = sub.add_parser("dcs", help="degree-constrained subgraph solver")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--lambda", dest="lam", type=int, default=None)
    p.add_argument("--t-file", required=True, help="instance JSON: list of targets or object")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=50)
    p.add_argument("--relaxed", action="store_true", help="skip the degree preconditions")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_dcs)

    p = sub.add_parser("constants", help="feasibility system for the constant profile")
    csub = p.add_subparsers(dest="subcommand", required=True)

    c = csub.add_parser("check", help="evaluate every constraint at a degree")
    c.add_argument("--d", type=int, required=True)
    c.add_argument("--profile", default=None)
    c.add_argument("--out", default=None)
    c.set_defaults(func=cmd_constants_check)

    c = csub.add_parser("min-d", help="smallest feasible degree for a profile")
    c.add_argument("--profile", default=None)
    c.add_argument("--out", default=None)
    c.set_defaults(func=cmd_constants_min_d)

    c = csub.add_parser("optimize", help="search for a profile with a smaller feasible degree")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--budget", type=int, default=200)
    c.add_argument("--out", default=None)
    c.set_defaults(func=cmd_constants_optimize)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        payload, ok = args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BudgetError as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return 3
    payload["version"] = __version__
    _emit(payload, args.out)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
