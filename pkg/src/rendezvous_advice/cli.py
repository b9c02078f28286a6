"""Command-line front end.

    rendezvous-advice build ring --n 6
    rendezvous-advice rendezvous --builder ring --n 10 --starts 0 4 --labels 2 3
    rendezvous-advice treasure --builder clique-chain --k 6 --ell 2 --behavior gate-seeker
    rendezvous-advice lowerbound --k 6 --ell 2
    rendezvous-advice ring-experiment --dprime 2 --d 2 --L 16

Every command also accepts ``--config FILE``: a JSON object whose keys are
option names (``"labels": [2, 3]``); flags given on the command line win.
Exit codes: 0 success, 2 invalid input, 3 runtime violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import random
import sys
from fractions import Fraction
from pathlib import Path

from . import algorithms, codec, graph, lowerbound
from .sim import AgentConfig, ProtocolViolation, run_rendezvous, run_treasure_hunt

EXIT_INVALID = 2
EXIT_RUNTIME = 3


class UsageError(ValueError):
    pass


def _parse_edges(text: str | None, k: int, ell: int) -> tuple:
    if not text:
        return ((2, 3),) * ell
    edges = []
    for item in text.split(","):
        a, b = item.strip().split("-")
        edges.append((int(a), int(b)))
    return tuple(edges)


def _need(args, *names):
    for name in names:
        if getattr(args, name, None) is None:
            raise UsageError(f"--{name.replace('_', '-')} is required here")


def _rng(args) -> random.Random:
    if args.seed is None:
        raise UsageError("--seed is required for randomized commands")
    return random.Random(args.seed)


def load_graph(args):
    """Return ``(graph, designated nodes or None)`` from the graph-source flags."""
    if args.graph:
        return graph.PortGraph.from_json(Path(args.graph).read_text()), None
    builder = args.builder
    if builder == "ring":
        _need(args, "n")
        return graph.build_oriented_ring(args.n), None
    if builder == "clique-chain":
        _need(args, "k", "ell")
        if args.k % 2:
            raise UsageError(f"k must be even, got {args.k}")
        spec = graph.CliqueChainSpec(args.k, args.ell, _parse_edges(args.edges, args.k, args.ell))
        return graph.build_clique_chain(spec)
    if builder == "random":
        _need(args, "n")
        return graph.random_connected_graph(args.n, args.extra_edges, _rng(args)), None
    raise UsageError("give --graph FILE or --builder")


def cmd_build(args) -> str:
    if args.builder in ("attach-path", "join-copies"):
        _need(args, "graph")
        g = graph.PortGraph.from_json(Path(args.graph).read_text())
        if args.builder == "attach-path":
            _need(args, "at")
            return graph.attach_path(g, args.at, args.extra).to_json() + "\n"
        _need(args, "w")
        return graph.join_copies_at(g, args.w)[0].to_json() + "\n"
    g, _ = load_graph(argparse.Namespace(**{**vars(args), "graph": None}))
    return g.to_json() + "\n"


def _advice(mode: str | None, oracle) -> str:
    if mode in (None, "oracle"):
        return oracle()
    if mode == "none":
        return ""
    if any(c not in "01" for c in mode):
        raise UsageError(f"advice must be 'oracle', 'none' or a bit string, got {mode!r}")
    return mode


def cmd_rendezvous(args) -> dict:
    g, _ = load_graph(args)
    _need(args, "starts")
    u, v = args.starts
    l1, l2 = args.labels
    w1, w2 = args.wake
    D, _, _ = graph.shortest_path_ports(g, u, v)
    advice = _advice(args.advice, lambda: codec.make_rendezvous_advice(g, u, v, l1, l2))
    factory = algorithms.BEHAVIORS[args.behavior]
    b1, b2 = factory(advice), factory(advice)
    res = run_rendezvous(g, AgentConfig(l1, u, w1), b1, AgentConfig(l2, v, w2), b2, args.horizon)
    out = {"D": D, "advice": advice, "advice_bits": len(advice), "decoded": codec.decode(advice)}
    out.update(res.to_dict())
    return out


def cmd_treasure(args) -> dict:
    g, nodes = load_graph(args)
    start = args.start if args.start is not None else (nodes.agent_start if nodes else None)
    target = args.treasure if args.treasure is not None else (nodes.treasure if nodes else None)
    if start is None or target is None:
        raise UsageError("--start and --treasure are required for this graph")
    behavior = args.behavior or "replay"
    if behavior == "gate-seeker":
        advice = "" if args.advice in (None, "oracle", "none") else _advice(args.advice, str)
    else:
        advice = _advice(args.advice, lambda: codec.make_treasure_advice(g, start, target))
    D = graph.bfs_distances(g, start)[target]
    res = run_treasure_hunt(g, AgentConfig(1, start), algorithms.BEHAVIORS[behavior](advice), target, args.horizon)
    out = {"D": D, "advice": advice, "advice_bits": len(advice)}
    out.update(res.to_dict())
    return out


def _advice_fn(args, ell):
    name = args.advice_fn
    if name == "zero":
        return lowerbound.zero_advice, 0
    if name == "edge-index":
        width = max(1, (len(graph.non_gate_edges(args.k)) - 1).bit_length())
        return lowerbound.edge_index_advice, width * ell
    if name == "random":
        _need(args, "advice_bits")
        specs = list(lowerbound.enumerate_family(args.k, ell, args.cap))
        return lowerbound.random_advice_fn(specs, args.advice_bits, _rng(args)), args.advice_bits
    raise UsageError(f"unknown advice function {name!r}")


def _bounds_dict(b: lowerbound.CountingBounds) -> dict:
    return {
        "N": str(b.N) if b.N.bit_length() > 53 else b.N,
        "simplex_bound": None if b.simplex_bound is None else str(b.simplex_bound),
        "T_lower": str(b.T_lower),
        "T_lower_relaxed": str(b.T_lower_relaxed),
    }


def cmd_lowerbound(args):
    _need(args, "k", "ell")
    k, ell = args.k, args.ell
    if k < 4 or k % 2:
        raise UsageError(f"k must be even and >= 4, got {k}")
    if args.counting_only:
        z = Fraction(str(args.z)) if args.z is not None else Fraction(0)
        return {"k": k, "ell": ell, "z": str(z), "counting": _bounds_dict(lowerbound.counting_bounds(k, ell, z, args.T))}
    size = lowerbound.family_size(k, ell)
    if size > args.cap:
        raise UsageError(f"family size {size} exceeds cap {args.cap}")
    advice_fn, bits = _advice_fn(args, ell)
    z = Fraction(str(args.z)) if args.z is not None else Fraction(bits, 2 * ell)
    rep = lowerbound.verify_tau_injectivity(k, ell, algorithms.greedy_gate_seeker, advice_fn, args.cap)
    buckets = lowerbound.pigeonhole_buckets(k, ell, advice_fn, z, args.cap)
    T = args.T if args.T is not None else rep.max_time
    if args.format == "csv":
        return _tau_csv(rep)
    within = {tau for spec, tau in rep.taus.items() if sum(tau) <= T}
    return {
        "k": k,
        "ell": ell,
        "N": size,
        "advice_fn": args.advice_fn,
        "advice_bits": bits,
        "buckets": buckets.sizes,
        "largest_bucket": buckets.largest,
        "bucket_bound": buckets.bound,
        "tau_injective": rep.injective,
        "distinct_tau": len(set(rep.taus.values())),
        "collisions": [[a.label(), b.label(), list(t)] for a, b, t in rep.collisions],
        "max_time": rep.max_time,
        "T": T,
        "distinct_tau_within_T": len(within),
        "counting": _bounds_dict(lowerbound.counting_bounds(k, ell, z, T)),
    }


TAU_COLUMNS = ["spec_id", "edges", "advice", "time"]


def _tau_csv(rep: lowerbound.TauReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TAU_COLUMNS + [f"tau_{i + 1}" for i in range(rep.ell)])
    for i, spec in enumerate(lowerbound.enumerate_family(rep.k, rep.ell)):
        w.writerow([i, spec.label(), rep.advice[spec], rep.times[spec], *rep.taus[spec]])
    return buf.getvalue()


def cmd_ring_experiment(args):
    _need(args, "dprime", "d", "L")
    dprime, d, L = args.dprime, args.d, args.L
    if args.behavior in (None, "label-digits"):
        factory = lowerbound.label_digit_behavior
    elif args.behavior == "fast-rendezvous":
        factory = algorithms.fast_rendezvous_behavior
    else:
        raise UsageError(f"unknown ring behavior {args.behavior!r}")
    if args.advice in (None, ""):
        strings = ["0"]
    elif args.advice == "oracle":
        ring = graph.build_oriented_ring(6 * dprime)
        v = (-3 * dprime) % ring.n
        strings = sorted(
            {codec.make_rendezvous_advice(ring, 0, v, a, b) for a, b in itertools.permutations(range(1, L + 1), 2)}
        )
    else:
        strings = args.advice.split(",")
    rep = lowerbound.ring_collision_experiment(factory, L, strings, dprime, d)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["label", "advice", "meta"])
        for label, row in rep.metas.items():
            for adv, meta in zip(strings, row):
                w.writerow([label, adv, " ".join(map(str, meta))])
        return buf.getvalue()
    return {
        "n": rep.n,
        "dprime": dprime,
        "d": d,
        "L": L,
        "advice_strings": strings,
        "distinct_meta_functions": rep.distinct,
        "collision_guaranteed": rep.guaranteed,
        "witness": list(rep.witness) if rep.witness else None,
        "witness_count": len(rep.witnesses),
        "never_met": rep.never_met,
    }


def _graph_source(p):
    p.add_argument("--graph", help="graph JSON file")
    p.add_argument("--builder", choices=["ring", "clique-chain", "random"])
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--ell", type=int)
    p.add_argument("--edges", help="clique-chain edges, e.g. 2-3,4-5")
    p.add_argument("--extra-edges", type=int, default=0)
    p.add_argument("--seed", type=int)


def _common(p):
    p.add_argument("--config", help="JSON file with option defaults")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--out", help="write output here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rendezvous-advice", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="emit a graph as JSON")
    p.add_argument("builder", choices=["ring", "clique-chain", "attach-path", "join-copies", "random"])
    _graph_source(p)
    p.add_argument("--at", type=int)
    p.add_argument("--extra", type=int, default=0)
    p.add_argument("--w", type=int)
    _common(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("rendezvous", help="run two agents")
    _graph_source(p)
    p.add_argument("--starts", type=int, nargs=2)
    p.add_argument("--labels", type=int, nargs=2, default=[1, 2])
    p.add_argument("--wake", type=int, nargs=2, default=[0, 0])
    p.add_argument("--advice", help="'oracle' (default), 'none' or a bit string")
    p.add_argument("--behavior", choices=sorted(algorithms.BEHAVIORS), default="fast-rendezvous")
    p.add_argument("--horizon", type=int)
    _common(p)
    p.set_defaults(func=cmd_rendezvous)

    p = sub.add_parser("treasure", help="run a single treasure hunter")
    _graph_source(p)
    p.add_argument("--start", type=int)
    p.add_argument("--treasure", type=int)
    p.add_argument("--advice")
    p.add_argument("--behavior", choices=["replay", "gate-seeker"])
    p.add_argument("--horizon", type=int)
    _common(p)
    p.set_defaults(func=cmd_treasure)

    p = sub.add_parser("lowerbound", help="clique-chain counting experiments")
    p.add_argument("--k", type=int)
    p.add_argument("--ell", type=int)
    p.add_argument("--z", type=Fraction, help="advice bits per unit of distance, e.g. 0.5 or 1/2")
    p.add_argument("--advice-fn", choices=["zero", "random", "edge-index"], default="zero")
    p.add_argument("--advice-bits", type=int)
    p.add_argument("--T", type=int, help="time bound for the simplex count")
    p.add_argument("--counting-only", action="store_true")
    p.add_argument("--cap", type=int, default=lowerbound.DEFAULT_CAP)
    p.add_argument("--seed", type=int)
    _common(p)
    p.set_defaults(func=cmd_lowerbound)

    p = sub.add_parser("ring-experiment", help="oriented-ring meta-behaviour collisions")
    p.add_argument("--dprime", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--L", type=int)
    p.add_argument("--advice", help="comma-separated advice strings, or 'oracle'")
    p.add_argument("--behavior", choices=["label-digits", "fast-rendezvous"])
    p.add_argument("--seed", type=int)
    _common(p)
    p.set_defaults(func=cmd_ring_experiment)
    return parser


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            config = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            parser.error(f"cannot read config: {exc}")
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sub._actions}
        unknown = set(config) - known
        if unknown:
            parser.error(f"unknown config keys: {', '.join(sorted(unknown))}")
        sub.set_defaults(**config)
        args = parser.parse_args(argv)
    return args


def main(argv=None) -> int:
    args = parse_args(argv)
    try:
        result = args.func(args)
    except ProtocolViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    text = result if isinstance(result, str) else json.dumps(result, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
