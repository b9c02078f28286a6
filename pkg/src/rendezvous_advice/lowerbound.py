"""Executable counting machinery for the clique-chain and oriented-ring bounds.

Clique chains: enumerate the family, run a treasure hunter on every member,
fingerprint each run by its per-clique traversal counts (tau), bucket the
members by advice, and compare against the counting bounds.

Rings: turn single-agent runs into behaviour and meta-behaviour vectors and
look for label pairs that no advice string can separate.
"""

from __future__ import annotations

import itertools
import math
import random
from collections import defaultdict
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterator, Optional, Sequence

from .graph import (
    CliqueChainSpec,
    DesignatedNodes,
    GraphError,
    PortGraph,
    build_clique_chain,
    build_oriented_ring,
    non_gate_edges,
)
from .sim import Action, AgentConfig, Behavior, Observation, run_rendezvous, run_solo, run_treasure_hunt

DEFAULT_CAP = 100_000

AdviceFn = Callable[[CliqueChainSpec], str]
BehaviorFactory = Callable[[str], Behavior]


class NonNormalWalk(ValueError):
    pass


def family_size(k: int, ell: int) -> int:
    return ((k - 1) * (k - 2) // 2) ** ell


def enumerate_family(k: int, ell: int, cap: int = DEFAULT_CAP) -> Iterator[CliqueChainSpec]:
    """Every member of the clique-chain family once, in lexicographic order."""
    if k < 4 or k % 2:
        raise GraphError(f"family needs an even k >= 4, got {k}")
    if ell < 1:
        raise GraphError(f"family needs ell >= 1, got {ell}")
    size = family_size(k, ell)
    if size > cap:
        raise GraphError(f"family size {size} exceeds enumeration cap {cap}")
    for edges in itertools.product(non_gate_edges(k), repeat=ell):
        yield CliqueChainSpec(k, ell, edges)


@lru_cache(maxsize=4096)
def chain_graph(spec: CliqueChainSpec) -> tuple[PortGraph, DesignatedNodes]:
    return build_clique_chain(spec)


def hunt_rounds(k: int, ell: int) -> int:
    """Generous horizon for a gate seeker: every clique probed exhaustively."""
    return ell * (2 * len(non_gate_edges(k)) + 2) + 2


def edge_index_advice(spec: CliqueChainSpec) -> str:
    """Advice naming each ``e_i`` by its index among the candidate edges.

    Fed to the gate seeker this makes every first probe succeed.
    """
    cands = non_gate_edges(spec.k)
    width = max(1, (len(cands) - 1).bit_length())
    return "".join(format(cands.index(e), f"0{width}b") for e in spec.edges)


def zero_advice(spec: CliqueChainSpec) -> str:
    return ""


def random_advice_fn(specs: Sequence[CliqueChainSpec], bits: int, rng: random.Random) -> AdviceFn:
    """A fixed-length ``bits``-bit advice function with uniformly random values."""
    table = {s: "".join(rng.choice("01") for _ in range(bits)) for s in specs}
    return table.__getitem__


def _visits(trace: Sequence[int]) -> list[int]:
    """Collapse consecutive repeats (idle rounds) into single visits."""
    return [v for i, v in enumerate(trace) if i == 0 or trace[i - 1] != v]


def normal_walk_check(trace: Sequence[int], spec: CliqueChainSpec) -> bool:
    """True iff the walk reaches the treasure, enters each intermediate gate
    exactly once before that, and never leaves a gate through port k-1 or k."""
    g, nodes = chain_graph(spec)
    k = spec.k
    gates = nodes.gates
    if not trace or trace[0] != gates[0] or gates[-1] not in trace:
        return False
    walk = _visits(trace[: trace.index(gates[-1]) + 1])
    inner = set(gates[1:-1])
    backward = {}
    for gate in inner:
        backward[gate] = {g.move(gate, k - 1)[0], g.move(gate, k)[0]}
    counts = defaultdict(int)
    for i, v in enumerate(walk):
        if v in inner:
            counts[v] += 1
            if i + 1 < len(walk) and walk[i + 1] in backward[v]:
                return False
    return all(counts[gate] == 1 for gate in inner)


def tau_of_trace(trace: Sequence[int], spec: CliqueChainSpec) -> tuple[int, ...]:
    """Per-clique edge traversal counts of a normal treasure-hunt walk.

    Clique ``i`` owns the traversals after the first arrival at its gate up to
    and including the one that first reaches the next gate, so the partial
    sums equal the number of moves made until each gate is reached.
    """
    if not normal_walk_check(trace, spec):
        raise NonNormalWalk("trace is not a normal walk reaching the treasure")
    _, nodes = chain_graph(spec)
    arrivals = [trace.index(gate) for gate in nodes.gates]
    moves = [0]
    for i in range(1, len(trace)):
        moves.append(moves[-1] + (trace[i] != trace[i - 1]))
    return tuple(moves[b] - moves[a] for a, b in zip(arrivals, arrivals[1:]))


@dataclass
class TauReport:
    k: int
    ell: int
    taus: dict[CliqueChainSpec, tuple[int, ...]]
    advice: dict[CliqueChainSpec, str]
    times: dict[CliqueChainSpec, int]
    collisions: list[tuple[CliqueChainSpec, CliqueChainSpec, tuple[int, ...]]] = field(default_factory=list)

    @property
    def injective(self) -> bool:
        return not self.collisions

    @property
    def max_time(self) -> int:
        return max(self.times.values())

    def buckets(self) -> dict[str, list[CliqueChainSpec]]:
        out = defaultdict(list)
        for spec, adv in self.advice.items():
            out[adv].append(spec)
        return dict(out)


def run_family(
    k: int,
    ell: int,
    behavior: BehaviorFactory,
    advice_fn: AdviceFn = zero_advice,
    cap: int = DEFAULT_CAP,
    max_rounds: int | None = None,
) -> TauReport:
    if max_rounds is None:
        max_rounds = hunt_rounds(k, ell)
    taus, advice, times = {}, {}, {}
    for spec in enumerate_family(k, ell, cap):
        g, nodes = chain_graph(spec)
        adv = advice_fn(spec)
        res = run_treasure_hunt(g, AgentConfig(1, nodes.agent_start), behavior(adv), nodes.treasure, max_rounds)
        if not res.met:
            raise RuntimeError(f"treasure not reached within {max_rounds} rounds on {spec.label()}")
        taus[spec] = tau_of_trace(res.traces[0], spec)
        advice[spec] = adv
        times[spec] = res.time
    return TauReport(k, ell, taus, advice, times)


def verify_tau_injectivity(
    k: int,
    ell: int,
    behavior: BehaviorFactory,
    advice_fn: AdviceFn = zero_advice,
    cap: int = DEFAULT_CAP,
) -> TauReport:
    """Run every family member and record tau collisions inside advice buckets."""
    report = run_family(k, ell, behavior, advice_fn, cap)
    for members in report.buckets().values():
        seen: dict[tuple[int, ...], CliqueChainSpec] = {}
        for spec in members:
            tau = report.taus[spec]
            if tau in seen:
                report.collisions.append((seen[tau], spec, tau))
            else:
                seen[tau] = spec
    return report


@dataclass
class BucketReport:
    N: int
    bits: int
    buckets: dict[str, list[CliqueChainSpec]]
    bound: int

    @property
    def sizes(self) -> dict[str, int]:
        return {adv: len(m) for adv, m in sorted(self.buckets.items())}

    @property
    def largest(self) -> int:
        return max(len(m) for m in self.buckets.values())


def pigeonhole_buckets(k: int, ell: int, advice_fn: AdviceFn, z_bits, cap: int = DEFAULT_CAP) -> BucketReport:
    """Group the family by advice string.

    ``z_bits`` is the advice budget per unit of distance ``D = 2*ell``.  The
    guaranteed largest bucket is ``ceil(N / S)`` where ``S`` is the number of
    strings the budget allows: ``2**b`` when every string has the same
    length ``b``, otherwise all strings of length ``<= b``.
    """
    budget = math.floor(Fraction(z_bits) * 2 * ell)
    buckets = defaultdict(list)
    lengths = set()
    for spec in enumerate_family(k, ell, cap):
        adv = advice_fn(spec)
        if len(adv) > budget:
            raise ValueError(f"advice {adv!r} for {spec.label()} exceeds {budget} bits")
        buckets[adv].append(spec)
        lengths.add(len(adv))
    N = family_size(k, ell)
    if len(lengths) == 1:
        bits = lengths.pop()
        strings = 2**bits
    else:
        bits = budget
        strings = 2 ** (budget + 1) - 1
    return BucketReport(N, bits, dict(buckets), -(-N // strings))


@dataclass(frozen=True)
class CountingBounds:
    N: int
    simplex_bound: Optional[Fraction]
    T_lower: Decimal
    T_lower_relaxed: Decimal


def counting_bounds(k: int, ell: int, z, T: int | None = None, precision: int = 60) -> CountingBounds:
    """Exact family size, the simplex volume ``T**ell / ell!`` and the implied
    lower bound ``(ell! * N / 2**(2*ell*z)) ** (1/ell)`` on the running time.

    ``T_lower_relaxed`` is the weaker closed form
    ``(ell!)**(1/ell) * ((k-2)**2 / 2) / 2**(2z)``.
    """
    if k < 3 or ell < 1:
        raise ValueError("need k >= 3 and ell >= 1")
    z = Fraction(z)
    if z < 0:
        raise ValueError("z must be non-negative")
    N = family_size(k, ell)
    fact = math.factorial(ell)
    simplex = Fraction(T**ell, fact) if T is not None else None
    with localcontext() as ctx:
        ctx.prec = precision
        ln2 = Decimal(2).ln()
        two_z = Decimal(2 * z.numerator) / Decimal(z.denominator)
        log_t = ((Decimal(fact) * Decimal(N)).ln() - two_z * ell * ln2) / ell
        t_lower = log_t.exp()
        relaxed = (Decimal(fact).ln() / ell).exp() * Decimal((k - 2) ** 2) / 2 / (two_z * ln2).exp()
        return CountingBounds(N, simplex, +t_lower, +relaxed)


def simplex_points(T: int, ell: int) -> int:
    """Number of ``ell``-tuples of positive integers with sum at most ``T``."""
    return math.comb(T, ell) if T >= ell else 0


# --- oriented rings -------------------------------------------------------


def _check_oriented_ring(g: PortGraph) -> None:
    for v in range(g.n):
        if g.degree(v) != 2 or g.move(v, 0)[1] != 1 or g.move(v, 1)[1] != 0:
            raise TypeError("graph is not an oriented ring")


def behaviour_vector(g: PortGraph, trace: Sequence[int]) -> tuple[int, ...]:
    """Per-round symbols: port 0 (clockwise) is -1, idle 0, port 1 is +1."""
    _check_oriented_ring(g)
    out = []
    for x, y in zip(trace, trace[1:]):
        if x == y:
            out.append(0)
        elif g.move(x, 0)[0] == y:
            out.append(-1)
        elif g.move(x, 1)[0] == y:
            out.append(1)
        else:
            raise ValueError(f"trace jumps from {x} to non-neighbor {y}")
    return tuple(out)


def meta_behaviour_vector(bv: Sequence[int], dprime: int, n: int, start_offset: int = 0) -> tuple[int, ...]:
    """Block displacement per time segment of ``dprime`` rounds.

    Positions are measured along the ``+1`` direction of ``bv`` from the start,
    blocks are ``dprime`` consecutive nodes and block indices wrap modulo
    ``n // dprime``.  The start must be the first node of a block.
    """
    if dprime < 1 or n % dprime:
        raise ValueError(f"block size {dprime} must divide ring size {n}")
    r = n // dprime
    if r < 3:
        raise ValueError("need at least three blocks")
    if start_offset % dprime:
        raise ValueError("agent must start on the first node of a block")
    if len(bv) % dprime:
        raise ValueError(f"horizon {len(bv)} is not a multiple of {dprime}")
    if any(s not in (-1, 0, 1) for s in bv):
        raise ValueError("behaviour vector symbols must be -1, 0 or 1")
    meta = []
    pos = start_offset
    for seg in range(len(bv) // dprime):
        before = (pos // dprime) % r
        pos += sum(bv[seg * dprime : (seg + 1) * dprime])
        delta = ((pos // dprime) % r - before) % r
        meta.append(delta - r if delta > r // 2 else delta)
    return tuple(meta)


def label_digit_behavior(advice: str) -> Behavior:
    """Ring walker whose round-``t`` move is base-3 digit ``t`` of ``label - 1``,
    shifted by the advice value: 0 idle, 1 port 0, 2 port 1."""
    shift = int(advice, 2) if advice else 0

    def behave(label: int, history: Sequence[Observation]) -> Action:
        digit = ((label - 1) // 3 ** history[-1].clock + shift) % 3
        return None if digit == 0 else digit - 1

    return behave


@dataclass
class RingReport:
    n: int
    dprime: int
    d: int
    L: int
    advice_strings: list[str]
    metas: dict[int, tuple[tuple[int, ...], ...]]
    witnesses: list[tuple[int, int]]
    never_met: Optional[bool]
    guaranteed: bool

    @property
    def witness(self) -> Optional[tuple[int, int]]:
        return self.witnesses[0] if self.witnesses else None

    @property
    def distinct(self) -> int:
        return len(set(self.metas.values()))


def ring_collision_experiment(
    behavior: BehaviorFactory,
    L: int,
    advice_strings: Sequence[str],
    dprime: int,
    d: int,
) -> RingReport:
    """Look for two labels with identical meta-behaviour under every advice.

    Runs on the oriented ring of ``6 * dprime`` nodes.  Every colliding pair
    is placed three blocks apart and simulated for ``d * dprime`` rounds
    under each advice string; ``never_met`` records whether none of them met.
    """
    if dprime < 1 or d < 1 or L < 2 or not advice_strings:
        raise ValueError("need dprime >= 1, d >= 1, L >= 2 and at least one advice string")
    n = 6 * dprime
    g = build_oriented_ring(n)
    horizon = d * dprime
    metas = {}
    for label in range(1, L + 1):
        row = []
        for adv in advice_strings:
            res = run_solo(g, AgentConfig(label, 0), behavior(adv), horizon)
            row.append(meta_behaviour_vector(behaviour_vector(g, res.traces[0]), dprime, n))
        metas[label] = tuple(row)
    classes = defaultdict(list)
    for label, phi in metas.items():
        classes[phi].append(label)
    witnesses = [pair for members in classes.values() for pair in itertools.combinations(members, 2)]
    witnesses.sort()
    # three blocks ahead in the +1 (port 1) direction
    partner = (-3 * dprime) % n
    never_met = None
    if witnesses:
        never_met = True
        for x1, x2 in witnesses:
            for adv in advice_strings:
                res = run_rendezvous(
                    g, AgentConfig(x1, 0), behavior(adv), AgentConfig(x2, partner), behavior(adv), horizon
                )
                if res.met:
                    never_met = False
    guaranteed = (3**d) ** len(advice_strings) < L
    return RingReport(n, dprime, d, L, list(advice_strings), metas, witnesses, never_met, guaranteed)
