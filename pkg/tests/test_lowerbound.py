import itertools
import math
import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from rendezvous_advice.algorithms import fast_rendezvous_behavior, greedy_gate_seeker, replay_ports_behavior
from rendezvous_advice.codec import concat, make_rendezvous_advice
from rendezvous_advice.graph import CliqueChainSpec, GraphError, build_clique_chain, build_oriented_ring
from rendezvous_advice.lowerbound import (
    NonNormalWalk,
    behaviour_vector,
    counting_bounds,
    edge_index_advice,
    enumerate_family,
    family_size,
    hunt_rounds,
    label_digit_behavior,
    meta_behaviour_vector,
    normal_walk_check,
    pigeonhole_buckets,
    random_advice_fn,
    ring_collision_experiment,
    simplex_points,
    tau_of_trace,
    verify_tau_injectivity,
    zero_advice,
)
from rendezvous_advice.sim import AgentConfig, idle_behavior, run_rendezvous, run_solo, run_treasure_hunt


# --- enumeration ---------------------------------------------------------


def test_enumerate_g41():
    specs = list(enumerate_family(4, 1))
    assert [s.edges for s in specs] == [((2, 3),), ((2, 4),), ((3, 4),)]


def test_enumerate_g62():
    specs = list(enumerate_family(6, 2))
    assert len(specs) == 100 == (5 * 4 // 2) ** 2
    assert len(set(specs)) == 100


@pytest.mark.parametrize("k,ell", [(4, 1), (4, 5), (6, 3), (8, 2), (10, 2), (4, 10)])
def test_enumerate_counts(k, ell):
    expected = ((k - 1) * (k - 2) // 2) ** ell
    assert expected <= 10**5
    assert sum(1 for _ in enumerate_family(k, ell)) == expected == family_size(k, ell)


@pytest.mark.parametrize("k,ell", [(4, 0), (5, 1), (2, 1)])
def test_enumerate_rejects(k, ell):
    with pytest.raises(GraphError):
        list(enumerate_family(k, ell))


def test_enumerate_cap():
    with pytest.raises(GraphError, match="1000000"):
        next(enumerate_family(6, 6))


# --- tau and normal walks -----------------------------------------------


def hunt(spec, advice=""):
    g, nodes = build_clique_chain(spec)
    return run_treasure_hunt(
        g, AgentConfig(1, nodes.agent_start), greedy_gate_seeker(advice), nodes.treasure, hunt_rounds(spec.k, spec.ell)
    )


def test_tau_first_probe():
    spec = CliqueChainSpec(4, 1, ((2, 3),))
    assert tau_of_trace(hunt(spec).traces[0], spec) == (2,)


def test_tau_last_probe():
    spec = CliqueChainSpec(4, 1, ((3, 4),))
    (t1,) = tau_of_trace(hunt(spec).traces[0], spec)
    assert t1 > 2


def test_tau_sum_bounded_by_trace():
    for spec in enumerate_family(6, 2):
        trace = hunt(spec).traces[0]
        tau = tau_of_trace(trace, spec)
        assert all(t >= 2 for t in tau)
        assert sum(tau) <= len(trace) - 1


def test_tau_counts_moves_not_idles():
    spec = CliqueChainSpec(4, 1, ((2, 4),))
    trace = hunt(spec).traces[0]
    padded = [trace[0]] * 3 + trace[:2] + [trace[1]] * 2 + trace[2:]
    assert tau_of_trace(padded, spec) == tau_of_trace(trace, spec)


def test_tau_rejects_non_normal():
    spec = CliqueChainSpec(4, 2, ((2, 3), (2, 3)))
    with pytest.raises(NonNormalWalk):
        tau_of_trace([0, 1], spec)


def test_normal_walk_from_seeker():
    spec = CliqueChainSpec(4, 1, ((2, 4),))
    assert normal_walk_check(hunt(spec).traces[0], spec)


def _chain_walk(spec):
    g, nodes = build_clique_chain(spec)
    return g, nodes


def test_normal_walk_reentry():
    # k=4, e1={2,3}: node ids v2=1, v3=2, gate g2=4, clique 2 nodes 4..7, e2={2,3} -> 5,6, treasure 8
    spec = CliqueChainSpec(4, 2, ((2, 3), (2, 3)))
    g, nodes = _chain_walk(spec)
    assert nodes.gates == (0, 4, 8)
    good = [0, 1, 4, 5, 8]
    assert normal_walk_check(good, spec)
    # re-enters g2 from inside H2
    assert not normal_walk_check([0, 1, 4, 7, 4, 5, 8], spec)


def test_normal_walk_backward_exit():
    spec = CliqueChainSpec(4, 2, ((2, 3), (2, 3)))
    g, nodes = _chain_walk(spec)
    k = spec.k
    back = g.move(4, k)[0]
    assert back == 2
    assert not normal_walk_check([0, 1, 4, back, 4, 5, 8], spec)
    # a single backward exit that never returns to g2 also fails (treasure never reached)
    assert not normal_walk_check([0, 1, 4, back], spec)


def test_normal_walk_must_start_at_g1():
    spec = CliqueChainSpec(4, 1, ((2, 3),))
    assert not normal_walk_check([1, 4], spec)
    assert not normal_walk_check([], spec)


# --- injectivity ---------------------------------------------------------


def test_injectivity_g41():
    rep = verify_tau_injectivity(4, 1, greedy_gate_seeker)
    assert rep.injective
    assert len(set(rep.taus.values())) == 3


def test_injectivity_g62_zero_advice():
    rep = verify_tau_injectivity(6, 2, greedy_gate_seeker)
    assert rep.injective
    assert len(set(rep.taus.values())) == 100


def test_injectivity_g62_two_bit_advice():
    rng = random.Random(7)
    specs = list(enumerate_family(6, 2))
    for _ in range(3):
        fn = random_advice_fn(specs, 2, rng)
        rep = verify_tau_injectivity(6, 2, greedy_gate_seeker, fn)
        assert rep.injective
        assert len(rep.buckets()) <= 4


def test_injectivity_reports_collisions(monkeypatch):
    import rendezvous_advice.lowerbound as lb

    monkeypatch.setattr(lb, "tau_of_trace", lambda trace, spec: (7,))
    rep = verify_tau_injectivity(4, 1, greedy_gate_seeker)
    assert not rep.injective
    assert len(rep.collisions) == 2
    assert all(tau == (7,) for _, _, tau in rep.collisions)


def test_family_run_needs_reaching_treasure():
    never = lambda advice: replay_ports_behavior(concat(["0", "0"]))
    with pytest.raises(RuntimeError):
        verify_tau_injectivity(4, 1, never)


# --- pigeonhole ----------------------------------------------------------


def test_buckets_no_advice():
    rep = pigeonhole_buckets(6, 2, zero_advice, 0)
    assert rep.sizes == {"": 100}
    assert rep.largest == 100 == rep.bound


def test_buckets_one_bit():
    rng = random.Random(1)
    specs = list(enumerate_family(6, 2))
    fn = random_advice_fn(specs, 1, rng)
    rep = pigeonhole_buckets(6, 2, fn, Fraction(1, 4))
    assert rep.bound == 50
    assert rep.largest >= 50
    assert sum(rep.sizes.values()) == 100


def test_buckets_full_spec_encoding():
    rep = pigeonhole_buckets(6, 2, edge_index_advice, 2)
    assert rep.largest == 1
    assert len(rep.buckets) == 100


def test_buckets_variable_length_bound():
    specs = list(enumerate_family(4, 1))
    table = dict(zip(specs, ["", "0", "1"]))
    rep = pigeonhole_buckets(4, 1, table.__getitem__, Fraction(1, 2))
    # strings of length <= 1: three of them
    assert rep.bound == 1
    assert rep.largest == 1


def test_buckets_budget_enforced():
    with pytest.raises(ValueError):
        pigeonhole_buckets(4, 1, lambda s: "010", 1)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 6))
def test_buckets_lower_bound_property(seed, bits):
    specs = list(enumerate_family(6, 2))
    rep = pigeonhole_buckets(6, 2, random_advice_fn(specs, bits, random.Random(seed)), Fraction(bits, 4))
    assert rep.largest >= math.ceil(100 / 2**bits) == rep.bound


# --- counting bounds -----------------------------------------------------


def test_counting_g62():
    b = counting_bounds(6, 2, 0, 10)
    assert b.N == 100
    assert b.simplex_bound == 50
    assert abs(float(b.T_lower) - math.sqrt(200)) < 1e-12


@pytest.mark.parametrize("k,z", [(4, 0), (6, 1), (10, Fraction(1, 2)), (20, 3)])
def test_counting_ell_one(k, z):
    b = counting_bounds(k, 1, z)
    exact = Fraction(family_size(k, 1)) / Fraction(2) ** (2 * z) if Fraction(z).denominator == 1 else None
    if exact is not None:
        assert abs(Fraction(str(b.T_lower)) - exact) < Fraction(1, 10**40)
    mpmath.mp.dps = 60
    ref = mpmath.mpf(family_size(k, 1)) / mpmath.power(2, 2 * mpmath.mpf(Fraction(z).numerator) / Fraction(z).denominator)
    assert abs(mpmath.mpf(str(b.T_lower)) - ref) < mpmath.mpf(10) ** -40 * ref


@pytest.mark.parametrize("k,ell,z", [(100, 50, 0), (100, 50, 2), (12, 7, Fraction(3, 7)), (6, 2, 1)])
def test_counting_against_mpmath(k, ell, z):
    b = counting_bounds(k, ell, z)
    mpmath.mp.dps = 80
    z = Fraction(z)
    ref = mpmath.root(
        mpmath.factorial(ell) * mpmath.mpf(family_size(k, ell)) / mpmath.power(2, 2 * ell * mpmath.mpf(z.numerator) / z.denominator),
        ell,
    )
    assert abs(mpmath.mpf(str(b.T_lower)) / ref - 1) < mpmath.mpf(10) ** -45
    assert b.T_lower >= b.T_lower_relaxed


def test_counting_big_exact_N():
    assert counting_bounds(100, 50, 0).N == 4851**50


def test_counting_simplex():
    assert counting_bounds(6, 2, 0, 10).simplex_bound == Fraction(100, 2)
    assert counting_bounds(6, 3, 0, 9).simplex_bound == Fraction(729, 6)


@pytest.mark.parametrize("T,ell", [(10, 2), (7, 3), (12, 4), (3, 3), (2, 3)])
def test_simplex_points_brute_force(T, ell):
    brute = sum(1 for t in itertools.product(range(1, T + 1), repeat=ell) if sum(t) <= T)
    assert simplex_points(T, ell) == brute
    assert brute <= Fraction(T**ell, math.factorial(ell))


def test_observed_taus_within_simplex():
    rep = verify_tau_injectivity(6, 2, greedy_gate_seeker)
    for T in range(1, rep.max_time + 1):
        observed = {tau for tau in rep.taus.values() if sum(tau) <= T}
        assert len(observed) <= Fraction(T**2, 2)


# --- rings ---------------------------------------------------------------


def test_behaviour_vector_idle():
    g = build_oriented_ring(6)
    res = run_solo(g, AgentConfig(1, 0), idle_behavior, 4)
    assert behaviour_vector(g, res.traces[0]) == (0, 0, 0, 0)


def test_behaviour_vector_replay():
    g = build_oriented_ring(6)
    res = run_solo(g, AgentConfig(1, 2), replay_ports_behavior(concat(["0", "0", "1"])), 3)
    assert behaviour_vector(g, res.traces[0]) == (-1, -1, 1)


def test_behaviour_vector_inert_fast_rendezvous():
    g = build_oriented_ring(8)
    advice = make_rendezvous_advice(g, 0, 4, 2, 3)
    res = run_solo(g, AgentConfig(2, 0), fast_rendezvous_behavior(advice), 6)
    assert behaviour_vector(g, res.traces[0]) == (0,) * 6


def test_behaviour_vector_needs_oriented_ring():
    from rendezvous_advice.graph import from_edges

    path = from_edges(3, [(0, 1), (1, 2)])
    with pytest.raises(TypeError):
        behaviour_vector(path, [0, 1])


def test_meta_all_zero():
    assert meta_behaviour_vector((0,) * 6, 2, 12) == (0, 0, 0)


def test_meta_one_block_forward():
    bv = (1, 1, 1, 0, 0, 0, 0, 0, 0)
    assert meta_behaviour_vector(bv, 3, 18) == (1, 0, 0)


def test_meta_oscillation():
    assert meta_behaviour_vector((1, -1) * 4, 2, 12) == (0, 0, 0, 0)


def test_meta_wraps_around_ring():
    # six blocks of size 1: walking backwards crosses block 0 -> block 5
    assert meta_behaviour_vector((-1, -1, -1), 1, 6) == (-1, -1, -1)


@pytest.mark.parametrize(
    "bv,dprime,n,offset",
    [((0, 0, 0), 2, 12, 0), ((0, 0), 5, 12, 0), ((0, 0), 2, 12, 1), ((0, 2), 2, 12, 0), ((0, 0), 2, 4, 0)],
)
def test_meta_preconditions(bv, dprime, n, offset):
    with pytest.raises(ValueError):
        meta_behaviour_vector(bv, dprime, n, offset)


@settings(max_examples=200)
@given(st.integers(1, 5), st.integers(1, 6), st.data())
def test_meta_terms_bounded(dprime, d, data):
    bv = data.draw(st.lists(st.sampled_from([-1, 0, 1]), min_size=d * dprime, max_size=d * dprime))
    meta = meta_behaviour_vector(bv, dprime, 6 * dprime)
    assert len(meta) == d
    assert set(meta) <= {-1, 0, 1}


def _script(bv):
    ports = {-1: 0, 0: None, 1: 1}

    def behave(label, history):
        c = history[-1].clock
        return ports[bv[c]] if c < len(bv) else None

    return behave


def test_equal_meta_vectors_never_meet_exhaustive():
    # every pair of behaviour vectors with equal meta vectors, D'=2, d=2
    dprime, d = 2, 2
    n = 6 * dprime
    g = build_oriented_ring(n)
    groups = {}
    for bv in itertools.product((-1, 0, 1), repeat=d * dprime):
        groups.setdefault(meta_behaviour_vector(bv, dprime, n), []).append(bv)
    checked = 0
    for members in groups.values():
        for bv1, bv2 in itertools.product(members, repeat=2):
            res = run_rendezvous(g, AgentConfig(1, 0), _script(bv1), AgentConfig(2, 3 * dprime), _script(bv2), d * dprime)
            assert not res.met
            checked += 1
    assert checked > 81


def test_ring_collision_identical_behaviors():
    # behavior ignores the label, so both labels collide
    same = lambda advice: replay_ports_behavior(concat(["1", "1", "0"]))
    rep = ring_collision_experiment(same, 2, ["0"], 2, 2)
    assert rep.witness == (1, 2)
    assert rep.never_met is True


def test_ring_collision_pigeonhole_d1():
    rep = ring_collision_experiment(label_digit_behavior, 4, ["0"], 1, 1)
    assert rep.guaranteed
    assert rep.distinct <= 3
    assert rep.witness is not None
    assert rep.never_met is True


def test_ring_collision_fast_rendezvous_oracle():
    dprime, L = 2, 6
    g = build_oriented_ring(6 * dprime)
    v = 3 * dprime
    strings = sorted({make_rendezvous_advice(g, 0, v, a, b) for a, b in itertools.permutations(range(1, L + 1), 2)})
    rep = ring_collision_experiment(fast_rendezvous_behavior, L, strings, dprime, 3)
    assert rep.witness is None
    assert rep.never_met is None
    for a, b in itertools.permutations(range(1, L + 1), 2):
        adv = make_rendezvous_advice(g, 0, v, a, b)
        res = run_rendezvous(
            g, AgentConfig(a, 0), fast_rendezvous_behavior(adv), AgentConfig(b, v), fast_rendezvous_behavior(adv)
        )
        assert res.time == 3 * dprime


def test_ring_collision_preconditions():
    with pytest.raises(ValueError):
        ring_collision_experiment(label_digit_behavior, 4, [], 2, 2)
    with pytest.raises(ValueError):
        ring_collision_experiment(label_digit_behavior, 4, ["0"], 0, 2)


def test_label_digit_behaviors_distinct():
    g = build_oriented_ring(12)
    bvs = {behaviour_vector(g, run_solo(g, AgentConfig(x, 0), label_digit_behavior("0"), 4).traces[0]) for x in range(1, 17)}
    assert len(bvs) == 16
