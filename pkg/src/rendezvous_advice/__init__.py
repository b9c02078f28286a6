"""Deterministic two-agent rendezvous with advice in anonymous port-labeled graphs."""

from .algorithms import fast_rendezvous_behavior, greedy_gate_seeker, replay_ports_behavior
from .codec import concat, decode, first_diff_bit, make_rendezvous_advice, make_treasure_advice
from .graph import (
    CliqueChainSpec,
    PortGraph,
    attach_path,
    build_clique_chain,
    build_oriented_ring,
    color_even_clique,
    join_copies_at,
    path_degree_sum,
    shortest_path_ports,
)
from .sim import AgentConfig, Observation, SimResult, run_rendezvous, run_treasure_hunt

__version__ = "0.1.0"
