"""Synchronous round-based execution of one or two agents on a port graph.

Time ``t`` denotes the configuration after ``t`` global rounds; round ``t``
moves every awake agent (``wake_round <= t``) from its time-``t`` node to its
time-``t+1`` node.  Agents meet only at nodes; swapping along an edge is
counted in ``edge_crossings`` but is not a meeting.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Sequence

from .graph import PortGraph


class ProtocolViolation(RuntimeError):
    def __init__(self, agent: int, label: int, round_: int, action):
        super().__init__(
            f"agent {agent} (label {label}) returned invalid action {action!r} in round {round_}"
        )
        self.agent = agent
        self.label = label
        self.round = round_


class Observation(NamedTuple):
    """What an agent perceives at the start of one of its rounds.

    ``arrival_port`` is the port through which the agent entered its current
    node, or ``None`` while it has never left its start node.
    """

    clock: int
    degree: int
    arrival_port: Optional[int]


# None means stay idle; an int means take that port.
Action = Optional[int]
Behavior = Callable[[int, Sequence[Observation]], Action]


def idle_behavior(label: int, history: Sequence[Observation]) -> Action:
    return None


@dataclass(frozen=True)
class AgentConfig:
    label: int
    start: int
    wake_round: int = 0

    def __post_init__(self):
        if self.label < 1:
            raise ValueError(f"labels start at 1, got {self.label}")
        if self.wake_round < 0:
            raise ValueError("wake_round must be non-negative")


@dataclass
class SimResult:
    meeting_round: Optional[int]
    time: Optional[int]
    traces: list[list[int]]
    edge_crossings: int = 0
    # ports actually taken per agent per round (None for idle / dormant)
    actions: list[list[Action]] = field(default_factory=list, repr=False)

    @property
    def met(self) -> bool:
        return self.meeting_round is not None

    def to_dict(self) -> dict:
        return {
            "meeting_round": self.meeting_round,
            "time": self.time,
            "edge_crossings": self.edge_crossings,
            "traces": self.traces,
        }


def default_max_rounds(g: PortGraph) -> int:
    return 10 * (g.n + 1)


def _execute(g, agents, behaviors, max_rounds, stop_on_meeting):
    for i, a in enumerate(agents):
        if not 0 <= a.start < g.n:
            raise ValueError(f"agent {i} starts at unknown node {a.start}")
    if max_rounds < 0:
        raise ValueError("max_rounds must be non-negative")
    pos = [a.start for a in agents]
    arrival: list[Optional[int]] = [None] * len(agents)
    histories: list[list[Observation]] = [[] for _ in agents]
    traces = [[p] for p in pos]
    actions: list[list[Action]] = [[] for _ in agents]
    crossings = 0
    meeting = 0 if len(agents) == 2 and pos[0] == pos[1] else None
    t = 0
    while t < max_rounds and not (stop_on_meeting and meeting is not None):
        new_pos = list(pos)
        for i, (a, b) in enumerate(zip(agents, behaviors)):
            act = None
            if t >= a.wake_round:
                deg = g.degree(pos[i])
                histories[i].append(Observation(t - a.wake_round, deg, arrival[i]))
                act = b(a.label, histories[i])
                if act is not None:
                    if isinstance(act, bool) or not isinstance(act, int) or not 0 <= act < deg:
                        raise ProtocolViolation(i, a.label, t, act)
                    new_pos[i], arrival[i] = g.move(pos[i], act)
            actions[i].append(act)
        if len(agents) == 2 and new_pos[0] == pos[1] and new_pos[1] == pos[0] and pos[0] != pos[1]:
            crossings += 1
        pos = new_pos
        t += 1
        for i, p in enumerate(pos):
            traces[i].append(p)
        if meeting is None and len(agents) == 2 and pos[0] == pos[1]:
            meeting = t
    return meeting, traces, actions, crossings


def run_rendezvous(
    g: PortGraph,
    a1: AgentConfig,
    b1: Behavior,
    a2: AgentConfig,
    b2: Behavior,
    max_rounds: int | None = None,
) -> SimResult:
    """Run two agents until they first share a node or ``max_rounds`` elapse."""
    if a1.label == a2.label:
        raise ValueError(f"agents need distinct labels, both are {a1.label}")
    if max_rounds is None:
        max_rounds = default_max_rounds(g)
    meeting, traces, actions, crossings = _execute(g, (a1, a2), (b1, b2), max_rounds, True)
    time = None
    if meeting is not None:
        time = max(0, meeting - max(a1.wake_round, a2.wake_round))
    return SimResult(meeting, time, traces, crossings, actions)


def run_treasure_hunt(
    g: PortGraph,
    a: AgentConfig,
    b: Behavior,
    treasure: int,
    max_rounds: int | None = None,
) -> SimResult:
    """Treasure hunt as rendezvous with an inert partner sitting on ``treasure``.

    ``time`` counts rounds from the agent's wake-up to its first arrival.
    """
    if not 0 <= treasure < g.n:
        raise ValueError(f"treasure at unknown node {treasure}")
    inert = AgentConfig(a.label + 1, treasure, a.wake_round)
    return run_rendezvous(g, a, b, inert, idle_behavior, max_rounds)


def run_solo(g: PortGraph, a: AgentConfig, b: Behavior, rounds: int) -> SimResult:
    """Run a single agent for exactly ``rounds`` rounds; no meeting is possible."""
    _, traces, actions, _ = _execute(g, (a,), (b,), rounds, False)
    return SimResult(None, None, traces, 0, actions)
