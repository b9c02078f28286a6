"""Concrete agent behaviors.

A behavior is called once per round with the agent's label and its full
observation history, and returns a port or ``None`` (idle).  Advice is bound
when the behavior is constructed; both agents get the same advice.
"""

from __future__ import annotations

from typing import Sequence

from .codec import AdviceError, bit, decode
from .graph import color_even_clique, non_gate_edges
from .sim import Action, Behavior, Observation


def fast_rendezvous_behavior(advice: str) -> Behavior:
    """Decode ``(x, p_1..p_D)``; labels with bit ``x`` set walk the ports, the
    others stay put.  After the last port the mover idles forever."""
    parts = decode(advice)
    if not parts:
        raise AdviceError("fast rendezvous needs advice with at least one substring")
    x = int(parts[0], 2)
    if x < 1:
        raise AdviceError("bit index in advice must be >= 1")
    ports = tuple(int(p, 2) for p in parts[1:])

    def behave(label: int, history: Sequence[Observation]) -> Action:
        clock = history[-1].clock
        if bit(label, x) and clock < len(ports):
            return ports[clock]
        return None

    return behave


def replay_ports_behavior(advice: str) -> Behavior:
    """Take every decoded port in order, then idle."""
    ports = tuple(int(p, 2) for p in decode(advice))
    if not ports:
        raise AdviceError("replay needs at least one port")

    def behave(label: int, history: Sequence[Observation]) -> Action:
        clock = history[-1].clock
        return ports[clock] if clock < len(ports) else None

    return behave


class _SeekerState:
    def __init__(self, k: int, advice: str):
        self.k = k
        self.colors = color_even_clique(k)
        self.candidates = non_gate_edges(k)
        self.width = max(1, (len(self.candidates) - 1).bit_length())
        self.advice = advice
        self.clique = 0
        self.done = False
        self._enter_clique()

    def _enter_clique(self) -> None:
        chunk = self.advice[self.clique * self.width : (self.clique + 1) * self.width]
        shift = int(chunk, 2) % len(self.candidates) if chunk else 0
        self.order = self.candidates[shift:] + self.candidates[:shift]
        self.tested: set[tuple[int, int]] = set()
        self.pos = 1
        self.target = 1
        self.edge: tuple[int, int] | None = None

    def port(self, a: int, b: int) -> int:
        return self.colors[(min(a, b) - 1, max(a, b) - 1)]

    def step(self, obs: Observation) -> Action:
        if self.done:
            return None
        if obs.clock > 0:
            if obs.degree == 2:
                self.done = True
                return None
            if obs.degree == self.k + 1 and self.target != 1:
                self.clique += 1
                self._enter_clique()
            else:
                self.pos = self.target
                self.tested.add(self.edge)
        for a, b in self.order:
            if (a, b) in self.tested:
                continue
            if self.pos in (a, b):
                self.target = b if self.pos == a else a
                self.edge = (a, b)
            else:
                self.target = a
                self.edge = (min(self.pos, a), max(self.pos, a))
            return self.port(self.pos, self.target)
        self.done = True
        return None


class GateSeeker:
    """Deterministic explorer for clique chains whose walks are normal.

    In each clique it probes the non-gate edges in ascending pair order,
    rotated by a per-clique offset read from consecutive advice chunks, until
    it enters a node of degree ``k+1`` (the next gate) or ``2`` (the
    treasure).  It never returns to the gate it entered by, so it never
    exits a gate backwards.  ``k`` is read off the start degree.

    The action is a function of the history alone; a cache of the last
    history seen only avoids replaying it from scratch every round.
    """

    def __init__(self, advice: str = ""):
        if any(c not in "01" for c in advice):
            raise AdviceError("gate seeker hints must be a bit string")
        self.advice = advice
        self._seen: list[Observation] = []
        self._state: _SeekerState | None = None
        self._last: Action = None

    def __call__(self, label: int, history: Sequence[Observation]) -> Action:
        n = len(self._seen)
        if not (len(history) > n and list(history[:n]) == self._seen):
            self._seen, self._state = [], None
        for obs in history[len(self._seen) :]:
            if self._state is None:
                k = obs.degree + 1
                if k < 4 or k % 2:
                    self._state = _Inert()
                else:
                    self._state = _SeekerState(k, self.advice)
            self._last = self._state.step(obs)
            self._seen.append(obs)
        return self._last


class _Inert:
    def step(self, obs: Observation) -> Action:
        return None


def greedy_gate_seeker(advice: str = "") -> Behavior:
    return GateSeeker(advice)


BEHAVIORS = {
    "fast-rendezvous": fast_rendezvous_behavior,
    "replay": replay_ports_behavior,
    "gate-seeker": greedy_gate_seeker,
}
