"""Advice strings: the doubled-digit encoding and the omniscient oracle.

Bit strings are plain ``str`` values over ``"0"`` and ``"1"``.  ``concat``
doubles every digit of every substring and separates substrings with ``01``;
``decode`` inverts it.
"""

from __future__ import annotations

from typing import Sequence

from .graph import PortGraph, shortest_path


class AdviceError(ValueError):
    pass


class DecodeError(AdviceError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


_DOUBLE = {"0": "00", "1": "11"}
_PAIRS = {"00": "0", "11": "1"}
SEPARATOR = "01"


def to_binary(value: int) -> str:
    """Minimal binary representation; ``0`` is ``"0"``."""
    if value < 0:
        raise AdviceError(f"cannot encode negative integer {value}")
    return format(value, "b")


def concat(substrings: Sequence[str]) -> str:
    if not substrings:
        raise AdviceError("concat needs at least one substring")
    out = []
    for i, s in enumerate(substrings):
        if not s:
            raise AdviceError(f"substring {i} is empty")
        try:
            out.append("".join(_DOUBLE[c] for c in s))
        except KeyError as exc:
            raise AdviceError(f"substring {i} has non-bit character {exc}") from None
    return SEPARATOR.join(out)


def decode(advice: str) -> list[str]:
    """Inverse of :func:`concat`.  The empty string decodes to ``[]``."""
    if len(advice) % 2:
        raise DecodeError("dangling odd bit", len(advice) - 1)
    parts: list[str] = []
    current: list[str] = []
    for pos in range(0, len(advice), 2):
        pair = advice[pos : pos + 2]
        if pair == SEPARATOR:
            if not current:
                raise DecodeError("separator without preceding substring", pos)
            parts.append("".join(current))
            current = []
        elif pair in _PAIRS:
            current.append(_PAIRS[pair])
        else:
            raise DecodeError(f"invalid pair {pair!r}", pos)
    if advice:
        if not current:
            raise DecodeError("trailing separator", len(advice) - 2)
        parts.append("".join(current))
    return parts


def bit(label: int, index: int) -> int:
    """Bit ``index`` of ``label``, 1-indexed from the least significant end."""
    return (label >> (index - 1)) & 1


def first_diff_bit(l1: int, l2: int) -> int:
    if l1 == l2:
        raise AdviceError(f"labels must differ, both are {l1}")
    if l1 < 1 or l2 < 1:
        raise AdviceError("labels must be positive")
    diff = l1 ^ l2
    return (diff & -diff).bit_length()


def make_rendezvous_advice(g: PortGraph, u: int, v: int, l1: int, l2: int) -> str:
    """Advice for the agent labelled ``l1`` at ``u`` and ``l2`` at ``v``.

    The agent whose label has bit ``x`` set walks the fixed shortest path to
    the other agent's start.
    """
    if u == v:
        raise AdviceError("agents must start at different nodes")
    x = first_diff_bit(l1, l2)
    _, toward_v, toward_u = shortest_path(g, u, v)
    ports = toward_u if bit(l2, x) else toward_v
    return concat([to_binary(x)] + [to_binary(p) for p in ports])


def make_treasure_advice(g: PortGraph, u: int, w: int) -> str:
    if u == w:
        raise AdviceError("agent already stands on the treasure")
    _, ports, _ = shortest_path(g, u, w)
    return concat([to_binary(p) for p in ports])
