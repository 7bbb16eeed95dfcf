"""Qutrit Toffoli, the log-depth multi-controlled tree, and the incrementer."""

from __future__ import annotations

from typing import Sequence

from ..errors import BadControlCount, UnsupportedWidth, ValidationError
from ..ir import Circuit, Control, Gate, Kind, flip, inc, z

RADIX = 3


def qutrit_toffoli() -> Circuit:
    """Toffoli on (q0, q1, q2) using |2> on q1 as temporary storage."""
    return Circuit(3, RADIX, (
        inc(1, 1, controls=[(0, 1)]),
        flip(2, 0, 1, controls=[(1, 2)]),
        inc(1, 2, controls=[(0, 1)]),
    ))


def _elevate(wires: Sequence[int], acts: Sequence[int]) -> tuple[list[Gate], int, int]:
    """Gates that push the subtree root to |2> iff every wire holds its activation level.

    Returns (gates, root wire, level the root shows when active). The middle
    wire of each span is the root; its two halves are the subtrees.
    """
    if len(wires) == 1:
        return [], wires[0], acts[0]
    mid = len(wires) // 2
    if acts[mid] == 2:
        raise ValidationError("an inner tree node cannot activate on |2>")
    left_g, left_root, left_act = _elevate(wires[:mid], acts[:mid])
    gates = list(left_g)
    ctrls = [(left_root, left_act)]
    if mid + 1 < len(wires):
        right_g, right_root, right_act = _elevate(wires[mid + 1:], acts[mid + 1:])
        gates += right_g
        ctrls.append((right_root, right_act))
    # shift the root's activation level onto |2>; other levels never land there
    gates.append(inc(wires[mid], (2 - acts[mid]) % RADIX, controls=ctrls))
    return gates, wires[mid], 2


def multi_controlled(controls: Sequence[tuple[int, int]], target_gate: Gate) -> list[Gate]:
    """Apply ``target_gate`` iff every (wire, level) control matches.

    Only the first control may activate on |2>. Control wires are restored.
    """
    wires = [q for q, _ in controls]
    acts = [v for _, v in controls]
    if any(v == 2 for v in acts[1:]):
        raise ValidationError("only the first control may activate on |2>")
    up, root, act = _elevate(wires, acts)
    body = Gate(target_gate.kind, target_gate.targets,
                target_gate.controls + (Control(root, act),), target_gate.params)
    down = [g.inverse(RADIX) for g in reversed(up)]
    return up + [body] + down


def generalized_toffoli(n_controls: int, top_activation: int = 1, target_op: str = "X") -> Circuit:
    """Controls on wires 0..n-1, target on wire n.

    ``top_activation`` picks the level wire 0 must hold; all other controls
    activate on |1>. ``target_op`` is "X" (flip 0<->1) or "Z".
    """
    if n_controls < 1:
        raise BadControlCount("need at least one control")
    if top_activation not in (0, 1, 2):
        raise ValidationError("top activation must be 0, 1 or 2")
    tgt = n_controls
    if target_op == "X":
        op = flip(tgt)
    elif target_op == "Z":
        op = z(tgt)
    else:
        raise ValidationError(f"unknown target op {target_op!r}")
    ctrls = [(0, top_activation)] + [(q, 1) for q in range(1, n_controls)]
    return Circuit(n_controls + 1, RADIX, multi_controlled(ctrls, op))


def _propagate(block: Sequence[int]) -> list[Gate]:
    """Carry propagation inside ``block`` whose first wire already encodes
    "carry out of this bit" as level 2.

    Each later bit is flipped iff block[0] is 2 and every bit between is 1.
    block[0] itself is left for the caller to resolve.
    """
    m = len(block)
    if m < 2:
        return []
    half = (m + 1) // 2
    lo, hi = block[:half], block[half:]
    if half == 1:
        return [flip(hi[0], controls=[(lo[0], 2)])] + _propagate(hi)
    carry_in = [(lo[0], 2)] + [(q, 1) for q in lo[1:]]
    # after the low half is incremented, the same carry shows as all zeros
    carry_after = [(lo[0], 2)] + [(q, 0) for q in lo[1:]]
    out = multi_controlled(carry_in, inc(hi[0], 1))
    out += _propagate(hi) + _propagate(lo)
    out += multi_controlled(carry_after, flip(hi[0], 0, 2))
    return out


def incrementer(n_bits: int) -> Circuit:
    """In-place b -> b + 1 mod 2^N, wire 0 the least significant bit.

    Bit 0 is raised by one so that level 2 marks a generated carry; the
    recursion propagates it through halves, then bit 0 drops 2 -> 0.
    """
    if n_bits < 1:
        raise UnsupportedWidth("incrementer needs at least one bit")
    wires = list(range(n_bits))
    gates = [inc(0, 1)] + _propagate(wires) + [flip(0, 0, 2)]
    return Circuit(n_bits, RADIX, gates)
