"""Qudit circuit representation.

A circuit is an ordered list of gates over ``width`` qudits of dimension
``radix``. Controls carry the level they activate on, so a |2>-controlled
gate and a |1>-controlled gate are the same kind of object. Qudit 0 is the
top wire and the most significant digit of the basis index.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

from .errors import (
    BadControlValue,
    BadGate,
    DuplicateQudit,
    IndexOutOfRange,
    NotInvertible,
    ValidationError,
)


class Kind(str, Enum):
    FLIP = "flip"  # X_ij, params (i, j)
    INC = "inc"  # X_{+k}, params (k,)
    H = "h"
    T = "t"
    TDG = "tdg"
    PHASE = "phase"  # diag(1, e^{i angle}) on the {0,1} subspace, params (angle,)
    Z = "z"
    SWAP = "swap"
    MEASURE = "measure"
    RESET = "reset"


CLASSICAL_KINDS = frozenset({Kind.FLIP, Kind.INC, Kind.SWAP})
SUBSPACE_KINDS = frozenset({Kind.H, Kind.T, Kind.TDG, Kind.PHASE, Kind.Z})


@dataclass(frozen=True)
class Control:
    qudit: int
    value: int = 1


@dataclass(frozen=True)
class Gate:
    kind: Kind
    targets: tuple[int, ...]
    controls: tuple[Control, ...] = ()
    params: tuple = ()

    @property
    def qudits(self) -> tuple[int, ...]:
        return tuple(c.qudit for c in self.controls) + self.targets

    @property
    def arity(self) -> int:
        return len(self.targets) + len(self.controls)

    def inverse(self, radix: int) -> "Gate":
        k = self.kind
        if k in (Kind.MEASURE, Kind.RESET):
            raise NotInvertible(f"{k.value} has no inverse")
        if k is Kind.INC:
            return Gate(k, self.targets, self.controls, ((radix - self.params[0]) % radix,))
        if k is Kind.T:
            return Gate(Kind.TDG, self.targets, self.controls)
        if k is Kind.TDG:
            return Gate(Kind.T, self.targets, self.controls)
        if k is Kind.PHASE:
            return Gate(k, self.targets, self.controls, (-self.params[0],))
        return self

    def remap(self, wires: Sequence[int]) -> "Gate":
        """Relabel qudit q as wires[q]."""
        return Gate(
            self.kind,
            tuple(wires[t] for t in self.targets),
            tuple(Control(wires[c.qudit], c.value) for c in self.controls),
            self.params,
        )

    def __str__(self) -> str:
        p = "" if not self.params else "(" + ",".join(repr(x) for x in self.params) + ")"
        ctl = "".join(f" [{c.qudit}={c.value}]" for c in self.controls)
        return f"{self.kind.value}{p} {','.join(map(str, self.targets))}{ctl}"


def _ctls(controls) -> tuple[Control, ...]:
    out = []
    for c in controls:
        out.append(c if isinstance(c, Control) else Control(*c))
    return tuple(out)


# Gate constructors. ``controls`` accepts Control objects or (qudit, value) pairs.

def flip(q: int, i: int = 0, j: int = 1, controls=()) -> Gate:
    return Gate(Kind.FLIP, (q,), _ctls(controls), (i, j))


def inc(q: int, k: int = 1, controls=()) -> Gate:
    return Gate(Kind.INC, (q,), _ctls(controls), (k,))


def x(q: int) -> Gate:
    return flip(q)


def cx(c: int, t: int) -> Gate:
    return flip(t, controls=((c, 1),))


def ccx(c0: int, c1: int, t: int) -> Gate:
    return flip(t, controls=((c0, 1), (c1, 1)))


def h(q: int) -> Gate:
    return Gate(Kind.H, (q,))


def t(q: int) -> Gate:
    return Gate(Kind.T, (q,))


def tdg(q: int) -> Gate:
    return Gate(Kind.TDG, (q,))


def z(q: int, controls=()) -> Gate:
    return Gate(Kind.Z, (q,), _ctls(controls))


def phase(q: int, angle: float, controls=()) -> Gate:
    return Gate(Kind.PHASE, (q,), _ctls(controls), (float(angle),))


def cphase(c: int, q: int, angle: float) -> Gate:
    return phase(q, angle, controls=((c, 1),))


def swap(a: int, b: int) -> Gate:
    return Gate(Kind.SWAP, (a, b))


def measure(q: int) -> Gate:
    return Gate(Kind.MEASURE, (q,))


def reset(q: int) -> Gate:
    return Gate(Kind.RESET, (q,))


def is_toffoli(g: Gate) -> bool:
    return (
        g.kind is Kind.FLIP
        and g.params == (0, 1)
        and len(g.controls) == 2
        and all(c.value == 1 for c in g.controls)
    )


def validate_gate(g: Gate, width: int, radix: int) -> None:
    if not isinstance(g.kind, Kind):
        raise BadGate(f"unknown kind {g.kind!r}")
    n_targets = 2 if g.kind is Kind.SWAP else 1
    if len(g.targets) != n_targets:
        raise BadGate(f"{g.kind.value} needs {n_targets} target(s), got {len(g.targets)}")
    qs = g.qudits
    for q in qs:
        if not 0 <= q < width:
            raise IndexOutOfRange(f"qudit {q} outside width {width} in {g}")
    if len(set(qs)) != len(qs):
        raise DuplicateQudit(f"repeated qudit in {g}")
    for c in g.controls:
        if not 0 <= c.value < radix:
            raise BadControlValue(f"control value {c.value} not below radix {radix}")
    if g.kind in (Kind.MEASURE, Kind.RESET) and g.controls:
        raise BadGate(f"{g.kind.value} cannot be controlled")
    if g.kind is Kind.FLIP:
        if len(g.params) != 2:
            raise BadGate("flip needs (i, j)")
        i, j = g.params
        if not 0 <= i < j < radix:
            raise BadGate(f"flip levels ({i},{j}) invalid for radix {radix}")
    elif g.kind is Kind.INC:
        if len(g.params) != 1 or not 1 <= g.params[0] < radix:
            raise BadGate(f"increment amount {g.params} invalid for radix {radix}")
    elif g.kind is Kind.PHASE:
        if len(g.params) != 1:
            raise BadGate("phase needs an angle")
    elif g.params:
        raise BadGate(f"{g.kind.value} takes no parameters")


@dataclass(frozen=True)
class Circuit:
    width: int
    radix: int
    gates: tuple[Gate, ...] = ()

    def __post_init__(self):
        if self.width < 1:
            raise ValidationError("width must be >= 1")
        if self.radix < 2:
            raise ValidationError("radix must be >= 2")
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            validate_gate(g, self.width, self.radix)

    def __len__(self) -> int:
        return len(self.gates)

    def __add__(self, other: "Circuit") -> "Circuit":
        if (self.width, self.radix) != (other.width, other.radix):
            raise ValidationError("cannot concatenate circuits of different shape")
        return Circuit(self.width, self.radix, self.gates + other.gates)

    def inverse(self) -> "Circuit":
        return inverse(self)

    def with_gates(self, gates: Iterable[Gate]) -> "Circuit":
        return Circuit(self.width, self.radix, tuple(gates))


def build(width: int, radix: int, gates: Iterable[Gate] = ()) -> Circuit:
    return Circuit(width, radix, tuple(gates))


def inverse(circuit: Circuit) -> Circuit:
    return circuit.with_gates(g.inverse(circuit.radix) for g in reversed(circuit.gates))


@dataclass(frozen=True)
class Moment:
    gates: tuple[Gate, ...]
    long: bool
    units: int = 1  # 13 when the moment holds a doubly-controlled gate

    @property
    def duration_class(self) -> str:
        return "long" if self.long else "short"

    def duration(self, dt1: float, dt2: float) -> float:
        # a doubly-controlled gate runs as its two- and single-qudit layers back to back
        if self.units > 1:
            return THREE_QUDIT_COST.n2 * dt2 + THREE_QUDIT_COST.n1 * dt1
        return dt2 if self.long else dt1


@dataclass(frozen=True)
class CostProfile:
    n1: int = 0
    n2: int = 0
    depth: int = 0


# Charge for a native doubly-controlled qudit gate.
THREE_QUDIT_COST = CostProfile(n1=7, n2=6, depth=13)


def gate_units(g: Gate) -> int:
    return THREE_QUDIT_COST.depth if g.arity == 3 else 1


def schedule_moments(circuit: Circuit) -> list[Moment]:
    """Greedy as-soon-as-possible layering."""
    frontier = [0] * circuit.width
    layers: list[list[Gate]] = []
    for g in circuit.gates:
        slot = max(frontier[q] for q in g.qudits)
        if slot == len(layers):
            layers.append([])
        layers[slot].append(g)
        for q in g.qudits:
            frontier[q] = slot + 1
    return [
        Moment(
            tuple(gs),
            any(g.arity >= 2 for g in gs),
            max(gate_units(g) for g in gs),
        )
        for gs in layers
    ]


def metrics(circuit: Circuit) -> CostProfile:
    """Single/two-qudit op counts and critical-path depth in depth units.

    Doubly-controlled gates are charged ``THREE_QUDIT_COST``. Measure and
    reset are left out of the op counts but still occupy one depth unit.
    """
    n1 = n2 = 0
    finish = [0] * circuit.width
    for g in circuit.gates:
        a = g.arity
        if g.kind in (Kind.MEASURE, Kind.RESET):
            pass
        elif a == 1:
            n1 += 1
        elif a == 2:
            n2 += 1
        elif a == 3:
            n1 += THREE_QUDIT_COST.n1
            n2 += THREE_QUDIT_COST.n2
        else:
            raise ValidationError(f"no cost model for {a}-qudit gate {g}")
        start = max(finish[q] for q in g.qudits)
        for q in g.qudits:
            finish[q] = start + gate_units(g)
    return CostProfile(n1, n2, max(finish))
