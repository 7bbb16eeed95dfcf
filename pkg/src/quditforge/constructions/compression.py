"""Packing binary data into qutrits or ququarts to free ancilla wires."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..errors import UnknownScheme, ValidationError
from ..ir import Circuit, Gate, flip, inc, inverse


@dataclass(frozen=True)
class CompressionScheme:
    name: str
    x: int  # input radix
    y: int  # output radix
    z: int  # ancilla freed per unit
    m: int  # inputs per unit
    n: int  # non-ancilla outputs per unit

    def __post_init__(self):
        if not (self.x ** self.m <= self.y ** self.n and 0 < self.n < self.m and self.m - self.n == self.z):
            raise ValidationError(f"inconsistent compression scheme {self.name}")


C231 = CompressionScheme("2-3-1", x=2, y=3, z=1, m=3, n=2)
C241 = CompressionScheme("2-4-1", x=2, y=4, z=1, m=2, n=1)
SCHEMES = {"2-3-1": C231, "2-4-1": C241}


def scheme(name) -> CompressionScheme:
    if isinstance(name, CompressionScheme):
        return name
    try:
        return SCHEMES[name]
    except KeyError:
        raise UnknownScheme(name) from None


def unit_gates(sch: CompressionScheme, wires: Sequence[int]) -> list[Gate]:
    """Compression gates on ``wires``; the last wire ends in |0>."""
    sch = scheme(sch)
    if sch is C231:
        a, b, c = wires
        return [
            inc(b, 1, controls=[(c, 1)]),
            inc(a, 2, controls=[(c, 1), (b, 1)]),
            inc(b, 1, controls=[(c, 1), (a, 2)]),
            inc(a, 2, controls=[(c, 1), (b, 1)]),
            flip(c, controls=[(b, 2)]),
            flip(c, controls=[(a, 2), (b, 1)]),
        ]
    if sch is C241:
        a, b = wires
        return [
            inc(a, 2, controls=[(b, 1)]),
            flip(b, controls=[(a, 2)]),
            flip(b, controls=[(a, 3)]),
        ]
    raise UnknownScheme(sch.name)


def compress_unit(sch) -> Circuit:
    sch = scheme(sch)
    return Circuit(sch.m, sch.y, unit_gates(sch, range(sch.m)))


def decompress_gates(sch, wires: Sequence[int]) -> list[Gate]:
    """Inverse unit; the last wire may be any clean ancilla."""
    sch = scheme(sch)
    return [g.inverse(sch.y) for g in reversed(unit_gates(sch, wires))]


def compress_register(qudits: Sequence[int], sch, width: int | None = None) -> tuple[Circuit, list[int]]:
    """Compress consecutive groups of ``qudits``; returns (circuit, freed wires).

    Leftover wires that do not fill a group are untouched.
    """
    sch = scheme(sch)
    qudits = list(qudits)
    if len(set(qudits)) != len(qudits):
        raise ValidationError("duplicate qudit in register")
    if width is None:
        width = max(qudits, default=0) + 1
    gates, freed = [], []
    for k in range(len(qudits) // sch.m):
        grp = qudits[k * sch.m:(k + 1) * sch.m]
        gates += unit_gates(sch, grp)
        freed.append(grp[-1])
    return Circuit(width, sch.y, gates), freed


def decompress_register(qudits: Sequence[int], sch, width: int | None = None) -> Circuit:
    return inverse(compress_register(qudits, sch, width)[0])
