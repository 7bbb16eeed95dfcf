"""Qubit benchmark circuits used for the compiler experiments."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import BadWidth, ValidationError
from .ir import Circuit, Gate, ccx, cphase, cx, h, is_toffoli, measure, phase, x, z


def bv(n: int, secret: Sequence[int] | str | None = None) -> Circuit:
    """Bernstein-Vazirani on n-1 data qubits plus one ancilla (the last wire)."""
    if n < 2:
        raise BadWidth("bv needs at least 2 qubits")
    if secret is None:
        secret = [1] * (n - 1)
    bits = [int(b) for b in secret]
    if len(bits) != n - 1 or any(b not in (0, 1) for b in bits):
        raise ValidationError(f"secret must be {n - 1} bits")
    anc = n - 1
    gates: list[Gate] = [x(anc)] + [h(q) for q in range(n)]
    gates += [cx(q, anc) for q, b in enumerate(bits) if b]
    gates += [h(q) for q in range(n - 1)]
    gates += [measure(q) for q in range(n - 1)]
    return Circuit(n, 2, gates)


def _rx(q: int, angle: float) -> list[Gate]:
    # equal to exp(-i angle X / 2) up to global phase
    return [h(q), phase(q, angle), h(q)]


def qaoa_complete(n: int, gamma: float = 0.5, beta: float = 0.5) -> Circuit:
    """One QAOA layer for Max-Cut on the complete graph K_n."""
    if n < 2:
        raise BadWidth("qaoa needs at least 2 qubits")
    gates: list[Gate] = [h(q) for q in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            gates += [cx(i, j), phase(j, gamma), cx(i, j)]
    for q in range(n):
        gates += _rx(q, 2 * beta)
    return Circuit(n, 2, gates)


def _qft(reg: Sequence[int]) -> list[Gate]:
    """QFT with the most significant bit first, no final swaps."""
    gates = []
    m = len(reg)
    for j in range(m - 1, -1, -1):
        gates.append(h(reg[j]))
        for k in range(j - 1, -1, -1):
            gates.append(cphase(reg[k], reg[j], math.pi / 2 ** (j - k)))
    return gates


def qft_adder(n: int) -> Circuit:
    """Draper's transform adder: B <- A + B mod 2^(n/2).

    Wires 0..m-1 hold A and m..2m-1 hold B, least significant bit first.
    """
    if n < 2 or n % 2:
        raise BadWidth("qft_adder needs an even qubit count")
    m = n // 2
    a = list(range(m))
    b = list(range(m, n))
    fwd = _qft(b)
    add = [cphase(a[k], b[j], math.pi / 2 ** (j - k)) for j in range(m) for k in range(j + 1)]
    back = [g.inverse(2) for g in reversed(fwd)]
    return Circuit(n, 2, fwd + add + back)


def cuccaro_adder(n: int) -> Circuit:
    """Ripple-carry adder on 2m+2 wires: cin, b0, a0, b1, a1, ..., carry out.

    Leaves b_i holding the sum bits and the last wire holding the carry.
    """
    if n < 4 or n % 2:
        raise BadWidth("cuccaro_adder needs n = 2m + 2 with m >= 1")
    m = (n - 2) // 2
    cin, zout = 0, n - 1
    b = [1 + 2 * i for i in range(m)]
    a = [2 + 2 * i for i in range(m)]

    def maj(c, bb, aa):
        return [cx(aa, bb), cx(aa, c), ccx(c, bb, aa)]

    def uma(c, bb, aa):
        return [x(bb), cx(c, bb), ccx(c, bb, aa), x(bb), cx(aa, c), cx(aa, bb)]

    carries = [cin] + a[:-1]
    gates = []
    for i in range(m):
        gates += maj(carries[i], b[i], a[i])
    gates.append(cx(a[-1], zout))
    for i in reversed(range(m)):
        gates += uma(carries[i], b[i], a[i])
    return Circuit(n, 2, gates)


def cnx_gates(controls: Sequence[int], ancilla: Sequence[int], target: int) -> list[Gate]:
    """AND-tree multi-controlled X with len(controls)-2 clean ancilla."""
    controls = list(controls)
    if len(controls) < 2:
        raise ValidationError("cnx needs at least two controls")
    if len(ancilla) < len(controls) - 2:
        raise ValidationError("cnx needs len(controls) - 2 ancilla")
    free = list(ancilla)
    layer = controls
    compute: list[Gate] = []
    while len(layer) > 2:
        nxt = []
        for i in range(0, len(layer) - 1, 2):
            w = free.pop(0)
            compute.append(ccx(layer[i], layer[i + 1], w))
            nxt.append(w)
        if len(layer) % 2:
            nxt.append(layer[-1])
        layer = nxt
    return compute + [ccx(layer[0], layer[1], target)] + compute[::-1]


def cnx_logancilla(c: int) -> Circuit:
    """C^cX on 2c-1 wires: controls 0..c-1, ancilla c..2c-3, target last."""
    if c < 2:
        raise BadWidth("cnx_logancilla needs at least 2 controls")
    width = 2 * c - 1
    return Circuit(width, 2, cnx_gates(range(c), range(c, 2 * c - 2), width - 1))


def grover_iterations(n_data: int) -> int:
    return int(math.floor(math.pi / 4 * math.sqrt(2 ** n_data)))


def _mcz(data: Sequence[int], ancilla: Sequence[int]) -> list[Gate]:
    *ctl, tgt = data
    if len(ctl) == 1:
        return [z(tgt, controls=[(ctl[0], 1)])]
    return [h(tgt)] + cnx_gates(ctl, ancilla, tgt) + [h(tgt)]


def grovers(n_data: int) -> Circuit:
    """Grover search for the all-ones item with n_data-3 shared ancilla."""
    if n_data < 2:
        raise BadWidth("grovers needs at least 2 data qubits")
    n_anc = max(0, n_data - 3)
    data = list(range(n_data))
    anc = list(range(n_data, n_data + n_anc))
    gates: list[Gate] = [h(q) for q in data]
    for _ in range(grover_iterations(n_data)):
        gates += _mcz(data, anc)
        gates += [h(q) for q in data] + [x(q) for q in data]
        gates += _mcz(data, anc)
        gates += [x(q) for q in data] + [h(q) for q in data]
    gates += [measure(q) for q in data]
    return Circuit(n_data + n_anc, 2, gates)


@dataclass(frozen=True)
class BenchmarkSpec:
    name: str
    qubits: int
    toffolis: int
    two_qubit: int  # with every Toffoli counted as 8 CNOTs
    make: Callable[[], Circuit]


def toffoli_count(circuit: Circuit) -> int:
    return sum(1 for g in circuit.gates if is_toffoli(g))


def two_qubit_count(circuit: Circuit, per_toffoli: int = 8) -> int:
    """Two-qubit gates after Toffoli expansion; controlled phases count as one."""
    n = 0
    for g in circuit.gates:
        if is_toffoli(g):
            n += per_toffoli
        elif g.arity == 2:
            n += 1
        elif g.arity > 2:
            raise ValidationError(f"unexpected {g.arity}-qubit gate {g}")
    return n


BENCHMARKS = {
    "bv": BenchmarkSpec("bv", 20, 0, 19, lambda: bv(20)),
    "qaoa_complete": BenchmarkSpec("qaoa_complete", 10, 0, 90, lambda: qaoa_complete(10)),
    "qft_adder": BenchmarkSpec("qft_adder", 16, 0, 92, lambda: qft_adder(16)),
    "cuccaro_adder": BenchmarkSpec("cuccaro_adder", 20, 18, 190, lambda: cuccaro_adder(20)),
    "cnx_logancilla": BenchmarkSpec("cnx_logancilla", 19, 17, 136, lambda: cnx_logancilla(10)),
    "grovers": BenchmarkSpec("grovers", 9, 84, 672, lambda: grovers(6)),
}

GENERATORS = {
    "bv": bv,
    "qaoa_complete": qaoa_complete,
    "qft_adder": qft_adder,
    "cuccaro_adder": cuccaro_adder,
    "cnx_logancilla": cnx_logancilla,
    "grovers": grovers,
}
