"""Toffoli-aware routing and the decompose-first baseline.

Trios keeps each Toffoli whole while routing: the three qubits are gathered
into a connected trio, and only then is the gate expanded, using 6 CNOTs on
a triangle and 8 CNOTs on a line. The baseline expands every Toffoli first
and routes the resulting CNOTs one by one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from ..errors import DisconnectedQubits, TrioNotConnected, UnsupportedGate, ValidationError
from ..ir import Circuit, Control, Gate, Kind, ccx, cx, h, is_toffoli, schedule_moments, swap, t, tdg, x
from .devices import CouplingGraph, DeviceModel


# ------------------------------------------------------------------ unroll

def _zero_controls_to_one(g: Gate) -> tuple[list[Gate], Gate]:
    """Conjugate |0>-activated controls with X so every control activates on 1."""
    flips = [x(c.qudit) for c in g.controls if c.value == 0]
    fixed = Gate(g.kind, g.targets, tuple(Control(c.qudit, 1) for c in g.controls), g.params)
    return flips, fixed


def unroll_to_trios(circuit: Circuit) -> Circuit:
    """Reduce to 1- and 2-qubit gates plus Toffolis.

    Handles zero-activated controls, doubly-controlled Z and controlled swap.
    Gates with more than two controls are rejected.
    """
    if circuit.radix != 2:
        raise UnsupportedGate("routing works on qubit circuits only")
    out: list[Gate] = []
    for g in circuit.gates:
        if g.arity > 3 or len(g.controls) > 2:
            raise UnsupportedGate(f"{g.arity}-qubit gate {g} needs ancilla to unroll")
        flips, core = _zero_controls_to_one(g)
        out += flips
        if core.arity <= 2 or is_toffoli(core):
            out.append(core)
        elif core.kind is Kind.Z and len(core.controls) == 2:
            tq = core.targets[0]
            out += [h(tq), ccx(core.controls[0].qudit, core.controls[1].qudit, tq), h(tq)]
        elif core.kind is Kind.SWAP and len(core.controls) == 1:
            c = core.controls[0].qudit
            a, b = core.targets
            out += [cx(b, a), ccx(c, a, b), cx(b, a)]
        else:
            raise UnsupportedGate(f"cannot unroll {g}")
        out += flips
    return circuit.with_gates(out)


# ------------------------------------------------------- Toffoli expansions

def toffoli_6cnot(c0: int, c1: int, tq: int) -> list[Gate]:
    """Textbook 6-CNOT Toffoli; needs all three pairs coupled."""
    return [
        h(tq), cx(c1, tq), tdg(tq), cx(c0, tq), t(tq), cx(c1, tq), tdg(tq), cx(c0, tq),
        t(c1), t(tq), h(tq), cx(c0, c1), t(c0), tdg(c1), cx(c0, c1),
    ]


def _ccz_line(end0: int, mid: int, end1: int) -> list[Gate]:
    """Doubly-controlled Z using only CNOTs through ``mid``."""
    return [
        t(end0), t(mid), t(end1),
        cx(end0, mid), cx(mid, end1), cx(end0, mid), t(end1),
        cx(mid, end1), cx(end0, mid), tdg(mid), tdg(end1),
        cx(mid, end1), cx(end0, mid), tdg(end1), cx(mid, end1),
    ]


def toffoli_8cnot(c0: int, c1: int, tq: int, mid: int) -> list[Gate]:
    """8-CNOT Toffoli on a linear trio; ``mid`` is the node adjacent to both others.

    The Hadamards sit on whichever qubit is the target, so the middle role
    can be a control or the target.
    """
    ends = [q for q in (c0, c1, tq) if q != mid]
    return [h(tq)] + _ccz_line(ends[0], mid, ends[1]) + [h(tq)]


def swap_cnots(a: int, b: int) -> list[Gate]:
    return [cx(a, b), cx(b, a), cx(a, b)]


# ------------------------------------------------------------------ routing

@dataclass(frozen=True)
class RouteResult:
    circuit: Circuit  # on hardware nodes; SWAPs still symbolic
    initial: tuple[int, ...]  # program qubit -> node
    final: tuple[int, ...]
    swaps: int


class _Router:
    def __init__(self, graph: CouplingGraph, mapping: Sequence[int], weighted: bool):
        self.graph = graph
        self.weighted = weighted
        self.node_of = list(mapping)
        self.prog_at: dict[int, int] = {n: q for q, n in enumerate(self.node_of)}
        self.out: list[Gate] = []
        self.swaps = 0

    def path(self, a: int, b: int) -> list[int]:
        return self.graph.shortest_path(a, b, self.weighted)

    def do_swap(self, a: int, b: int) -> None:
        self.out.append(swap(a, b))
        self.swaps += 1
        qa, qb = self.prog_at.pop(a, None), self.prog_at.pop(b, None)
        if qa is not None:
            self.prog_at[b] = qa
            self.node_of[qa] = b
        if qb is not None:
            self.prog_at[a] = qb
            self.node_of[qb] = a

    def walk(self, path: list[int]) -> None:
        """Move the qubit at path[0] until it sits on path[-2]."""
        for k in range(len(path) - 2):
            self.do_swap(path[k], path[k + 1])

    def emit(self, g: Gate) -> None:
        self.out.append(g.remap(self.node_of))

    def pair(self, mover: int, anchor: int) -> None:
        a, b = self.node_of[mover], self.node_of[anchor]
        if not self.graph.has_edge(a, b):
            self.walk(self.path(a, b))

    def connected(self, nodes) -> bool:
        a, b, c = nodes
        e = self.graph.has_edge
        return sum((e(a, b), e(b, c), e(a, c))) >= 2

    def trio(self, qubits: Sequence[int]) -> None:
        if self.connected([self.node_of[q] for q in qubits]):
            return
        dist = self.graph.distances(self.weighted)
        nodes = [self.node_of[q] for q in qubits]
        center = min(nodes, key=lambda n: (sum(dist[n][o] for o in nodes), n))
        center_q = self.prog_at[center]
        first, second = [q for q in qubits if q != center_q]
        self.walk(self.path(self.node_of[first], center))
        if self.connected([self.node_of[q] for q in qubits]):
            return
        path = self.path(self.node_of[second], center)
        spot = self.node_of[first]
        if spot in path:
            # the first mover already occupies the way in: line up behind it
            path = path[:path.index(spot) + 1]
        self.walk(path)


def _check_mapping(circuit: Circuit, graph: CouplingGraph, mapping) -> tuple[int, ...]:
    if mapping is None:
        mapping = tuple(range(circuit.width))
    mapping = tuple(int(m) for m in mapping)
    if len(mapping) != circuit.width:
        raise ValidationError("mapping must cover every program qubit")
    if len(set(mapping)) != len(mapping) or any(not 0 <= m < graph.n_nodes for m in mapping):
        raise DisconnectedQubits("mapping is not an injection into the device nodes")
    return mapping


def greedy_mapping(circuit: Circuit, graph: CouplingGraph) -> tuple[int, ...]:
    """Place strongly interacting qubits close together (optional; not the default).

    Each 2-qubit gate adds 1 to its pair's weight and each Toffoli adds 2 to
    each of its three pairs, i.e. it counts as 6 CNOTs. The heaviest qubit
    goes on the highest-degree node, then qubits are placed one at a time on
    the free node with the least weighted distance to those already placed.
    """
    n = circuit.width
    if n > graph.n_nodes:
        raise DisconnectedQubits(f"{n} program qubits do not fit on {graph.n_nodes} nodes")
    w = [[0.0] * n for _ in range(n)]
    for g in circuit.gates:
        qs = g.qudits
        bump = 1.0 if len(qs) == 2 else 2.0
        if len(qs) in (2, 3):
            for i in range(len(qs)):
                for j in range(i + 1, len(qs)):
                    w[qs[i]][qs[j]] += bump
                    w[qs[j]][qs[i]] += bump
    dist = graph.distances()
    deg = [len(graph.neighbors(v)) for v in range(graph.n_nodes)]
    first = max(range(n), key=lambda q: (sum(w[q]), -q)) if n else None
    placed: dict[int, int] = {}
    if first is not None:
        placed[first] = max(range(graph.n_nodes), key=lambda v: (deg[v], -v))
    while len(placed) < n:
        q = max((q for q in range(n) if q not in placed),
                key=lambda q: (sum(w[q][p] for p in placed), sum(w[q]), -q))
        used = set(placed.values())
        placed[q] = min((v for v in range(graph.n_nodes) if v not in used),
                        key=lambda v: (sum(w[q][p] * dist[v][m] for p, m in placed.items()), -deg[v], v))
    return tuple(placed[q] for q in range(n))


def route(circuit: Circuit, graph: CouplingGraph, initial_mapping=None, noise_aware: bool = False) -> RouteResult:
    """Insert SWAPs so every 2-qubit gate is coupled and every Toffoli sits on a connected trio.

    Two-qubit gates move their first qubit (the control) toward the second.
    Toffolis gather at the qubit with the smallest distance sum to the
    other two; ties go to the lowest node index.
    """
    mapping = _check_mapping(circuit, graph, initial_mapping)
    r = _Router(graph, mapping, noise_aware and graph.edge_success is not None)
    for g in circuit.gates:
        qs = g.qudits
        if len(qs) == 2:
            r.pair(qs[0], qs[1])
        elif len(qs) == 3:
            r.trio(qs)
        elif len(qs) > 3:
            raise UnsupportedGate(f"cannot route {len(qs)}-qubit gate")
        r.emit(g)
    routed = Circuit(graph.n_nodes, 2, r.out)
    return RouteResult(routed, mapping, tuple(r.node_of), r.swaps)


def mapping_aware_decompose(routed: Circuit, graph: CouplingGraph, mapping=None) -> Circuit:
    """Expand SWAPs and Toffolis of a routed circuit into coupled CNOTs.

    ``mapping`` is accepted for symmetry with ``route``; the routed circuit
    is already on hardware nodes.
    """
    out: list[Gate] = []
    for g in routed.gates:
        if g.kind is Kind.SWAP and not g.controls:
            out += swap_cnots(*g.targets)
        elif g.arity == 3:
            if not is_toffoli(g):
                raise UnsupportedGate(f"only Toffolis may reach decomposition, got {g}")
            c0, c1 = (c.qudit for c in g.controls)
            tq = g.targets[0]
            e = graph.has_edge
            if e(c0, c1) and e(c1, tq) and e(c0, tq):
                out += toffoli_6cnot(c0, c1, tq)
                continue
            mids = [m for m in (c0, c1, tq) if all(e(m, o) for o in (c0, c1, tq) if o != m)]
            if not mids:
                raise TrioNotConnected(f"Toffoli on {c0},{c1},{tq} is not a connected trio")
            out += toffoli_8cnot(c0, c1, tq, mids[0])
        else:
            out.append(g)
    return routed.with_gates(out)


@dataclass(frozen=True)
class CompileResult:
    circuit: Circuit  # 1- and 2-qubit gates on hardware nodes
    initial: tuple[int, ...]
    final: tuple[int, ...]
    swaps: int
    pipeline: str


def trios_compile(circuit: Circuit, graph: CouplingGraph, initial_mapping=None, noise_aware: bool = False) -> CompileResult:
    routed = route(unroll_to_trios(circuit), graph, initial_mapping, noise_aware)
    out = mapping_aware_decompose(routed.circuit, graph)
    return CompileResult(out, routed.initial, routed.final, routed.swaps, "trios")


def expand_toffolis(circuit: Circuit) -> Circuit:
    out = []
    for g in circuit.gates:
        if is_toffoli(g):
            out += toffoli_6cnot(g.controls[0].qudit, g.controls[1].qudit, g.targets[0])
        else:
            out.append(g)
    return circuit.with_gates(out)


def baseline_compile(circuit: Circuit, graph: CouplingGraph, initial_mapping=None, noise_aware: bool = False) -> CompileResult:
    """Expand Toffolis to 6 CNOTs first, then route CNOT by CNOT."""
    routed = route(expand_toffolis(unroll_to_trios(circuit)), graph, initial_mapping, noise_aware)
    out = mapping_aware_decompose(routed.circuit, graph)
    return CompileResult(out, routed.initial, routed.final, routed.swaps, "baseline")


PIPELINES = {"trios": trios_compile, "baseline": baseline_compile}


def compile_circuit(circuit: Circuit, graph: CouplingGraph, pipeline: str = "trios",
                    initial_mapping=None, noise_aware: bool = False) -> CompileResult:
    try:
        fn = PIPELINES[pipeline]
    except KeyError:
        raise ValidationError(f"unknown pipeline {pipeline!r}") from None
    return fn(circuit, graph, initial_mapping, noise_aware)


# ------------------------------------------------------- checks and scoring

def count_two_qubit(circuit: Circuit) -> int:
    return sum(1 for g in circuit.gates if g.arity == 2)


def count_toffolis(circuit: Circuit) -> int:
    return sum(1 for g in circuit.gates if is_toffoli(g))


def validate_connectivity(circuit: Circuit, graph: CouplingGraph, mapping=None) -> list[str]:
    """Empty list when every multi-qubit gate acts on a coupled pair."""
    node = (lambda q: q) if mapping is None else (lambda q: mapping[q])
    bad = []
    for i, g in enumerate(circuit.gates):
        qs = [node(q) for q in g.qudits]
        if len(qs) >= 3:
            bad.append(f"gate {i}: arity {len(qs)} ({g})")
        elif len(qs) == 2 and not graph.has_edge(*qs):
            bad.append(f"gate {i}: nodes {qs[0]} and {qs[1]} not coupled ({g})")
    return bad


def scheduled_duration(circuit: Circuit, dt1: float, dt2: float) -> float:
    body = circuit.with_gates(g for g in circuit.gates if g.kind is not Kind.MEASURE)
    return sum(dt2 if m.long else dt1 for m in schedule_moments(body))


def estimate_success(circuit: Circuit, device: DeviceModel) -> float:
    """Chance that no gate fails times the coherence decay over the schedule."""
    n1 = sum(1 for g in circuit.gates if g.arity == 1 and g.kind is not Kind.MEASURE)
    n2 = count_two_qubit(circuit)
    span = scheduled_duration(circuit, device.dt1, device.dt2)
    p = (1 - device.e1) ** n1 * (1 - device.e2) ** n2 * math.exp(-span / device.t1 - span / device.t2)
    return min(1.0, max(0.0, p))


@dataclass(frozen=True)
class CompileReport:
    two_qubit_gates: int
    swaps_inserted: int
    depth: int
    duration: float
    estimated_success: float


def report(result: CompileResult, device: DeviceModel) -> CompileReport:
    body = result.circuit.with_gates(g for g in result.circuit.gates if g.kind is not Kind.MEASURE)
    return CompileReport(
        two_qubit_gates=count_two_qubit(result.circuit),
        swaps_inserted=result.swaps,
        depth=len(schedule_moments(body)),
        duration=scheduled_duration(result.circuit, device.dt1, device.dt2),
        estimated_success=estimate_success(result.circuit, device),
    )


# ------------------------------------------------------ semantic comparison

def embed_levels(levels, mapping: Sequence[int], n_nodes: int) -> list[int]:
    hw = [0] * n_nodes
    for q, lv in enumerate(levels):
        hw[mapping[q]] = int(lv)
    return hw


def compiled_output(result: CompileResult, levels, tol: float = 1e-9) -> dict[tuple, complex]:
    """Program-order output amplitudes of a compiled circuit for a basis input.

    Nodes that hold no program qubit must come back to |0>; anything else
    raises, since it means the compiled circuit leaked into spare nodes.
    """
    from ..statevec import sparse_run

    hw_in = embed_levels(levels, result.initial, result.circuit.width)
    used = set(result.final)
    out: dict[tuple, complex] = {}
    for row, amp in sparse_run(result.circuit, hw_in, tol).items():
        if any(row[n] for n in range(len(row)) if n not in used):
            raise ValidationError("compiled circuit disturbed an unused node")
        key = tuple(row[n] for n in result.final)
        out[key] = out.get(key, 0) + amp
    return out
