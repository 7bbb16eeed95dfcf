"""Dense state-vector execution and the classical reversible simulator.

Basis indexing: qudit 0 is the most significant base-``radix`` digit, so the
amplitude array reshaped to ``(radix,) * width`` has one axis per qudit in
wire order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Mapping

import math

import numpy as np

from . import kernels
from .errors import DimensionMismatch, MeasureInIdealRun, NonClassicalGate, SizeOverflow, ValidationError
from .ir import CLASSICAL_KINDS, Circuit, Control, Gate, Kind

MAX_AMPLITUDES = 2 ** 26

_R2 = 1.0 / np.sqrt(2.0)
_DIAG = {
    Kind.T: np.exp(1j * np.pi / 4),
    Kind.TDG: np.exp(-1j * np.pi / 4),
    Kind.Z: -1.0,
}


@dataclass
class StateVector:
    radix: int
    width: int
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (self.radix ** self.width,):
            raise DimensionMismatch(
                f"{self.amplitudes.shape[0]} amplitudes for {self.width} qudits of radix {self.radix}"
            )

    @classmethod
    def basis(cls, radix: int, levels: Iterable[int]) -> "StateVector":
        levels = list(levels)
        amps = np.zeros(radix ** len(levels), dtype=np.complex128)
        amps[basis_index(levels, radix)] = 1.0
        return cls(radix, len(levels), amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> "StateVector":
        return StateVector(self.radix, self.width, self.amplitudes.copy())

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((self.radix,) * self.width)

    def to_json(self) -> list:
        return [[float(a.real), float(a.imag)] for a in self.amplitudes]


def basis_index(levels, radix: int) -> int:
    idx = 0
    for lv in levels:
        idx = idx * radix + int(lv)
    return idx


def basis_levels(index: int, width: int, radix: int) -> tuple[int, ...]:
    out = []
    for _ in range(width):
        index, r = divmod(index, radix)
        out.append(r)
    return tuple(reversed(out))


def check_size(width: int, radix: int, allow_large: bool = False) -> None:
    if not allow_large and radix ** width > MAX_AMPLITUDES:
        raise SizeOverflow(f"{radix}^{width} amplitudes exceeds the 2^26 limit")


# ---------------------------------------------------------------- gate action

def _level(ndim: int, axis: int, lv: int) -> tuple:
    sl = [slice(None)] * ndim
    sl[axis] = lv
    return tuple(sl)


def apply_inplace(tensor: np.ndarray, gate: Gate) -> None:
    """Apply ``gate`` to a state tensor of shape (radix,) * width in place.

    Amplitudes whose controls do not match are never written.
    """
    ndim = tensor.ndim
    sub = tensor
    if gate.controls:
        idx = [slice(None)] * ndim
        for c in gate.controls:
            idx[c.qudit] = c.value
        sub = tensor[tuple(idx)]
    ctl = sorted(c.qudit for c in gate.controls)

    def axis_of(q):
        return q - sum(1 for c in ctl if c < q)

    k = gate.kind
    a = axis_of(gate.targets[0])
    n = sub.ndim
    if k is Kind.FLIP:
        i, j = gate.params
        si, sj = _level(n, a, i), _level(n, a, j)
        tmp = sub[si].copy()
        sub[si] = sub[sj]
        sub[sj] = tmp
    elif k is Kind.INC:
        sub[...] = np.roll(sub, gate.params[0], axis=a)
    elif k is Kind.H:
        s0, s1 = _level(n, a, 0), _level(n, a, 1)
        x0 = sub[s0].copy()
        x1 = sub[s1].copy()
        sub[s0] = (x0 + x1) * _R2
        sub[s1] = (x0 - x1) * _R2
    elif k in _DIAG:
        sub[_level(n, a, 1)] *= _DIAG[k]
    elif k is Kind.PHASE:
        sub[_level(n, a, 1)] *= np.exp(1j * gate.params[0])
    elif k is Kind.SWAP:
        b = axis_of(gate.targets[1])
        sub[...] = np.swapaxes(sub, a, b).copy()
    else:
        raise MeasureInIdealRun(f"{k.value} is not unitary")


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    for q in gate.qudits:
        if q >= state.width:
            raise DimensionMismatch(f"gate touches qudit {q} of a {state.width}-qudit state")
    for c in gate.controls:
        if c.value >= state.radix:
            raise DimensionMismatch("control value exceeds radix")
    out = state.copy()
    apply_inplace(out.tensor(), gate)
    return out


def run_ideal(circuit: Circuit, state: StateVector) -> StateVector:
    if (state.width, state.radix) != (circuit.width, circuit.radix):
        raise DimensionMismatch("state and circuit shapes differ")
    out = state.copy()
    t = out.tensor()
    for g in circuit.gates:
        if g.kind in (Kind.MEASURE, Kind.RESET):
            raise MeasureInIdealRun(f"{g.kind.value} in ideal run")
        apply_inplace(t, g)
    return out


def random_state(width: int, radix: int, seed=None, allow_large: bool = False) -> StateVector:
    """Haar-random pure state from normalized i.i.d. complex Gaussians.

    ``seed`` may be an int, a SeedSequence or a numpy Generator.
    """
    check_size(width, radix, allow_large)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    size = radix ** width
    amps = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    amps /= np.linalg.norm(amps)
    return StateVector(radix, width, amps)


def fidelity(a: StateVector, b: StateVector) -> float:
    if a.amplitudes.shape != b.amplitudes.shape:
        raise DimensionMismatch("states differ in dimension")
    return float(min(1.0, abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2))


# ------------------------------------------------------ classical simulation

_OPCODE = {Kind.FLIP: 0, Kind.INC: 1, Kind.SWAP: 2}


@lru_cache(maxsize=32)
def compile_classical(circuit: Circuit) -> tuple[np.ndarray, np.ndarray]:
    """Lower a classical circuit to the integer tables the kernels consume."""
    ops = np.zeros((len(circuit.gates), 7), dtype=np.int64)
    ctrl = []
    for row, g in enumerate(circuit.gates):
        if g.kind not in CLASSICAL_KINDS:
            raise NonClassicalGate(f"{g.kind.value} is not a basis permutation")
        p = g.params + (0, 0)
        t1 = g.targets[1] if len(g.targets) > 1 else 0
        ops[row] = (_OPCODE[g.kind], g.targets[0], t1, p[0], p[1], len(ctrl), len(g.controls))
        ctrl.extend((c.qudit, c.value) for c in g.controls)
    ctrl_arr = np.array(ctrl, dtype=np.int64).reshape(-1, 2)
    return ops, np.ascontiguousarray(ctrl_arr)


def classical_batch(circuit: Circuit, inputs) -> np.ndarray:
    """Propagate many basis assignments at once; rows are inputs."""
    ops, ctrl = compile_classical(circuit)
    states = np.array(inputs, dtype=np.int64, ndmin=2, copy=True)
    if states.shape[1] != circuit.width:
        raise DimensionMismatch(f"inputs have {states.shape[1]} columns, circuit width {circuit.width}")
    return kernels.classical_batch(ops, ctrl, np.ascontiguousarray(states), circuit.radix)


def classical_run(circuit: Circuit, levels) -> tuple[int, ...]:
    return tuple(int(v) for v in classical_batch(circuit, [list(levels)])[0])


@dataclass(frozen=True)
class TruthTable:
    rows: Mapping[tuple, tuple]

    def __post_init__(self):
        outs = list(self.rows.values())
        if len(set(outs)) != len(outs):
            raise ValidationError("truth table is not injective")

    @classmethod
    def from_function(cls, domain: Iterable, fn: Callable) -> "TruthTable":
        return cls({tuple(x): tuple(fn(tuple(x))) for x in domain})


@dataclass(frozen=True)
class Counterexample:
    input: tuple
    expected: tuple
    actual: tuple


def verify_truth_table(circuit: Circuit, table: TruthTable) -> Counterexample | None:
    """Return None when every row matches, else the first mismatch."""
    keys = list(table.rows)
    if not keys:
        return None
    got = classical_batch(circuit, keys)
    want = np.array([table.rows[k] for k in keys], dtype=np.int64)
    bad = np.flatnonzero((got != want).any(axis=1))
    if bad.size == 0:
        return None
    i = int(bad[0])
    return Counterexample(keys[i], tuple(int(v) for v in want[i]), tuple(int(v) for v in got[i]))


# ---------------------------------------------------------- sparse simulation

def _merge_rows(rows, amps, d, tol):
    # sum amplitudes of repeated rows; pack rows into int64 keys when they fit
    if rows.shape[1] * math.log2(d) < 62:
        keys = rows @ (d ** np.arange(rows.shape[1] - 1, -1, -1, dtype=np.int64))
        _, first, inv = np.unique(keys, return_index=True, return_inverse=True)
        uniq = rows[first]
    else:
        uniq, inv = np.unique(rows, axis=0, return_inverse=True)
    acc = np.zeros(len(uniq), dtype=np.complex128)
    np.add.at(acc, inv.reshape(-1), amps)
    keep = np.abs(acc) > tol
    return uniq[keep], acc[keep]


# sparse_run hands over to a dense tensor once the support is this large
_DENSE_AT = 4096
_DENSE_MAX = 2 ** 22


def _is_cx(g: Gate, c: int, t: int) -> bool:
    return (g.kind is Kind.FLIP and g.params == (0, 1) and g.targets == (t,)
            and g.controls == (Control(c, 1),))


def _swap_pair(gates, i, radix):
    """Qudit pair exchanged by gates[i] (or a CX-CX-CX triple there), else None."""
    g = gates[i]
    if g.kind is Kind.SWAP and not g.controls:
        return g.targets, 1
    if radix == 2 and i + 2 < len(gates) and len(g.controls) == 1:
        a, b = g.controls[0].qudit, g.targets[0]
        if _is_cx(g, a, b) and _is_cx(gates[i + 1], b, a) and _is_cx(gates[i + 2], a, b):
            return (a, b), 3
    return None


def _dense_finish(rows, amps, gates, width, d, tol):
    tensor = np.zeros((d,) * width, dtype=np.complex128)
    tensor[tuple(rows.T)] = amps
    axis = list(range(width))  # axis[q] holds logical qudit q
    i = 0
    while i < len(gates):
        pair = _swap_pair(gates, i, d)
        if pair is not None:
            (a, b), used = pair
            axis[a], axis[b] = axis[b], axis[a]
            i += used
            continue
        g = gates[i]
        if g.kind is Kind.RESET:
            raise NonClassicalGate("reset in sparse run")
        apply_inplace(tensor, Gate(g.kind, tuple(axis[t] for t in g.targets),
                                   tuple(Control(axis[c.qudit], c.value) for c in g.controls), g.params))
        i += 1
    flat = np.transpose(tensor, axis).ravel()
    idx = np.flatnonzero(np.abs(flat) > tol)
    return np.stack(np.unravel_index(idx, tensor.shape), axis=1), flat[idx]


def sparse_run(circuit: Circuit, levels, tol: float = 1e-12) -> dict[tuple, complex]:
    """Simulate from a basis input keeping only nonzero amplitudes.

    Suited to circuits that are classical apart from short-lived local
    superpositions (decomposed Toffolis, QFT arithmetic on small registers).
    Measure gates are ignored. When the support grows past a few thousand
    rows and the register is small enough, the rest of the run is dense.
    """
    rows = np.array([list(levels)], dtype=np.int64)
    amps = np.ones(1, dtype=np.complex128)
    d = circuit.radix
    gates = [g for g in circuit.gates if g.kind is not Kind.MEASURE]
    for n, g in enumerate(gates):
        if len(rows) > _DENSE_AT and d ** circuit.width <= _DENSE_MAX:
            rows, amps = _dense_finish(rows, amps, gates[n:], circuit.width, d, tol)
            break
        if g.kind is Kind.RESET:
            raise NonClassicalGate("reset in sparse run")
        mask = np.ones(len(rows), dtype=bool)
        for c in g.controls:
            mask &= rows[:, c.qudit] == c.value
        t0 = g.targets[0]
        k = g.kind
        if k is Kind.FLIP:
            i, j = g.params
            col = rows[:, t0]
            hi, hj = mask & (col == i), mask & (col == j)
            col[hi], col[hj] = j, i
        elif k is Kind.INC:
            rows[mask, t0] = (rows[mask, t0] + g.params[0]) % d
        elif k is Kind.SWAP:
            t1 = g.targets[1]
            a = rows[mask, t0].copy()
            rows[mask, t0] = rows[mask, t1]
            rows[mask, t1] = a
        elif k in _DIAG or k is Kind.PHASE:
            ph = _DIAG[k] if k in _DIAG else np.exp(1j * g.params[0])
            amps[mask & (rows[:, t0] == 1)] *= ph
        elif k is Kind.H:
            hit = mask & (rows[:, t0] <= 1)
            src_rows, src_amps = rows[hit], amps[hit]
            lv = src_rows[:, t0]
            r0, r1 = src_rows.copy(), src_rows.copy()
            r0[:, t0] = 0
            r1[:, t0] = 1
            a0 = src_amps * _R2
            a1 = src_amps * _R2 * np.where(lv == 1, -1.0, 1.0)
            rows = np.concatenate([rows[~hit], r0, r1])
            amps = np.concatenate([amps[~hit], a0, a1])
            rows, amps = _merge_rows(rows, amps, d, tol)
        else:
            raise NonClassicalGate(f"{k.value} unsupported in sparse run")
    return {tuple(int(v) for v in r): complex(a) for r, a in zip(rows, amps)}
