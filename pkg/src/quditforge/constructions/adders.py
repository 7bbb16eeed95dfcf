"""Carry-lookahead addition and the block adders that need no spare wires.

Registers are little-endian: index 0 is the least significant bit. The
carry-lookahead network follows the log-depth in-place design of Draper,
Kutin, Rains and Svore (2006): generate/propagate bits, propagate tree,
carry rounds, sum, and an uncompute pass that reuses the network on the
complemented sum.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..errors import InfeasibleParams, ValidationError
from ..ir import Circuit, Gate, ccx, cx, swap, x
from .compression import CompressionScheme, decompress_gates, scheme, unit_gates


def _ilog2(v: int) -> int:
    return v.bit_length() - 1


def tree_ancilla_count(size: int) -> int:
    """Wires holding partial propagate products for a network over ``size`` positions."""
    return sum(size // 2 ** t - 1 for t in range(1, _ilog2(size))) if size > 0 else 0


def draper_ancilla_count(n: int, carry_in: bool = False, carry_out: bool = True) -> int:
    """Clean wires used by ``draper_gates``, counting the carry-out wire."""
    carries = n if carry_out else n - 1
    return carries + tree_ancilla_count(carries + int(carry_in))


def _tree_slots(size: int) -> list[tuple[int, int]]:
    return [(t, m) for t in range(1, _ilog2(size)) for m in range(1, size // 2 ** t)]


def _carry_rounds(size: int, zw: dict, p0: Sequence, tree: dict) -> list[Gate]:
    """Turn zw[j] = generate(j-1) into zw[j] = carry into position j, j = 1..size.

    ``p0[i]`` holds propagate(i) (position 0 is never read). ``tree`` maps
    (t, m) to a clean wire for the product of propagates over
    [2^t m, 2^t (m+1)).
    """
    if size < 2:
        return []

    def P(t, m):
        return p0[m] if t == 0 else tree[(t, m)]

    top = _ilog2(size)
    p_round = [ccx(P(t - 1, 2 * m), P(t - 1, 2 * m + 1), tree[(t, m)]) for t, m in _tree_slots(size)]
    out = list(p_round)
    for t in range(1, top + 1):
        for m in range(size // 2 ** t):
            out.append(ccx(zw[2 ** t * m + 2 ** (t - 1)], P(t - 1, 2 * m + 1), zw[2 ** t * (m + 1)]))
    t_c = 0
    while 3 * 2 ** (t_c + 1) <= 2 * size:
        t_c += 1
    for t in range(t_c, 0, -1):
        for m in range(1, (size - 2 ** (t - 1)) // 2 ** t + 1):
            out.append(ccx(zw[2 ** t * m], P(t - 1, 2 * m), zw[2 ** t * m + 2 ** (t - 1)]))
    out += list(reversed(p_round))
    return out


def draper_gates(
    b: Sequence[int],
    a: Sequence[int] | None = None,
    k_bits: Sequence[int] | None = None,
    cin: int | None = None,
    cout: int | None = None,
    ancilla: Sequence[int] = (),
) -> list[Gate]:
    """In-place B <- B + A (+ cin), carry-out XORed into ``cout`` if given.

    Pass either wires ``a`` or constant bits ``k_bits``. With constants the
    A-controlled gates collapse: a controlled flip becomes X (or nothing) and
    a Toffoli becomes a CNOT (or nothing). ``ancilla`` must be clean and
    excludes ``cout``; it is returned clean.
    """
    n = len(b)
    if (a is None) == (k_bits is None):
        raise ValidationError("give exactly one of a or k_bits")
    if a is not None and len(a) != n or k_bits is not None and len(k_bits) != n:
        raise ValidationError("register lengths differ")
    off = 1 if cin is not None else 0
    n_carries = n if cout is not None else n - 1
    size = n_carries + off
    need = draper_ancilla_count(n, cin is not None, cout is not None) - (cout is not None)
    if len(ancilla) < need:
        raise ValidationError(f"need {need} ancilla, got {len(ancilla)}")
    pool = iter(ancilla)
    zw = {}
    if off:
        zw[1] = cin
    for i in range(1, n_carries + 1):
        zw[i + off] = cout if (i == n and cout is not None) else next(pool)
    tree = {slot: next(pool) for slot in _tree_slots(size)}

    def cx_a(i, tgt):
        if a is not None:
            return [cx(a[i], tgt)]
        return [x(tgt)] if k_bits[i] else []

    def ccx_a(i, ctl, tgt):
        if a is not None:
            return [ccx(a[i], ctl, tgt)]
        return [cx(ctl, tgt)] if k_bits[i] else []

    out: list[Gate] = []
    for i in range(n_carries):
        out += ccx_a(i, b[i], zw[i + 1 + off])
    for i in range(n):
        out += cx_a(i, b[i])
    p0 = [None] * off + list(b)
    out += _carry_rounds(size, zw, p0, tree)
    for i in range(n):
        if i + off >= 1:
            out.append(cx(zw[i + off], b[i]))
    # carries of (a, not s, cin) equal those of (a, b, cin): run the network
    # backwards on the complemented low bits to clear every carry but cout
    low = n - 1
    if low >= 1:
        out += [x(b[i]) for i in range(low)]
        for i in range(low):
            out += cx_a(i, b[i])
        out += [g.inverse(2) for g in reversed(_carry_rounds(low + off, zw, p0, tree))]
        for i in range(low):
            out += cx_a(i, b[i])
        for i in range(low):
            out += ccx_a(i, b[i], zw[i + 1 + off])
        out += [x(b[i]) for i in range(low)]
    return out


def draper_adder2(n: int, carry_in: bool = False, carry_out: bool = True) -> tuple[Circuit, int]:
    """Qubit carry-lookahead adder; returns (circuit, ancilla count).

    Wires: A on 0..n-1, B on n..2n-1, then the carry-in wire if requested,
    then the ancilla block whose first wire is the carry-out when requested.
    """
    if n < 1:
        raise ValidationError("n must be >= 1")
    a = list(range(n))
    b = list(range(n, 2 * n))
    nxt = 2 * n
    cin = None
    if carry_in:
        cin, nxt = nxt, nxt + 1
    count = draper_ancilla_count(n, carry_in, carry_out)
    block = list(range(nxt, nxt + count))
    cout = block.pop(0) if carry_out else None
    gates = draper_gates(b, a=a, cin=cin, cout=cout, ancilla=block)
    return Circuit(nxt + count, 2, gates), count


# ------------------------------------------------------------ block adders

@dataclass(frozen=True)
class AdderParams:
    n: int
    c: int
    scheme: CompressionScheme | str = "2-3-1"
    carry_in: bool = False
    carry_out: bool = False


def feasible(params: AdderParams, constant: bool = False) -> bool:
    """Ancilla budget check with worst-case 2n/c per block.

    Compressing the other c-1 blocks must free enough wires for one block's
    adder plus the c-1 parked carries.
    """
    sch = scheme(params.scheme)
    n, c = params.n, params.c
    if c < 2 or n < c:
        return False
    data = n if constant else 2 * n
    freed = ((c - 1) * data) // (sch.m * c)
    return freed >= 2 * n / c + c - 1


@dataclass(frozen=True)
class Checkpoint:
    """Wires that must read 0 right before gate ``index`` runs."""

    index: int
    wires: tuple[int, ...]


class _Layout:
    """Tracks which wire holds each logical bit as groups compress and expand."""

    def __init__(self, sch: CompressionScheme, home: dict, blocks: list[list], reserved: set, width: int):
        self.sch = sch
        self.home = dict(home)
        self.loc = dict(home)
        self.blocks = blocks
        self.groups = [
            [blk[i:i + sch.m] for i in range(0, len(blk) - sch.m + 1, sch.m)] for blk in blocks
        ]
        self.compressed = [False] * len(blocks)
        self.free: list[int] = []
        self.gates: list[Gate] = []
        self.width = width
        self.reserved = reserved

    def take(self, count: int = 1) -> list[int]:
        if len(self.free) < count:
            raise InfeasibleParams(f"needed {count} free wires, only {len(self.free)} available")
        self.free.sort()
        got, self.free = self.free[:count], self.free[count:]
        return got

    def give(self, wires) -> None:
        self.free.extend(wires)

    def compress(self, k: int) -> None:
        if self.compressed[k]:
            return
        for grp in self.groups[k]:
            wires = [self.loc[bit] for bit in grp]
            self.gates += unit_gates(self.sch, wires)
            self.give([wires[-1]])
            del self.loc[grp[-1]]
        self.compressed[k] = True

    def expand(self, k: int) -> None:
        if not self.compressed[k]:
            return
        for grp in self.groups[k]:
            (w,) = self.take(1)
            wires = [self.loc[bit] for bit in grp[:-1]] + [w]
            self.gates += decompress_gates(self.sch, wires)
            self.loc[grp[-1]] = w
        self.compressed[k] = False

    def restore(self) -> None:
        """Swap every bit back onto its home wire."""
        where = {w: bit for bit, w in self.loc.items()}
        for bit, home in self.home.items():
            cur = self.loc[bit]
            if cur == home:
                continue
            other = where.get(home)
            self.gates.append(swap(cur, home))
            self.loc[bit], where[home] = home, bit
            if other is not None:
                self.loc[other], where[cur] = cur, other
            else:
                del where[cur]


def _partition(n: int, c: int) -> list[list[int]]:
    size = n // c
    blocks = [list(range(k * size, (k + 1) * size)) for k in range(c)]
    if n % c:
        blocks.append(list(range(c * size, n)))
    return blocks


def _block_plan(params: AdderParams, k_value: int | None) -> tuple[Circuit, list[Checkpoint]]:
    sch = scheme(params.scheme)
    n, c = params.n, params.c
    constant = k_value is not None
    if not feasible(params, constant):
        raise InfeasibleParams(f"n={n}, c={c} with {sch.name} does not leave enough ancilla")
    positions = _partition(n, c)
    if constant:
        home = {("b", i): i for i in range(n)}
        blocks = [[("b", i) for i in pos] for pos in positions]
        width = n
        g_cin = g_cout = None
        k_bits = [(k_value >> i) & 1 for i in range(n)]
    else:
        home = {("a", i): i for i in range(n)} | {("b", i): n + i for i in range(n)}
        blocks = [[bit for i in pos for bit in (("a", i), ("b", i))] for pos in positions]
        width = 2 * n
        g_cin = width if params.carry_in else None
        width += params.carry_in
        g_cout = width if params.carry_out else None
        width += params.carry_out
    lay = _Layout(sch, home, blocks, set(), width)
    checkpoints: list[Checkpoint] = []
    nb = len(positions)

    def adder(k, cin, cout, with_cout_wire):
        pos = positions[k]
        b = [lay.loc[("b", i)] for i in pos]
        a = None if constant else [lay.loc[("a", i)] for i in pos]
        kb = [k_bits[i] for i in pos] if constant else None
        need = draper_ancilla_count(len(pos), cin is not None, with_cout_wire) - with_cout_wire
        anc = lay.take(need)
        watch = tuple(anc) + ((cout,) if cout is not None and cout != g_cout else ())
        gates = draper_gates(b, a=a, k_bits=kb, cin=cin, cout=cout, ancilla=anc)
        return gates, anc, watch

    for k in range(nb):
        if k != 0:
            lay.compress(k)
    parked: dict[int, int] = {}
    for k in range(nb):
        if k:
            lay.compress(k - 1)
            lay.expand(k)
        cin = g_cin if k == 0 else parked[k - 1]
        if k < nb - 1:
            (parked[k],) = lay.take(1)
            cout = parked[k]
        else:
            cout = g_cout
        gates, anc, watch = adder(k, cin, cout, cout is not None)
        checkpoints.append(Checkpoint(len(lay.gates), watch))
        lay.gates += gates
        lay.give(anc)
    for k in range(nb - 2, -1, -1):
        lay.compress(k + 1)
        lay.expand(k)
        cin = g_cin if k == 0 else parked[k - 1]
        gates, anc, _ = adder(k, cin, parked[k], True)
        lay.gates += [g.inverse(sch.y) for g in reversed(gates)]
        lay.give(anc)
        gates, anc, watch = adder(k, cin, None, False)
        checkpoints.append(Checkpoint(len(lay.gates), watch + (parked[k],)))
        lay.gates += gates
        lay.give(anc)
        lay.give([parked.pop(k)])
    for k in range(nb):
        lay.expand(k)
    lay.restore()
    return Circuit(width, sch.y, lay.gates), checkpoints


def block_adder_plan(params: AdderParams) -> tuple[Circuit, list[Checkpoint]]:
    """Block adder plus the points where borrowed wires must be clean."""
    return _block_plan(params, None)


def block_adder(params: AdderParams) -> Circuit:
    """B <- A + B using only the 2n data wires (plus requested carry wires).

    Wires: A on 0..n-1, B on n..2n-1, then carry-in, then carry-out.
    """
    return _block_plan(params, None)[0]


def plus_k_plan(n: int, k: int, params: AdderParams) -> tuple[Circuit, list[Checkpoint]]:
    if params.n != n:
        raise ValidationError("params.n disagrees with n")
    if not 0 <= k < 2 ** n:
        raise ValidationError("constant out of range")
    return _block_plan(params, k)


def plus_k_adder(n: int, k: int, params: AdderParams) -> Circuit:
    """B <- B + k mod 2^n on n wires, B little-endian on 0..n-1."""
    return plus_k_plan(n, k, params)[0]
