import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quditforge.constructions import (
    C231, C241, AdderParams, CompressionScheme, block_adder, block_adder_plan, compress_register,
    compress_unit, decompress_register, draper_adder2, draper_ancilla_count, feasible,
    generalized_toffoli, incrementer, multi_controlled, plus_k_adder, plus_k_plan, qutrit_toffoli,
)
from quditforge.errors import BadControlCount, InfeasibleParams, UnknownScheme, UnsupportedWidth, ValidationError
from quditforge.ir import Kind, flip, metrics
from quditforge.statevec import classical_batch, classical_run

from oracles import classical_oracle, draper_ancilla_formula

# Rows of the published compression tables (inputs -> outputs).
TABLE_231 = {
    (0, 0, 0): (0, 0, 0), (0, 0, 1): (2, 2, 0), (0, 1, 0): (0, 1, 0), (0, 1, 1): (0, 2, 0),
    (1, 0, 0): (1, 0, 0), (1, 0, 1): (2, 1, 0), (1, 1, 0): (1, 1, 0), (1, 1, 1): (1, 2, 0),
}
TABLE_241 = {(0, 0): (0, 0), (0, 1): (2, 0), (1, 0): (1, 0), (1, 1): (3, 0)}


def bits(v, n):
    return [(v >> i) & 1 for i in range(n)]


def value(levels):
    return sum(int(b) << i for i, b in enumerate(levels))


def test_qutrit_toffoli_table():
    c = qutrit_toffoli()
    for a, b, t in itertools.product(range(2), repeat=3):
        assert classical_run(c, [a, b, t]) == (a, b, t ^ (a & b))
    first = c.with_gates(c.gates[:1])
    assert classical_run(first, [1, 1, 0])[1] == 2


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8])
def test_generalized_toffoli_exhaustive(n):
    c = generalized_toffoli(n)
    for v in range(2 ** (n + 1)):
        lv = bits(v, n + 1)
        out = classical_run(c, lv)
        assert out[:n] == tuple(lv[:n])
        assert out[n] == lv[n] ^ int(all(lv[:n]))


def test_generalized_toffoli_variants():
    c = generalized_toffoli(3, top_activation=0)
    for v in range(16):
        lv = bits(v, 4)
        want = lv[3] ^ int(lv[0] == 0 and lv[1] == 1 and lv[2] == 1)
        assert classical_run(c, lv)[3] == want
    c = generalized_toffoli(3, top_activation=2)
    assert classical_run(c, [2, 1, 1, 0])[3] == 1
    assert classical_run(c, [1, 1, 1, 0])[3] == 0
    zc = generalized_toffoli(4, target_op="Z")
    assert zc.gates[len(zc.gates) // 2].kind is Kind.Z
    with pytest.raises(BadControlCount):
        generalized_toffoli(0)
    with pytest.raises(ValidationError):
        generalized_toffoli(3, target_op="Y")


def test_multi_controlled_rejects_inner_level_two():
    with pytest.raises(ValidationError):
        multi_controlled([(0, 1), (1, 2), (2, 1)], flip(3))


def test_depth_steps_are_even():
    d = {n: metrics(generalized_toffoli(n)).depth for n in (31, 63, 127)}
    assert abs((d[127] - d[63]) - (d[63] - d[31])) <= 2


def test_tree_gate_count_linear():
    ratios = [metrics(generalized_toffoli(n)).n2 / n for n in (7, 15, 31, 63)]
    assert (max(ratios) - min(ratios)) / max(ratios) < 0.15


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 8])
def test_incrementer_exhaustive(n):
    c = incrementer(n)
    inputs = np.array([bits(v, n) for v in range(2 ** n)])
    out = classical_batch(c, inputs)
    assert [value(r) for r in out] == [(v + 1) % 2 ** n for v in range(2 ** n)]


def test_incrementer_wraps_and_random_16():
    assert classical_run(incrementer(8), [1] * 8) == (0,) * 8
    rng = np.random.default_rng(16)
    vals = rng.integers(0, 2 ** 16, 10000)
    out = classical_batch(incrementer(16), np.array([bits(int(v), 16) for v in vals]))
    assert all(value(r) == (int(v) + 1) % 2 ** 16 for r, v in zip(out, vals))
    with pytest.raises(UnsupportedWidth):
        incrementer(0)


def test_compression_tables():
    for sch, table in ((C231, TABLE_231), (C241, TABLE_241)):
        c = compress_unit(sch)
        assert c.radix == sch.y
        for k, v in table.items():
            assert classical_run(c, k) == v
    assert sum(1 for g in compress_unit(C241).gates if g.arity == 2) == 3


def test_scheme_checks():
    with pytest.raises(UnknownScheme):
        compress_unit("3-9-1")
    with pytest.raises(ValidationError):
        CompressionScheme("bad", x=2, y=3, z=1, m=2, n=1)


def test_compress_register_counts():
    _, freed = compress_register(range(9), C231)
    assert len(freed) == 3
    _, freed = compress_register(range(2), C231)
    assert freed == []


def test_compress_register_roundtrip_random_30():
    c, _ = compress_register(range(30), C231)
    back = decompress_register(range(30), C231)
    rng = np.random.default_rng(30)
    inputs = rng.integers(0, 2, (1000, 30))
    np.testing.assert_array_equal(classical_batch(c + back, inputs), inputs)


@pytest.mark.parametrize("width", [5, 12])
def test_compress_register_roundtrip_exhaustive(width):
    for sch in (C231, C241):
        c, _ = compress_register(range(width), sch)
        both = c + decompress_register(range(width), sch)
        inputs = np.array([bits(v, width) for v in range(2 ** width)])
        np.testing.assert_array_equal(classical_batch(both, inputs), inputs)


def test_draper_ancilla_formula():
    assert draper_ancilla_count(4) == 5
    for m in range(2, 17):
        assert draper_ancilla_count(m) == draper_ancilla_formula(m)


def _draper_io(n, a, b, cin=None):
    c, count = draper_adder2(n, carry_in=cin is not None, carry_out=True)
    lv = bits(a, n) + bits(b, n) + ([cin] if cin is not None else []) + [0] * count
    out = classical_run(c, lv)
    return out, c, count


def test_draper_examples():
    out, _, _ = _draper_io(4, 3, 5)
    assert value(out[4:8]) == 8 and out[8] == 0
    out, _, _ = _draper_io(4, 9, 9)
    assert value(out[4:8]) == 2 and out[8] == 1


def test_draper_exhaustive_3():
    for a, b in itertools.product(range(8), repeat=2):
        out, c, count = _draper_io(3, a, b)
        assert tuple(out[:3]) == tuple(bits(a, 3))
        assert value(out[3:6]) + (out[6] << 3) == a + b
        assert not any(out[7:])


def test_draper_carry_in_and_no_carry_out():
    for n in (1, 2, 4, 5):
        for cin_flag, cout_flag in itertools.product((False, True), repeat=2):
            c, count = draper_adder2(n, cin_flag, cout_flag)
            for a, b, ci in itertools.product(range(2 ** n), range(2 ** n), range(2 if cin_flag else 1)):
                lv = bits(a, n) + bits(b, n) + ([ci] if cin_flag else []) + [0] * count
                out = classical_run(c, lv)
                total = a + b + ci
                assert value(out[n:2 * n]) == total % 2 ** n
                rest = out[2 * n + int(cin_flag):]
                if cout_flag:
                    assert rest[0] == total >> n
                    rest = rest[1:]
                assert not any(rest)


def _check_plan(circ, checks, inputs):
    """Every checkpoint's wires read zero right before the gate it names."""
    state = np.array(inputs, dtype=np.int64)
    start = 0
    for cp in sorted(checks, key=lambda c: c.index):
        state = classical_batch(circ.with_gates(circ.gates[start:cp.index]), state)
        start = cp.index
        assert not state[:, list(cp.wires)].any()
    return classical_batch(circ.with_gates(circ.gates[start:]), state)


@pytest.mark.parametrize("params", [
    AdderParams(12, 4, "2-4-1"),
    AdderParams(14, 4, "2-4-1", carry_in=True, carry_out=True),
    AdderParams(30, 5, "2-3-1", carry_out=True),
])
def test_block_adder(params):
    circ, checks = block_adder_plan(params)
    n = params.n
    assert circ.width == 2 * n + params.carry_in + params.carry_out
    rng = np.random.default_rng(n)
    rows, want = [], []
    for _ in range(200):
        a, b = int(rng.integers(0, 2 ** n)), int(rng.integers(0, 2 ** n))
        ci = int(rng.integers(0, 2)) if params.carry_in else 0
        rows.append(bits(a, n) + bits(b, n) + ([ci] if params.carry_in else []) + ([0] if params.carry_out else []))
        want.append((a, a + b + ci))
    out = _check_plan(circ, checks, rows)
    for r, row, (a, total) in zip(out, rows, want):
        assert value(r[:n]) == a
        assert value(r[n:2 * n]) == total % 2 ** n
        if params.carry_out:
            assert r[-1] == total >> n
        if params.carry_in:
            assert r[2 * n] == row[2 * n]


def test_block_adder_infeasible():
    assert not feasible(AdderParams(29, 5, "2-3-1"))
    assert feasible(AdderParams(30, 5, "2-3-1"))
    assert feasible(AdderParams(12, 4, "2-4-1"))
    with pytest.raises(InfeasibleParams):
        block_adder(AdderParams(11, 4, "2-4-1"))


def test_plus_k_zero_and_one():
    params = AdderParams(60, 6, "2-4-1")
    rng = np.random.default_rng(60)
    vals = [int(v) for v in rng.integers(0, 2 ** 62, 100) % 2 ** 60]
    rows = [bits(v, 60) for v in vals]
    out = classical_batch(plus_k_adder(60, 0, params), rows)
    np.testing.assert_array_equal(out, rows)
    circ, checks = plus_k_plan(60, 1, params)
    out = _check_plan(circ, checks, rows)
    assert [value(r) for r in out] == [(v + 1) % 2 ** 60 for v in vals]
    with pytest.raises(ValidationError):
        plus_k_adder(60, 2 ** 60, params)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 7), st.data())
def test_draper_random_widths(n, data):
    a = data.draw(st.integers(0, 2 ** n - 1))
    b = data.draw(st.integers(0, 2 ** n - 1))
    out, c, count = _draper_io(n, a, b)
    assert value(out[n:2 * n]) + (out[2 * n] << n) == a + b
    assert classical_oracle(c, bits(a, n) + bits(b, n) + [0] * count) == out


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 9), st.data())
def test_binary_boundary(n, data):
    """Binary inputs always come back binary."""
    v = data.draw(st.integers(0, 2 ** (n + 1) - 1))
    for c in (generalized_toffoli(n), incrementer(n + 1)):
        assert max(classical_run(c, bits(v, n + 1))) <= 1


def test_generalized_toffoli_13_exhaustive():
    n = 13
    idx = np.arange(2 ** (n + 1))
    inputs = (idx[:, None] >> np.arange(n + 1)) & 1
    out = classical_batch(generalized_toffoli(n), inputs)
    np.testing.assert_array_equal(out[:, :n], inputs[:, :n])
    np.testing.assert_array_equal(out[:, n], inputs[:, n] ^ inputs[:, :n].all(1))


def _all_binary(width):
    idx = np.arange(2 ** width)
    return (idx[:, None] >> np.arange(width)) & 1


def test_binary_boundary_exhaustive_and_random():
    cases = [generalized_toffoli(n) for n in (4, 9, 13)] + [incrementer(n) for n in (6, 14)]
    for c in cases:
        assert classical_batch(c, _all_binary(c.width)).max() <= 1
    c, count = draper_adder2(4, carry_in=True)
    inputs = np.hstack([_all_binary(9), np.zeros((2 ** 9, count), dtype=np.int64)])
    assert classical_batch(c, inputs).max() <= 1
    rng = np.random.default_rng(14)
    for c in (block_adder(AdderParams(30, 5, "2-3-1")), plus_k_adder(60, 12345, AdderParams(60, 6, "2-4-1"))):
        assert classical_batch(c, rng.integers(0, 2, (1000, c.width))).max() <= 1
