"""Toffoli-aware compilation onto qubit coupling graphs."""

from .compiler import (
    CompileReport, CompileResult, PIPELINES, RouteResult, baseline_compile, compile_circuit,
    count_toffolis, count_two_qubit, estimate_success, expand_toffolis, greedy_mapping, mapping_aware_decompose,
    report, route, scheduled_duration, swap_cnots, toffoli_6cnot, toffoli_8cnot, trios_compile,
    unroll_to_trios, validate_connectivity,
)
from .devices import (
    JOHANNESBURG_EDGES, TOPOLOGIES, CouplingGraph, DeviceModel, default_device, load_device,
    save_device, topology,
)
