"""Circuit generators: qutrit Toffoli, multi-controlled tree, incrementer,
compression and adders."""

from .adders import (
    AdderParams,
    Checkpoint,
    block_adder,
    block_adder_plan,
    draper_adder2,
    draper_ancilla_count,
    draper_gates,
    feasible,
    plus_k_adder,
    plus_k_plan,
)
from .compression import (
    C231,
    C241,
    CompressionScheme,
    compress_register,
    compress_unit,
    decompress_register,
    scheme,
)
from .toffoli import generalized_toffoli, incrementer, multi_controlled, qutrit_toffoli

__all__ = [
    "AdderParams", "Checkpoint", "block_adder", "block_adder_plan", "draper_adder2",
    "draper_ancilla_count", "draper_gates", "feasible", "plus_k_adder", "plus_k_plan",
    "C231", "C241", "CompressionScheme", "compress_register", "compress_unit",
    "decompress_register", "scheme", "generalized_toffoli", "incrementer",
    "multi_controlled", "qutrit_toffoli",
]
