"""Backend selection for the hot loops.

The compiled extension is used when it was built; otherwise the numpy
fallback is used. Setting ``QUDITFORGE_PURE=1`` forces the fallback.
"""

import os

from . import _pykernels

BACKENDS = {"python": _pykernels}

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None
else:
    BACKENDS["compiled"] = _ckernels

if _ckernels is not None and os.environ.get("QUDITFORGE_PURE", "") not in ("1", "true"):
    BACKEND = "compiled"
else:
    BACKEND = "python"

_active = BACKENDS[BACKEND]


def use(name: str) -> None:
    """Switch backend at runtime ("compiled" or "python")."""
    global BACKEND, _active
    _active = BACKENDS[name]
    BACKEND = name


def classical_batch(ops, ctrl, states, radix):
    return _active.classical_batch(ops, ctrl, states, radix)


def damp_idle(psi, width, radix, lam, uniforms):
    return _active.damp_idle(psi, width, radix, lam, uniforms)
