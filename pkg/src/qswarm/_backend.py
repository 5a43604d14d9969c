"""Selection between the compiled core and the pure-Python engine.

The compiled extension (qswarm._core, built from Cython) implements the
hot loops: the swarm iteration, the deviate sampler, and the built-in
objectives.  Importing it is optional; when it is missing, or when the
environment variable QSWARM_BACKEND is set to "python", every entry point
falls back to the pure-Python implementations, which produce bit-identical
results.

QSWARM_BACKEND values:
    "compiled"  require the extension, raise if it cannot be imported
    "python"    ignore the extension even if present
    unset/auto  use the extension when importable, else pure Python
"""

from __future__ import annotations

import os

try:
    from . import _core as _core_module
except ImportError:
    _core_module = None

# Kernel codes for objectives the compiled core evaluates natively.  The
# pure-Python engine accepts arbitrary callables; the compiled one only
# these.  Codes are part of the Python<->C interface, do not renumber.
KERNEL_CODES = {
    "zero": 0,
    "sphere": 1,
    "griewank": 2,
    "rastrigin": 3,
    "ackley": 4,
}


def _env_choice() -> str:
    value = os.environ.get("QSWARM_BACKEND", "").strip().lower()
    if value in ("", "auto"):
        return "auto"
    if value in ("compiled", "python"):
        return value
    raise ValueError(
        f"QSWARM_BACKEND must be 'compiled', 'python', or 'auto', got {value!r}"
    )


def compiled_available() -> bool:
    """True when the extension module imported successfully."""
    return _core_module is not None


def compiled_active() -> bool:
    """True when dispatch will actually use the extension."""
    choice = _env_choice()
    if choice == "python":
        return False
    if choice == "compiled":
        if _core_module is None:
            raise RuntimeError(
                "QSWARM_BACKEND=compiled but the qswarm._core extension is "
                "not importable; rebuild the package or unset the variable"
            )
        return True
    return _core_module is not None


def core():
    """The extension module; raises if it is unavailable."""
    if _core_module is None:
        raise RuntimeError("qswarm._core extension is not available")
    return _core_module


def backend_name() -> str:
    """Human-readable name of the engine dispatch will use."""
    return "compiled" if compiled_active() else "python"
