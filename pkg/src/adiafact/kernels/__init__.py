"""Hot-path sweep kernels with a numba backend and a numpy fallback.

The Monte-Carlo sweeps (hundreds of samples x hundreds of steps) dominate
runtime; everything else in the package is small dense linear algebra. Two
interchangeable implementations live here:

  - ``_numba``: @njit(parallel=True) loops, selected by default when numba
    imports cleanly.
  - ``_numpy``: batched/vectorized numpy, always available.

Set the environment variable ``ADIAFACT_NO_NUMBA=1`` (any value other than
empty or "0") to force the numpy path, or call ``set_backend`` explicitly
(the benchmark harness does both in one process). If the numba backend
fails to import or compile, the dispatcher warns once and degrades to
numpy rather than erroring.
"""

from __future__ import annotations

import os
import warnings

import numpy as np

from ..errors import ConfigError

__all__ = [
    "DISABLE_ENV_VAR",
    "active_backend",
    "set_backend",
    "intrinsic_sweep",
    "trotter_plain_sweep",
    "trotter_pulse_sweep",
]

DISABLE_ENV_VAR = "ADIAFACT_NO_NUMBA"

_backend_name: str | None = None


def _env_disabled() -> bool:
    return os.environ.get(DISABLE_ENV_VAR, "").strip() not in ("", "0")


def active_backend() -> str:
    """Resolve (once) and report which backend calls will dispatch to."""
    global _backend_name
    if _backend_name is None:
        if _env_disabled():
            _backend_name = "numpy"
        else:
            try:
                from . import _numba  # noqa: F401
                _backend_name = "numba"
            except ImportError:
                _backend_name = "numpy"
    return _backend_name


def set_backend(name: str) -> None:
    """Force a backend by name ("numba" or "numpy"); overrides the env flag."""
    global _backend_name
    if name not in ("numba", "numpy"):
        raise ConfigError(f"unknown kernel backend {name!r}")
    if name == "numba":
        from . import _numba  # noqa: F401  (fail loudly, not at first call)
    _backend_name = name


def _implementation():
    if active_backend() == "numba":
        from . import _numba as impl
    else:
        from . import _numpy as impl
    return impl


def _dispatch(function_name: str, *args):
    global _backend_name
    impl = _implementation()
    try:
        return getattr(impl, function_name)(*args)
    except Exception:
        if active_backend() != "numba":
            raise
        warnings.warn(
            "numba kernel backend failed; falling back to numpy "
            f"(set {DISABLE_ENV_VAR}=1 to silence)",
            RuntimeWarning,
            stacklevel=3,
        )
        _backend_name = "numpy"
        from . import _numpy as impl
        return getattr(impl, function_name)(*args)


def _as_c_complex(array: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(array, dtype=np.complex128)


def _as_c_float(array: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(array, dtype=np.float64)


def intrinsic_sweep(h0: np.ndarray, hp: np.ndarray, psi0: np.ndarray,
                    s_values: np.ndarray, tau: float,
                    multipliers: np.ndarray, projectors: np.ndarray) -> np.ndarray:
    """Per-sample exact step evolution under noise-scaled transverse field.

    Returns (samples, L) ground-subspace fidelities; see the backend
    modules for the shared conventions.
    """
    return _dispatch(
        "intrinsic_sweep",
        _as_c_float(h0), _as_c_float(hp), _as_c_complex(psi0),
        _as_c_float(s_values), float(tau),
        _as_c_float(multipliers), _as_c_complex(projectors),
    )


def trotter_plain_sweep(hp_diag: np.ndarray, psi0: np.ndarray,
                        s_values: np.ndarray, tau: float,
                        multipliers: np.ndarray, projectors: np.ndarray,
                        qubit_count: int) -> np.ndarray:
    """First-order split sweep; (samples, L, 2) sub-record fidelities."""
    return _dispatch(
        "trotter_plain_sweep",
        _as_c_float(hp_diag), _as_c_complex(psi0),
        _as_c_float(s_values), float(tau),
        _as_c_float(multipliers), _as_c_complex(projectors), int(qubit_count),
    )


def trotter_pulse_sweep(hp_diag: np.ndarray, psi0: np.ndarray,
                        s_values: np.ndarray, tau: float,
                        multipliers: np.ndarray, projectors: np.ndarray,
                        qubit_count: int) -> np.ndarray:
    """Hard-pulse compiled sweep; (samples, L, 4) sub-record fidelities."""
    return _dispatch(
        "trotter_pulse_sweep",
        _as_c_float(hp_diag), _as_c_complex(psi0),
        _as_c_float(s_values), float(tau),
        _as_c_float(multipliers), _as_c_complex(projectors), int(qubit_count),
    )
