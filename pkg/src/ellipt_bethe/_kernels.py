"""Hot numeric kernels.

Theta series are evaluated after lattice reduction, so each kernel only sees
arguments in the strip ``|Im w| <= Im(tau)/2``.  A numba path is used when
numba is importable, unless ``ELLIPT_BETHE_DISABLE_NUMBA`` is set to a truthy
value, in which case the pure-numpy path is selected.
"""
from __future__ import annotations

import cmath
import functools
import math
import os

import numpy as np

_TRUTHY = {"1", "true", "yes", "on"}

# |q|^{(k+1/2)^2}-type tail bound; matches the 1e-18 truncation target
_LOG_TAIL = math.log(1e18)


def _numba_requested() -> bool:
    return os.environ.get("ELLIPT_BETHE_DISABLE_NUMBA", "").strip().lower() not in _TRUTHY


try:  # pragma: no cover - exercised implicitly
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False


@functools.lru_cache(maxsize=256)
def series_length(tau_imag: float) -> int:
    """Number of paired terms needed for the reduced theta series."""
    return int(math.ceil(math.sqrt(_LOG_TAIL / (math.pi * tau_imag) + 0.25))) + 1


def _shift_for(a: int, tau: complex):
    # theta_a(u) = exp(extra(u)) * theta_1(u + shift)
    if a == 1:
        return 0.0j, False, 0.0j
    if a == 2:
        return 0.5 + 0.0j, False, 0.0j
    if a == 3:
        return (tau + 1.0) / 2.0, True, 1j * math.pi * tau / 4.0
    return tau / 2.0, True, -0.5j * math.pi + 1j * math.pi * tau / 4.0


def theta_parts_numpy(a: int, u: np.ndarray, tau: complex, deriv: bool):
    """Return ``(log_prefactor, reduced_value)`` for theta_a or its derivative.

    The full value is ``exp(log_prefactor) * reduced_value``.
    """
    u = np.asarray(u, dtype=np.complex128)
    shift, lin, const = _shift_for(a, tau)
    w = u + shift
    n = np.floor(w.imag / tau.imag + 0.5)
    w1 = w - n * tau
    m = np.floor(w1.real + 0.5)
    wr = w1 - m
    logpref = 1j * math.pi * (m + n) - 1j * math.pi * n * n * tau - 2j * math.pi * n * wr
    if lin:
        logpref = logpref + const + 1j * math.pi * u
    kmax = series_length(tau.imag)
    k = np.arange(kmax + 1, dtype=np.float64)
    coef = 2.0 * (-1.0) ** k * np.exp(1j * math.pi * tau * (k + 0.5) ** 2)
    odd = 2.0 * k + 1.0
    phase = math.pi * np.multiply.outer(wr, odd)
    val = np.sin(phase) @ coef
    if not deriv:
        return logpref, val
    der = (np.cos(phase) * (math.pi * odd)) @ coef
    dlog = -2j * math.pi * n + (1j * math.pi if lin else 0.0)
    return logpref, der + dlog * val


def _theta_scalar(a, u, tau, deriv, kmax):
    # scalar twin of theta_parts_numpy; compiled by numba when available
    pi = math.pi
    if a == 1:
        shift = 0.0j
        lin = False
        const = 0.0j
    elif a == 2:
        shift = 0.5 + 0.0j
        lin = False
        const = 0.0j
    elif a == 3:
        shift = (tau + 1.0) / 2.0
        lin = True
        const = 1j * pi * tau / 4.0
    else:
        shift = tau / 2.0
        lin = True
        const = -0.5j * pi + 1j * pi * tau / 4.0
    w = u + shift
    n = math.floor(w.imag / tau.imag + 0.5)
    w1 = w - n * tau
    m = math.floor(w1.real + 0.5)
    wr = w1 - m
    lp = 1j * pi * (m + n) - 1j * pi * n * n * tau - 2j * pi * n * wr
    if lin:
        lp += const + 1j * pi * u
    s = 0.0j
    ds = 0.0j
    sgn = 2.0
    for k in range(kmax + 1):
        odd = 2.0 * k + 1.0
        c = sgn * cmath.exp(1j * pi * tau * (k + 0.5) ** 2)
        ph = pi * odd * wr
        s += c * cmath.sin(ph)
        if deriv:
            ds += c * cmath.cos(ph) * (pi * odd)
        sgn = -sgn
    if deriv:
        dl = -2j * pi * n
        if lin:
            dl += 1j * pi
        return lp, ds + dl * s
    return lp, s


def _theta_parts_loop(a, u, tau, deriv, kmax):
    size = u.shape[0]
    logpref = np.empty(size, dtype=np.complex128)
    out = np.empty(size, dtype=np.complex128)
    for i in range(size):
        lp, val = _theta_scalar_impl(a, u[i], tau, deriv, kmax)
        logpref[i] = lp
        out[i] = val
    return logpref, out


if HAVE_NUMBA:
    _theta_scalar_impl = numba.njit(cache=True)(_theta_scalar)
    _theta_parts_nb = numba.njit(cache=True)(_theta_parts_loop)
else:  # pragma: no cover
    _theta_scalar_impl = _theta_scalar
    _theta_parts_nb = None


def theta_parts_numba(a: int, u: np.ndarray, tau: complex, deriv: bool):
    u = np.ascontiguousarray(u, dtype=np.complex128).ravel()
    return _theta_parts_nb(a, u, complex(tau), deriv, series_length(tau.imag))


_USE_NUMBA = HAVE_NUMBA and _numba_requested()


def use_numba() -> bool:
    return _USE_NUMBA


def set_backend(name: str) -> None:
    """Switch between ``"numba"`` and ``"numpy"`` at runtime (the env flag sets the default)."""
    global _USE_NUMBA
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    _USE_NUMBA = name == "numba"


def theta_parts(a: int, u: np.ndarray, tau: complex, deriv: bool = False):
    """Dispatch to the numba or numpy kernel according to the env flag."""
    if _USE_NUMBA:
        flat = np.asarray(u, dtype=np.complex128)
        lp, val = theta_parts_numba(a, flat.ravel(), tau, deriv)
        return lp.reshape(flat.shape), val.reshape(flat.shape)
    return theta_parts_numpy(a, u, tau, deriv)


def theta_scalar(a: int, u: complex, tau: complex, deriv: bool = False):
    """Scalar fast path returning ``(log_prefactor, reduced_value)``."""
    kmax = series_length(tau.imag)
    if _USE_NUMBA:
        return _theta_scalar_impl(a, complex(u), complex(tau), deriv, kmax)
    return _theta_scalar(a, complex(u), complex(tau), deriv, kmax)
