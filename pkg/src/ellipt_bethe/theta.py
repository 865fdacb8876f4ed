"""Jacobi theta functions with lattice argument reduction.

Conventions: ``q = exp(i pi tau)`` and

    theta_1(u|tau) = -i sum_k (-1)^k q^{(k+1/2)^2} exp(i pi (2k+1) u)

with theta_2, theta_3, theta_4 obtained from theta_1 by half-period shifts.
The index is taken modulo 4, so ``theta(5, ...)`` is theta_1.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import PoleError, ThetaDomainError, ThetaRangeError

MIN_IMAG_TAU = 0.05
_MAX_EXPONENT = 700.0


@dataclass(frozen=True)
class ModularParam:
    """Modular parameter ``tau`` in the upper half-plane (``Im tau >= 0.05``)."""

    tau: complex

    def __post_init__(self):
        tau = complex(self.tau)
        if not (math.isfinite(tau.real) and math.isfinite(tau.imag)):
            raise ThetaDomainError(f"non-finite tau {tau!r}")
        if tau.imag < MIN_IMAG_TAU:
            raise ThetaDomainError(f"Im(tau) = {tau.imag} below {MIN_IMAG_TAU}")
        object.__setattr__(self, "tau", tau)

    @property
    def nome(self) -> complex:
        return cmath.exp(1j * math.pi * self.tau)

    def scaled(self, factor: float) -> "ModularParam":
        """Modular parameter ``factor * tau`` (used for the 2tau and Q tau/2 thetas)."""
        return ModularParam(factor * self.tau)


def as_modular(tau) -> ModularParam:
    if isinstance(tau, ModularParam):
        return tau
    return ModularParam(complex(tau))


def _evaluate(a: int, u, tau, deriv: bool):
    mp = tau if isinstance(tau, ModularParam) else as_modular(tau)
    a = (int(a) - 1) % 4 + 1
    if isinstance(u, (complex, float, int, np.number)):
        u = complex(u)
        if not (math.isfinite(u.real) and math.isfinite(u.imag)):
            raise ThetaDomainError("non-finite theta argument")
        logpref, val = _kernels.theta_scalar(a, u, mp.tau, deriv)
        if logpref.real > _MAX_EXPONENT:
            raise ThetaRangeError(logpref.real)
        return cmath.exp(logpref) * val
    scalar = np.ndim(u) == 0
    arr = np.asarray(u, dtype=np.complex128)
    if not np.all(np.isfinite(arr)):
        raise ThetaDomainError("non-finite theta argument")
    logpref, val = _kernels.theta_parts(a, np.atleast_1d(arr), mp.tau, deriv)
    worst = float(np.max(logpref.real))
    if worst > _MAX_EXPONENT:
        raise ThetaRangeError(worst)
    out = np.exp(logpref) * val
    if scalar:
        return complex(out[0])
    return out.reshape(arr.shape)


def theta(a: int, u, tau) -> complex | np.ndarray:
    """Jacobi theta function theta_a(u|tau); vectorised over ``u``."""
    return _evaluate(a, u, tau, False)


def theta_prime(a: int, u, tau) -> complex | np.ndarray:
    """Derivative of theta_a(u|tau) with respect to ``u``."""
    return _evaluate(a, u, tau, True)


def theta1_deriv(u, tau) -> complex | np.ndarray:
    return _evaluate(1, u, tau, True)


def theta1_log_deriv(u, tau, pole_tol: float = 1e-14) -> complex:
    """theta_1'(u)/theta_1(u); raises :class:`PoleError` on the period lattice."""
    val = theta(1, u, tau)
    if abs(val) < pole_tol:
        raise PoleError("theta_1 log-derivative at a lattice point", u)
    return theta1_deriv(u, tau) / val


def reduce_argument(u: complex, tau) -> tuple[complex, complex, tuple[int, int]]:
    """Reduce ``u = u_red + m + n tau`` with ``Re u_red, Im u_red/Im tau`` in ``[-1/2, 1/2)``.

    Returns ``(u_red, prefactor, (m, n))`` such that
    ``theta_1(u) = prefactor * theta_1(u_red)``.
    """
    t = as_modular(tau).tau
    u = complex(u)
    n = math.floor(u.imag / t.imag + 0.5)
    w = u - n * t
    m = math.floor(w.real + 0.5)
    w -= m
    expo = 1j * math.pi * (m + n) - 1j * math.pi * n * n * t - 2j * math.pi * n * w
    if expo.real > _MAX_EXPONENT:
        raise ThetaRangeError(expo.real)
    return w, cmath.exp(expo), (m, n)


def kronecker_phi(u: complex, v: complex, tau) -> complex:
    """Elliptic Kronecker function theta_1'(0) theta_1(u+v) / (theta_1(u) theta_1(v))."""
    den = theta(1, u, tau) * theta(1, v, tau)
    if abs(den) < 1e-300:
        raise PoleError("Kronecker function at a lattice point", (u, v))
    return theta1_deriv(0.0, tau) * theta(1, u + v, tau) / den


def elliptic_cauchy_matrix(us: Sequence[complex], ws: Sequence[complex], lam: complex, tau) -> np.ndarray:
    """Matrix with entries theta_1(u_j - w_k + lam) / theta_1(u_j - w_k)."""
    us = np.asarray(us, dtype=complex)
    ws = np.asarray(ws, dtype=complex)
    diff = us[:, None] - ws[None, :]
    den = theta(1, diff, tau)
    if np.min(np.abs(den)) < 1e-14:
        raise PoleError("coinciding Cauchy arguments")
    return theta(1, diff + lam, tau) / den


def elliptic_cauchy_det(us: Sequence[complex], ws: Sequence[complex], lam: complex, tau) -> complex:
    """Closed-form determinant of :func:`elliptic_cauchy_matrix`.

    Equals theta_1(lam + sum(u - w)) / theta_1(lam) times theta_1(lam)^n times the
    ratio of Vandermonde-type theta products.
    """
    us = np.asarray(us, dtype=complex)
    ws = np.asarray(ws, dtype=complex)
    n = len(us)
    if len(ws) != n:
        raise ValueError("us and ws must have equal length")
    num = theta(1, lam + np.sum(us) - np.sum(ws), tau) * theta(1, lam, tau) ** (n - 1)
    for j in range(n):
        for k in range(j + 1, n):
            num *= theta(1, us[j] - us[k], tau) * theta(1, ws[k] - ws[j], tau)
    den = np.prod(theta(1, us[:, None] - ws[None, :], tau))
    if abs(den) < 1e-300:
        raise PoleError("coinciding Cauchy arguments")
    return complex(num / den)


def reduce_to_cell(v: complex, tau) -> complex:
    """Representative ``alpha + beta tau`` of ``v`` with ``alpha, beta`` in ``[0, 1)``."""
    t = as_modular(tau).tau
    v = complex(v)
    beta = v.imag / t.imag
    alpha = v.real - beta * t.real
    beta_r = beta - math.floor(beta)
    alpha_r = alpha - math.floor(alpha)
    # snap values within rounding of 1 back to 0 so the cell is half-open
    if beta_r > 1 - 1e-13:
        beta_r = 0.0
    if alpha_r > 1 - 1e-13:
        alpha_r = 0.0
    return alpha_r + beta_r * t


def lattice_distance(a: complex, b: complex, tau) -> float:
    """Distance between ``a`` and ``b`` modulo the period lattice ``Z + tau Z``."""
    t = as_modular(tau).tau
    d = complex(a) - complex(b)
    n = round(d.imag / t.imag)
    d -= n * t
    d -= round(d.real)
    return abs(d)
