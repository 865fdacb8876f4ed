"""Intertwining vectors, gauge matrices, gauged monodromy, vacua and Bethe vectors.

Right Bethe vectors are built as Fourier sums over ``l in Z_Q`` of strings of
gauged ``B`` operators acting on gauged vacua; left vectors use the barred
``C`` operators acting on dual vacua.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import kron_all
from .errors import PoleError, SingularGaugeError
from .theta import ModularParam, as_modular, theta
from .vertex import ModelParams, monodromy, symmetry_operator

MU_TOL = 1e-12
GENERIC_TOL = 1e-6


@dataclass(frozen=True)
class GaugeParams:
    """Auxiliary gauge pair ``(s, t)`` bound to a given ``eta`` and ``tau``."""

    s: complex
    t: complex
    eta: float
    tau: ModularParam

    def s_k(self, k: int) -> complex:
        return self.s + k * self.eta

    def t_k(self, k: int) -> complex:
        return self.t + k * self.eta

    def tau_k(self, k: int) -> complex:
        return (self.s + self.t) / 2 + k * self.eta

    def gamma(self, k: int) -> complex:
        tk = self.tau_k(k)
        t2 = self.tau.scaled(2.0)
        den = theta(2, tk, t2) * theta(3, tk, t2)
        if abs(den) < 1e-300:
            raise SingularGaugeError(f"gamma_{k} is infinite")
        return 1.0 / den

    @property
    def x(self) -> complex:
        return (self.s + self.t + 1) / 2

    @property
    def y(self) -> complex:
        return (self.s - self.t) / 2

    def shifted(self, ds: complex = 0.0, dt: complex = 0.0) -> "GaugeParams":
        return GaugeParams(self.s + ds, self.t + dt, self.eta, self.tau)

    @classmethod
    def create(cls, mp: ModelParams, s: complex, t: complex, check: bool = True) -> "GaugeParams":
        gp = cls(complex(s), complex(t), mp.eta, mp.tau)
        if check:
            problem = gp.genericity_problem(mp.Q)
            if problem:
                raise SingularGaugeError(problem)
        return gp

    def genericity_problem(self, Q: int, roots: Sequence[complex] = ()) -> str | None:
        """Describe the first near-singular quantity, or ``None`` if generic."""
        t2 = self.tau.scaled(2.0)
        for k in range(-Q, Q + 1):
            tk = self.tau_k(k)
            if abs(theta(2, tk, t2) * theta(3, tk, t2)) < GENERIC_TOL:
                return f"theta_2 theta_3(tau_{k}|2tau) vanishes"
            if abs(theta(2, tk, self.tau)) < GENERIC_TOL:
                return f"theta_2(tau_{k}) vanishes"
        for u in roots:
            if abs(gauge_determinant(u, self)) < GENERIC_TOL:
                return f"gauge determinant vanishes at {u}"
        qh = Q / 2 if Q % 2 == 0 else Q
        if abs(theta(1, qh * self.x, self.tau.scaled(qh))) < GENERIC_TOL:
            return "x sits on a zero of the fixing theta function"
        return None

    @classmethod
    def default(cls, mp: ModelParams, seed: int = 0, roots: Sequence[complex] = ()) -> "GaugeParams":
        """Deterministic generic gauge pair, redrawn from a seeded generator if needed."""
        im = mp.tau.tau.imag
        s, t = 0.17 + 0.31j * im, -0.29 + 0.13j * im
        rng = np.random.default_rng(seed)
        for _ in range(200):
            gp = cls(s, t, mp.eta, mp.tau)
            if gp.genericity_problem(mp.Q, roots) is None:
                return gp
            s = complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5) * im)
            t = complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5) * im)
        raise SingularGaugeError("could not draw generic gauge parameters")


def intertwining_vector(sarg: complex, perp: bool, tau) -> np.ndarray:
    """phi(s) = (theta_1(s|2tau), theta_4(s|2tau)); ``perp`` gives the covector (-theta_4, theta_1)."""
    t2 = as_modular(tau).scaled(2.0)
    a, b = theta(1, sarg, t2), theta(4, sarg, t2)
    if perp:
        return np.array([-b, a], dtype=complex)
    return np.array([a, b], dtype=complex)


def irf_weight(k: int, kp: int, l: int, kpp: int, u: complex, gp: GaugeParams) -> complex:
    """Face weight W[k k'; l k''](u); zero unless all adjacent heights differ by one."""
    if not (abs(k - kp) == abs(kp - kpp) == abs(l - kpp) == abs(l - k) == 1):
        return 0.0j
    eta, tau = gp.eta, gp.tau
    pm = kp - k
    if l == kp and kpp == k + 2 * pm:
        return theta(1, u + eta, tau)
    if l == kp and kpp == k:
        return theta(1, eta, tau) * theta(2, gp.s + k * eta - pm * u, tau) / theta(2, gp.s + k * eta, tau)
    if l == k - pm and kpp == k:
        return theta(1, u, tau) * theta(2, gp.s + (k + pm) * eta, tau) / theta(2, gp.s + k * eta, tau)
    return 0.0j


def face_vector(k: int, kp: int, u: complex, gp: GaugeParams) -> np.ndarray:
    """Intertwining vector attached to the edge k -> k' (|k - k'| = 1)."""
    if kp == k + 1:
        return intertwining_vector(gp.s - u + k * gp.eta + gp.eta / 2, False, gp.tau)
    if kp == k - 1:
        return intertwining_vector(gp.s + u + kp * gp.eta + gp.eta / 2, False, gp.tau)
    raise ValueError("heights must differ by one")


def gauge_determinant(u: complex, gp: GaugeParams) -> complex:
    """mu(u) = 2 theta_1(y+u|2tau) theta_4(y+u|2tau) / (theta_2(0|2tau) theta_3(0|2tau))."""
    t2 = gp.tau.scaled(2.0)
    z = gp.y + u
    return 2.0 * theta(1, z, t2) * theta(4, z, t2) / (theta(2, 0.0, t2) * theta(3, 0.0, t2))


def gauge_matrix(k: int, u: complex, gp: GaugeParams, barred: bool = False):
    """Return ``(M, Minv, mu)`` for M_k(u) (or its barred variant) and det = mu(u)."""
    t2 = gp.tau.scaled(2.0)
    g = gp.gamma(k)
    sk, tk = gp.s_k(k) + u, gp.t_k(k) - u
    a1, a4 = theta(1, sk, t2), theta(4, sk, t2)
    b1, b4 = theta(1, tk, t2), theta(4, tk, t2)
    mu = gauge_determinant(u, gp)
    if abs(mu) < MU_TOL:
        raise SingularGaugeError(f"gauge matrix singular at u={u}")
    if barred:
        M = np.array([[g * a1, b1], [g * a4, b4]], dtype=complex)
        Minv = np.array([[b4, -b1], [-g * a4, g * a1]], dtype=complex) / mu
    else:
        M = np.array([[a1, g * b1], [a4, g * b4]], dtype=complex)
        Minv = np.array([[g * b4, -g * b1], [-a4, a1]], dtype=complex) / mu
    return M, Minv, mu


@dataclass(frozen=True)
class BetheState:
    """Fourier index ``nu`` (mod Q) and Bethe roots reduced to the fundamental cell.

    ``sumrule_ints = (nu1, nu3)`` with ``nu3 = -n - nu_exact`` where ``nu_exact`` is
    the integer fixed by the sum rule for the stored root representatives.
    """

    nu: int
    roots: tuple
    side: str = "right"
    onshell: bool = False
    residuals: tuple = ()
    sumrule_ints: tuple | None = None

    @property
    def n(self) -> int:
        return len(self.roots)

    @property
    def nu_exact(self) -> int | None:
        if self.sumrule_ints is None:
            return None
        return -self.n - self.sumrule_ints[1]


@dataclass(frozen=True)
class GaugedMonodromy:
    """Entries of M_k^{-1} T M_l; barred entries follow from gamma factors."""

    k: int
    l: int
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    gamma_k: complex
    gamma_l: complex

    @property
    def A_bar(self):
        return self.gamma_l / self.gamma_k * self.A

    @property
    def B_bar(self):
        return self.B / (self.gamma_k * self.gamma_l)

    @property
    def C_bar(self):
        return self.gamma_k * self.gamma_l * self.C

    @property
    def D_bar(self):
        return self.gamma_k / self.gamma_l * self.D


def gauged_monodromy(k: int, l: int, u: complex, mp: ModelParams, gp: GaugeParams,
                     T: np.ndarray | None = None) -> GaugedMonodromy:
    """T_{k,l}(u) = M_k^{-1}(u) T(u) M_l(u); pass ``T`` to reuse a monodromy."""
    if T is None:
        T = monodromy(u, mp)
    _, Minv, _ = gauge_matrix(k, u, gp)
    Ml, _, _ = gauge_matrix(l, u, gp)
    G = np.einsum("ac,cdij,db->abij", Minv, T, Ml)
    return GaugedMonodromy(k, l, G[0, 0], G[0, 1], G[1, 0], G[1, 1], gp.gamma(k), gp.gamma(l))


def vacuum_vector(l: int, side: str, mp: ModelParams, gp: GaugeParams) -> np.ndarray:
    """Right |Omega^l> = (x)_k phi(s_{k+l-1}+xi_k); left <Omega-bar^l| = (x)_k phi-perp(t_{k+l}-xi_k)."""
    if side == "right":
        return kron_all([intertwining_vector(gp.s_k(k + l - 1) + x, False, gp.tau)
                         for k, x in enumerate(mp.xi, start=1)])
    if side == "left":
        return kron_all([intertwining_vector(gp.t_k(k + l) - x, True, gp.tau)
                         for k, x in enumerate(mp.xi, start=1)])
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def _component(l: int, params, side, mp, gp, monos):
    n = len(params)
    vec = vacuum_vector(l - n, side, mp, gp)
    for j in range(n, 0, -1):
        G = gauged_monodromy(l - j, l + j, params[j - 1], mp, gp, T=monos[j - 1])
        if side == "right":
            vec = G.B @ vec
        else:
            vec = vec @ G.C_bar
    return vec


def bethe_vector_component(l: int, params: Sequence[complex], side: str, mp: ModelParams,
                           gp: GaugeParams) -> np.ndarray:
    """Single Fourier component |Psi^l> (right) or <Psi^l| (left)."""
    params = [complex(p) for p in params]
    monos = [monodromy(p, mp) for p in params]
    return _component(l, params, side, mp, gp, monos)


def bethe_vector(nu: int, params: Sequence[complex], side: str, mp: ModelParams,
                 gp: GaugeParams) -> np.ndarray:
    """Fourier sum over l in Z_Q of the gauged Bethe components.

    The right vector uses phases exp(-2 pi i l P nu / Q), the left one exp(+2 pi i l P nu / Q).
    Vectors are not normalised; pairings between left and right vectors are bilinear.
    """
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    params = [complex(p) for p in params]
    if len(params) != mp.n:
        raise ValueError(f"expected {mp.n} parameters, got {len(params)}")
    monos = [monodromy(p, mp) for p in params]
    sign = -1.0 if side == "right" else 1.0
    out = np.zeros(mp.dim, dtype=complex)
    for l in range(mp.Q):
        phase = cmath.exp(sign * 2j * math.pi * l * mp.P * nu / mp.Q)
        out += phase * _component(l, params, side, mp, gp, monos)
    return out


def vacuum_eigenvalues(u: complex, mp: ModelParams) -> tuple[complex, complex]:
    """a(u) = prod theta_1(u - xi + eta), d(u) = prod theta_1(u - xi)."""
    a = d = 1.0 + 0.0j
    for x in mp.xi:
        a *= theta(1, u - x + mp.eta, mp.tau)
        d *= theta(1, u - x, mp.tau)
    return a, d


def transfer_eigenvalue(nu: int, u: complex, roots: Sequence[complex], mp: ModelParams,
                        pole_tol: float = 1e-12, limit_step: float = 1e-6) -> complex:
    """T_nu(u; v) = e^{i pi eta nu} a(u) prod f(v, u) + e^{-i pi eta nu} d(u) prod f(u, v).

    Near a root the value is taken as a symmetric limit when the residue
    cancels; otherwise :class:`PoleError` is raised.
    """
    roots = [complex(v) for v in roots]
    near = [v for v in roots if abs(theta(1, u - v, mp.tau)) < pole_tol]
    if near:
        h = limit_step
        plus = _eigen_raw(nu, u + h, roots, mp)
        minus = _eigen_raw(nu, u - h, roots, mp)
        if abs(plus - minus) * h > 1e-6 * max(1.0, abs(plus + minus)):
            raise PoleError("transfer eigenvalue has a pole at a root", u)
        return (plus + minus) / 2
    return _eigen_raw(nu, u, roots, mp)


def _eigen_raw(nu, u, roots, mp):
    eta, tau = mp.eta, mp.tau
    a, d = vacuum_eigenvalues(u, mp)
    fa = fd = 1.0 + 0.0j
    for v in roots:
        den = theta(1, u - v, tau)
        fa *= theta(1, u - v - eta, tau) / den
        fd *= theta(1, u - v + eta, tau) / den
    return cmath.exp(1j * math.pi * eta * nu) * a * fa + cmath.exp(-1j * math.pi * eta * nu) * d * fd


def sigma_sum(params: Sequence[complex], mp: ModelParams) -> complex:
    """sum(v) - sum(xi)/2 + n eta / 2."""
    return complex(sum(params)) - sum(mp.xi) / 2 + len(params) * mp.eta / 2


def c_function(u: complex, mp: ModelParams) -> complex:
    """c(u) = N (2u + eta + tau) - 2 sum(xi)."""
    return mp.N * (2 * u + mp.eta + mp.tau.tau) - 2 * sum(mp.xi)


def u_action_check(a: int, state, mp: ModelParams, gp: GaugeParams, side: str = "right",
                   component: int | None = None) -> float:
    """Check the global spin-flip action on (right or left) Bethe vectors.

    ``U_3`` shifts ``(s, t) -> (s+1, t+1)`` with phase (-1)^n; ``U_1`` shifts by
    ``tau`` with an extra exp(-/+ 2 pi i sigma).  With ``component=l`` the
    single-component ``U_3`` relation with shift ``(s+1, t-1)`` is checked.
    Returns the max entry residual relative to the vector norm.
    """
    nu, roots = state.nu, list(state.roots)
    n = len(roots)
    U = symmetry_operator(a, mp.N)
    if component is not None:
        if a != 3:
            raise ValueError("component check is only defined for U_3")
        lhs = bethe_vector_component(component, roots, side, mp, gp)
        lhs = U @ lhs if side == "right" else lhs @ U
        rhs = bethe_vector_component(component, roots, side, mp, gp.shifted(1.0, -1.0))
    else:
        vec = bethe_vector(nu, roots, side, mp, gp)
        lhs = U @ vec if side == "right" else vec @ U
        if a == 3:
            rhs = (-1) ** n * bethe_vector(nu, roots, side, mp, gp.shifted(1.0, 1.0))
        elif a == 1:
            sgn = -1 if side == "right" else 1
            phase = (-1) ** n * cmath.exp(sgn * 2j * math.pi * sigma_sum(roots, mp))
            tau = mp.tau.tau
            rhs = phase * bethe_vector(nu, roots, side, mp, gp.shifted(tau, tau))
        else:
            raise ValueError("a must be 1 or 3")
    scale = max(np.linalg.norm(lhs), np.linalg.norm(rhs), 1e-300)
    return float(np.max(np.abs(lhs - rhs)) / scale)
