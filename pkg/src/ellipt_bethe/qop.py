"""Baxter pre-Q-operators built from intertwining vectors, and the eigenvalue model Q(u)."""
from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from .algebra import kron_all
from .gauge_aba import GaugeParams, intertwining_vector, transfer_eigenvalue, vacuum_eigenvalues
from .theta import as_modular, theta
from .vertex import ModelParams, transfer_matrix

OFFSET_STEP = 0.137


@dataclass(frozen=True)
class EpsilonPath:
    """Signs eps_1..eps_N with zero sum; ``partial(m)`` is e_m = eps_1 + ... + eps_m."""

    eps: tuple

    def __post_init__(self):
        if any(e not in (1, -1) for e in self.eps) or sum(self.eps) != 0:
            raise ValueError(f"invalid epsilon path {self.eps}")

    def partial(self, m: int) -> int:
        return int(sum(self.eps[:m]))


def balanced_paths(N: int) -> list[EpsilonPath]:
    return [EpsilonPath(p) for p in itertools.product((1, -1), repeat=N) if sum(p) == 0]


def omega_column(u: complex, path: EpsilonPath, mp: ModelParams, s: complex, l: int = 0) -> np.ndarray:
    """(x)_i phi(s_{l + e_{i-1}} - eps_i (u - xi_i)), sites i = 1..N."""
    eta = mp.eta
    return kron_all([
        intertwining_vector(s + (l + path.partial(i - 1)) * eta - path.eps[i - 1] * (u - mp.xi[i - 1]),
                            False, mp.tau)
        for i in range(1, mp.N + 1)
    ])


def omega_row(u: complex, path: EpsilonPath, mp: ModelParams, t: complex, l: int = 0) -> np.ndarray:
    """(x)_i phi-perp(t_{l + e_i} + eps_i (u - xi_i)), sites i = 1..N."""
    eta = mp.eta
    return kron_all([
        intertwining_vector(t + (l + path.partial(i)) * eta + path.eps[i - 1] * (u - mp.xi[i - 1]),
                            True, mp.tau)
        for i in range(1, mp.N + 1)
    ])


def _candidates(mp: ModelParams):
    paths = balanced_paths(mp.N)
    return [(p, j) for j in range(2 ** (mp.N - 1)) for p in paths]


def select_basis(mp: ModelParams, gp: GaugeParams, side: str = "right", u_ref: complex = 0.21 + 0.13j):
    """Pick 2^N (path, offset) labels of maximal rank by column-pivoted QR at ``u_ref``."""
    cands = _candidates(mp)
    if side == "right":
        mat = np.column_stack([omega_column(u_ref, p, mp, gp.s + j * OFFSET_STEP) for p, j in cands])
    else:
        mat = np.column_stack([omega_row(u_ref, p, mp, gp.t + j * OFFSET_STEP) for p, j in cands])
    mat = mat / np.linalg.norm(mat, axis=0)
    _, R, piv = scipy.linalg.qr(mat, pivoting=True, mode="economic")
    rank = int(np.sum(np.abs(np.diag(R)) > 1e-10 * abs(R[0, 0])))
    if rank < mp.dim:
        raise np.linalg.LinAlgError(f"pre-Q {side} candidates span only rank {rank} < {mp.dim}")
    return [cands[i] for i in sorted(piv[: mp.dim])]


def pre_q_right(u: complex, mp: ModelParams, gp: GaugeParams, basis=None) -> np.ndarray:
    """Operator whose columns are the vectors |omega(u; eps)>; satisfies t Q_R = a Q_R(u-eta) + d Q_R(u+eta)."""
    if basis is None:
        basis = select_basis(mp, gp, "right")
    return np.column_stack([omega_column(u, p, mp, gp.s + j * OFFSET_STEP) for p, j in basis])


def pre_q_left(u: complex, mp: ModelParams, gp: GaugeParams, basis=None) -> np.ndarray:
    """Operator whose rows are the covectors <omega-bar(u; eps)|."""
    if basis is None:
        basis = select_basis(mp, gp, "left")
    return np.vstack([omega_row(u, p, mp, gp.t + j * OFFSET_STEP) for p, j in basis])


def best_reference_point(mp: ModelParams, gp: GaugeParams, basis=None, grid: int = 6):
    """Scan a u-grid for the best-conditioned Q_R(u0); returns ``(u0, condition_number)``."""
    if basis is None:
        basis = select_basis(mp, gp, "right")
    tau = mp.tau.tau
    best = (None, math.inf)
    for i, j in itertools.product(range(grid), repeat=2):
        u0 = (i + 0.37) / grid + (j + 0.41) / grid * tau
        c = np.linalg.cond(pre_q_right(u0, mp, gp, basis))
        if c < best[1]:
            best = (u0, c)
    return best


def q_operator(u: complex, mp: ModelParams, gp: GaugeParams, u0: complex, basis=None) -> np.ndarray:
    """Q(u) = Q_R(u) Q_R(u0)^{-1}."""
    if basis is None:
        basis = select_basis(mp, gp, "right")
    return np.linalg.solve(pre_q_right(u0, mp, gp, basis).T, pre_q_right(u, mp, gp, basis).T).T


def q_eigenvalue_model(nu1: int, nu3: int, roots: Sequence[complex], tau) -> Callable[[complex], complex]:
    """Q(u) = exp(i pi (n + nu3) u) prod theta_1(u - v_i).

    ``nu3`` is the exact integer -n - nu, not only its parity; ``nu1`` is kept for
    the quasi-periodicity check Q(u + tau) = (-1)^{nu1} e^{-i pi c(u)/2} Q(u).
    """
    tau = as_modular(tau)
    roots = [complex(v) for v in roots]
    n = len(roots)

    def Q(u: complex) -> complex:
        val = cmath.exp(1j * math.pi * (n + nu3) * u)
        for v in roots:
            val *= theta(1, u - v, tau)
        return val

    Q.nu1 = nu1
    Q.nu3 = nu3
    return Q


def tq_operator_residual(u: complex, mp: ModelParams, gp: GaugeParams, side: str = "right", basis=None) -> float:
    """Relative residual of T(u) Q(u) = a(u) Q(u - eta) + d(u) Q(u + eta) for a pre-Q operator."""

    if basis is None:
        basis = select_basis(mp, gp, side)
    build = pre_q_right if side == "right" else pre_q_left
    T = transfer_matrix(u, mp)
    a, d = vacuum_eigenvalues(u, mp)
    Q0 = build(u, mp, gp, basis)
    lhs = T @ Q0 if side == "right" else Q0 @ T
    rhs = a * build(u - mp.eta, mp, gp, basis) + d * build(u + mp.eta, mp, gp, basis)
    return float(np.linalg.norm(lhs - rhs) / np.linalg.norm(lhs))


def tq_eigenvalue_residual(state, us: Sequence[complex], mp: ModelParams) -> float:
    """Max over ``us`` of |T_nu Q - a Q(u-eta) - d Q(u+eta)| / (|a Q(u-eta)| + |d Q(u+eta)|)."""

    Q = q_eigenvalue_model(*state.sumrule_ints, state.roots, mp.tau)
    worst = 0.0
    for u in us:
        a, d = vacuum_eigenvalues(u, mp)
        lo, hi = a * Q(u - mp.eta), d * Q(u + mp.eta)
        worst = max(worst, abs(transfer_eigenvalue(state.nu, u, state.roots, mp) * Q(u) - lo - hi) / (abs(lo) + abs(hi)))
    return float(worst)
