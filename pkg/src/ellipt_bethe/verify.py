"""Brute-force oracles built only from dense vectors and operators.

Nothing here calls into :mod:`ellipt_bethe.scalar`; the oracles construct
Bethe vectors literally and contract them.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import elementary_matrix, embed_local, pair, PAULI, projective_distance
from .errors import DegenerateConfigurationError
from .gauge_aba import (GaugeParams, bethe_vector, bethe_vector_component, transfer_eigenvalue)
from .theta import theta, lattice_distance
from .vertex import ModelParams, inverse_problem_operator, monodromy, transfer_matrix

MAX_SITES = 4


def _require_small(mp: ModelParams) -> None:
    if mp.N > MAX_SITES:
        raise ValueError(f"brute-force oracles are limited to N <= {MAX_SITES}")


def brute_force_scalar_product(nu: int, vs: Sequence[complex], mu: int, us: Sequence[complex],
                               mp: ModelParams, gp: GaugeParams) -> complex:
    """<Psi_nu(v)|Psi_mu(u)> from explicitly constructed vectors (bilinear pairing)."""
    _require_small(mp)
    left = bethe_vector(nu, vs, "left", mp, gp)
    right = bethe_vector(mu, us, "right", mp, gp)
    return pair(left, right)


def brute_force_normalized(nu: int, vs, mu: int, us, mp: ModelParams, gp: GaugeParams) -> complex:
    """<Psi_nu(v)|Psi_mu(u)> / <Psi_nu(v)|Psi_nu(v)>."""
    _require_small(mp)
    left = bethe_vector(nu, vs, "left", mp, gp)
    den = pair(left, bethe_vector(nu, vs, "right", mp, gp))
    if abs(den) < 1e-300:
        raise DegenerateConfigurationError("diagonal scalar product vanishes")
    return pair(left, bethe_vector(mu, us, "right", mp, gp)) / den


def brute_force_x_values(nu: int, vs, us, mp: ModelParams, gp: GaugeParams) -> np.ndarray:
    """X[k, l] = <Psi_nu(v)|Psi^l(u minus u_k)> for n+1 parameters ``us``."""
    _require_small(mp)
    us = [complex(u) for u in us]
    left = bethe_vector(nu, vs, "left", mp, gp)
    X = np.empty((len(us), mp.Q), dtype=complex)
    for k in range(len(us)):
        rest = us[:k] + us[k + 1:]
        for l in range(mp.Q):
            X[k, l] = pair(left, bethe_vector_component(l, rest, "right", mp, gp))
    return X


def onshell_action_check(state, us_grid: Sequence[complex], mp: ModelParams, gp: GaugeParams) -> float:
    """Max of |<Psi|T(u) - T_nu(u) <Psi|| / (|<Psi|| |T(u)|) over the grid, both sides."""
    _require_small(mp)
    worst = 0.0
    for side in ("left", "right"):
        vec = bethe_vector(state.nu, state.roots, side, mp, gp)
        norm = np.linalg.norm(vec)
        if norm < 1e-12:
            raise DegenerateConfigurationError(f"{side} Bethe vector for nu={state.nu} vanishes")
        for u in us_grid:
            T = transfer_matrix(u, mp)
            ev = transfer_eigenvalue(state.nu, u, state.roots, mp)
            act = vec @ T if side == "left" else T @ vec
            worst = max(worst, float(np.linalg.norm(act - ev * vec) / (norm * np.linalg.norm(T, 2))))
    return worst


def magnetization_form_factor_check(state, m: int, mp: ModelParams, gp: GaugeParams):
    """Compare <(1 - sigma_3^{(m)})/2> with <D(xi_m)>/T_nu(xi_m), both over the diagonal product."""
    if mp.N != 2:
        raise ValueError("magnetization check is set up for N=2")
    left = bethe_vector(state.nu, state.roots, "left", mp, gp)
    right = bethe_vector(state.nu, state.roots, "right", mp, gp)
    norm = pair(left, right)
    op = 0.5 * (np.eye(mp.dim) - embed_local(PAULI[3], m, mp.N))
    lhs = pair(left, op @ right) / norm
    xi = mp.xi[m - 1]
    ev = transfer_eigenvalue(state.nu, xi, state.roots, mp)
    if abs(ev) < 1e-12:
        raise DegenerateConfigurationError("transfer eigenvalue at xi_m vanishes")
    D = monodromy(xi, mp)[1, 1]
    rhs = pair(left, D @ right) / (ev * norm)
    return complex(lhs), complex(rhs), float(abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300))


def inverse_problem_error(mp: ModelParams) -> float:
    """Max deviation of the reconstructed local elementary matrices from the literal ones."""
    worst = 0.0
    for m in range(1, mp.N + 1):
        for i in range(2):
            for j in range(2):
                E = inverse_problem_operator(i, j, m, mp, check=False)
                worst = max(worst, float(np.max(np.abs(E - elementary_matrix(i, j, m, mp.N)))))
    return worst


# --- (s, t) dependence of on-shell left vectors ----------------------------

@dataclass
class StDependenceReport:
    nu: int
    roots: tuple
    projective_spread: float
    eta_shift_error: float
    fitted_zeros: list
    zero_distances: list
    extra: dict = field(default_factory=dict)


def _gauge_from_xy(x: complex, y: complex, mp: ModelParams) -> GaugeParams:
    return GaugeParams(x - 0.5 + y, x - 0.5 - y, mp.eta, mp.tau)


def st_dependence_experiment(nu: int, roots, s_grid, t_grid, mp: ModelParams, seed: int = 0,
                             newton_iter: int = 40) -> StDependenceReport:
    """Probe how the on-shell left vector depends on the gauge pair (s, t).

    (a) The projective direction is compared across the grid.
    (b) phi(x + eta, y) / phi(x, y) is compared with exp(-i pi nu eta).
    (c) Zeros of y -> phi(x, y) are located by Newton iteration and compared with -v_j.
    """
    _require_small(mp)
    roots = [complex(v) for v in roots]
    rng = np.random.default_rng(seed)
    probe = rng.normal(size=mp.dim) + 1j * rng.normal(size=mp.dim)
    vecs = []
    for s in s_grid:
        for t in t_grid:
            gp = GaugeParams(complex(s), complex(t), mp.eta, mp.tau)
            vecs.append(bethe_vector(nu, roots, "left", mp, gp))
    ref = vecs[0]
    spread = max(projective_distance(ref, v) for v in vecs[1:]) if len(vecs) > 1 else 0.0

    def phi(x, y):
        return pair(bethe_vector(nu, roots, "left", mp, _gauge_from_xy(x, y, mp)), probe)

    gp0 = GaugeParams(complex(s_grid[0]), complex(t_grid[0]), mp.eta, mp.tau)
    x0, y0 = gp0.x, gp0.y
    shift_err = abs(phi(x0 + mp.eta, y0) / phi(x0, y0) - cmath.exp(-1j * math.pi * nu * mp.eta))

    zeros, dists = [], []
    h = 1e-6
    for v in roots:
        y = -v + 0.05 + 0.03j
        for _ in range(newton_iter):
            f0 = phi(x0, y)
            df = (phi(x0, y + h) - phi(x0, y - h)) / (2 * h)
            if df == 0:
                break
            step = f0 / df
            y -= step
            if abs(step) < 1e-13:
                break
        zeros.append(complex(y))
        dists.append(float(min(lattice_distance(y, -w, mp.tau) for w in roots)))
    return StDependenceReport(nu, tuple(roots), float(spread), float(shift_err), zeros, dists)


# --- coverage of the spectrum by sum-rule compatible states -----------------

def spectrum_coverage(states, u: complex, mp: ModelParams, rel_tol: float = 1e-8) -> dict:
    """Match T_nu(u) of the given states against exact-diagonalisation eigenvalues at ``u``.

    Eigenvalues left unmatched belong to eigenvectors the Bethe states do not
    reach (for example ones that are not spin-reflection eigenvectors).
    """
    ev = np.linalg.eigvals(transfer_matrix(u, mp))
    lams = [transfer_eigenvalue(st.nu, u, st.roots, mp) for st in states]
    unmatched = [complex(e) for e in ev if min((abs(e - lam) for lam in lams), default=np.inf) > rel_tol * abs(e)]
    worst = max((float(np.min(np.abs(ev - lam)) / abs(lam)) for lam in lams), default=0.0)
    return {"dim": mp.dim, "states": len(states), "matched": mp.dim - len(unmatched),
            "unmatched": unmatched, "worst_state_error": worst}


def nu_support(state, mp: ModelParams, gp: GaugeParams) -> list[float]:
    """Norms of the right Bethe vectors built from the state's roots for every nu, relative to the largest."""
    norms = [float(np.linalg.norm(bethe_vector(nu, state.roots, "right", mp, gp))) for nu in range(mp.Q)]
    top = max(norms)
    return [x / top if top > 0 else 0.0 for x in norms]
