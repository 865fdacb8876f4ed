"""Bethe equations, the sum rule and root solvers.

The Bethe equations read

    e^{2 pi i eta nu} a(v_j)/d(v_j) = prod_{k != j} theta_1(v_j - v_k + eta) / theta_1(v_j - v_k - eta)

and are supplemented by the sum rule fixing the integer ``nu`` for a given set
of root representatives.
"""
from __future__ import annotations

import cmath
import itertools
import logging
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateConfigurationError
from .gauge_aba import BetheState, sigma_sum, vacuum_eigenvalues
from .theta import lattice_distance, reduce_to_cell, theta, theta1_deriv
from .vertex import ModelParams

log = logging.getLogger(__name__)

COLLISION_TOL = 1e-10
ONSHELL_TOL = 1e-9
SUMRULE_TOL = 1e-8


@dataclass(frozen=True)
class BetheSystem:
    mp: ModelParams
    nu: int = 0

    @property
    def n(self) -> int:
        return self.mp.n


def _psi(x, tau):
    return theta1_deriv(x, tau) / theta(1, x, tau)


def check_collisions(roots: Sequence[complex], mp: ModelParams, tol: float = COLLISION_TOL) -> None:
    tau = mp.tau
    for j, v in enumerate(roots):
        for x in mp.xi:
            if abs(theta(1, v - x, tau)) < tol:
                raise DegenerateConfigurationError(f"root {v} sits on inhomogeneity {x}")
        for k in range(j + 1, len(roots)):
            w = roots[k]
            for shift in (0.0, mp.eta, -mp.eta):
                if abs(theta(1, v - w + shift, tau)) < tol:
                    raise DegenerateConfigurationError(f"roots {v} and {w} collide")


def bethe_sides(roots: Sequence[complex], nu: int, mp: ModelParams):
    """Left and right sides of each Bethe equation."""
    eta, tau = mp.eta, mp.tau
    roots = [complex(v) for v in roots]
    lhs, rhs = [], []
    for j, v in enumerate(roots):
        a, d = vacuum_eigenvalues(v, mp)
        lhs.append(cmath.exp(2j * math.pi * eta * nu) * a / d)
        r = 1.0 + 0.0j
        for k, w in enumerate(roots):
            if k != j:
                r *= theta(1, v - w + eta, tau) / theta(1, v - w - eta, tau)
        rhs.append(r)
    return np.array(lhs), np.array(rhs)


def bethe_residuals(roots: Sequence[complex], sys: BetheSystem, nu: int | None = None) -> np.ndarray:
    """Relative residual |LHS - RHS| / max(|LHS|, |RHS|) per equation."""
    nu = sys.nu if nu is None else nu
    check_collisions(roots, sys.mp)
    lhs, rhs = bethe_sides(roots, nu, sys.mp)
    return np.abs(lhs - rhs) / np.maximum(np.abs(lhs), np.abs(rhs))


def sum_rule_nu(roots: Sequence[complex], mp: ModelParams) -> float:
    """Real number ``Im(2 sigma) / Im(tau)``; an integer for sum-rule compatible roots."""
    return (2 * sigma_sum(roots, mp)).imag / mp.tau.tau.imag


def sum_rule_defect(roots: Sequence[complex], nu: int, sys: BetheSystem):
    """Defect of the sum rule sigma = (n + nu_1 + nu tau)/2 for these root representatives.

    ``nu`` is only meaningful modulo Q, so the representative ``nu + jQ`` closest to
    the roots is used.  The defect is reduced modulo 1 only: a shift of one
    root by ``tau`` changes ``nu`` by 2 and is not absorbed.  Returns
    ``(defect, nu1, nu3)`` with ``nu1`` in {0, 1} and the exact ``nu3 = -n - nu``.
    """
    mp = sys.mp
    n = len(roots)
    tau = mp.tau.tau
    target = sum_rule_nu(roots, mp)
    nu_rep = int(nu + mp.Q * round((target - nu) / mp.Q))
    D = 2 * sigma_sum(roots, mp) - n - nu_rep * tau
    k = round(D.real)
    defect = (D - k) / 2
    return complex(defect), int(k % 2), -n - nu_rep


def canonical_roots(roots: Iterable[complex], mp: ModelParams) -> tuple:
    red = [reduce_to_cell(v, mp.tau) for v in roots]
    return tuple(sorted(red, key=lambda z: (round(z.imag, 10), round(z.real, 10))))


def make_state(roots: Sequence[complex], mp: ModelParams, side: str = "right",
               tol: float = ONSHELL_TOL, sum_tol: float = SUMRULE_TOL) -> BetheState | None:
    """Canonicalise roots, fix nu from the sum rule and return a state if on shell."""
    roots = canonical_roots(roots, mp)
    try:
        check_collisions(roots, mp)
    except DegenerateConfigurationError:
        return None
    target = sum_rule_nu(roots, mp)
    nu_exact = round(target)
    if abs(target - nu_exact) > sum_tol:
        return None
    sys = BetheSystem(mp, nu_exact % mp.Q)
    defect, nu1, nu3 = sum_rule_defect(roots, nu_exact, sys)
    if abs(defect) > sum_tol:
        return None
    res = bethe_residuals(roots, sys)
    if np.max(res) > tol:
        return None
    return BetheState(nu=nu_exact % mp.Q, roots=roots, side=side, onshell=True,
                      residuals=tuple(float(r) for r in res), sumrule_ints=(nu1, nu3))


def _dedupe(states: Iterable[BetheState], mp: ModelParams) -> list[BetheState]:
    out: list[BetheState] = []
    for st in states:
        dup = False
        for other in out:
            if other.nu == st.nu and all(
                lattice_distance(a, b, mp.tau) < 1e-7 for a, b in zip(other.roots, st.roots)
            ):
                dup = True
                break
        if not dup:
            out.append(st)
    return sorted(out, key=lambda s: (s.nu, [(round(z.imag, 8), round(z.real, 8)) for z in s.roots]))


def solve_n2(mp: ModelParams) -> list[BetheState]:
    """The four closed-form states of the two-site chain: v = (xi_1 + xi_2 - eta)/2 + omega."""
    if mp.N != 2 or mp.n != 1:
        raise ValueError("closed form requires N=2, n=1")
    tau = mp.tau.tau
    base = (mp.xi[0] + mp.xi[1] - mp.eta) / 2
    states = []
    for omega in (0.0, 0.5, tau / 2, (tau + 1) / 2):
        st = make_state([base + omega], mp)
        if st is None:
            log.warning("closed-form root %s failed the on-shell check", base + omega)
            continue
        states.append(st)
    return _dedupe(states, mp)


def _log_ad(v, mp):
    a, d = vacuum_eigenvalues(v, mp)
    return cmath.log(a / d)


def _dlog_ad(v, mp):
    return sum(_psi(v - x + mp.eta, mp.tau) - _psi(v - x, mp.tau) for x in mp.xi)


def single_root_solutions(target: complex, mp: ModelParams, grid: int = 8,
                          tol: float = 1e-13, max_iter: int = 80) -> list[complex]:
    """All cell solutions of a(v)/d(v) = target, by 1-D Newton on the logarithm from a grid."""
    tau = mp.tau.tau
    log_c = cmath.log(target)
    found: list[complex] = []
    for i, j in itertools.product(range(grid), repeat=2):
        v = (i + 0.5) / grid + (j + 0.5) / grid * tau
        for _ in range(max_iter):
            try:
                g = _log_ad(v, mp) - log_c
                dg = _dlog_ad(v, mp)
            except (ZeroDivisionError, ValueError, OverflowError):
                break
            g -= 2j * math.pi * round(g.imag / (2 * math.pi))
            step = g / dg
            if abs(step) > 0.2:
                step *= 0.2 / abs(step)
            v = reduce_to_cell(v - step, tau)
            if abs(g) < tol:
                break
        else:
            continue
        try:
            a, d = vacuum_eigenvalues(v, mp)
        except (ValueError, OverflowError):
            continue
        if abs(a - target * d) > 1e-10 * max(abs(a), abs(target * d)):
            continue
        if all(lattice_distance(v, w, mp.tau) > 1e-7 for w in found):
            found.append(v)
    return found


def solve_free_fermion(mp: ModelParams) -> list[BetheState]:
    """eta = 1/2: each root solves e^{i pi nu} a(v)/d(v) = (-1)^{n-1} on its own."""
    if abs(mp.eta - 0.5) > 1e-14:
        raise ValueError("free-fermion branch requires eta = 1/2")
    n = mp.n
    states = []
    for parity in (0, 1):
        target = (-1) ** (n - 1) * cmath.exp(-1j * math.pi * parity)
        roots = single_root_solutions(target, mp)
        for subset in itertools.combinations(roots, n):
            st = make_state(subset, mp)
            if st is not None and st.nu % 2 == parity:
                states.append(st)
    return _dedupe(states, mp)


def log_bethe_system(roots: Sequence[complex], nu: int, mp: ModelParams):
    """Logarithmic Bethe functions F_j and their Jacobian (equal to minus the Gaudin matrix)."""
    eta, tau = mp.eta, mp.tau
    n = len(roots)
    F = np.empty(n, dtype=complex)
    J = np.zeros((n, n), dtype=complex)
    for j, v in enumerate(roots):
        a, d = vacuum_eigenvalues(v, mp)
        ratio = cmath.exp(2j * math.pi * eta * nu) * a / d
        J[j, j] = _dlog_ad(v, mp)
        for k, w in enumerate(roots):
            if k == j:
                continue
            ratio *= theta(1, v - w - eta, tau) / theta(1, v - w + eta, tau)
            kern = _psi(v - w - eta, tau) - _psi(v - w + eta, tau)
            J[j, j] += kern
            J[j, k] -= kern
        F[j] = cmath.log(ratio)
    return F, J


def newton_roots(seed: Sequence[complex], nu: int, mp: ModelParams, max_iter: int = 60,
                 tol: float = 1e-13, max_step: float = 0.25):
    """Damped Newton on the logarithmic Bethe system; returns roots or ``None``."""
    v = np.array(seed, dtype=complex)
    tau = mp.tau.tau
    for _ in range(max_iter):
        try:
            F, J = log_bethe_system(v, nu, mp)
            step = np.linalg.solve(J, -F)
        except (ZeroDivisionError, ValueError, OverflowError, np.linalg.LinAlgError):
            return None
        if not np.all(np.isfinite(step)):
            return None
        norm = np.max(np.abs(step))
        if norm > max_step:
            step *= max_step / norm
        v = np.array([reduce_to_cell(z, tau) for z in v + step])
        if np.max(np.abs(F)) < tol:
            return v
    return None


def composite_seeds(mp: ModelParams) -> list[list[complex]]:
    """Products of two-site closed-form roots over consecutive site pairs."""
    tau = mp.tau.tau
    omegas = (0.0, 0.5, tau / 2, (tau + 1) / 2)
    bases = [(mp.xi[2 * i] + mp.xi[2 * i + 1] - mp.eta) / 2 for i in range(mp.N // 2)]
    seeds = []
    for combo in itertools.product(omegas, repeat=mp.n):
        seeds.append([bases[i % len(bases)] + w for i, w in enumerate(combo)])
    return seeds


def solve_newton(mp: ModelParams, seed: int = 0, random_starts: int = 40,
                 seeds: Sequence[Sequence[complex]] | None = None) -> list[BetheState]:
    """Multistart Newton over every distinct twist exp(2 pi i eta nu)."""
    rng = np.random.default_rng(seed)
    tau = mp.tau.tau
    starts = list(seeds) if seeds is not None else composite_seeds(mp)
    for _ in range(random_starts):
        starts.append(list(rng.uniform(0, 1, mp.n) + rng.uniform(0, 1, mp.n) * tau))
    states = []
    failures = 0
    for nu in range(mp.Q):
        for start in starts:
            roots = newton_roots(start, nu, mp)
            if roots is None:
                failures += 1
                continue
            st = make_state(roots, mp)
            if st is not None:
                states.append(st)
    if failures:
        log.info("newton: %d seeds did not converge", failures)
    return _dedupe(states, mp)


def continue_roots(roots: Sequence[complex], nu: int, mp_from: ModelParams, mp_to: ModelParams,
                   steps: int = 20) -> np.ndarray | None:
    """Track a Bethe solution while xi and tau move linearly from one model to another."""
    v = np.array(roots, dtype=complex)
    xi0, xi1 = np.array(mp_from.xi), np.array(mp_to.xi)
    t0, t1 = mp_from.tau.tau, mp_to.tau.tau
    for k in range(1, steps + 1):
        lam = k / steps
        mp = ModelParams(mp_to.N, mp_to.P, mp_to.Q, (1 - lam) * t0 + lam * t1,
                         tuple((1 - lam) * xi0 + lam * xi1), mp_to.n)
        v = newton_roots(v, nu, mp)
        if v is None:
            return None
    return v


def solve_bethe(sys: BetheSystem | ModelParams, strategy: str = "auto", seed: int = 0) -> list[BetheState]:
    """On-shell, sum-rule compatible states with residuals <= 1e-9, deduplicated."""
    mp = sys.mp if isinstance(sys, BetheSystem) else sys
    if strategy == "auto":
        if mp.N == 2 and mp.n == 1:
            strategy = "n2"
        elif abs(mp.eta - 0.5) < 1e-14:
            strategy = "free-fermion"
        else:
            strategy = "newton"
    if strategy == "n2":
        return solve_n2(mp)
    if strategy == "free-fermion":
        return solve_free_fermion(mp)
    if strategy == "newton":
        return solve_newton(mp, seed=seed)
    raise ValueError(f"unknown strategy {strategy!r}")
