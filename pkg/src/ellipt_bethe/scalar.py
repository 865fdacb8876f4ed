"""Determinant representation of specially normalised scalar products.

For an on-shell dual vector <Psi_nu(v)| and an arbitrary |Psi_mu(u)> the ratio
<Psi_nu(v)|Psi_mu(u)> / <Psi_nu(v)|Psi_nu(v)> is a product of theta factors,
a fixing function phi_1 and the ratio det T^{(nu mu)}(r) / (d(v) det G) with
r = sum(v) - sum(u).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import dense_determinant, hadamard_scale
from .bethe import BetheSystem, bethe_residuals
from .errors import (IllConditionedStateError, NotOnShellError, PoleError,
                     SingularConfigurationError)
from .gauge_aba import GaugeParams, bethe_vector, transfer_eigenvalue, vacuum_eigenvalues
from .theta import as_modular, kronecker_phi, theta, theta1_deriv
from .vertex import ModelParams

POLE_TOL = 1e-10
R_ZERO_TOL = 1e-8
RICHARDSON_STEP = 1e-4


# --- rapidity functions ----------------------------------------------------

def g_fn(u, v, mp: ModelParams) -> complex:
    return theta(1, mp.eta, mp.tau) / theta(1, u - v, mp.tau)


def f_fn(u, v, mp: ModelParams) -> complex:
    return theta(1, u - v + mp.eta, mp.tau) / theta(1, u - v, mp.tau)


def h_fn(u, v, mp: ModelParams) -> complex:
    return theta(1, u - v + mp.eta, mp.tau) / theta(1, mp.eta, mp.tau)


def _prod(fn, us, vs, mp):
    # product over all pairs drawn from two (sub)sets
    out = 1.0 + 0.0j
    for u in np.atleast_1d(us):
        for v in np.atleast_1d(vs):
            out *= fn(u, v, mp)
    return out


def _psi(x, tau):
    return theta1_deriv(x, tau) / theta(1, x, tau)


def dlog_ad(v: complex, mp: ModelParams) -> complex:
    """d/dv log(a(v)/d(v))."""
    return sum(_psi(v - x + mp.eta, mp.tau) - _psi(v - x, mp.tau) for x in mp.xi)


def gaudin_kernel(u: complex, mp: ModelParams) -> complex:
    """K(u) = theta_1'/theta_1 (u - eta) - theta_1'/theta_1 (u + eta)."""
    return _psi(u - mp.eta, mp.tau) - _psi(u + mp.eta, mp.tau)


# --- overlap matrix ---------------------------------------------------

@dataclass(frozen=True)
class OverlapMatrix:
    nu: int
    mu: int
    r: complex
    vs: tuple
    us: tuple
    entries: np.ndarray
    derivative: bool = False

    @property
    def det(self) -> complex:
        return dense_determinant(self.entries)


def _check_poles(vs, us, mp):
    tau = mp.tau
    for i, v in enumerate(vs):
        for k, u in enumerate(us):
            if abs(theta(1, u - v, tau)) < POLE_TOL:
                raise SingularConfigurationError(
                    f"u_{k + 1} - v_{i + 1} sits on a pole of the overlap entries", pair=(i, k))


def _excluding(fn, vs, u, i, mp, first):
    out = 1.0 + 0.0j
    for p, v in enumerate(vs):
        if p != i:
            out *= fn(v, u, mp) if first else fn(u, v, mp)
    return out


def _overlap_column(nu, mu, vs, u, r, mp):
    """Column k of T^{(nu mu)}(r) and the summed magnitudes of its individual terms.

    The factor f(v_i, u) theta_1(z - eta + r)/theta_1(z - eta) is written as
    theta_1(z - eta + r)/theta_1(z) (and likewise for the d-term), so u = v_i -+ eta
    is not a pole.
    """
    eta, tau = mp.eta, mp.tau
    pre = theta1_deriv(0.0, tau) / theta(1, r, tau)
    ep_nu, ep_mu = cmath.exp(1j * math.pi * eta * nu), cmath.exp(1j * math.pi * eta * mu)
    a, d = vacuum_eigenvalues(u, mp)
    col = np.empty(len(vs), dtype=complex)
    mag = np.empty(len(vs))
    for i, v in enumerate(vs):
        z = u - v
        tz = theta(1, z, tau)
        base = theta(1, z + r, tau) / tz
        fa = a * _excluding(f_fn, vs, u, i, mp, True)
        fd = d * _excluding(f_fn, vs, u, i, mp, False)
        terms = (fa * ep_nu * base * f_fn(v, u, mp), -fa * ep_mu * theta(1, z - eta + r, tau) / tz,
                 fd * base * f_fn(u, v, mp) / ep_nu, -fd * theta(1, z + eta + r, tau) / tz / ep_mu)
        col[i] = pre * sum(terms)
        mag[i] = abs(pre) * sum(abs(t) for t in terms)
    return col, mag


def _derivative_column(nu, vs, u, mp):
    eta, tau = mp.eta, mp.tau
    ep = cmath.exp(1j * math.pi * eta * nu)
    a, d = vacuum_eigenvalues(u, mp)
    col = np.empty(len(vs), dtype=complex)
    mag = np.empty(len(vs))
    for i, v in enumerate(vs):
        fa = ep * a * _excluding(f_fn, vs, u, i, mp, True)
        fd = d * _excluding(f_fn, vs, u, i, mp, False) / ep
        # f(v,u) d/dv log f(v,u) and f(u,v) d/dv log f(u,v) without the -+eta poles
        t1 = fa * (theta1_deriv(v - u + eta, tau) - f_fn(v, u, mp) * theta1_deriv(v - u, tau)) / theta(1, v - u, tau)
        t2 = fd * (f_fn(u, v, mp) * theta1_deriv(u - v, tau) - theta1_deriv(u - v + eta, tau)) / theta(1, u - v, tau)
        col[i] = t1 + t2
        mag[i] = abs(t1) + abs(t2)
    return col, mag


def overlap_entries(nu: int, mu: int, vs: Sequence[complex], us: Sequence[complex], r: complex,
                    mp: ModelParams) -> np.ndarray:
    """Expanded entries T_ik = theta_1'(0)/theta_1(r) [a(u_k) f(v,u_k)(...) + d(u_k) f(u_k,v)(...)].

    Rows run over ``vs``, columns over ``us``; the two lengths may differ.
    """
    _check_poles(vs, us, mp)
    if abs(theta(1, r, mp.tau)) < 1e-300:
        raise PoleError("theta_1(r) vanishes", r)
    return np.column_stack([_overlap_column(nu, mu, vs, u, r, mp)[0] for u in us])


def regularized_overlap_entries(nu: int, mu: int, vs: Sequence[complex], us: Sequence[complex], r: complex,
                                mp: ModelParams, step: float = 1e-3, return_scale: bool = False):
    """Columns of T^{(nu mu)}(r) multiplied by prod_p theta_1(u_k - v_p).

    The scaled columns stay finite when u_k coincides with an on-shell root;
    such columns are obtained by a symmetric Richardson limit.  For mu = nu and theta_1(r) ~ 0 the derivative entries are used.
    With ``return_scale`` the Hadamard bound of the term magnitudes is also
    returned; it is the natural yardstick for a vanishing determinant.
    """
    vs = [complex(v) for v in vs]
    tau = mp.tau
    derivative = (mu - nu) % mp.Q == 0 and _r_at_integer(r, tau)

    def col(u):
        c, m = _derivative_column(nu, vs, u, mp) if derivative else _overlap_column(nu, mu, vs, u, r, mp)
        w = np.prod([theta(1, u - v, tau) for v in vs])
        return c * w, m * abs(w)

    cols, mags = [], []
    for u in us:
        if _near_pole(vs, u, mp):
            def sym(h, u=u):
                (cp, mp_), (cm, _) = col(u + h), col(u - h)
                return 0.5 * (cp + cm), mp_
            c1, m1 = sym(step)
            c2, _ = sym(step / 2)
            cols.append((4 * c2 - c1) / 3)
            mags.append(m1)
        else:
            c, m = col(u)
            cols.append(c)
            mags.append(m)
    mat = np.column_stack(cols)
    if return_scale:
        return mat, float(np.prod(np.linalg.norm(np.column_stack(mags), axis=0)))
    return mat


def _near_pole(vs, u, mp):
    return any(abs(theta(1, u - v, mp.tau)) < POLE_TOL for v in vs)


def has_coincidence(vs, us, mp: ModelParams) -> bool:
    """True when some u_k coincides with some v_i (a removable pole for on-shell v)."""
    return any(_near_pole(vs, u, mp) for u in us)


def overlap_entries_kronecker(nu: int, mu: int, vs, us, r: complex, mp: ModelParams) -> np.ndarray:
    """Same matrix written as Phi(u_k - v_i, r) (T_nu(u_k; v) - T_mu(u_k; v with v_i -> v_i - r))."""
    vs = [complex(v) for v in vs]
    out = np.empty((len(vs), len(us)), dtype=complex)
    for k, u in enumerate(us):
        t_nu = transfer_eigenvalue(nu, u, vs, mp)
        for i, v in enumerate(vs):
            moved = vs[:i] + [v - r] + vs[i + 1:]
            out[i, k] = kronecker_phi(u - v, r, mp.tau) * (t_nu - transfer_eigenvalue(mu, u, moved, mp))
    return out


def overlap_derivative_entries(nu: int, vs: Sequence[complex], us: Sequence[complex], mp: ModelParams) -> np.ndarray:
    """dT_nu(u_k; v)/dv_i, the r -> 0 limit of the diagonal (mu = nu) matrix."""
    _check_poles(vs, us, mp)
    return np.column_stack([_derivative_column(nu, vs, u, mp)[0] for u in us])


def overlap_matrix(nu: int, mu: int, vs: Sequence[complex], us: Sequence[complex], r: complex,
                   mp: ModelParams, cross_check: bool = False, tol: float = 1e-11) -> OverlapMatrix:
    """Overlap matrix T^{(nu mu)}(r); for mu = nu and r -> 0 the derivative entries are used."""
    vs = tuple(complex(v) for v in vs)
    us = tuple(complex(u) for u in us)
    if (mu - nu) % mp.Q == 0 and _r_at_integer(r, mp.tau):
        return OverlapMatrix(nu, mu, r, vs, us, overlap_derivative_entries(nu, vs, us, mp), True)
    ent = overlap_entries(nu, mu, vs, us, r, mp)
    if cross_check:
        alt = overlap_entries_kronecker(nu, mu, vs, us, r, mp)
        err = np.max(np.abs(ent - alt)) / max(np.max(np.abs(ent)), 1e-300)
        if err > tol:
            raise AssertionError(f"overlap entry forms disagree by {err:.2e}")
    return OverlapMatrix(nu, mu, r, vs, us, ent)


def _r_at_integer(r, tau) -> bool:
    """theta_1(r) ~ 0 with r near an integer; the entries are 1-periodic in r, so the r -> 0 limit applies."""
    return abs(theta(1, r, tau)) < R_ZERO_TOL and abs(r.imag) < 0.5 * tau.tau.imag


# --- fixing function phi_1 -------------------------------------------------

def _fixing_modulus(Q: int):
    return Q / 2 if Q % 2 == 0 else Q


def phi1_factor(nu: int, mu: int, r: complex, x: complex, P: int, Q: int, tau) -> complex:
    """phi_1^{(nu mu)}(r, x): theta ratio with modulus Q tau/2 (even Q) or Q tau (odd Q).

    For even Q and odd mu - nu the factor vanishes (selection rule).
    """
    tau = as_modular(tau)
    dm = mu - nu
    if Q % 2 == 0:
        if dm % 2:
            return 0.0j
        ell = dm
    else:
        ell = dm - (1 - (-1) ** dm) // 2 * Q
    m = _fixing_modulus(Q)
    big = tau.scaled(m)
    shift = ell * tau.tau / 2
    den = theta(1, m * x, big) * theta(1, r + shift, big)
    if abs(theta(1, m * x, big)) < 1e-12:
        raise PoleError("x sits on a zero of the fixing function", x)
    if abs(den) < 1e-300:
        raise PoleError("phi_1 pole in r", r)
    return cmath.exp(1j * math.pi * ell * x) * theta(1, r, tau) * theta(1, r + m * x + shift, big) / den


def phi1_at_zero(Q: int, tau) -> complex:
    """phi_1^{(nu nu)}(0, x) = theta_1'(0|tau) / theta_1'(0|m tau), independent of x."""
    tau = as_modular(tau)
    return theta1_deriv(0.0, tau) / theta1_deriv(0.0, tau.scaled(_fixing_modulus(Q)))


# --- Gaudin matrix ---------------------------------------------------------

def gaudin_matrix(vs: Sequence[complex], mp: ModelParams) -> np.ndarray:
    """G_ik = K(v_i - v_k) - delta_ik (d log(a/d)(v_i) + sum_j K(v_i - v_j))."""
    vs = [complex(v) for v in vs]
    n = len(vs)
    G = np.empty((n, n), dtype=complex)
    for i in range(n):
        for k in range(n):
            G[i, k] = gaudin_kernel(vs[i] - vs[k], mp) if i != k else 0.0
        G[i, i] -= dlog_ad(vs[i], mp) + sum(gaudin_kernel(vs[i] - vs[j], mp) for j in range(n) if j != i)
    return G


def log_bethe_function(vs: Sequence[complex], nu: int, mp: ModelParams) -> np.ndarray:
    """B_j = -log(a/d)(v_j) + log(f(v_j, v)/f(v, v_j)) - 2 pi i eta nu (principal logs per factor)."""
    vs = [complex(v) for v in vs]
    out = []
    for j, v in enumerate(vs):
        a, d = vacuum_eigenvalues(v, mp)
        val = -cmath.log(a / d) - 2j * math.pi * mp.eta * nu
        for k, w in enumerate(vs):
            if k != j:
                val += cmath.log(f_fn(v, w, mp) / f_fn(w, v, mp))
        out.append(val)
    return np.array(out)


# --- normalised scalar product ---------------------------------------------

def w_n(us: Sequence[complex], vs: Sequence[complex], tau) -> complex:
    """prod_{a<b} theta_1(u_a - u_b) theta_1(v_b - v_a) / prod_{p,q} theta_1(u_p - v_q)."""
    us = list(us)
    vs = list(vs)
    num = 1.0 + 0.0j
    for a in range(len(us)):
        for b in range(a + 1, len(us)):
            num *= theta(1, us[a] - us[b], tau)
    for a in range(len(vs)):
        for b in range(a + 1, len(vs)):
            num *= theta(1, vs[b] - vs[a], tau)
    den = 1.0 + 0.0j
    for u in us:
        for v in vs:
            den *= theta(1, u - v, tau)
    return num / den


@dataclass
class ScalarProductReport:
    nu: int
    mu: int
    vs: tuple
    us: tuple
    r: complex
    x: complex
    y: complex
    det_value: complex
    phi1: complex
    S_formula: complex
    branch: str = "generic"
    S_bruteforce: complex | None = None
    rel_error: float | None = None
    extra: dict = field(default_factory=dict)


def require_onshell(nu: int, vs: Sequence[complex], mp: ModelParams, tol: float = 1e-9) -> None:
    res = bethe_residuals(vs, BetheSystem(mp, nu))
    if np.max(res) > tol:
        raise NotOnShellError(f"left roots are off shell (residual {np.max(res):.2e})")


def _gaudin_det(vs, mp):
    G = gaudin_matrix(vs, mp)
    det = dense_determinant(G)
    if abs(det) < 1e-12 * hadamard_scale(G):
        raise IllConditionedStateError("Gaudin determinant vanishes")
    return det


def _phi1_ratio(nu, mu, r, x, mp, delta=1e-6):
    """phi_1(r, x) / phi_1^{(nu nu)}(0, x), as a symmetric limit where theta_1(r) vanishes."""
    ref = phi1_at_zero(mp.Q, mp.tau)
    if abs(theta(1, r, mp.tau)) < R_ZERO_TOL:
        vals = [phi1_factor(nu, mu, r + h, x, mp.P, mp.Q, mp.tau) for h in (delta, -delta)]
        return 0.5 * (vals[0] + vals[1]) / ref
    return phi1_factor(nu, mu, r, x, mp.P, mp.Q, mp.tau) / ref


def _formula(nu, vs, mu, us, mp, gp, detG):
    eta, tau = mp.eta, mp.tau
    n = len(vs)
    r = complex(sum(vs) - sum(us))
    if mp.Q % 2 == 0 and (mu - nu) % 2:
        return 0.0j, 0.0j, 0.0j, r, "selection"
    ratio = _phi1_ratio(nu, mu, r, gp.x, mp)
    pre = cmath.exp(1j * math.pi * eta * n * nu)
    if has_coincidence(vs, us, mp):
        # theta_1(u_p - v_q) factors are absorbed into the scaled columns
        det = dense_determinant(regularized_overlap_entries(nu, mu, vs, us, r, mp))
        branch = "coincident"
    else:
        sm = overlap_matrix(nu, mu, vs, us, r, mp)
        det = sm.det
        branch = "derivative" if sm.derivative else "generic"
        for p in range(n):
            for q in range(n):
                pre *= theta(1, us[p] - vs[q], tau)
    for p in range(n):
        for q in range(n):
            pre *= 1.0 / theta(1, vs[p] - vs[q] + eta, tau)
    for a in range(n):
        for b in range(a + 1, n):
            pre *= theta(1, vs[a] - vs[b], tau) / theta(1, us[a] - us[b], tau)
    dv = np.prod([vacuum_eigenvalues(v, mp)[1] for v in vs])
    S = pre * ratio * det / (dv * detG)
    return S, det, ratio * phi1_at_zero(mp.Q, tau), r, branch


def _needs_richardson(nu, mu, r, mp):
    """r sits where the entries or phi_1 have a pole that only the full product cancels."""
    tau = mp.tau
    if (mu - nu) % mp.Q == 0:
        return abs(theta(1, r, tau)) < R_ZERO_TOL and not _r_at_integer(r, tau)
    if mp.Q % 2 == 0 and (mu - nu) % 2:
        return False
    if abs(theta(1, r, tau)) < R_ZERO_TOL:
        return True
    m = _fixing_modulus(mp.Q)
    dm = mu - nu
    ell = dm if mp.Q % 2 == 0 else dm - (1 - (-1) ** dm) // 2 * mp.Q
    return abs(theta(1, r + ell * tau.tau / 2, tau.scaled(m))) < R_ZERO_TOL


def normalized_scalar_product(nu: int, vs: Sequence[complex], mu: int, us: Sequence[complex],
                              mp: ModelParams, gp: GaugeParams, check_bruteforce: bool = False,
                              onshell_tol: float = 1e-9) -> ScalarProductReport:
    """S_{nu mu}(v, u) = <Psi_nu(v)|Psi_mu(u)> / <Psi_nu(v)|Psi_nu(v)> from the determinant formula.

    Raises NotOnShellError for off-shell ``vs`` and IllConditionedStateError
    when the Gaudin determinant vanishes.
    """
    vs = tuple(complex(v) for v in vs)
    us = tuple(complex(u) for u in us)
    if len(vs) != len(us):
        raise ValueError("both vectors need the same number of parameters")
    nu, mu = nu % mp.Q, mu % mp.Q
    require_onshell(nu, vs, mp, onshell_tol)
    detG = _gaudin_det(vs, mp)
    r = complex(sum(vs) - sum(us))
    if _needs_richardson(nu, mu, r, mp):
        h = RICHARDSON_STEP

        def sym(step):
            vals = []
            for sgn in (1, -1):
                moved = (us[0] + sgn * step,) + us[1:]
                vals.append(_formula(nu, vs, mu, moved, mp, gp, detG)[0])
            return 0.5 * (vals[0] + vals[1])

        S = (4 * sym(h / 2) - sym(h)) / 3
        det, phi, branch = complex("nan"), complex("nan"), "richardson"
    else:
        S, det, phi, r, branch = _formula(nu, vs, mu, us, mp, gp, detG)
    rep = ScalarProductReport(nu, mu, vs, us, r, gp.x, gp.y, det, phi, S, branch)
    if check_bruteforce:
        from .verify import brute_force_normalized

        bf = brute_force_normalized(nu, vs, mu, us, mp, gp)
        rep.S_bruteforce = bf
        # exact zeros (selection rule) are compared in absolute terms
        rep.rel_error = float(abs(S - bf) / (abs(bf) if S != 0 else 1.0))
    return rep


# --- free fermions (eta = 1/2) ---------------------------------------------

def _require_free_fermion(mp):
    if (mp.P, mp.Q) != (1, 4):
        raise ValueError("free-fermion closed forms need eta = 1/2 (P=1, Q=4)")


def det_overlap_free_fermion(nu: int, mu: int, vs, us, r: complex, mp: ModelParams) -> complex:
    """Closed-form det T^{(nu mu)}(r) at eta = 1/2 for mu - nu in {0, 2} (mod 4)."""
    _require_free_fermion(mp)
    dm = (mu - nu) % 4
    if dm not in (0, 2):
        raise ValueError("closed form only for mu - nu = 0 or 2 (mod 4)")
    tau = mp.tau
    t2 = tau.scaled(2.0)
    n = len(vs)
    U, V = sum(us), sum(vs)
    th = 4 if dm == 0 else 1
    val = (2 * theta1_deriv(0.0, t2)) ** n * theta(th, r + 2 * U - 2 * V, t2) / theta(th, r, t2)
    for u in us:
        for v in vs:
            val *= theta(2, u - v, tau) / theta(1, u - v, tau)
    val *= w_n([2 * u for u in us], [2 * v for v in vs], t2)
    for u in us:
        a, d = vacuum_eigenvalues(u, mp)
        # the d-term enters with a plus sign for both mu = nu and mu = nu + 2
        val *= (-1) ** n * cmath.exp(1j * math.pi * nu / 2) * a + cmath.exp(-1j * math.pi * nu / 2) * d
    return complex(val)


def free_fermion_scalar(nu: int, vs, mu: int, us, mp: ModelParams, gp: GaugeParams) -> complex:
    """Closed-form normalised scalar product at eta = 1/2 (zero when mu - nu is odd)."""
    _require_free_fermion(mp)
    dm = (mu - nu) % 4
    if dm % 2:
        return 0.0j
    tau = mp.tau
    t2 = tau.scaled(2.0)
    n = len(vs)
    sign = 1 if dm == 0 else -1
    r = complex(sum(vs) - sum(us))
    d1, d2 = theta1_deriv(0.0, tau), theta1_deriv(0.0, t2)
    val = sign * (-1) ** n * d2 / d1 * (2 * d2 / theta(2, 0.0, tau)) ** n
    val *= w_n([2 * u for u in us], [2 * v for v in vs], t2) / w_n(us, vs, tau)
    val *= phi1_factor(nu, mu, r, gp.x, mp.P, mp.Q, tau)
    for u in us:
        for v in vs:
            val *= theta(2, u - v, tau) / theta(1, u - v, tau)
    for a in range(n):
        for b in range(n):
            if a != b:
                val *= theta(1, vs[a] - vs[b], tau) / theta(2, vs[a] - vs[b], tau)
    for u, v in zip(us, vs):
        au, du = vacuum_eigenvalues(u, mp)
        dv = vacuum_eigenvalues(v, mp)[1]
        val *= ((-1) ** n * cmath.exp(1j * math.pi * nu) * au + du) / (dv * dlog_ad(v, mp))
    return complex(val)


# --- null vector -----------------------------------------------------------

def null_vector_test(p: int, us: Sequence[complex], mp: ModelParams, gp: GaugeParams,
                     states=(), seed: int = 0, tol: float = 1e-10) -> dict:
    """Check that parameters containing xi_p and xi_p - eta give a vanishing overlap determinant.

    For each supplied on-shell state and each mu of matching parity, the
    regularised determinant is compared with its term-magnitude scale.  The right vector built
    from ``us`` is compared with vectors at generic parameters.
    """
    us = [complex(u) for u in us]
    xp = mp.xi[p - 1]
    if not any(abs(u - xp) < 1e-12 for u in us) or not any(abs(u - (xp - mp.eta)) < 1e-12 for u in us):
        raise ValueError("parameters must contain xi_p and xi_p - eta")
    dets = []
    for st in states:
        for mu in range(mp.Q):
            if mp.Q % 2 == 0 and (mu - st.nu) % 2:
                continue
            r = complex(sum(st.roots) - sum(us))
            T, scale = regularized_overlap_entries(st.nu, mu, st.roots, us, r, mp, return_scale=True)
            dets.append({"nu": st.nu, "mu": mu, "det": dense_determinant(T), "scale": scale})
    rng = np.random.default_rng(seed)
    tau = mp.tau.tau
    norms, generic = [], []
    for mu in range(mp.Q):
        norms.append(float(np.linalg.norm(bethe_vector(mu, us, "right", mp, gp))))
        rand = list(rng.uniform(-0.5, 0.5, len(us)) + 1j * rng.uniform(0.1, 0.4, len(us)) * tau.imag)
        generic.append(float(np.linalg.norm(bethe_vector(mu, rand, "right", mp, gp))))
    worst_det = max((abs(d["det"]) / d["scale"] for d in dets), default=0.0)
    suppression = max(n / g for n, g in zip(norms, generic))
    return {"dets": dets, "worst_relative_det": worst_det, "vector_norms": norms,
            "generic_norms": generic, "suppression": suppression,
            "passed": worst_det <= tol}


# --- linear system for scalar products --------------------------------------

def tau_shift(l: int, gp: GaugeParams) -> complex:
    """tau_l + 1/2 = x + l eta."""
    return gp.x + l * gp.eta


def homogeneous_system_residual(X: np.ndarray, nu: int, vs, us, mp: ModelParams, gp: GaugeParams) -> float:
    """Max normalised residual of the (n+1)Q linear equations satisfied by X[k, l] = <Psi_nu(v)|Psi^l(u minus u_k)>."""
    X = np.asarray(X, dtype=complex)
    us = [complex(u) for u in us]
    Q = mp.Q
    m = len(us)
    if X.shape != (m, Q):
        raise ValueError(f"X must have shape ({m}, {Q})")
    tau = mp.tau
    ad = [vacuum_eigenvalues(u, mp) for u in us]
    fa = [np.prod([f_fn(us[p], us[k], mp) for p in range(m) if p != k]) for k in range(m)]
    fd = [np.prod([f_fn(us[k], us[p], mp) for p in range(m) if p != k]) for k in range(m)]
    worst = 0.0
    for l in range(Q):
        up, dn = tau_shift(l + 1, gp), tau_shift(l - 1, gp)
        tu, td = theta(1, up, tau), theta(1, dn, tau)
        for j in range(m):
            terms = []
            for k in range(m):
                a, d = ad[k]
                if k == j:
                    # h(u, u) = 1 and the theta ratio collapses to one
                    terms.append(a * fa[k] * X[k, (l + 1) % Q])
                    terms.append(d * fd[k] * X[k, (l - 1) % Q])
                    terms.append(-transfer_eigenvalue(nu, us[j], vs, mp) * X[k, l])
                    continue
                terms.append(a * fa[k] * theta(1, us[j] - us[k] + up, tau)
                             / (h_fn(us[j], us[k], mp) * tu) * X[k, (l + 1) % Q])
                terms.append(d * fd[k] * theta(1, us[j] - us[k] + dn, tau)
                             / (h_fn(us[k], us[j], mp) * td) * X[k, (l - 1) % Q])
            scale = sum(abs(t) for t in terms)
            if scale > 0:
                worst = max(worst, abs(sum(terms)) / scale)
    return float(worst)


def y_transform(X: np.ndarray, mu: int, k: int, r: complex, vs, us, mp: ModelParams, gp: GaugeParams) -> complex:
    """Y_k^{(mu)}(r) = sum_l theta_1(l eta + r + x + U_k - V)/theta_1(l eta + x) e^{-i pi l eta mu} X[k, l].

    ``k`` is 0-based and U_k is the sum of ``us`` without u_k.
    """
    X = np.asarray(X, dtype=complex)
    tau = mp.tau
    shift = r + gp.x + complex(sum(us)) - us[k] - complex(sum(vs))
    total = 0.0j
    for l in range(mp.Q):
        den = theta(1, tau_shift(l, gp), tau)
        if abs(den) < 1e-12:
            raise PoleError("theta_1(x + l eta) vanishes", l)
        total += (theta(1, l * mp.eta + shift, tau) / den
                  * cmath.exp(-1j * math.pi * l * mp.eta * mu) * X[k, l])
    return complex(total)


def _g_weights(vs, us, mp):
    # G_k = g(u_k, u minus u_k) / g(u_k, v)
    m = len(us)
    return np.array([np.prod([g_fn(us[k], us[p], mp) for p in range(m) if p != k])
                     / np.prod([g_fn(us[k], v, mp) for v in vs]) for k in range(m)])


def fourier_system_residual(X: np.ndarray, nu: int, mu: int, r: complex, vs, us, mp: ModelParams,
                            gp: GaugeParams) -> float:
    """Max normalised residual of sum_k T_ik^{(nu mu)}(r) G_k Y_k^{(mu)}(r) = 0 over rows i."""
    us = [complex(u) for u in us]
    T = overlap_entries(nu, mu, vs, us, r, mp)
    GY = _g_weights(vs, us, mp) * np.array([y_transform(X, mu, k, r, vs, us, mp, gp) for k in range(len(us))])
    terms = T * GY[None, :]
    scale = np.abs(terms).sum(axis=1)
    return float(np.max(np.abs(terms.sum(axis=1)) / np.where(scale > 0, scale, 1.0)))


def collapsed_system_residual(X: np.ndarray, nu: int, mu: int, vs, us, mp: ModelParams, gp: GaugeParams) -> float:
    """Normalised residual of sum_k (T_nu(u_k) - T_mu(u_k)) G_k Y_k^{(mu)}(0)."""
    us = [complex(u) for u in us]
    G = _g_weights(vs, us, mp)
    terms = [(transfer_eigenvalue(nu, u, vs, mp) - transfer_eigenvalue(mu, u, vs, mp)) * G[k]
             * y_transform(X, mu, k, 0.0, vs, us, mp, gp) for k, u in enumerate(us)]
    scale = sum(abs(t) for t in terms)
    return float(abs(sum(terms)) / scale) if scale > 0 else 0.0


def y_solution_ratios(X: np.ndarray, nu: int, mu: int, r: complex, vs, us, mp: ModelParams,
                      gp: GaugeParams) -> np.ndarray:
    """Y_k W_n(u minus u_k, v) / det_{j != k} T^{(nu mu)}(r) for every k; constant in k on shell."""
    us = [complex(u) for u in us]
    T = overlap_entries(nu, mu, vs, us, r, mp)
    out = []
    for k in range(len(us)):
        rest = us[:k] + us[k + 1:]
        minor = dense_determinant(np.delete(T, k, axis=1))
        out.append(y_transform(X, mu, k, r, vs, us, mp, gp) * w_n(rest, vs, mp.tau) / minor)
    return np.array(out)


def gaudin_limit_entries(nu: int, vs, mp: ModelParams) -> np.ndarray:
    """lim_{eps -> 0} theta_1(eps) T^{(nu nu)}_{ik}(-n eps) at u = v + eps."""
    vs = [complex(v) for v in vs]
    n = len(vs)
    G = gaudin_matrix(vs, mp)
    pref = theta(1, mp.eta, mp.tau) * cmath.exp(-1j * math.pi * mp.eta * nu)
    out = np.empty((n, n), dtype=complex)
    for k in range(n):
        dk = vacuum_eigenvalues(vs[k], mp)[1]
        fk = np.prod([f_fn(vs[k], vs[p], mp) for p in range(n) if p != k])
        out[:, k] = pref * dk * fk * G[:, k]
    return out


def cauchy_preconditioner(l: int, us, ws, mp: ModelParams, gp: GaugeParams) -> np.ndarray:
    """W^l_{jk} = g(u_k, w_j) g(u_k, u minus u_k)/g(u_k, w) theta_1(u_k - w_j - S - tau_l - 1/2)."""
    us = [complex(u) for u in us]
    ws = [complex(w) for w in ws]
    S = sum(us) - sum(ws)
    shift = tau_shift(l, gp)
    m = len(us)
    W = np.empty((m, m), dtype=complex)
    for k in range(m):
        gk = np.prod([g_fn(us[k], us[p], mp) for p in range(m) if p != k])
        gk /= np.prod([g_fn(us[k], w, mp) for w in ws])
        for j in range(m):
            W[j, k] = g_fn(us[k], ws[j], mp) * gk * theta(1, us[k] - ws[j] - S - shift, mp.tau)
    return W


def e_pm_direct(sign: int, l: int, us, ws, mp: ModelParams, gp: GaugeParams) -> np.ndarray:
    """E^{+-}_{jk} by explicit summation over m."""
    us = [complex(u) for u in us]
    W = cauchy_preconditioner(l, us, ws, mp, gp)
    eta, tau = mp.eta, mp.tau
    m_ = len(us)
    shift = tau_shift(l + sign, gp)
    E = np.zeros((m_, m_), dtype=complex)
    for j in range(m_):
        for k in range(m_):
            E[j, k] = theta(1, sign * eta, tau) * sum(
                W[j, m] * theta(1, us[m] - us[k] + shift, tau) / theta(1, us[m] - us[k] + sign * eta, tau)
                for m in range(m_))
    return E


def e_pm_closed(sign: int, l: int, us, ws, mp: ModelParams, gp: GaugeParams) -> np.ndarray:
    """E^{+-}_{jk} from the residue evaluation."""
    us = [complex(u) for u in us]
    ws = [complex(w) for w in ws]
    S = sum(us) - sum(ws)
    tau = mp.tau
    m_ = len(us)
    t_l = theta(1, tau_shift(l, gp), tau)
    shift = tau_shift(l + sign, gp)
    E = np.empty((m_, m_), dtype=complex)
    for j in range(m_):
        for k in range(m_):
            base = theta(1, us[k] - ws[j] - S - shift, tau) * t_l
            if sign > 0:
                val = base / h_fn(ws[j], us[k], mp)
                val *= _prod(h_fn, ws, us[k], mp) / _prod(h_fn, us, us[k], mp)
            else:
                val = base / h_fn(us[k], ws[j], mp)
                val *= _prod(h_fn, us[k], ws, mp) / _prod(h_fn, us[k], us, mp)
            E[j, k] = val
    return E
