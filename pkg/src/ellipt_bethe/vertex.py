"""Eight-vertex R-matrix, L-operators, monodromy and transfer matrix."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .algebra import PAULI, elementary_matrix, kron_all
from .theta import ModularParam, as_modular, theta, theta1_deriv

MAX_SITES = 8


@dataclass(frozen=True)
class ModelParams:
    """Inhomogeneous chain of ``N`` sites at rational ``eta = 2P/Q``.

    ``n`` is the number of Bethe roots; by default ``N/2``.  It must satisfy
    ``2n = N (mod Q)``.
    """

    N: int
    P: int
    Q: int
    tau: ModularParam
    xi: tuple = ()
    n: int | None = None
    tau2: ModularParam = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        tau = as_modular(self.tau)
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "tau2", tau.scaled(2.0))
        if self.N < 2 or self.N % 2 or self.N > MAX_SITES:
            raise ValueError(f"N must be even with 2 <= N <= {MAX_SITES}, got {self.N}")
        if self.Q < 1 or self.P < 1 or math.gcd(self.P, self.Q) != 1:
            raise ValueError(f"need coprime positive P, Q; got {self.P}, {self.Q}")
        xi = tuple(complex(x) for x in (self.xi if len(self.xi) else [0.0] * self.N))
        if len(xi) != self.N:
            raise ValueError(f"expected {self.N} inhomogeneities, got {len(xi)}")
        object.__setattr__(self, "xi", xi)
        n = self.N // 2 if self.n is None else int(self.n)
        if (2 * n - self.N) % self.Q:
            raise ValueError(f"2n = N (mod Q) violated for n={n}, N={self.N}, Q={self.Q}")
        object.__setattr__(self, "n", n)

    @classmethod
    def from_eta(cls, N: int, eta, tau, xi: Sequence[complex] | None = None, n: int | None = None):
        """Build from a rational ``eta`` (e.g. ``"1/2"``, ``Fraction(2, 3)``)."""
        if isinstance(eta, float):
            approx = Fraction(eta).limit_denominator(1000)
            if abs(float(approx) - eta) > 1e-12:
                raise ValueError(f"eta={eta} is not close to a rational with small denominator")
            eta = approx
        frac = Fraction(eta) / 2
        return cls(N=N, P=frac.numerator, Q=frac.denominator, tau=as_modular(tau), xi=tuple(xi or ()), n=n)

    @property
    def eta(self) -> float:
        return 2.0 * self.P / self.Q

    @property
    def dim(self) -> int:
        return 2**self.N

    @property
    def homogeneous(self) -> bool:
        return all(x == self.xi[0] for x in self.xi)

    def with_xi(self, xi: Sequence[complex]) -> "ModelParams":
        return ModelParams(self.N, self.P, self.Q, self.tau, tuple(xi), self.n)

    def with_tau(self, tau) -> "ModelParams":
        return ModelParams(self.N, self.P, self.Q, as_modular(tau), self.xi, self.n)


@dataclass(frozen=True)
class BoltzmannWeights:
    """Pauli-basis weights ``W_0..W_3``; ``R = sum_a W_a sigma_a (x) sigma_a``."""

    W: tuple

    @property
    def a(self) -> complex:
        return self.W[0] + self.W[3]

    @property
    def b(self) -> complex:
        return self.W[0] - self.W[3]

    @property
    def c(self) -> complex:
        return self.W[1] + self.W[2]

    @property
    def d(self) -> complex:
        return self.W[1] - self.W[2]


def boltzmann_weights(u: complex, eta: complex, tau) -> BoltzmannWeights:
    """Weights W_a = theta_1(eta) theta_{5-a}(u + eta/2) / (2 theta_{5-a}(eta/2))."""
    tau = as_modular(tau)
    t1 = theta(1, eta, tau)
    ws = []
    for a in range(4):
        k = 5 - a  # index mod 4: 5 -> theta_1
        ws.append(t1 * theta(k, u + eta / 2, tau) / (2.0 * theta(k, eta / 2, tau)))
    return BoltzmannWeights(tuple(ws))


def boltzmann_weights_2tau(u: complex, eta: complex, tau) -> tuple[complex, complex, complex, complex]:
    """Vertex weights (a, b, c, d) written with theta functions of modulus 2 tau."""
    tau = as_modular(tau)
    t2 = tau.scaled(2.0)
    den = theta(2, 0.0, tau) * theta(4, 0.0, t2) / 2.0
    a = theta(4, eta, t2) * theta(1, u + eta, t2) * theta(4, u, t2) / den
    b = theta(4, eta, t2) * theta(4, u + eta, t2) * theta(1, u, t2) / den
    c = theta(1, eta, t2) * theta(4, u + eta, t2) * theta(4, u, t2) / den
    d = theta(1, eta, t2) * theta(1, u + eta, t2) * theta(1, u, t2) / den
    return a, b, c, d


def _resolve(mp, eta, tau):
    if mp is not None:
        return mp.eta, mp.tau
    if eta is None or tau is None:
        raise ValueError("pass either ModelParams or both eta and tau")
    return eta, as_modular(tau)


def r_matrix(u: complex, mp: ModelParams | None = None, *, eta=None, tau=None) -> np.ndarray:
    """4x4 R-matrix on C^2 (x) C^2 (first factor is the most significant index)."""
    eta, tau = _resolve(mp, eta, tau)
    w = boltzmann_weights(u, eta, tau).W
    return sum(w[a] * np.kron(PAULI[a], PAULI[a]) for a in range(4))


def l_operator(u: complex, mp: ModelParams | None = None, *, eta=None, tau=None) -> np.ndarray:
    """L-operator as an array ``L[a, b]`` of 2x2 quantum operators.

    The auxiliary space is the first R-matrix factor; no spectral shift is applied.
    """
    R = r_matrix(u, mp, eta=eta, tau=tau)
    return R.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3)


def monodromy(u: complex, mp: ModelParams) -> np.ndarray:
    """Monodromy T(u) = L_1(u - xi_1) ... L_N(u - xi_N) as an array ``T[a, b]``.

    ``T[0, 0], T[0, 1], T[1, 0], T[1, 1]`` are the operators A, B, C, D.
    """
    T = None
    for x in mp.xi:
        L = l_operator(u - x, mp)
        if T is None:
            T = L
            continue
        d = T.shape[-1]
        T = np.einsum("acij,cbkl->abikjl", T, L).reshape(2, 2, 2 * d, 2 * d)
    return T


def transfer_matrix(u: complex, mp: ModelParams, T: np.ndarray | None = None) -> np.ndarray:
    if T is None:
        T = monodromy(u, mp)
    return T[0, 0] + T[1, 1]


def symmetry_operator(a: int, N: int) -> np.ndarray:
    """Global spin flip U_a = sigma_a on every site (a in 1, 2, 3)."""
    if a not in (1, 2, 3):
        raise ValueError("symmetry index must be 1, 2 or 3")
    return kron_all([PAULI[a]] * N)


def xyz_hamiltonian(mp: ModelParams) -> np.ndarray:
    """Periodic XYZ Hamiltonian sum_j sum_a J_a sigma_a^{(j)} sigma_a^{(j+1)}."""
    if not mp.homogeneous:
        raise ValueError("the XYZ Hamiltonian requires a homogeneous chain")
    J = xyz_couplings(mp)
    N = mp.N
    H = np.zeros((mp.dim, mp.dim), dtype=complex)
    for a in (1, 2, 3):
        for k in range(N):
            ops = [PAULI[0]] * N
            ops[k] = PAULI[a]
            ops[(k + 1) % N] = PAULI[a]
            H += J[a] * kron_all(ops)
    return H


def xyz_couplings(mp: ModelParams) -> tuple[complex, complex, complex, complex]:
    """``(J_0, J_1, J_2, J_3)``: J_a = theta_{5-a}(eta)/theta_{5-a}(0), J_0 = theta_1'(eta)/(2 theta_1(eta))."""
    eta, tau = mp.eta, mp.tau
    J0 = 0.5 * theta1_deriv(eta, tau) / theta(1, eta, tau)
    return (J0,) + tuple(theta(5 - a, eta, tau) / theta(5 - a, 0.0, tau) for a in (1, 2, 3))


def log_derivative_transfer_at_zero(mp: ModelParams) -> np.ndarray:
    """theta_1'(0)/(2 theta_1(eta)) H + J_0 N, the log-derivative of t(u) at 0."""
    J0 = xyz_couplings(mp)[0]
    scale = theta1_deriv(0.0, mp.tau) / (2.0 * theta(1, mp.eta, mp.tau))
    return scale * xyz_hamiltonian(mp) + J0 * mp.N * np.eye(mp.dim)


def inverse_problem_operator(i: int, j: int, m: int, mp: ModelParams, check: bool = True,
                             tol: float = 1e-9) -> np.ndarray:
    """Local operator E^{ij}_m rebuilt from monodromy entries at the inhomogeneities.

    With site 1 leftmost in the monodromy product the reconstruction reads
    ``(prod_{k<=m} t(xi_k))^{-1} T_{ji}(xi_m) prod_{k<m} t(xi_k)``.  With ``check``
    the result is compared with the literal elementary matrix.
    """
    if not 1 <= m <= mp.N:
        raise ValueError(f"site {m} outside 1..{mp.N}")
    before = np.eye(mp.dim, dtype=complex)
    for k in range(1, m):
        before = before @ transfer_matrix(mp.xi[k - 1], mp)
    Tm = monodromy(mp.xi[m - 1], mp)
    upto = before @ (Tm[0, 0] + Tm[1, 1])
    if np.linalg.cond(upto) > 1e12:
        raise np.linalg.LinAlgError("transfer matrices at the inhomogeneities are singular")
    op = np.linalg.solve(upto, Tm[j - 1, i - 1] @ before)
    if check:
        err = np.max(np.abs(op - elementary_matrix(i, j, m, mp.N)))
        if err > tol:
            raise AssertionError(f"inverse-problem reconstruction off by {err:.2e}")
    return op


def _embed_pair(R4: np.ndarray, i: int, j: int) -> np.ndarray:
    """Embed a two-space operator into spaces (i, j) of three 2-dim spaces."""
    R = R4.reshape(2, 2, 2, 2)
    out = np.zeros((2,) * 6, dtype=complex)
    eye = np.eye(2)
    k = 3 - i - j
    for a, b, c, d in np.ndindex(2, 2, 2, 2):
        for e in range(2):
            out_idx = [0] * 6
            out_idx[i], out_idx[j], out_idx[k] = a, b, e
            out_idx[3 + i], out_idx[3 + j], out_idx[3 + k] = c, d, e
            out[tuple(out_idx)] += R[a, b, c, d] * eye[e, e]
    return out.reshape(8, 8)


def yang_baxter_residual(u: complex, v: complex, eta, tau) -> float:
    """|R12(u-v) R13(u) R23(v) - R23(v) R13(u) R12(u-v)| relative to the left side."""
    R12 = _embed_pair(r_matrix(u - v, eta=eta, tau=tau), 0, 1)
    R13 = _embed_pair(r_matrix(u, eta=eta, tau=tau), 0, 2)
    R23 = _embed_pair(r_matrix(v, eta=eta, tau=tau), 1, 2)
    lhs = R12 @ R13 @ R23
    return float(np.linalg.norm(lhs - R23 @ R13 @ R12) / np.linalg.norm(lhs))


def _rtt_from_blocks(R: np.ndarray, Tu: np.ndarray, Tv: np.ndarray) -> float:
    D = Tu.shape[-1]
    eye2 = np.eye(2)
    T1 = sum(np.kron(np.kron(np.outer(eye2[a], eye2[b]), eye2), Tu[a, b]) for a in range(2) for b in range(2))
    T2 = sum(np.kron(np.kron(eye2, np.outer(eye2[a], eye2[b])), Tv[a, b]) for a in range(2) for b in range(2))
    R = np.kron(R, np.eye(D))
    lhs = R @ T1 @ T2
    return float(np.linalg.norm(lhs - T2 @ T1 @ R) / np.linalg.norm(lhs))


def rll_residual(u: complex, v: complex, eta, tau, xi: complex = 0.0) -> float:
    """|R(u-v) L1(u) L2(v) - L2(v) L1(u) R(u-v)| relative, for one site at inhomogeneity ``xi``."""
    return _rtt_from_blocks(r_matrix(u - v, eta=eta, tau=tau),
                            l_operator(u - xi, eta=eta, tau=tau), l_operator(v - xi, eta=eta, tau=tau))


def rtt_residual(u: complex, v: complex, mp: ModelParams) -> float:
    """|R(u-v) T1(u) T2(v) - T2(v) T1(u) R(u-v)| relative, for the full monodromy."""
    return _rtt_from_blocks(r_matrix(u - v, mp), monodromy(u, mp), monodromy(v, mp))
