"""Dense linear algebra on the spin-chain Hilbert space (C^2)^{otimes N}.

Basis ordering: site 1 is the most significant (leftmost) tensor factor and
``|+> = (1, 0)``, ``|-> = (0, 1)``.  Pairings between left and right vectors
are bilinear (no complex conjugation).
"""
from __future__ import annotations

from functools import reduce
from typing import Sequence

import numpy as np
import scipy.linalg

PAULI = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def kron_all(factors: Sequence[np.ndarray]) -> np.ndarray:
    """Kronecker product of a sequence, first factor leftmost."""
    return reduce(np.kron, factors)


def embed_local(op: np.ndarray, site: int, n_sites: int) -> np.ndarray:
    """Embed a 2x2 operator acting on ``site`` (1-based) into the full space."""
    if not 1 <= site <= n_sites:
        raise ValueError(f"site {site} outside 1..{n_sites}")
    left = np.eye(2 ** (site - 1), dtype=complex)
    right = np.eye(2 ** (n_sites - site), dtype=complex)
    return np.kron(np.kron(left, op), right)


def elementary_matrix(i: int, j: int, site: int, n_sites: int) -> np.ndarray:
    """E^{ij} (1-based i, j) acting on ``site``."""
    e = np.zeros((2, 2), dtype=complex)
    e[i - 1, j - 1] = 1.0
    return embed_local(e, site, n_sites)


def pair(left: np.ndarray, right: np.ndarray) -> complex:
    """Bilinear pairing <left|right> = sum_i left_i right_i."""
    return complex(np.dot(left, right))


def dense_determinant(mat: np.ndarray) -> complex:
    """Determinant from a partially pivoted LU factorisation with sign bookkeeping."""
    mat = np.asarray(mat, dtype=complex)
    if mat.size == 0:
        return 1.0 + 0.0j
    lu, piv = scipy.linalg.lu_factor(mat, check_finite=True)
    sign = (-1) ** int(np.sum(piv != np.arange(len(piv))))
    return complex(sign * np.prod(np.diag(lu)))


def hadamard_scale(mat: np.ndarray) -> float:
    """Product of row norms; bounds |det| and sets the scale for "vanishing" tests."""
    mat = np.asarray(mat)
    if mat.size == 0:
        return 1.0
    return float(np.prod(np.linalg.norm(mat, axis=1)))


def dense_eigen(mat: np.ndarray):
    """Eigenvalues with right and left eigenvectors.

    Left eigenvectors are returned as rows ``l`` with ``l @ mat = lambda l`` and
    normalised bilinearly against the matching right vector.
    """
    vals, left, right = scipy.linalg.eig(mat, left=True, right=True)
    left_rows = left.T.copy()  # scipy returns conj-transposed left vectors
    left_rows = left_rows.conj()
    for k in range(len(vals)):
        p = left_rows[k] @ right[:, k]
        if abs(p) > 1e-300:
            left_rows[k] /= p
    return vals, right, left_rows


def projective_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Distance between the complex lines spanned by ``a`` and ``b`` (0 if parallel)."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        return float("inf")
    a = a / na
    b = b / nb
    ov = np.vdot(b, a)
    phase = ov / abs(ov) if abs(ov) > 0 else 1.0
    return float(np.linalg.norm(a - phase * b))
