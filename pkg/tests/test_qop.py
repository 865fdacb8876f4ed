import numpy as np
import pytest

from ellipt_bethe.gauge_aba import vacuum_eigenvalues
from ellipt_bethe.qop import (best_reference_point, pre_q_left, pre_q_right, q_eigenvalue_model, q_operator,
                              select_basis, tq_eigenvalue_residual, tq_operator_residual)
from ellipt_bethe.vertex import symmetry_operator, transfer_matrix

from conftest import rand_params


@pytest.mark.parametrize("fixture", ["chain2_q4", "chain2_q3"])
def test_operator_tq_relation(fixture, request, rng):
    mp, gp, _ = request.getfixturevalue(fixture)
    for side in ("right", "left"):
        basis = select_basis(mp, gp, side)
        for u in rand_params(rng, 3, mp.tau.tau):
            assert tq_operator_residual(u, mp, gp, side, basis) < 1e-10


def test_q_operator_commutes_at_four_sites(chain4_q3, rng):
    mp, gp, _ = chain4_q3
    basis = select_basis(mp, gp, "right")
    u0, cond = best_reference_point(mp, gp, basis)
    assert np.isfinite(cond)
    u, v = rand_params(rng, 2, mp.tau.tau)
    Qu, Qv = q_operator(u, mp, gp, u0, basis), q_operator(v, mp, gp, u0, basis)
    Tv = transfer_matrix(v, mp)
    assert np.linalg.norm(Qu @ Tv - Tv @ Qu) < 1e-8 * np.linalg.norm(Qu) * np.linalg.norm(Tv)
    assert np.linalg.norm(Qu @ Qv - Qv @ Qu) < 1e-8 * np.linalg.norm(Qu) * np.linalg.norm(Qv)
    U3 = symmetry_operator(3, mp.N)
    assert np.linalg.norm(Qu @ U3 - U3 @ Qu) < 1e-8 * np.linalg.norm(Qu)


def test_left_right_pre_q_exchange(chain2_q3):
    mp, gp, _ = chain2_q3
    u, v = 0.23 + 0.11j, -0.3 + 0.2j
    QL = lambda x: pre_q_left(x, mp, gp)
    QR = lambda x: pre_q_right(x, mp, gp)
    lhs, rhs = QL(u) @ QR(v), QL(v) @ QR(u)
    assert np.linalg.norm(lhs - rhs) < 1e-10 * np.linalg.norm(lhs)


@pytest.mark.parametrize("fixture", ["chain2_q4", "chain2_q3", "chain4_q4", "chain4_q3"])
def test_eigenvalue_tq_and_quasiperiodicity(fixture, request, rng):
    mp, _, states = request.getfixturevalue(fixture)
    us = rand_params(rng, 4, mp.tau.tau)
    tau = mp.tau.tau
    for st in states:
        assert tq_eigenvalue_residual(st, us, mp) < 1e-9
        Q = q_eigenvalue_model(*st.sumrule_ints, st.roots, mp.tau)
        for u in us:
            c = mp.N * (2 * u + mp.eta + tau) - 2 * sum(mp.xi)
            ref = (-1) ** st.sumrule_ints[0] * np.exp(-1j * np.pi * c / 2) * Q(u)
            assert abs(Q(u + tau) - ref) < 1e-10 * abs(ref)
            assert abs(Q(u + 1) - (-1) ** st.sumrule_ints[1] * Q(u)) < 1e-10 * abs(Q(u))


def test_q_zeros_are_roots(chain2_q3):
    mp, _, states = chain2_q3
    for st in states:
        Q = q_eigenvalue_model(*st.sumrule_ints, st.roots, mp.tau)
        assert all(abs(Q(v)) < 1e-14 for v in st.roots)
        a, d = vacuum_eigenvalues(st.roots[0], mp)
        assert abs(a * Q(st.roots[0] - mp.eta) + d * Q(st.roots[0] + mp.eta)) < 1e-10 * abs(a * Q(st.roots[0] - mp.eta))
