import cmath
from fractions import Fraction

import numpy as np
import pytest

from ellipt_bethe.algebra import elementary_matrix
from ellipt_bethe.gauge_aba import c_function
from ellipt_bethe.theta import theta
from ellipt_bethe.vertex import (ModelParams, boltzmann_weights, boltzmann_weights_2tau, inverse_problem_operator,
                                 log_derivative_transfer_at_zero, monodromy, r_matrix, rll_residual, rtt_residual,
                                 symmetry_operator, transfer_matrix, xyz_hamiltonian, yang_baxter_residual)

from conftest import rand_params

PERM = np.eye(4)[[0, 2, 1, 3]]


def test_model_params_validation():
    with pytest.raises(ValueError):
        ModelParams.from_eta(3, "1/2", 0.8j)
    with pytest.raises(ValueError):
        ModelParams.from_eta(2, "1/2", 0.8j, xi=[0.1])
    with pytest.raises(ValueError):
        ModelParams.from_eta(2, 0.123456789, 0.8j)
    with pytest.raises(ValueError):
        ModelParams.from_eta(2, "1/2", 0.8j, n=2)
    mp = ModelParams.from_eta(4, 2 / 3, 0.8j)
    assert (mp.P, mp.Q, mp.n) == (1, 3, 2)
    assert ModelParams.from_eta(2, Fraction(4, 5), 0.8j).Q == 5


def test_r_at_zero_is_permutation():
    eta, tau = 0.5, 0.3 + 0.8j
    assert np.max(np.abs(r_matrix(0.0, eta=eta, tau=tau) - theta(1, eta, tau) * PERM)) < 1e-14


def test_r_transpose_symmetry(rng):
    eta, tau = 2 / 3, 0.2 + 0.9j
    for u in rand_params(rng, 5, tau):
        R = r_matrix(u, eta=eta, tau=tau)
        Rt = R.reshape(2, 2, 2, 2).transpose(2, 3, 0, 1).reshape(4, 4)
        assert np.max(np.abs(R - Rt)) < 1e-14 * np.max(np.abs(R))


def test_weights_two_forms_agree(rng):
    eta, tau = 0.5, 0.3 + 0.8j
    for u in rand_params(rng, 5, tau):
        w = boltzmann_weights(u, eta, tau)
        alt = boltzmann_weights_2tau(u, eta, tau)
        for x, y in zip((w.a, w.b, w.c, w.d), alt):
            assert abs(x - y) < 1e-12 * max(1, abs(x))


def test_yang_baxter_rll_rtt(rng):
    for _ in range(10):
        tau = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.5, 1.5))
        u, v, x = rand_params(rng, 3, tau)
        eta = rng.uniform(0.1, 0.9)
        assert yang_baxter_residual(u, v, eta, tau) < 1e-12
        assert rll_residual(u, v, eta, tau, x) < 1e-12
    mp = ModelParams.from_eta(4, "2/3", 0.3 + 0.8j, xi=[0.1, -0.2, 0.05, 0.3])
    assert rtt_residual(0.21 + 0.1j, -0.3 + 0.2j, mp) < 1e-12


def test_transfer_matrices_commute(chain4_q3, rng):
    mp = chain4_q3[0]
    u, v = rand_params(rng, 2, mp.tau.tau)
    Tu, Tv = transfer_matrix(u, mp), transfer_matrix(v, mp)
    assert np.linalg.norm(Tu @ Tv - Tv @ Tu) <= 1e-11 * np.linalg.norm(Tu) * np.linalg.norm(Tv)
    for a in (1, 2, 3):
        U = symmetry_operator(a, mp.N)
        assert np.linalg.norm(Tu @ U - U @ Tu) <= 1e-12 * np.linalg.norm(Tu)


def test_monodromy_quasi_periodicity(chain2_q3):
    mp = chain2_q3[0]
    u = 0.17 + 0.09j
    T, T1 = monodromy(u, mp), monodromy(u + 1, mp)
    sign = np.array([[1, -1], [-1, 1]])
    for a in range(2):
        for b in range(2):
            assert np.max(np.abs(T1[a, b] - sign[a, b] * T[a, b])) < 1e-12 * np.max(np.abs(T))
    Ttau = monodromy(u + mp.tau.tau, mp)
    phase = cmath.exp(-1j * np.pi * c_function(u, mp))
    for a in range(2):
        for b in range(2):
            assert np.max(np.abs(Ttau[a, b] - phase * T[1 - a, 1 - b])) < 1e-11 * np.max(np.abs(Ttau))


def test_two_site_transfer_trace_of_r_product():
    mp = ModelParams.from_eta(2, "1/2", 0.8j, xi=[0.1, -0.05])
    u = 0.3 + 0.1j
    R01 = np.kron(r_matrix(u - mp.xi[0], mp), np.eye(2))
    # R_{02} acting on (aux, site 1, site 2): conjugate the (aux, site 2) embedding by a swap of sites 1 and 2
    swap12 = np.kron(np.eye(2), PERM)
    R02 = swap12 @ np.kron(r_matrix(u - mp.xi[1], mp), np.eye(2)) @ swap12
    prod = (R01 @ R02).reshape(2, 4, 2, 4)
    trace = prod[0, :, 0, :] + prod[1, :, 1, :]
    assert np.max(np.abs(trace - transfer_matrix(u, mp))) < 1e-12 * np.max(np.abs(trace))


def test_hamiltonian_is_log_derivative():
    mp = ModelParams.from_eta(4, "2/3", 0.8j)
    h = 1e-5
    T0 = transfer_matrix(0.0, mp)
    dT = (transfer_matrix(h, mp) - transfer_matrix(-h, mp)) / (2 * h)
    fd = np.linalg.solve(T0, dT)
    ref = log_derivative_transfer_at_zero(mp)
    assert np.max(np.abs(fd - ref)) < 1e-7 * np.max(np.abs(ref))
    H = xyz_hamiltonian(mp)
    assert np.allclose(H, H.T)
    with pytest.raises(ValueError):
        xyz_hamiltonian(mp.with_xi([0.1, 0, 0, 0]))


def test_inverse_problem(chain2_q3):
    mp = chain2_q3[0]
    for i in (1, 2):
        for j in (1, 2):
            for m in (1, 2):
                op = inverse_problem_operator(i, j, m, mp, check=False)
                assert np.max(np.abs(op - elementary_matrix(i, j, m, mp.N))) < 1e-9
