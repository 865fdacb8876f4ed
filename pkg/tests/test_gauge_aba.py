import numpy as np
import pytest

from ellipt_bethe.errors import SingularGaugeError
from ellipt_bethe.gauge_aba import (GaugeParams, bethe_vector, transfer_eigenvalue, u_action_check,
                                    vacuum_eigenvalues, vacuum_vector)
from ellipt_bethe.verify import onshell_action_check
from ellipt_bethe.vertex import transfer_matrix

from conftest import rand_params


@pytest.mark.parametrize("fixture", ["chain2_q4", "chain2_q3", "chain4_q4", "chain4_q3"])
def test_onshell_vectors_are_eigenvectors(fixture, request, rng):
    mp, gp, states = request.getfixturevalue(fixture)
    assert len(states) >= 2
    us = rand_params(rng, 2, mp.tau.tau)
    for st in states:
        assert onshell_action_check(st, us, mp, gp) < 1e-9


def test_transfer_eigenvalues_in_spectrum(chain4_q3, rng):
    mp, gp, states = chain4_q3
    u = rand_params(rng, 1, mp.tau.tau)[0]
    ev = np.linalg.eigvals(transfer_matrix(u, mp))
    for st in states:
        lam = transfer_eigenvalue(st.nu, u, st.roots, mp)
        assert np.min(np.abs(ev - lam)) < 1e-10 * abs(lam)


def test_vacuum_eigenvalues_on_vacuum(chain2_q3):
    # with no roots the single-component vector is the gauged vacuum and T_nu(u; {}) = e a + e^-1 d
    mp, gp, _ = chain2_q3
    u = 0.3 + 0.1j
    a, d = vacuum_eigenvalues(u, mp)
    assert abs(transfer_eigenvalue(0, u, [], mp) - (a + d)) < 1e-14 * abs(a + d)
    assert np.linalg.norm(vacuum_vector(0, "right", mp, gp)) > 0


def test_bethe_vector_symmetric_in_roots(chain4_q4, rng):
    mp, gp, _ = chain4_q4
    us = rand_params(rng, mp.n, mp.tau.tau)
    v1 = bethe_vector(1, us, "right", mp, gp)
    v2 = bethe_vector(1, us[::-1], "right", mp, gp)
    assert np.linalg.norm(v1 - v2) < 1e-12 * np.linalg.norm(v1)


@pytest.mark.parametrize("side", ["right", "left"])
def test_spin_flip_actions(chain2_q3, side):
    mp, gp, states = chain2_q3
    for st in states:
        assert u_action_check(3, st, mp, gp, side) < 1e-10
        assert u_action_check(1, st, mp, gp, side) < 1e-10


def test_gauge_genericity():
    from ellipt_bethe.vertex import ModelParams
    mp = ModelParams.from_eta(2, "1/2", 0.8j)
    with pytest.raises(SingularGaugeError):
        # tau_0 = 1/2 makes theta_2(tau_0) vanish
        GaugeParams.create(mp, 0.5, 0.5)
    gp = GaugeParams.default(mp)
    assert gp.genericity_problem(mp.Q) is None
