import numpy as np
import pytest

from ellipt_bethe.bethe import (BetheSystem, bethe_residuals, continue_roots, solve_bethe, solve_n2,
                                solve_newton, sum_rule_defect)
from ellipt_bethe.checks import default_xi
from ellipt_bethe.gauge_aba import transfer_eigenvalue
from ellipt_bethe.theta import lattice_distance
from ellipt_bethe.vertex import ModelParams, transfer_matrix


def test_two_site_closed_form(chain2_q4):
    mp, _, states = chain2_q4
    assert len(states) == 4
    base = (mp.xi[0] + mp.xi[1] - mp.eta) / 2
    tau = mp.tau.tau
    for st in states:
        assert max(st.residuals) < 1e-12
        assert min(lattice_distance(st.roots[0], base + w, mp.tau) for w in (0, 0.5, tau / 2, (tau + 1) / 2)) < 1e-12


@pytest.mark.parametrize("fixture", ["chain2_q3", "chain4_q4", "chain4_q3"])
def test_states_onshell_with_integer_sum_rule(fixture, request):
    mp, _, states = request.getfixturevalue(fixture)
    for st in states:
        sys = BetheSystem(mp, st.nu)
        assert np.max(bethe_residuals(st.roots, sys)) < 1e-9
        d, nu1, nu3 = sum_rule_defect(st.roots, st.nu, sys)
        assert abs(d) < 1e-10
        assert isinstance(nu1, int) and isinstance(nu3, int)


@pytest.mark.parametrize("fixture", ["chain4_q4", "chain4_q3"])
def test_eigenvalues_distinct_and_in_spectrum(fixture, request):
    mp, _, states = request.getfixturevalue(fixture)
    u = 0.23 + 0.11j
    ev = np.linalg.eigvals(transfer_matrix(u, mp))
    lams = [transfer_eigenvalue(st.nu, u, st.roots, mp) for st in states]
    for lam in lams:
        assert np.min(np.abs(ev - lam)) < 1e-9 * abs(lam)
    for i in range(len(lams)):
        for j in range(i):
            assert abs(lams[i] - lams[j]) > 1e-8 * abs(lams[i])


def test_newton_reproduces_free_fermion(chain4_q4):
    mp, _, states = chain4_q4
    newton = solve_newton(mp, seed=0)
    assert len(newton) >= len(states) // 2
    for st in newton:
        assert any(o.nu == st.nu and all(min(lattice_distance(a, b, mp.tau) for b in o.roots) < 1e-7
                                         for a in st.roots) for o in states)


def test_continuation_keeps_onshell(chain4_q3):
    mp, _, states = chain4_q3
    target = mp.with_xi([x + 0.01 for x in mp.xi])
    st = states[0]
    roots = continue_roots(st.roots, st.nu, mp, target)
    assert roots is not None
    assert np.max(bethe_residuals(roots, BetheSystem(target, st.nu))) < 1e-9


def test_n2_requires_two_sites():
    with pytest.raises(ValueError):
        solve_n2(ModelParams.from_eta(4, "1/2", 0.8j, xi=default_xi(4)))
    with pytest.raises(ValueError):
        solve_bethe(ModelParams.from_eta(2, "1/2", 0.8j, xi=default_xi(2)), strategy="bogus")
