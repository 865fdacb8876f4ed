import numpy as np
import pytest

from ellipt_bethe.errors import EllipticBetheError
from ellipt_bethe.verify import (brute_force_normalized, brute_force_scalar_product, inverse_problem_error,
                                 magnetization_form_factor_check, nu_support, spectrum_coverage,
                                 st_dependence_experiment)
from ellipt_bethe.vertex import ModelParams

from conftest import rand_params


def test_bruteforce_symmetric_in_parameters(chain4_q4, rng):
    mp, gp, states = chain4_q4
    st0 = states[0]
    us = rand_params(rng, mp.n, mp.tau.tau)
    a = brute_force_scalar_product(st0.nu, st0.roots, 1, us, mp, gp)
    b = brute_force_scalar_product(st0.nu, st0.roots[::-1], 1, us[::-1], mp, gp)
    assert abs(a - b) < 1e-12 * abs(a)


def test_bruteforce_normalised_diagonal(chain2_q3):
    mp, gp, states = chain2_q3
    for st0 in states:
        assert abs(brute_force_normalized(st0.nu, st0.roots, st0.nu, st0.roots, mp, gp) - 1) < 1e-12


def test_size_cap():
    mp = ModelParams.from_eta(6, "1/2", 0.8j, xi=[0.01 * k for k in range(6)])
    from ellipt_bethe.gauge_aba import GaugeParams
    with pytest.raises((ValueError, EllipticBetheError)):
        brute_force_scalar_product(0, [0.1, 0.2, 0.3], 0, [0.1, 0.2, 0.3], mp, GaugeParams.default(mp))


@pytest.mark.parametrize("fixture", ["chain2_q4", "chain2_q3"])
def test_inverse_problem_and_form_factor(fixture, request):
    mp, gp, states = request.getfixturevalue(fixture)
    assert inverse_problem_error(mp) < 1e-9
    total = 0
    for st0 in states:
        for m in (1, 2):
            lhs, rhs, rel = magnetization_form_factor_check(st0, m, mp, gp)
            assert rel < 1e-9
            total += lhs
    assert np.isfinite(total)


def test_st_dependence_experiment(chain2_q3):
    mp, _, states = chain2_q3
    st0 = states[0]
    rep = st_dependence_experiment(st0.nu, st0.roots, [0.11 + 0.05j, 0.23 - 0.04j], [-0.17 + 0.08j, 0.31 + 0.02j],
                                   mp)
    # the vector direction does not depend on the gauge pair
    assert rep.projective_spread < 1e-8
    assert rep.eta_shift_error < 1e-10


def test_spectrum_coverage(chain2_q3, chain4_q4):
    mp, gp, states = chain2_q3
    cov = spectrum_coverage(states, 0.23 + 0.11j, mp)
    assert cov["matched"] == mp.dim and not cov["unmatched"] and cov["worst_state_error"] < 1e-10
    mp, gp, states = chain4_q4
    cov = spectrum_coverage(states, 0.23 + 0.11j, mp)
    # every found state matches, and the eigenvalues left over are reported rather than hidden
    assert cov["worst_state_error"] < 1e-10
    assert cov["matched"] + len(cov["unmatched"]) == mp.dim


def test_own_nu_vector_nonzero(chain4_q3):
    mp, gp, states = chain4_q3
    for st0 in states:
        assert nu_support(st0, mp, gp)[st0.nu] > 1e-3
