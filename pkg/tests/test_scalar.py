import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ellipt_bethe import scalar
from ellipt_bethe.algebra import dense_determinant
from ellipt_bethe.errors import NotOnShellError, SingularConfigurationError
from ellipt_bethe.gauge_aba import transfer_eigenvalue
from ellipt_bethe.theta import theta
from ellipt_bethe.verify import brute_force_normalized, brute_force_x_values

from conftest import build, rand_params

_Q3 = build(2, "2/3")


def test_expanded_and_kronecker_forms_agree(chain4_q3, rng):
    mp, _, states = chain4_q3
    st0 = states[0]
    for mu in range(mp.Q):
        us = rand_params(rng, mp.n, mp.tau.tau)
        r = 0.13 + 0.04j
        A = scalar.overlap_entries(st0.nu, mu, st0.roots, us, r, mp)
        B = scalar.overlap_entries_kronecker(st0.nu, mu, st0.roots, us, r, mp)
        assert np.max(np.abs(A - B)) < 1e-12 * np.max(np.abs(A))
        M = scalar.overlap_matrix(st0.nu, mu, st0.roots, us, r, mp, cross_check=True)
        assert abs(M.det - dense_determinant(A)) < 1e-12 * abs(M.det)


def test_entries_are_one_periodic_in_r(chain2_q3):
    mp, _, states = chain2_q3
    st0 = states[0]
    us = [0.31 + 0.17j]
    A = scalar.overlap_entries(st0.nu, 1, st0.roots, us, 0.2 + 0.1j, mp)
    B = scalar.overlap_entries(st0.nu, 1, st0.roots, us, 1.2 + 0.1j, mp)
    assert np.max(np.abs(A - B)) < 1e-12 * np.max(np.abs(A))


def test_derivative_entries_match_finite_differences(chain4_q4, rng):
    mp, _, states = chain4_q4
    h = 1e-5
    for st0 in states[:3]:
        us = rand_params(rng, mp.n, mp.tau.tau)
        D = scalar.overlap_derivative_entries(st0.nu, st0.roots, us, mp)
        for i in range(mp.n):
            vp, vm = list(st0.roots), list(st0.roots)
            vp[i] += h
            vm[i] -= h
            for k, u in enumerate(us):
                fd = (transfer_eigenvalue(st0.nu, u, vp, mp) - transfer_eigenvalue(st0.nu, u, vm, mp)) / (2 * h)
                assert abs(fd - D[i, k]) < 1e-6 * max(1, abs(D[i, k]))


def _unwrap(d):
    return d - 2j * np.pi * np.round(d.imag / (2 * np.pi))


def test_gaudin_matrix_is_jacobian(chain4_q3):
    mp, _, states = chain4_q3
    h = 1e-6
    for st0 in states[:4]:
        G = scalar.gaudin_matrix(st0.roots, mp)
        for k in range(mp.n):
            vp, vm = list(st0.roots), list(st0.roots)
            vp[k] += h
            vm[k] -= h
            col = _unwrap(scalar.log_bethe_function(vp, st0.nu, mp) - scalar.log_bethe_function(vm, st0.nu, mp))
            assert np.max(np.abs(col / (2 * h) - G[:, k])) < 1e-6 * np.max(np.abs(G))


def test_gaudin_limit_of_entries(chain2_q4):
    mp, _, states = chain2_q4
    for st0 in states:
        ref = scalar.gaudin_limit_entries(st0.nu, st0.roots, mp)
        errs = []
        for eps in (1e-3, 1e-4):
            us = [v + eps for v in st0.roots]
            T = scalar.overlap_entries(st0.nu, st0.nu, st0.roots, us, -mp.n * eps, mp)
            errs.append(np.max(np.abs(theta(1, eps, mp.tau) * T - ref)) / np.max(np.abs(ref)))
        assert errs[1] < errs[0] / 5 and errs[1] < 1e-3


@pytest.mark.parametrize("fixture", ["chain2_q4", "chain2_q3", "chain4_q4"])
def test_normalized_scalar_product_matches_bruteforce(fixture, request, rng):
    mp, gp, states = request.getfixturevalue(fixture)
    for st0 in states[:2]:
        for mu in range(mp.Q):
            us = rand_params(rng, mp.n, mp.tau.tau)
            rep = scalar.normalized_scalar_product(st0.nu, st0.roots, mu, us, mp, gp, check_bruteforce=True)
            assert rep.rel_error < 1e-8, (st0.nu, mu, rep.branch)


def test_norm_is_one_and_permutation_symmetry(chain4_q3, rng):
    mp, gp, states = chain4_q3
    st0 = states[1]
    rep = scalar.normalized_scalar_product(st0.nu, st0.roots, st0.nu, list(st0.roots), mp, gp)
    assert abs(rep.S_formula - 1) < 1e-8
    us = rand_params(rng, mp.n, mp.tau.tau)
    a = scalar.normalized_scalar_product(st0.nu, st0.roots, 2, us, mp, gp).S_formula
    b = scalar.normalized_scalar_product(st0.nu, st0.roots, 2, us[::-1], mp, gp).S_formula
    assert abs(a - b) < 1e-10 * abs(a)


def test_selection_rule_branch(chain2_q4):
    mp, gp, states = chain2_q4
    st0 = states[0]
    rep = scalar.normalized_scalar_product(st0.nu, st0.roots, st0.nu + 1, [0.3 + 0.2j], mp, gp)
    assert rep.branch == "selection" and rep.S_formula == 0
    assert abs(brute_force_normalized(st0.nu, st0.roots, st0.nu + 1, [0.3 + 0.2j], mp, gp)) < 1e-10


def test_errors(chain2_q3):
    mp, gp, states = chain2_q3
    st0 = states[0]
    with pytest.raises(NotOnShellError):
        scalar.normalized_scalar_product(st0.nu, [st0.roots[0] + 0.01], 0, [0.2], mp, gp)
    with pytest.raises(SingularConfigurationError):
        scalar.overlap_entries(st0.nu, 1, st0.roots, list(st0.roots), 0.1, mp)
    with pytest.raises(ValueError):
        scalar.null_vector_test(1, [0.1, 0.2], mp, gp)


def test_orthogonality_regularized(chain4_q4):
    mp, _, states = chain4_q4
    for a in states:
        for b in states:
            if a is b:
                continue
            r = complex(sum(a.roots) - sum(b.roots))
            T, scale = scalar.regularized_overlap_entries(a.nu, b.nu, a.roots, b.roots, r, mp, return_scale=True)
            assert abs(dense_determinant(T)) < 1e-10 * scale


def test_free_fermion_closed_forms(chain4_q4, rng):
    mp, gp, states = chain4_q4
    for st0 in states[:3]:
        for mu in (st0.nu, st0.nu + 2):
            us = rand_params(rng, mp.n, mp.tau.tau)
            r = 0.19 + 0.05j
            closed = scalar.det_overlap_free_fermion(st0.nu, mu % 4, st0.roots, us, r, mp)
            dense = dense_determinant(scalar.overlap_entries(st0.nu, mu % 4, st0.roots, us, r, mp))
            assert abs(closed - dense) < 1e-10 * abs(dense)
            ff = scalar.free_fermion_scalar(st0.nu, st0.roots, mu % 4, us, mp, gp)
            gen = scalar.normalized_scalar_product(st0.nu, st0.roots, mu % 4, us, mp, gp).S_formula
            assert abs(ff - gen) < 1e-9 * abs(gen)
    assert scalar.free_fermion_scalar(states[0].nu, states[0].roots, states[0].nu + 1,
                                      rand_params(rng, mp.n, mp.tau.tau), mp, gp) == 0


def test_free_fermion_requires_half(chain2_q3):
    mp, gp, states = chain2_q3
    with pytest.raises(ValueError):
        scalar.det_overlap_free_fermion(0, 0, states[0].roots, [0.2], 0.1, mp)


def test_null_vector(chain4_q4, rng):
    mp, gp, states = chain4_q4
    x = mp.xi[1]
    us = [x, x - mp.eta] + rand_params(rng, mp.n - 2, mp.tau.tau)
    rep = scalar.null_vector_test(2, us, mp, gp, states=states)
    assert rep["passed"]
    assert rep["suppression"] < 1e-6


@pytest.mark.parametrize("fixture", ["chain2_q4", "chain2_q3"])
def test_linear_system_from_bruteforce(fixture, request, rng):
    mp, gp, states = request.getfixturevalue(fixture)
    for st0 in states:
        us = rand_params(rng, mp.n + 1, mp.tau.tau)
        X = brute_force_x_values(st0.nu, st0.roots, us, mp, gp)
        assert scalar.homogeneous_system_residual(X, st0.nu, st0.roots, us, mp, gp) < 1e-9
        Xp = X + 1e-3 * np.abs(X).max() * rng.normal(size=X.shape)
        assert scalar.homogeneous_system_residual(Xp, st0.nu, st0.roots, us, mp, gp) > 1e-6
        for mu in range(mp.Q):
            if mp.Q % 2 == 0 and (mu - st0.nu) % 2:
                continue
            assert scalar.fourier_system_residual(X, st0.nu, mu, 0.17 + 0.03j, st0.roots, us, mp, gp) < 1e-9
            assert scalar.collapsed_system_residual(X, st0.nu, mu, st0.roots, us, mp, gp) < 1e-9


def test_cauchy_preconditioner_identities(chain4_q3, rng):
    mp, gp, _ = chain4_q3
    us = rand_params(rng, 3, mp.tau.tau)
    ws = rand_params(rng, 3, mp.tau.tau)
    for l in range(mp.Q):
        assert abs(dense_determinant(scalar.cauchy_preconditioner(l, us, ws, mp, gp))) > 1e-12
        for sign in (1, -1):
            direct = scalar.e_pm_direct(sign, l, us, ws, mp, gp)
            closed = scalar.e_pm_closed(sign, l, us, ws, mp, gp)
            assert np.max(np.abs(direct - closed)) < 1e-11 * np.max(np.abs(direct))


@settings(max_examples=15, deadline=None)
@given(st.floats(-0.5, 0.5), st.floats(-0.3, 0.3), st.integers(0, 2))
def test_formula_vs_bruteforce_property(x, y, mu):
    mp, gp, states = _Q3
    st0 = states[0]
    u = complex(x, y * mp.tau.tau.imag)
    try:
        rep = scalar.normalized_scalar_product(st0.nu, st0.roots, mu, [u], mp, gp, check_bruteforce=True)
    except SingularConfigurationError:
        return  # u coincides with a root
    assert abs(rep.S_formula - rep.S_bruteforce) < 1e-8 * max(1.0, abs(rep.S_bruteforce))
