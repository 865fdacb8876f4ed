"""Acceptance suite: eleven end-to-end criteria, each printing one PASS/FAIL line.

Run under pytest, or directly with ``python3 tests/test_acceptance.py``.
"""
import sys
import time

import pytest

from ellipt_bethe import checks


def _criterion_1():
    return [checks.check_yang_baxter(samples=100, seed=0, tol=1e-12)], 5


def _criterion_2():
    return [checks.check_two_site_table("1/2"), checks.check_two_site_table("2/3")], 5


def _criterion_3():
    return [checks.check_determinant_formula(2, "1/2", n_random=20, mu_mode="even", tol=1e-8),
            checks.check_determinant_formula(2, "2/3", n_random=20, mu_mode="all", tol=1e-8),
            checks.check_determinant_formula(4, "1/2", n_random=10, mu_mode="even", tol=1e-8)], 180


def _criterion_4():
    return [checks.check_orthogonality(2, "1/2"), checks.check_orthogonality(4, "1/2")], 60


def _criterion_5():
    return [checks.check_selection_rule(2, "1/2", n_random=10), checks.check_selection_rule(4, "1/2", n_random=5)], 30


def _criterion_6():
    return [checks.check_null_vector(4, "1/2", site=1), checks.check_null_vector(4, "1/2", site=3)], 30


def _criterion_7():
    return [checks.check_linear_system(2, "1/2"), checks.check_linear_system(2, "2/3")], 30


def _criterion_8():
    return [checks.check_q_operator(2, "1/2"), checks.check_q_operator(2, "2/3")], 30


def _criterion_9():
    return [checks.check_free_fermion(4, n_random=3)], 30


def _criterion_10():
    return [checks.check_gaudin_limit(2, "1/2"), checks.check_gaudin_limit(4, "1/2")], 30


def _criterion_11():
    return [checks.check_inverse_problem("1/2"), checks.check_inverse_problem("2/3")], 10


CRITERIA = [
    (1, "Yang-Baxter and RLL residuals", _criterion_1),
    (2, "two-site closed-form states, spectrum and eigenvector table", _criterion_2),
    (3, "normalised determinant formula vs brute force", _criterion_3),
    (4, "orthogonality of distinct on-shell states", _criterion_4),
    (5, "parity selection rule", _criterion_5),
    (6, "null vector at xi_p, xi_p - eta", _criterion_6),
    (7, "homogeneous linear system and solution shape", _criterion_7),
    (8, "Q-operator TQ relations and sum rule", _criterion_8),
    (9, "free-fermion closed forms", _criterion_9),
    (10, "Gaudin limit and derivative entries", _criterion_10),
    (11, "inverse problem and magnetization form factor", _criterion_11),
]


def _fmt(key, value):
    if isinstance(value, float):
        return f"{key}={value:.1e}"
    return f"{key}={value}"


def evaluate(fn):
    t0 = time.perf_counter()
    results, limit = fn()
    elapsed = time.perf_counter() - t0
    ok = all(r.passed for r in results) and elapsed < limit
    summary = "; ".join(f"{r.name}: " + ", ".join(_fmt(k, v) for k, v in r.details.items()) for r in results)
    return ok, elapsed, limit, summary


def _line(num, title, ok, elapsed, limit, summary):
    return f"[{'PASS' if ok else 'FAIL'}] criterion {num:2d} {title} | {elapsed:.2f}s < {limit}s | {summary}"


@pytest.mark.parametrize("num,title,fn", CRITERIA, ids=[f"criterion_{c[0]:02d}" for c in CRITERIA])
def test_criterion(num, title, fn, capsys):
    ok, elapsed, limit, summary = evaluate(fn)
    with capsys.disabled():
        print("\n" + _line(num, title, ok, elapsed, limit, summary))
    assert ok, summary


if __name__ == "__main__":
    failures = 0
    for num, title, fn in CRITERIA:
        ok, elapsed, limit, summary = evaluate(fn)
        failures += not ok
        print(_line(num, title, ok, elapsed, limit, summary))
    sys.exit(1 if failures else 0)
