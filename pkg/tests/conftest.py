import numpy as np
import pytest

from ellipt_bethe.bethe import solve_bethe
from ellipt_bethe.checks import default_xi, random_parameters
from ellipt_bethe.gauge_aba import GaugeParams
from ellipt_bethe.vertex import ModelParams

TAU = 0.8j


def build(N, eta, tau=TAU, seed=0):
    mp = ModelParams.from_eta(N, eta, tau, xi=default_xi(N, seed, tau))
    states = solve_bethe(mp)
    gp = GaugeParams.default(mp, roots=[v for st in states for v in st.roots])
    return mp, gp, states


@pytest.fixture(scope="session")
def chain2_q4():
    return build(2, "1/2")


@pytest.fixture(scope="session")
def chain2_q3():
    return build(2, "2/3")


@pytest.fixture(scope="session")
def chain4_q4():
    return build(4, "1/2")


@pytest.fixture(scope="session")
def chain4_q3():
    return build(4, "2/3", tau=0.3 + 0.8j)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def rand_params(rng, n, tau=TAU):
    return random_parameters(rng, n, tau)
