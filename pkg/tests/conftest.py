"""Shared fixtures.

paramF is the exact infinite-coexistence point of the RLR/LR family
(closed family at delta_R = 3/2); the parameter strings must stay exact,
rounding tau_L destroys the codimension-three structure. paramI and paramC
are solver-refined design points for the RLLR/LLR and RLRLR/LR families.
"""
import pytest

from bcnf import Params, solve_codim3

PARAM_F = {"tau_L": "-55/117", "delta_L": "4/9",
           "tau_R": "-5/2", "delta_R": "3/2", "mu": "1"}


@pytest.fixture(scope="session")
def pF():
    return Params.from_dict(PARAM_F)


@pytest.fixture(scope="session")
def pI():
    return solve_codim3("RLLR", "LLR", fixed=("tau_L", 0.5), guess=(-1.1, 1.4))


@pytest.fixture(scope="session")
def pC():
    return solve_codim3("RLRLR", "LR", fixed=("tau_L", -0.7), guess=(-3.3, 1.7))


@pytest.fixture(scope="session")
def client():
    from fastapi.testclient import TestClient

    from bcnf.service import app
    return TestClient(app)
