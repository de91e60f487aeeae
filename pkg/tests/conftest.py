"""Shared fixtures: the four-age-group benchmark setup and small helpers."""
import numpy as np
import pytest

from skirgg import GraphonSpec, ModelParams, TimeGrid, sample_population

AGE_BLOCK_LENGTHS = (0.25, 0.25, 0.25, 0.25)
AGE_BLOCK_MATRIX = (
    (1.0, 0.9, 0.8, 0.7),
    (0.9, 0.9, 0.8, 0.8),
    (0.8, 0.8, 0.9, 0.8),
    (0.7, 0.8, 0.8, 0.8),
)
# per-group rates, youngest group first
AGE_RATES = {
    "beta_s": [0.4, 0.3, 0.3, 0.3],
    "beta_k": [0.5, 0.42, 0.32, 0.2],
    "beta_i": [0.75, 0.62, 0.48, 0.3],
    "mu_k": [0.1, 0.05, 0.05, 0.15],
    "mu_i": [0.1, 0.05, 0.05, 0.15],
    "eta": [0.0, 0.0, 0.0, 0.0],
}


@pytest.fixture(scope="session")
def age_graphon():
    return GraphonSpec.piecewise_constant(AGE_BLOCK_LENGTHS, AGE_BLOCK_MATRIX)


@pytest.fixture(scope="session")
def age_population(age_graphon):
    return sample_population(age_graphon, 50, seed=7,
                             mode="group_proportional")


@pytest.fixture(scope="session")
def age_params(age_population):
    return ModelParams.from_groups(AGE_RATES, age_population.group_of,
                                   a_bar=5.0, phi_bar=0.5, psi_bar=0.5,
                                   c_lambda=1.0)


@pytest.fixture(scope="session")
def age_grid():
    return TimeGrid(T=10.0, n_steps=200)


@pytest.fixture(scope="session")
def age_p0():
    return np.array([0.95, 0.02, 0.03, 0.0])


@pytest.fixture(scope="session")
def small_pop():
    """8 agents on a bounded power-law kernel, handy for cheap solves."""
    return sample_population(GraphonSpec.power_law(c=1.0, exponent=-1.0),
                             8, seed=11)


@pytest.fixture(scope="session")
def symmetric_params():
    # K and I play identical roles when beta_k == beta_i and mu_k == mu_i
    return ModelParams(beta_s=0.4, beta_k=0.5, beta_i=0.5,
                       mu_k=0.1, mu_i=0.1, eta=0.05)
