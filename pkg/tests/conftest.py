import numpy as np
import pytest

import robustda as r


@pytest.fixture(scope="session")
def fig1_pair():
    """Default two-Gaussian contamination experiment, seed 0."""
    return r.generate_contaminated_pair(r.SyntheticConfig(seed=0))


@pytest.fixture(scope="session")
def rqda_model(fig1_pair):
    _, contaminated, _ = fig1_pair
    return r.fit(contaminated, r.DASpec(rule="quadratic", estimation="robust"))


@pytest.fixture(scope="session")
def rqda_diags(fig1_pair, rqda_model):
    _, contaminated, _ = fig1_pair
    fm = r.fit_farness(rqda_model, contaminated)
    return r.compute_diagnostics(rqda_model, contaminated, fm), fm


def random_spd(rng, p, scale=1.0):
    A = rng.standard_normal((p, p))
    return scale * (A @ A.T + p * np.eye(p))
