import math

import numpy as np
import pytest

from hj_action import EndpointData, OscillatorParams, solve_endpoint_bvp
from hj_action.sampling import config_rng, random_configuration, random_params


@pytest.fixture(scope="session")
def harmonic():
    return OscillatorParams.harmonic(1.0, 1.0)


@pytest.fixture(scope="session")
def quartic():
    return OscillatorParams(n=2, mass=1.0, k2n=1.0, omega=1.0)


@pytest.fixture(scope="session")
def quartic_example(quartic):
    ep = EndpointData(0.0, 0.2, 1.0, 0.5)
    return quartic, ep, solve_endpoint_bvp(quartic, ep, 0)


@pytest.fixture(scope="session")
def harmonic_quarter(harmonic):
    ep = EndpointData(0.0, 0.0, math.pi / 2, 1.0)
    return harmonic, ep, solve_endpoint_bvp(harmonic, ep, 0)


def draw_configs(n, count, seed=1234, **kwargs):
    """Seeded on-shell configurations with random parameters."""
    out = []
    for i in range(count):
        rng = config_rng(seed, n, i)
        params = random_params(rng, n, harmonic=(n == 1))
        out.append(random_configuration(rng, params, **kwargs))
    return out


@pytest.fixture(scope="session")
def configs():
    cache = {}

    def get(n, count, seed=1234, **kwargs):
        key = (n, count, seed, tuple(sorted(kwargs.items())))
        if key not in cache:
            cache[key] = draw_configs(n, count, seed, **kwargs)
        return cache[key]

    return get


def rel(a, b):
    return abs(a - b) / (1.0 + abs(b))
