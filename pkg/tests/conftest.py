"""Shared fixtures: canonical device parameters used across the suite."""

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from qcrlab import DeviceConfig, JunctionParams, ModeParams
from qcrlab.units import PLANCK, ghz_to_omega, uev_to_joule

settings.register_profile(
    "suite",
    deadline=None,
    max_examples=25,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")

# A junction whose gap sits at 50 GHz on the frequency axis, read out by
# a 10 GHz mode: the standard two-junction refrigerator configuration
# used throughout the suite.
GAP_50GHZ = PLANCK * 50e9


@pytest.fixture(scope="session")
def junction_50ghz() -> JunctionParams:
    return JunctionParams(delta=GAP_50GHZ, dynes=1e-4, r_t=15e3, temp_n=0.1)


@pytest.fixture(scope="session")
def junction_cold() -> JunctionParams:
    return JunctionParams(delta=GAP_50GHZ, dynes=1e-4, r_t=15e3, temp_n=0.01)


@pytest.fixture(scope="session")
def device() -> DeviceConfig:
    return DeviceConfig(junctions=2)


@pytest.fixture(scope="session")
def mode_10ghz() -> ModeParams:
    return ModeParams(omega=ghz_to_omega(10.0), impedance=35.0, alpha=0.5)


@pytest.fixture(scope="session")
def fig_scale_junction() -> JunctionParams:
    return JunctionParams(delta=uev_to_joule(215.0), dynes=1e-4, r_t=15e3,
                          temp_n=0.1)
