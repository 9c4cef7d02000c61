"""Shared fixtures and test-wide configuration."""

from __future__ import annotations

import pytest
from hypothesis import settings

from qhj import potentials

settings.register_profile("suite", deadline=None, max_examples=30)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def harmonic_model():
    return potentials.harmonic()


@pytest.fixture(scope="session")
def morse_model():
    return potentials.morse()


@pytest.fixture(scope="session")
def hydrogen_p_model():
    return potentials.coulomb_centrifugal(l=1)


@pytest.fixture(scope="session")
def cot2_model():
    return potentials.cot_squared()


@pytest.fixture(scope="session")
def quartic_model():
    return potentials.quartic()


@pytest.fixture(scope="session")
def all_models(harmonic_model, morse_model, hydrogen_p_model, cot2_model, quartic_model):
    return (harmonic_model, morse_model, hydrogen_p_model, cot2_model, quartic_model)
