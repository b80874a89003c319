"""
Shared fixtures
"""
import json

import numpy as np
import pytest

from rebsim.config import settings
from rebsim.models import ModeLabel, NamedState
from rebsim.schemas.channel_params import ReflectionCoefficients
from rebsim.schemas.config import Config, emission_profile, projector_profile


@pytest.fixture(autouse=True)
def restore_settings():
    """Commands push numerics overrides into the process settings"""
    saved = settings.model_dump()
    yield
    for key, value in saved.items():
        setattr(settings, key, value)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def projector_system():
    return projector_profile().to_system()


@pytest.fixture
def emission_system():
    return emission_profile().to_system()


@pytest.fixture
def ideal_coefficients():
    """Dark state fully lost, bright state fully reflected"""
    return ReflectionCoefficients(r=(0, 1), t=(0, 0), l=(1, 0))


@pytest.fixture
def plus_state():
    s = 1 / np.sqrt(2)
    return NamedState.from_ket([s, s], (ModeLabel.spin("q"),))


@pytest.fixture
def make_config():
    def factory(**overrides):
        document = {
            "protocol": {"kind": "B", "delta_la_ghz": -6.0},
            "losses": {"link": 0.0, "insertion": 0.0},
        }
        document.update(overrides)
        return Config.parse(document)

    return factory


@pytest.fixture
def write_config(tmp_path):
    def factory(document, name="config.json"):
        path = tmp_path / name
        path.write_text(json.dumps(document), encoding="utf-8")
        return str(path)

    return factory
