import json
from importlib.resources import files
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from maasx.config import load_world
from maasx.workflow import deploy_in_process

settings.register_profile("maasx", deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("maasx")

FIXTURES = Path(str(files("maasx.fixtures")))


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def world():
    return load_world(FIXTURES / "world.json")


@pytest.fixture
def deployment(world):
    return deploy_in_process(world)


def fixture_json(name):
    return json.loads((FIXTURES / name).read_text(encoding="utf-8"))
