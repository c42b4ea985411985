import pathlib

import pytest

from dcsim import load_bundle, load_scenario

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def ny_scenario():
    return load_scenario(str(FIXTURES / "ny_7day.json"))


@pytest.fixture(scope="session")
def ny_bundle(ny_scenario):
    return load_bundle(ny_scenario.workload_path, ny_scenario.ci_path,
                       ny_scenario.weather_path, ny_scenario.steps_per_hour)
