import json
from importlib import resources

import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def load_schema(name):
    return json.loads(resources.files("randsum").joinpath("schemas", name).read_text())


@pytest.fixture(scope="session")
def schemas():
    return {n: load_schema(f"{n}.v1.json") for n in ("bound_report", "experiment_report", "sweep_row")}
