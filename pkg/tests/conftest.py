import functools

import pytest
from hypothesis import HealthCheck, settings

from stringhom.spaces import builtin
from stringhom.stringops import builtin_model

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

BUILTIN_NAMES = ("s2", "s3", "cp2", "s3xs3")


@functools.lru_cache(maxsize=None)
def space_model(name):
    return builtin_model(name)


@pytest.fixture(params=BUILTIN_NAMES)
def space(request):
    return space_model(request.param)


@pytest.fixture
def spec_of():
    return builtin
