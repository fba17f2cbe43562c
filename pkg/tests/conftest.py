import pytest
from hypothesis import HealthCheck, settings

from sympack.quadric import full4_packing, regular5_packing
from sympack.surfaces import detect_shared_arcs
from sympack.toric import karshon_packing

settings.register_profile("sympack", deadline=None, max_examples=25,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("sympack")


@pytest.fixture(scope="session")
def regular5():
    return regular5_packing()


@pytest.fixture(scope="session")
def full4():
    return full4_packing()


@pytest.fixture(scope="session")
def karshon3():
    return karshon_packing("three_balls")


@pytest.fixture(scope="session")
def regular5_arcs(regular5):
    return detect_shared_arcs(regular5)


@pytest.fixture(scope="session")
def karshon3_arcs(karshon3):
    return detect_shared_arcs(karshon3)
