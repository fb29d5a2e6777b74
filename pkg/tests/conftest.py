import numpy as np
import pytest

from mcc import demo_fixture, keygen, load_preset


@pytest.fixture(scope="session")
def demo():
    return demo_fixture()


@pytest.fixture(scope="session")
def demo_keys(demo):
    return keygen(
        demo.params, demo.g_p, demo.g_q, np.random.default_rng(0), material=demo.material
    )


@pytest.fixture(scope="session")
def desk():
    return load_preset("desk")


@pytest.fixture(scope="session")
def desk_keys(desk):
    return keygen(desk.params, desk.g_p, desk.g_q, np.random.default_rng(1234))
