import pytest

from swansusy import fockspace as fs
from swansusy import metric as mt
from swansusy import realizations as rz
from swansusy.superalgebra import su11_single_mode

Z_GRID = (-1.0, -0.5, 0.0, 0.5, 1.0)


@pytest.fixture(scope="session")
def params():
    return mt.SwansonParams(2.0, 0.5, 0.3)


@pytest.fixture(scope="session")
def layout80():
    return fs.ModeLayout.of(fs.Boson(80), fs.Fermion())


@pytest.fixture(scope="session")
def gens80(layout80):
    return su11_single_mode(layout80)


@pytest.fixture(scope="session")
def low80(layout80):
    return fs.low_lying_projector(layout80)


@pytest.fixture(scope="session")
def interior80(layout80):
    return fs.interior_projector(layout80, 16)


@pytest.fixture(scope="session")
def metrics80(gens80, params):
    return {z: mt.build_metric(gens80, params, z) for z in Z_GRID}


@pytest.fixture(scope="session")
def gens_n2():
    return rz.n_mode_generators(rz.RealizationSpec("n_mode", 8, 2))


@pytest.fixture(scope="session")
def gens_so():
    return rz.spin_orbit_generators(rz.RealizationSpec("spin_orbit", 8))
