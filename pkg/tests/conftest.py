import numpy as np
import pytest

from bie2d import geometry as geo
from bie2d.operators import OperatorCache
from bie2d.quadrature import build_tables


@pytest.fixture(scope="session")
def square_curve():
    return geo.square(4.0)


@pytest.fixture(scope="session")
def square_mesh(square_curve):
    return geo.build_mesh(square_curve, 64)


@pytest.fixture(scope="session")
def disk_curve():
    return geo.lq_ball(2, 2.0)


@pytest.fixture(scope="session")
def unit_disk_mesh():
    return geo.build_mesh(geo.lq_ball(2, 1.0), 32)


@pytest.fixture(scope="session")
def disk_mesh(disk_curve):
    return geo.build_mesh(disk_curve, 64)


@pytest.fixture(scope="session")
def disk_ops(disk_mesh):
    return OperatorCache(disk_mesh, build_tables(disk_mesh.n))


@pytest.fixture(scope="session")
def square_ops(square_mesh):
    return OperatorCache(square_mesh, build_tables(square_mesh.n))


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260808)
