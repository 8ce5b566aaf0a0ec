import numpy as np
import pytest

from config_schemas import ImagingConfig
from models import BoundaryCondition, PointScene
from services.forward import synthesize

K = 6.0
N_THETA = 512
POINT_TARGET = (-2.0, 0.0)
SAMPLING_CENTER = (4.0, 0.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def sound_soft():
    return BoundaryCondition.sound_soft()


@pytest.fixture
def impedance():
    return BoundaryCondition.impedance(1j)


@pytest.fixture(scope="session")
def point_far_field():
    """Far field at k = 6 of a unit point scatterer at (-2, 0)"""
    return synthesize(PointScene([POINT_TARGET]), K, N_THETA)


@pytest.fixture
def point_config():
    return ImagingConfig(k=K, R=4.0, nz=8, M=160, N=60, alpha=1e-13)


@pytest.fixture
def write_text(tmp_path):
    def _write(name, text):
        path = tmp_path / name
        path.write_text(text)
        return str(path)
    return _write


def gauss_triangle(v1, v2, v3, q, order=80):
    """Integral of exp(-i q.z) over a triangle by collapsed tensor Gauss quadrature"""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    s = 0.5 * (nodes + 1.0)
    w = 0.5 * weights
    v1, v2, v3 = (np.asarray(v, dtype=float) for v in (v1, v2, v3))
    area2 = abs((v2 - v1)[0] * (v3 - v1)[1] - (v2 - v1)[1] * (v3 - v1)[0])
    ss, tt = np.meshgrid(s, s, indexing="ij")
    points = v1 + ss[..., None] * (v2 - v1) + (ss * tt)[..., None] * (v3 - v2)
    integrand = np.exp(-1j * (points @ np.asarray(q, dtype=float))) * ss
    return area2 * np.sum(w[:, None] * w[None, :] * integrand)
