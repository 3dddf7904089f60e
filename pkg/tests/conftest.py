import numpy as np
import pytest

import robineig as rb

SQUARE_VERTICES = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]
SQUARE_LABELS = ["bottom", "right", "top", "left"]


@pytest.fixture(scope="session")
def unit_square():
    return rb.build_polygon(SQUARE_VERTICES, SQUARE_LABELS)


@pytest.fixture(scope="session")
def lshape():
    verts = [[0, 0], [1, 0], [1, 0.5], [0.5, 0.5], [0.5, 1], [0, 1]]
    labels = ["bottom", "right", "notch", "notch", "top", "left"]
    return rb.build_polygon(verts, labels)


@pytest.fixture(scope="session")
def lap():
    return rb.laplacian()


@pytest.fixture(scope="session")
def coarse_mesh(unit_square):
    # 32 triangles / 25 nodes: big enough to exercise everything, cheap.
    return rb.mesh_uniform(unit_square, 0.5)


@pytest.fixture(scope="session")
def mesh8(unit_square):
    return rb.mesh_uniform(unit_square, 1.0 / 8.0)


@pytest.fixture(scope="session")
def mesh16(unit_square):
    return rb.mesh_uniform(unit_square, 1.0 / 16.0)


@pytest.fixture(scope="session")
def mesh32(unit_square):
    return rb.mesh_uniform(unit_square, 1.0 / 32.0)


def random_hermitian_pencil(rng, n, *, complex_valued=True, spread=5.0):
    """A well-conditioned random Hermitian pencil (S, M) with M pos. def."""
    if complex_valued:
        A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        C = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    else:
        A = rng.standard_normal((n, n))
        C = rng.standard_normal((n, n))
    S = (A + A.conj().T) / 2.0 * spread
    M = C @ C.conj().T / n + np.eye(n)
    M = (M + M.conj().T) / 2.0
    return S, M
