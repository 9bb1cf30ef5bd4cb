import pytest

from bianchi import compute_polyhedron, field_context
from bianchi.cellcomplex import build_floege_complex

_poly_cache = {}
_complex_cache = {}


def polyhedron_for(m):
    if m not in _poly_cache:
        _poly_cache[m] = compute_polyhedron(field_context(m))
    return _poly_cache[m]


def complex_for(m):
    if m not in _complex_cache:
        _complex_cache[m] = build_floege_complex(polyhedron_for(m))
    return _complex_cache[m]


@pytest.fixture(scope="session")
def poly_m2():
    return polyhedron_for(2)


@pytest.fixture(scope="session")
def poly_m5():
    return polyhedron_for(5)


@pytest.fixture(scope="session")
def complex_m2():
    return complex_for(2)


@pytest.fixture(scope="session")
def complex_m5():
    return complex_for(5)
