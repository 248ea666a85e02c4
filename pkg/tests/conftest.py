import pytest

from p2lab.polyform import QuadraticPoly, shift_to_G

N2P1 = QuadraticPoly(1, 0, 1)
TWO = QuadraticPoly(2, 2, 1)
N2N1 = QuadraticPoly(1, 1, 1)


@pytest.fixture(scope="session")
def polys():
    return (N2P1, TWO, N2N1)


@pytest.fixture(scope="session")
def G256():
    return shift_to_G(N2P1)
