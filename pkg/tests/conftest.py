import pytest

from nquasi.algebras import algebra_from_function, cyclic_loop


@pytest.fixture
def z3():
    return cyclic_loop(3)


@pytest.fixture
def z4():
    return cyclic_loop(4)


@pytest.fixture
def z6():
    return cyclic_loop(6)


@pytest.fixture
def trivial_loop():
    return algebra_from_function("T", 2, "loop", ["0"], lambda a, b: 0, identity="0")


@pytest.fixture
def trivial_quasigroup():
    return algebra_from_function("S1", 2, "quasigroup", ["0"], lambda a, b: 0)


def steiner3(name="St3"):
    # f(a, b) = -(a + b) mod 3: idempotent, commutative, every equation solvable
    return algebra_from_function(name, 2, "quasigroup", ["0", "1", "2"], lambda a, b: (-a - b) % 3)


@pytest.fixture
def steiner():
    return steiner3()
