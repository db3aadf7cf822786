import pytest

from xchern.algebra import (dual_numbers, matrix_units, group_algebra_z2,
                            split_pair, rationals)


@pytest.fixture(scope="session")
def dual():
    return dual_numbers()


@pytest.fixture(scope="session")
def m2():
    return matrix_units(2)


@pytest.fixture(scope="session")
def z2():
    return group_algebra_z2()


@pytest.fixture(scope="session")
def qq():
    return split_pair()


@pytest.fixture(scope="session")
def corpus_algebras(dual, m2, z2, qq):
    return [dual, m2, z2, qq]
