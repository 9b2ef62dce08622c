"""Shared fixtures.

The isomorphism-class corpus and the saturation sequences are expensive
enough that every module wants the same cached copies; the corpus fixture
also records its own build time because one acceptance budget includes it.
"""

import time

import pytest

from median_fraisse import MedianAlgebra, build_fraisse, enumerate_algebras, validate


@pytest.fixture(scope="session")
def one_point():
    return MedianAlgebra(0, (0,), canonical=True)


@pytest.fixture(scope="session")
def two_point():
    return validate(["0", "1"], 1)


@pytest.fixture(scope="session")
def three_chain():
    return validate(["00", "01", "11"], 2)


@pytest.fixture(scope="session")
def square():
    return validate(["00", "01", "10", "11"], 2)


@pytest.fixture(scope="session")
def corpus12():
    """All isomorphism classes up to 12 points plus the build duration."""
    t0 = time.monotonic()
    classes = enumerate_algebras(12)
    elapsed = time.monotonic() - t0
    return classes, elapsed


@pytest.fixture(scope="session")
def seq_bound2(one_point):
    """Four-level saturation sequence at size bound 2: sizes 1, 2, 4, 8."""
    return build_fraisse(one_point, size_bound=2, levels=4)


@pytest.fixture(scope="session")
def seq_bound3(one_point):
    """Three-level saturation sequence at size bound 3: sizes 1, 6, 288."""
    return build_fraisse(one_point, size_bound=3, levels=3)
