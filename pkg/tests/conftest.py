"""Shared fixtures: preset scenes are built once per session."""

import pytest

from holonomy.scenes import load_scene


@pytest.fixture(scope="session")
def monopole_k1():
    return load_scene("monopole_k1")


@pytest.fixture(scope="session")
def monopole_k2():
    return load_scene("monopole_k2")


@pytest.fixture(scope="session")
def monopole_k3():
    return load_scene("monopole_k3")


@pytest.fixture(scope="session")
def monopole_corrupt():
    return load_scene("monopole_corrupt")


@pytest.fixture(scope="session")
def trivial_scene():
    return load_scene("trivial")


@pytest.fixture(scope="session")
def su2_bench():
    return load_scene("su2_poly_bench")


@pytest.fixture(scope="session")
def su2_bench_u1():
    return load_scene("su2_poly_bench_u1")


@pytest.fixture(scope="session")
def pure_gauge():
    return load_scene("pure_gauge_su2")


@pytest.fixture(scope="session")
def plane_constant():
    return load_scene("plane_constant")
