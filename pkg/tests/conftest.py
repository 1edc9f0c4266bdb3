import numpy as np
import pytest

from ultrametric_pdo import build_tree, from_leaf_masses, generate_random_tree, homogeneous_measure, table_kernel

BINARY = {"R": ["A", "B"], "A": ["a1", "a2"], "B": ["b1", "b2"]}


@pytest.fixture
def binary():
    return build_tree(BINARY)


@pytest.fixture
def binary_hom(binary):
    return binary, homogeneous_measure(binary)


@pytest.fixture
def fixture_kernel(binary):
    return table_kernel(binary, {"R": 1.0, "A": 2.0, "B": 2.0})


def random_instance(seed, n_leaves=None, complex_kernel=False):
    """Random tree, non-homogeneous masses and positive table kernel for ``seed``."""
    rng = np.random.default_rng(seed)
    if n_leaves is None:
        n_leaves = int(rng.integers(8, 201))
    tree = generate_random_tree(n_leaves, rng)
    measure = from_leaf_masses(tree, rng.uniform(0.1, 1.0, tree.n_leaves))
    values = rng.uniform(0.1, 2.0, len(tree.internal))
    if complex_kernel:
        values = values + 1j * rng.uniform(-1, 1, len(values))
    kernel = table_kernel(tree, dict(zip(tree.internal, values.tolist())))
    return tree, measure, kernel


_acceptance_lines = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _acceptance_lines


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
