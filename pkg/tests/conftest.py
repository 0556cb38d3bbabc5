"""
Shared fixtures: two-qubit reference states and seeded generators.
"""
import os
import sys

import numpy as np
import pytest

# Add src to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from corrwitness.operators import DensityOperator, random_state  # noqa: E402


def bell_matrix() -> np.ndarray:
    """|Phi+><Phi+| with exact 0.5 entries."""
    m = np.zeros((4, 4), dtype=complex)
    m[0, 0] = m[0, 3] = m[3, 0] = m[3, 3] = 0.5
    return m


@pytest.fixture
def bell_state() -> DensityOperator:
    return DensityOperator(bell_matrix(), (2, 2))


@pytest.fixture
def classical_state() -> DensityOperator:
    """(|00><00| + |11><11|) / 2."""
    return DensityOperator(np.diag([0.5, 0.0, 0.0, 0.5]).astype(complex), (2, 2))


@pytest.fixture
def product_state() -> DensityOperator:
    rho_S = random_state(2, seed=11).matrix
    rho_E = random_state(2, seed=12).matrix
    return DensityOperator(np.kron(rho_S, rho_E), (2, 2))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)
