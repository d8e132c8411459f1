"""
Shared fixtures: reference parameters and seeded random parameter sets.
"""
import numpy as np
import pytest

from models.physics import QuenchSpec, SystemParams

SEED = 20240611
SAMPLES = 120


def draw_points(n: int = SAMPLES, seed: int = SEED, min_quench: float = 0.5):
    """
    Random (params, quench) pairs away from resonance.

    omega2 is kept at least ``min_quench`` from omega1 so that differences
    of Lamb shifts do not cancel catastrophically.
    """
    rng = np.random.default_rng(seed)
    points = []
    while len(points) < n:
        e0 = rng.uniform(1.0, 6.0)
        lam = rng.uniform(1e-3, 0.4) * e0
        w1, w2 = rng.uniform(0.3, 12.0, size=2)
        if min(abs(w1 - e0), abs(w2 - e0)) < 0.05 * e0 or abs(w1 - w2) < min_quench:
            continue
        points.append((SystemParams(float(e0), float(lam)), QuenchSpec(float(w1), float(w2))))
    return points


@pytest.fixture
def reference_point():
    """Reference parameters in linear-GHz numbers: omega1=5, omega2=3.75, E0=3.721, lambda=0.2."""
    return SystemParams(3.721, 0.2), QuenchSpec(5.0, 3.75)


@pytest.fixture
def weak_point():
    """Detuned weak-coupling point used against exact diagonalization."""
    return SystemParams(3.0, 0.01), QuenchSpec(5.0, 4.4)


@pytest.fixture
def random_points():
    return draw_points()
