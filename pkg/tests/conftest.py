import numpy as np
import pytest

import repsel.kernels


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # Compile jitted kernels once so individual tests time only the work.
    repsel.kernels.warmup()


def random_activation(rng, T, d, scale_rows=True):
    """Random full-rank activation with varied row magnitudes, no zero rows."""
    x = rng.standard_normal((T, d))
    if scale_rows:
        x *= rng.uniform(0.5, 2.0, size=(T, 1))
    return x


def clustered_activation(rng, T, d, k, spread=0.05, scale_rows=True):
    """Rows grouped around k random unit centers; guarantees near-duplicates."""
    centers = rng.standard_normal((k, d))
    centers /= np.linalg.norm(centers, axis=1, keepdims=True)
    x = centers[np.arange(T) % k] + spread * rng.standard_normal((T, d))
    if scale_rows:
        x *= rng.uniform(0.5, 2.0, size=(T, 1))
    return x
