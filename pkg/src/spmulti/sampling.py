"""Seeded random radial functions for checks and tests."""

from __future__ import annotations

import numpy as np

from .grid import RadialFunction, RadialGrid


def random_radial_function(grid: RadialGrid, rng: np.random.Generator,
                           terms: int = 3, r_scale: float = 8.0) -> RadialFunction:
    """Sum of a few Gaussian shells and exponentials with random parameters.

    Smooth, rapidly decaying and of moderate size, so energies and their
    derivatives are well resolved on the default grids.
    """
    r = grid.nodes
    vals = np.zeros_like(r)
    for _ in range(terms):
        amp = rng.uniform(-1.0, 1.0)
        if rng.random() < 0.5:
            center = rng.uniform(0.0, r_scale)
            width = rng.uniform(0.5, 3.0)
            vals += amp * np.exp(-((r - center) / width) ** 2)
        else:
            rate = rng.uniform(0.3, 2.0)
            vals += amp * np.exp(-rate * r)
    return RadialFunction(grid, vals)
