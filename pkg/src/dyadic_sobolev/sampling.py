"""Seeded random step functions and Carleson sequences for the experiments.

Haar coefficients are i.i.d. standard normal scaled by ``|I|**alpha``;
``alpha = 0`` gives rough functions, ``alpha = s`` near-critical ones.
"""

from __future__ import annotations

import numpy as np

from .dyadic import HaarCoeffs, StepFunction, haar_synthesize, level_weights


def random_coeffs(rng: np.random.Generator, depth: int, alpha: float = 0.0) -> HaarCoeffs:
    coeffs = rng.standard_normal((1 << depth) - 1) * level_weights(depth, alpha)
    return HaarCoeffs(depth, rng.standard_normal(), coeffs)


def random_step(rng: np.random.Generator, depth: int, alpha: float = 0.0) -> StepFunction:
    return haar_synthesize(random_coeffs(rng, depth, alpha))


def random_nonneg(rng: np.random.Generator, depth: int, alpha: float = 0.0) -> StepFunction:
    f = random_step(rng, depth, alpha)
    return StepFunction(depth, np.abs(f.values))


def random_symbol(rng: np.random.Generator, depth: int, alpha: float = 0.0) -> StepFunction:
    """A symbol ``b`` whose Haar content reaches down to level ``depth - 1``."""
    return random_step(rng, depth, alpha)


def random_mu_values(rng: np.random.Generator, depth: int, density: float = 0.6) -> np.ndarray:
    """Nonnegative weights on levels ``0 .. depth`` in heap order, sparsified at random."""
    n = (1 << (depth + 1)) - 1
    values = rng.exponential(size=n)
    values[rng.random(n) > density] = 0.0
    return values
