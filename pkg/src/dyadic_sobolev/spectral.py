"""Power iteration for the largest eigenvalue of a symmetric PSD operator."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .dyadic import HaarCoeffs


@dataclass(frozen=True, eq=False)
class SpectralEstimate:
    value: float
    vector: HaarCoeffs
    iterations: int
    residual: float
    tol: float = 1e-10

    @property
    def converged(self) -> bool:
        return self.residual <= self.tol

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "iterations": self.iterations,
            "residual": self.residual,
            "converged": self.converged,
            "vector": self.vector.to_json(),
        }


def power_iteration(
    apply: Callable[[np.ndarray], np.ndarray],
    start: np.ndarray,
    tol: float = 1e-10,
    max_iters: int = 10_000,
) -> tuple[float, np.ndarray, int, float]:
    """Largest eigenpair of ``apply`` (assumed symmetric PSD).

    Stops once ``||A y - lam y|| <= tol * lam`` for the unit iterate ``y``.
    Returns ``(lam, y, iterations, relative_residual)``.
    """
    y = np.asarray(start, dtype=float)
    y = y / np.linalg.norm(y)
    for it in range(1, max_iters + 1):
        Ay = apply(y)
        lam = float(y @ Ay)
        norm = np.linalg.norm(Ay)
        if norm == 0.0:
            return 0.0, y, it, 0.0
        res = float(np.linalg.norm(Ay - lam * y) / max(lam, np.finfo(float).tiny))
        if res <= tol or it == max_iters:
            return lam, y, it, res
        y = Ay / norm
    raise ValueError("max_iters must be positive")
