"""Dyadic fractional Sobolev spaces on [0, 1]: Haar machinery, capacity,
Carleson embeddings and paraproduct experiments on finite-depth step functions."""

from .dyadic import DyadicIndex, HaarCoeffs, StepFunction, average, haar_analyze, haar_synthesize, inner

__version__ = "0.1.0"

__all__ = [
    "DyadicIndex",
    "HaarCoeffs",
    "StepFunction",
    "average",
    "haar_analyze",
    "haar_synthesize",
    "inner",
]
