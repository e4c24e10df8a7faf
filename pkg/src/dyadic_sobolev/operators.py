"""Fractional derivatives and integrals, the maximal function, the Haar shift,
paraproducts and commutators, all evaluated exactly on step functions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .dyadic import (
    HaarCoeffs,
    StepFunction,
    _pyramid,
    _to_leaves,
    common_depth,
    haar_analyze,
    haar_synthesize,
    level_weights,
)

__all__ = [
    "check_s",
    "frac_derivative",
    "mod_derivative",
    "frac_integral_avg",
    "frac_integral_haar",
    "maximal",
    "haar_shift",
    "shift",
    "paraproduct",
    "adjoint_paraproduct",
    "lambda_paraproduct",
    "commutator_shift",
    "commutator_with_shift",
    "lambda_shift_commutator_closed_form",
    "pointwise_product",
    "PiecewiseLinearMap",
    "lipschitz_compose",
]


def check_s(s: float) -> float:
    s = float(s)
    if not 0.0 < s < 1.0:
        raise ValueError(f"smoothness s must lie in (0, 1), got {s}")
    return s


def frac_derivative(c: HaarCoeffs, s: float) -> HaarCoeffs:
    """Multiply each Haar coefficient by ``|I|**-s`` and drop the mean."""
    s = check_s(s)
    return c.scale(level_weights(c.depth, -s), 0.0)


def mod_derivative(c: HaarCoeffs, s: float) -> HaarCoeffs:
    """Like :func:`frac_derivative`, but the mean is kept and scaled by ``2**-s``."""
    s = check_s(s)
    return c.scale(level_weights(c.depth, -s), 2.0 ** -s)


def frac_integral_avg(f: StepFunction, s: float) -> StepFunction:
    """``sum_I |I|**s <f>_I 1_I`` evaluated from averages.

    Levels ``0 .. depth`` are summed explicitly.  Below the leaf level every
    average equals the leaf value, so the remaining geometric tail is added in
    closed form and the result carries no truncation error.
    """
    s = check_s(s)
    N = f.depth
    out = np.zeros(1 << N)
    for j, level in enumerate(_pyramid(f.values)):
        out += 2.0 ** (-j * s) * _to_leaves(level, N)
    out += f.values * 2.0 ** (-(N + 1) * s) / (1.0 - 2.0 ** -s)
    return StepFunction(N, out)


def frac_integral_haar(c: HaarCoeffs, s: float) -> HaarCoeffs:
    """The same operator as :func:`frac_integral_avg`, as a Haar multiplier."""
    s = check_s(s)
    k = 1.0 / (2.0 ** s - 1.0)
    return c.scale(k * level_weights(c.depth, s), k * 2.0 ** s)


def maximal(f: StepFunction) -> StepFunction:
    """Dyadic maximal function of ``|f|``; exact since deeper averages are leaf values."""
    N = f.depth
    pyramid = _pyramid(np.abs(f.values))
    out = np.abs(f.values).copy()
    for level in pyramid[:-1]:
        np.maximum(out, _to_leaves(level, N), out=out)
    return StepFunction(N, out)


def haar_shift(c: HaarCoeffs) -> HaarCoeffs:
    """``sum_I (f, h_I)(h_{I-} - h_{I+})``; output depth is input depth + 1."""
    N = c.depth
    out = np.zeros((1 << (N + 1)) - 1)
    for j in range(N):
        parent = c.level(j)
        start = (1 << (j + 1)) - 1
        out[start:start + (1 << (j + 1)):2] = parent
        out[start + 1:start + (1 << (j + 1)):2] = -parent
    return HaarCoeffs(N + 1, 0.0, out)


def shift(f: StepFunction) -> StepFunction:
    return haar_synthesize(haar_shift(haar_analyze(f)))


def _paraproduct_coeffs(b: StepFunction, f: StepFunction) -> HaarCoeffs:
    b, f = common_depth(b, f)
    cb = haar_analyze(b)
    avg = np.concatenate(_pyramid(f.values)[:-1]) if f.depth else np.zeros(0)
    return HaarCoeffs(b.depth, 0.0, cb.coeffs * avg)


def paraproduct(b: StepFunction, f: StepFunction) -> StepFunction:
    """``sum_I (b, h_I) <f>_I h_I``."""
    return haar_synthesize(_paraproduct_coeffs(b, f))


def lambda_paraproduct(b: StepFunction, f: StepFunction) -> StepFunction:
    """``Lambda_b f = Pi_f b``."""
    return paraproduct(f, b)


def adjoint_paraproduct(b: StepFunction, f: StepFunction) -> StepFunction:
    """``sum_I (f, h_I)(b, h_I) 1_I / |I| + <f>_{I0} <b>_{I0}``."""
    b, f = common_depth(b, f)
    N = b.depth
    cb, cf = haar_analyze(b), haar_analyze(f)
    out = np.full(1 << N, cf.mean * cb.mean)
    for j in range(N):
        out += _to_leaves(cf.level(j) * cb.level(j) * 2.0 ** j, N)
    return StepFunction(N, out)


def pointwise_product(f: StepFunction, g: StepFunction) -> StepFunction:
    return f * g


def commutator_shift(b: StepFunction, f: StepFunction) -> StepFunction:
    """``[b, Sha] f = b Sha f - Sha(b f)``."""
    return b * shift(f) - shift(b * f)


def commutator_with_shift(op: Callable[[StepFunction], StepFunction], f: StepFunction) -> StepFunction:
    """``[L, Sha] f = L(Sha f) - Sha(L f)`` for any operator ``L``."""
    return op(shift(f)) - shift(op(f))


def lambda_shift_commutator_closed_form(b: StepFunction, f: StepFunction) -> StepFunction:
    """``[Lambda_b, Sha] f`` from its Haar expansion.

    The coefficient on a left child ``J`` is ``(f, h_parent)(<b>_J - <b>_parent)``;
    on a right child the sign of the average difference flips.
    """
    b, f = common_depth(b, f)
    N = f.depth
    cf = haar_analyze(f)
    avg = _pyramid(b.refine(N + 1).values)
    out = np.zeros((1 << (N + 1)) - 1)
    for j in range(N):
        parent_coeff = np.repeat(cf.level(j), 2)
        diff = avg[j + 1] - np.repeat(avg[j], 2)
        diff[1::2] *= -1.0
        start = (1 << (j + 1)) - 1
        out[start:start + (1 << (j + 1))] = parent_coeff * diff
    return haar_synthesize(HaarCoeffs(N + 1, 0.0, out))


@dataclass(frozen=True, eq=False)
class PiecewiseLinearMap:
    """Continuous piecewise-linear ``psi: R -> R``.

    Interpolates ``values`` at ``breakpoints`` and extends linearly beyond them
    with ``left_slope`` / ``right_slope``.
    """

    breakpoints: np.ndarray
    values: np.ndarray
    left_slope: float = 0.0
    right_slope: float = 0.0

    def __post_init__(self):
        x = np.array(self.breakpoints, dtype=float)
        y = np.array(self.values, dtype=float)
        if x.ndim != 1 or x.shape != y.shape or len(x) == 0:
            raise ValueError("breakpoints and values must be equal-length 1-d arrays")
        if np.any(np.diff(x) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        object.__setattr__(self, "breakpoints", x)
        object.__setattr__(self, "values", y)

    @classmethod
    def identity(cls) -> "PiecewiseLinearMap":
        return cls([0.0], [0.0], 1.0, 1.0)

    @classmethod
    def absolute(cls) -> "PiecewiseLinearMap":
        return cls([0.0], [0.0], -1.0, 1.0)

    @classmethod
    def ramp(cls, lo: float = 0.5, hi: float = 1.0) -> "PiecewiseLinearMap":
        """0 below ``lo``, 1 above ``hi``, linear in between."""
        return cls([lo, hi], [0.0, 1.0], 0.0, 0.0)

    @property
    def slopes(self) -> np.ndarray:
        inner = np.diff(self.values) / np.diff(self.breakpoints)
        return np.concatenate(([self.left_slope], inner, [self.right_slope]))

    @property
    def lipschitz(self) -> float:
        return float(np.max(np.abs(self.slopes)))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        x0, x1 = self.breakpoints[0], self.breakpoints[-1]
        out = np.interp(x, self.breakpoints, self.values)
        out = np.where(x < x0, self.values[0] + self.left_slope * (x - x0), out)
        return np.where(x > x1, self.values[-1] + self.right_slope * (x - x1), out)


def lipschitz_compose(psi: PiecewiseLinearMap, f: StepFunction) -> StepFunction:
    return StepFunction(f.depth, psi(f.values))
