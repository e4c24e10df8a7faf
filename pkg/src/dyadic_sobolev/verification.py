"""Exact identities, checked on seeded random step functions.

Every check returns the worst residual over its samples.  Function identities
use the sup-norm error scaled by ``max(1, ||expected||_inf)``; scalar identities
use relative error.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from .dyadic import StepFunction, haar_analyze, haar_synthesize, level_weights
from .norms import hs_dot_sq, leftright_terms, oscillation_terms
from .operators import (
    adjoint_paraproduct,
    commutator_shift,
    commutator_with_shift,
    frac_integral_avg,
    frac_integral_haar,
    haar_shift,
    lambda_paraproduct,
    lambda_shift_commutator_closed_form,
    mod_derivative,
    paraproduct,
)
from .sampling import random_coeffs, random_step

__all__ = ["IdentityResult", "IDENTITIES", "run_identities", "INVERSION_S"]

INVERSION_S = (0.1, 0.25, 0.5, 0.75, 0.9)


@dataclass(frozen=True)
class IdentityResult:
    identity: str
    max_residual: float
    tol: float
    samples: int
    depth: int
    seed: int

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol

    def to_json(self) -> dict:
        return {**asdict(self), "passed": self.passed}


def _err(got: StepFunction, want: StepFunction) -> float:
    a, b = got.refine(max(got.depth, want.depth)), want.refine(max(got.depth, want.depth))
    return float(np.max(np.abs(a.values - b.values)) / max(1.0, np.max(np.abs(b.values))))


def _rel(got: float, want: float) -> float:
    return abs(got - want) / max(abs(want), np.finfo(float).tiny)


def roundtrip(rng, depth):
    f = random_step(rng, depth)
    c = random_coeffs(rng, depth)
    back = haar_analyze(haar_synthesize(c))
    coeff_err = max(abs(back.mean - c.mean), float(np.max(np.abs(back.coeffs - c.coeffs), initial=0.0)))
    return max(_err(haar_synthesize(haar_analyze(f)), f), coeff_err / max(1.0, np.max(np.abs(c.vector()))))


def parseval(rng, depth):
    f = random_step(rng, depth)
    c = haar_analyze(f)
    return _rel(c.mean ** 2 + float(np.sum(c.coeffs ** 2)), float(np.mean(f.values ** 2)))


def inversion(s):
    """``(2^s - 1) J^s T^s f = f`` and ``(2^s - 1) T^s J^s f = f`` with ``T^s`` from averages."""

    def check(rng, depth):
        f = random_step(rng, depth)
        k = 2.0 ** s - 1.0
        jt = haar_synthesize(mod_derivative(haar_analyze(frac_integral_avg(f, s)), s)) * k
        tj = frac_integral_avg(haar_synthesize(mod_derivative(haar_analyze(f), s)), s) * k
        forms = _err(haar_synthesize(frac_integral_haar(haar_analyze(f), s)), frac_integral_avg(f, s))
        return max(_err(jt, f), _err(tj, f), forms)

    return check


def leftright_identity(rng, depth):
    """Per-interval split of the left-right double integral."""
    f = random_step(rng, depth)
    lhs = leftright_terms(f)
    c = haar_analyze(f).coeffs
    size = level_weights(depth, 1.0)
    osc = oscillation_terms(f)[1:]  # drop the unit interval; children start at heap index 1
    rhs = size * c ** 2 + 0.5 * size * (osc[0::2] + osc[1::2])
    return float(np.max(np.abs(lhs - rhs)) / max(1.0, np.max(np.abs(rhs))))


def bony(rng, depth):
    f, g = random_step(rng, depth), random_step(rng, depth)
    return _err(paraproduct(g, f) + paraproduct(f, g) + adjoint_paraproduct(g, f), f * g)


def lambda_closed_form(rng, depth):
    b, f = random_step(rng, depth), random_step(rng, depth)
    direct = commutator_with_shift(lambda u: lambda_paraproduct(b, u), f)
    return _err(direct, lambda_shift_commutator_closed_form(b, f))


def commutator_split(rng, depth):
    b, f = random_step(rng, depth), random_step(rng, depth)
    parts = (
        commutator_with_shift(lambda u: paraproduct(b, u), f)
        + commutator_with_shift(lambda u: lambda_paraproduct(b, u), f)
        + commutator_with_shift(lambda u: adjoint_paraproduct(b, u), f)
    )
    return _err(parts, commutator_shift(b, f))


def shift_energy(s):
    def check(rng, depth):
        f = random_step(rng, depth)
        shifted = haar_synthesize(haar_shift(haar_analyze(f)))
        return _rel(hs_dot_sq(shifted, s), 2.0 ** (1 + 2 * s) * hs_dot_sq(f, s))

    return check


IDENTITIES: dict[str, tuple[Callable, float]] = {
    "haar_roundtrip": (roundtrip, 1e-12),
    "parseval": (parseval, 1e-12),
    **{f"inversion_s={s}": (inversion(s), 1e-10) for s in INVERSION_S},
    "leftright_per_interval": (leftright_identity, 1e-12),
    "bony_decomposition": (bony, 1e-10),
    "lambda_commutator_closed_form": (lambda_closed_form, 1e-10),
    "commutator_decomposition": (commutator_split, 1e-10),
    **{f"shift_energy_s={s}": (shift_energy(s), 1e-10) for s in (0.25, 0.5, 0.75)},
}


def run_identities(depth: int = 8, seed: int = 42, samples: int = 1000, names=None) -> list[IdentityResult]:
    results = []
    for name, (check, tol) in IDENTITIES.items():
        if names is not None and name not in names:
            continue
        rng = np.random.default_rng([seed, list(IDENTITIES).index(name)])
        worst = max(check(rng, depth) for _ in range(samples))
        results.append(IdentityResult(name, float(worst), tol, samples, depth, seed))
    return results
