"""Norms and seminorms of step functions.

The Sobolev norm is computed from Haar coefficients,
``||f||_{H^s}^2 = sum_I |I|^{-2s} (f, h_I)^2 + ||f||_2^2``.  The left-right form
and the ``delta`` form are alternative expressions that agree with it only up
to constants; ratio scans measure those constants empirically.
"""

from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass
from typing import Callable, Iterable

import numpy as np

from .dyadic import StepFunction, _pyramid, haar_analyze, level_weights
from .operators import check_s

__all__ = [
    "l2_norm",
    "sup_norm",
    "hs_norm",
    "hs_norm_sq",
    "hs_dot_norm",
    "hs_dot_sq",
    "leftright_terms",
    "oscillation_terms",
    "hs_dot_leftright",
    "bmo_dyadic",
    "delta_form",
    "DepthExceededError",
    "NormReport",
    "norm_report",
    "ratio_scan",
    "ratio_rows_csv",
]

DELTA_FORM_MAX_DEPTH = 7


class DepthExceededError(ValueError):
    pass


def l2_norm(f: StepFunction) -> float:
    return float(np.sqrt(np.mean(f.values ** 2)))


def sup_norm(f: StepFunction) -> float:
    return float(np.max(np.abs(f.values)))


def hs_dot_sq(f: StepFunction, s: float) -> float:
    s = check_s(s)
    c = haar_analyze(f)
    return float(np.sum(level_weights(f.depth, -2 * s) * c.coeffs ** 2))


def hs_dot_norm(f: StepFunction, s: float) -> float:
    return float(np.sqrt(hs_dot_sq(f, s)))


def hs_norm_sq(f: StepFunction, s: float) -> float:
    return hs_dot_sq(f, s) + l2_norm(f) ** 2


def hs_norm(f: StepFunction, s: float) -> float:
    return float(np.sqrt(hs_norm_sq(f, s)))


def _moments(f: StepFunction) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Integrals of ``f`` and ``f**2`` over every interval, per level."""
    first = [a * 2.0 ** -j for j, a in enumerate(_pyramid(f.values))]
    second = [a * 2.0 ** -j for j, a in enumerate(_pyramid(f.values ** 2))]
    return first, second


def leftright_terms(f: StepFunction) -> np.ndarray:
    """``iint_{I- x I+} |f(x) - f(y)|^2`` for every interval above the leaves, heap order.

    Each double integral is expanded as
    ``|I+| int_{I-} f^2 + |I-| int_{I+} f^2 - 2 (int_{I-} f)(int_{I+} f)``.
    """
    first, second = _moments(f)
    out = []
    for j in range(f.depth):
        half = 2.0 ** -(j + 1)
        m1, m2 = first[j + 1], second[j + 1]
        out.append(half * m2[0::2] + half * m2[1::2] - 2.0 * m1[0::2] * m1[1::2])
    return np.concatenate(out) if out else np.zeros(0)


def oscillation_terms(f: StepFunction) -> np.ndarray:
    """``int_J |f - <f>_J|^2`` for every interval ``J`` of levels ``0 .. depth``, heap order.

    Computed leaf by leaf from the deviations, not from moments.
    """
    N = f.depth
    out = []
    for j, avg in enumerate(_pyramid(f.values)):
        dev = f.values - np.repeat(avg, 1 << (N - j))
        out.append((dev ** 2).reshape(1 << j, -1).sum(axis=1) * 2.0 ** -N)
    return np.concatenate(out)


def hs_dot_leftright(f: StepFunction, s: float) -> float:
    """Square root of ``sum_I |I|^{-1-2s} iint_{I- x I+} |f(x) - f(y)|^2``."""
    s = check_s(s)
    terms = leftright_terms(f)
    total = float(np.sum(level_weights(f.depth, -1 - 2 * s) * terms))
    return float(np.sqrt(max(total, 0.0)))


def bmo_dyadic(b: StepFunction) -> float:
    """``sup_I (|I|^{-1} sum_{J in D(I)} (b, h_J)^2)^{1/2}``."""
    c = haar_analyze(b)
    N = b.depth
    best = 0.0
    below = np.zeros(1 << N)
    for j in range(N - 1, -1, -1):
        below = c.level(j) ** 2 + below[0::2] + below[1::2]
        best = max(best, float(np.max(below)) * 2.0 ** j)
    return float(np.sqrt(best))


def delta_form(f: StepFunction, s: float) -> float:
    """``iint |f(x) - f(y)|^2 / delta(x, y)^{1+2s} + ||f||_2^2`` by leaf-pair summation.

    ``delta(x, y)`` is the length of the smallest dyadic interval containing
    both points.  Cost is quadratic in the number of leaves.
    """
    s = check_s(s)
    N = f.depth
    if N > DELTA_FORM_MAX_DEPTH:
        raise DepthExceededError(f"delta_form supports depth <= {DELTA_FORM_MAX_DEPTH}, got {N}")
    k = np.arange(1 << N)
    xor = k[:, None] ^ k[None, :]
    bits = np.zeros_like(xor)
    nz = xor > 0
    bits[nz] = np.floor(np.log2(xor[nz])).astype(int) + 1
    common_level = N - bits
    delta = 2.0 ** -common_level.astype(float)
    diff = (f.values[:, None] - f.values[None, :]) ** 2
    total = np.sum(np.where(nz, diff / delta ** (1 + 2 * s), 0.0)) * 4.0 ** -N
    return float(total + l2_norm(f) ** 2)


@dataclass(frozen=True)
class NormReport:
    l2: float
    sup: float
    hs: float
    hs_dot: float
    hs_leftright: float
    s: float

    def to_json(self) -> dict:
        return asdict(self)


def norm_report(f: StepFunction, s: float) -> NormReport:
    return NormReport(
        l2=l2_norm(f),
        sup=sup_norm(f),
        hs=hs_norm(f, s),
        hs_dot=hs_dot_norm(f, s),
        hs_leftright=hs_dot_leftright(f, s),
        s=float(s),
    )


def ratio_scan(
    ratio: Callable[[StepFunction, float], float],
    sampler: Callable[[np.random.Generator, int], StepFunction],
    s: float,
    depth: int,
    seeds: Iterable[int],
) -> list[dict]:
    """Evaluate ``ratio(f, s)`` on one sampled ``f`` per seed."""
    rows = []
    for seed in seeds:
        f = sampler(np.random.default_rng(seed), depth)
        rows.append({"seed": int(seed), "s": float(s), "N": int(depth), "ratio": float(ratio(f, s))})
    return rows


def ratio_rows_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=["seed", "s", "N", "ratio"], lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    return buf.getvalue()
