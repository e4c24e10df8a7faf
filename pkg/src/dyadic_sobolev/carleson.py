"""Capacitary Carleson norms, BMO^s functionals, the Carleson embedding constant
and operator norms on H^s.

The Carleson norm is a supremum over finite collections of pairwise disjoint
dyadic intervals, i.e. antichains of the dyadic tree.  For support depth ``d``
the antichains number ``a(d) - 1`` with ``a(d) = a(d-1)**2 + 1``, ``a(0) = 2``,
so exhaustive search is only feasible for ``d <= 3`` (``d = 4`` on request).
Deeper sequences use a heuristic search that returns a lower bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .capacity import CapacityEstimate, DyadicSet, capacity, capacity_value
from .dyadic import (
    DyadicIndex,
    HaarCoeffs,
    StepFunction,
    _pyramid,
    haar_analyze,
    haar_synthesize,
    level_weights,
)
from .norms import hs_norm_sq
from .operators import (
    adjoint_paraproduct,
    check_s,
    commutator_shift,
    lambda_paraproduct,
    paraproduct,
    shift,
)
from .spectral import SpectralEstimate, power_iteration

__all__ = [
    "CarlesonSequence",
    "CollectionValue",
    "ExactDepthError",
    "antichains",
    "antichain_count",
    "carleson_norm",
    "single_interval_sup",
    "symbol_sequence",
    "bmo_s_norm",
    "bmo_s_value",
    "cmo_tail",
    "embedding_constant",
    "embedding_matrices",
    "rayleigh_quotient",
    "operator_matrix",
    "operator_norm_hs",
    "named_operator",
]

EXACT_MAX_DEPTH = 3


class ExactDepthError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class CarlesonSequence:
    """Nonnegative weights ``mu(I)`` on levels ``0 .. depth``, heap order."""

    depth: int
    mu: np.ndarray

    def __post_init__(self):
        mu = np.array(self.mu, dtype=float)
        if mu.shape != ((1 << (self.depth + 1)) - 1,):
            raise ValueError(f"depth {self.depth} needs {(1 << (self.depth + 1)) - 1} weights")
        if np.any(mu < 0):
            raise ValueError("Carleson weights must be nonnegative")
        mu.setflags(write=False)
        object.__setattr__(self, "mu", mu)

    @classmethod
    def zeros(cls, depth: int) -> "CarlesonSequence":
        return cls(depth, np.zeros((1 << (depth + 1)) - 1))

    @classmethod
    def point_mass(cls, interval: DyadicIndex, value: float = 1.0, depth: int | None = None) -> "CarlesonSequence":
        depth = interval.level if depth is None else depth
        mu = np.zeros((1 << (depth + 1)) - 1)
        mu[interval.heap_index] = value
        return cls(depth, mu)

    def __getitem__(self, interval: DyadicIndex) -> float:
        if interval.level > self.depth:
            return 0.0
        return float(self.mu[interval.heap_index])

    def level(self, j: int) -> np.ndarray:
        return self.mu[(1 << j) - 1:(1 << (j + 1)) - 1]

    @property
    def support_depth(self) -> int:
        nz = np.flatnonzero(self.mu)
        return DyadicIndex.from_heap(int(nz[-1])).level if len(nz) else 0

    def subtree_sums(self) -> np.ndarray:
        """``sum_{J subset I} mu(J)`` for every ``I``, heap order."""
        out = np.empty_like(self.mu)
        below = np.zeros(1 << (self.depth + 1))
        for j in range(self.depth, -1, -1):
            below = self.level(j) + below[0::2] + below[1::2]
            out[(1 << j) - 1:(1 << (j + 1)) - 1] = below
        return out

    def restrict_finer_than(self, cutoff: int) -> "CarlesonSequence":
        """Keep only intervals with ``|I| < 2**-cutoff``."""
        mu = self.mu.copy()
        mu[: min(len(mu), (1 << (cutoff + 1)) - 1)] = 0.0
        return CarlesonSequence(self.depth, mu)

    def to_json(self) -> dict:
        entries = []
        for i, v in enumerate(self.mu):
            if v != 0.0:
                I = DyadicIndex.from_heap(i)
                entries.append({"level": I.level, "pos": I.pos, "mu": float(v)})
        return {"depth": self.depth, "entries": entries}

    @classmethod
    def from_json(cls, obj: dict) -> "CarlesonSequence":
        depth = int(obj["depth"])
        mu = np.zeros((1 << (depth + 1)) - 1)
        for e in obj.get("entries", []):
            I = DyadicIndex(int(e["level"]), int(e["pos"]))
            if I.level > depth:
                raise ValueError(f"entry at level {I.level} exceeds depth {depth}")
            mu[I.heap_index] = float(e["mu"])
        return cls(depth, mu)


@dataclass(frozen=True, eq=False)
class CollectionValue:
    collection: tuple[DyadicIndex, ...]
    mass: float
    cap: CapacityEstimate
    ratio: float
    exact: bool = True

    def to_json(self) -> dict:
        return {
            "collection": [{"level": I.level, "pos": I.pos} for I in self.collection],
            "mass": self.mass,
            "capacity": self.cap.value,
            "ratio": self.ratio,
            "exact": self.exact,
        }


def _antichains(level: int, pos: int, depth: int) -> list[tuple[DyadicIndex, ...]]:
    here = (DyadicIndex(level, pos),)
    if level == depth:
        return [(), here]
    left = _antichains(level + 1, 2 * pos, depth)
    right = _antichains(level + 1, 2 * pos + 1, depth)
    return [here] + [a + b for a in left for b in right]


def antichains(depth: int) -> list[tuple[DyadicIndex, ...]]:
    """All antichains of the tree of levels ``0 .. depth``, including the empty one."""
    return _antichains(0, 0, depth)


def antichain_count(depth: int) -> int:
    a = 2
    for _ in range(depth):
        a = a * a + 1
    return a


def _union(collection, depth: int) -> DyadicSet:
    return DyadicSet.from_intervals(collection, depth)


def _evaluate(collection, sums, s, d, M, exact) -> CollectionValue:
    E = _union(collection, d)
    cap = capacity(E, s, M)
    mass = float(sum(sums[I.heap_index] for I in collection))
    return CollectionValue(tuple(collection), mass, cap, mass / cap.value, exact)


def _ratio(collection, sums, s, d, M) -> float:
    mass = sum(sums[I.heap_index] for I in collection)
    if mass == 0.0:
        return 0.0
    return mass / capacity_value(_union(collection, d), s, M)


def carleson_norm(
    mu: CarlesonSequence,
    s: float,
    mode: str = "exact",
    solve_depth: int | None = None,
    allow_depth_4: bool = False,
    pool_size: int = 16,
) -> CollectionValue:
    """Squared s-Carleson norm: sup over disjoint collections of mass / capacity.

    Parameters
    ----------
    mu : CarlesonSequence
    s : float
    mode : {"exact", "heuristic"}
        ``exact`` enumerates every antichain up to the support depth.
        ``heuristic`` tries single intervals, full levels and a greedy union
        grown from the ``pool_size`` best single intervals; its ratio is a lower
        bound and the result is flagged ``exact=False``.
    solve_depth : int, optional
        Depth of the capacity solves.  Defaults to the support depth: averaging
        a trial function down to the depth of the set keeps it admissible and
        does not increase its norm, so finer trial functions never help.
    """
    s = check_s(s)
    d = mu.support_depth
    M = d if solve_depth is None else max(int(solve_depth), d)
    sums = mu.subtree_sums()
    if mode == "exact":
        limit = 4 if allow_depth_4 else EXACT_MAX_DEPTH
        if d > limit:
            raise ExactDepthError(
                f"exact Carleson norm supports depth <= {limit}, got {d}"
                + ("" if allow_depth_4 else " (depth 4 needs allow_depth_4)")
            )
        best, best_ratio = None, -1.0
        for coll in antichains(d):
            if not coll:
                continue
            r = _ratio(coll, sums, s, d, M)
            if r > best_ratio:
                best, best_ratio = coll, r
        return _evaluate(best, sums, s, d, M, True)
    if mode != "heuristic":
        raise ValueError(f"unknown mode {mode!r}")

    candidates: list[tuple[DyadicIndex, ...]] = []
    singles = [DyadicIndex.from_heap(i) for i in range((1 << (d + 1)) - 1)]
    single_ratios = [_ratio((I,), sums, s, d, M) for I in singles]
    candidates += [(I,) for I in singles]
    for j in range(d + 1):
        candidates.append(tuple(DyadicIndex(j, k) for k in range(1 << j)))

    pool = [singles[i] for i in np.argsort(single_ratios)[::-1][:pool_size]]
    current = (singles[int(np.argmax(single_ratios))],)
    current_ratio = max(single_ratios)
    while True:
        options = [I for I in pool if all(I.disjoint(J) for J in current)]
        scored = [(_ratio(current + (I,), sums, s, d, M), I) for I in options]
        if not scored:
            break
        r, I = max(scored, key=lambda t: t[0])
        if r <= current_ratio:
            break
        current, current_ratio = tuple(sorted(current + (I,))), r
    candidates.append(current)

    best = max(candidates, key=lambda c: _ratio(c, sums, s, d, M))
    return _evaluate(best, sums, s, d, M, False)


def single_interval_sup(mu: CarlesonSequence, s: float, solve_depth: int | None = None) -> float:
    """The supremum restricted to one-interval collections."""
    d = mu.support_depth
    M = d if solve_depth is None else max(int(solve_depth), d)
    sums = mu.subtree_sums()
    return max(_ratio((DyadicIndex.from_heap(i),), sums, s, d, M) for i in range((1 << (d + 1)) - 1))


def symbol_sequence(b: StepFunction, s: float) -> CarlesonSequence:
    """``mu(I) = |I|^{-2s} (b, h_I)^2``."""
    s = check_s(s)
    c = haar_analyze(b)
    if b.depth == 0:
        return CarlesonSequence.zeros(0)
    return CarlesonSequence(b.depth - 1, level_weights(b.depth, -2 * s) * c.coeffs ** 2)


def bmo_s_norm(b: StepFunction, s: float, mode: str = "exact", solve_depth: int | None = None, **kw) -> CollectionValue:
    """``||b||_{BMO^s}^2`` is the ratio of the returned collection."""
    return carleson_norm(symbol_sequence(b, s), s, mode, solve_depth, **kw)


def bmo_s_value(b: StepFunction, s: float, mode: str = "exact", solve_depth: int | None = None, **kw) -> float:
    return float(np.sqrt(bmo_s_norm(b, s, mode, solve_depth, **kw).ratio))


def cmo_tail(b: StepFunction, s: float, cutoff: int, mode: str = "exact", solve_depth: int | None = None, **kw) -> float:
    """The Carleson supremum of the symbol weights on intervals shorter than ``2**-cutoff``."""
    mu = symbol_sequence(b, s).restrict_finer_than(cutoff)
    if not np.any(mu.mu):
        return 0.0
    return carleson_norm(mu, s, mode, solve_depth, **kw).ratio


# Embedding constant.  Coordinates of a depth-D function are [mean, (f, h_I)...].


def _coordinate_gram(depth: int, s: float) -> np.ndarray:
    return np.concatenate(([1.0], 1.0 + level_weights(depth, -2 * s)))


def _averages_from_coords(x: np.ndarray, d: int) -> np.ndarray:
    """Averages on levels ``0 .. d`` (heap order) from coordinates."""
    a = x[:1]
    out = [a]
    for j in range(d):
        c = x[1 + (1 << j) - 1:1 + (1 << (j + 1)) - 1] * 2.0 ** (0.5 * j)
        nxt = np.empty(2 * len(a))
        nxt[0::2] = a + c
        nxt[1::2] = a - c
        a = nxt
        out.append(a)
    return np.concatenate(out)


def _averages_adjoint(z: np.ndarray, d: int, n: int) -> np.ndarray:
    grad = np.zeros(n)
    g = z[(1 << d) - 1:]
    for j in range(d - 1, -1, -1):
        grad[1 + (1 << j) - 1:1 + (1 << (j + 1)) - 1] = 2.0 ** (0.5 * j) * (g[0::2] - g[1::2])
        g = z[(1 << j) - 1:(1 << (j + 1)) - 1] + g[0::2] + g[1::2]
    grad[0] = g[0]
    return grad


def embedding_matrices(mu: CarlesonSequence, s: float, depth: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Dense ``(A, G)`` with ``x @ A @ x = sum mu(I) <f>_I^2`` and ``x @ G @ x = ||f||_{H^s}^2``."""
    D = mu.depth if depth is None else depth
    n = 1 << D
    V = np.stack([_averages_from_coords(e, mu.depth) for e in np.eye(n)], axis=1)
    return V.T @ (mu.mu[:, None] * V), np.diag(_coordinate_gram(D, s))


def embedding_constant(
    mu: CarlesonSequence,
    s: float,
    depth: int | None = None,
    tol: float = 1e-10,
    max_iters: int = 10_000,
) -> SpectralEstimate:
    """Best constant in ``sum_I mu(I) <f>_I^2 <= C ||f||_{H^s}^2`` over depth-limited ``f``.

    Both sides are quadratic forms in Haar coordinates and the right one is
    diagonal, so the constant is the top eigenvalue of the symmetrically
    preconditioned left form, found by power iteration from the all-ones vector.
    """
    s = check_s(s)
    D = mu.depth if depth is None else int(depth)
    if D < mu.depth:
        raise ValueError(f"depth {D} is coarser than the Carleson sequence depth {mu.depth}")
    n = 1 << D
    scale = 1.0 / np.sqrt(_coordinate_gram(D, s))
    d = mu.depth

    def apply(y):
        x = scale * y
        return scale * _averages_adjoint(mu.mu * _averages_from_coords(x, d), d, n)

    lam, y, its, res = power_iteration(apply, np.ones(n), tol, max_iters)
    return SpectralEstimate(lam, HaarCoeffs.from_vector(scale * y), its, res, tol)


def rayleigh_quotient(mu: CarlesonSequence, s: float, vector: HaarCoeffs) -> float:
    f = haar_synthesize(vector)
    avg = np.concatenate(_pyramid(f.refine(max(f.depth, mu.depth)).values)[: mu.depth + 1])
    return float(np.dot(mu.mu, avg ** 2) / hs_norm_sq(f, s))


# Operator norms on H^s.


def operator_matrix(op: Callable[[StepFunction], StepFunction], depth: int) -> np.ndarray:
    """Matrix of a linear operator in Haar coordinates (columns = images of basis vectors)."""
    n = 1 << depth
    images = [haar_analyze(op(haar_synthesize(HaarCoeffs.from_vector(e)))) for e in np.eye(n)]
    out_depth = max(c.depth for c in images)
    return np.stack([c.refine(out_depth).vector() for c in images], axis=1)


def operator_norm_hs(
    op: Callable[[StepFunction], StepFunction],
    s: float,
    depth: int,
    tol: float = 1e-9,
    max_iters: int = 10_000,
) -> SpectralEstimate:
    """``||L||_{H^s -> H^s}`` restricted to depth-``depth`` inputs.

    The operator is tabulated on the Haar basis, weighted by the square roots
    of the diagonal H^s Gram on both sides, and the top eigenvalue of the
    resulting normal matrix is found by power iteration.  ``value`` is the
    norm itself, not its square.
    """
    s = check_s(s)
    L = operator_matrix(op, depth)
    out_depth = L.shape[0].bit_length() - 1
    B = np.sqrt(_coordinate_gram(out_depth, s))[:, None] * L / np.sqrt(_coordinate_gram(depth, s))[None, :]
    BtB = B.T @ B
    lam, y, its, res = power_iteration(lambda v: BtB @ v, np.ones(1 << depth), tol, max_iters)
    x = y / np.sqrt(_coordinate_gram(depth, s))
    return SpectralEstimate(float(np.sqrt(max(lam, 0.0))), HaarCoeffs.from_vector(x), its, res, tol)


OPERATOR_NAMES = ("identity", "shift", "paraproduct", "adjoint_paraproduct", "lambda", "commutator")


def named_operator(name: str, b: StepFunction | None = None) -> Callable[[StepFunction], StepFunction]:
    if name == "identity":
        return lambda f: f
    if name == "shift":
        return shift
    if b is None:
        raise ValueError(f"operator {name!r} needs a symbol")
    table = {
        "paraproduct": lambda f: paraproduct(b, f),
        "adjoint_paraproduct": lambda f: adjoint_paraproduct(b, f),
        "lambda": lambda f: lambda_paraproduct(b, f),
        "commutator": lambda f: commutator_shift(b, f),
    }
    if name not in table:
        raise ValueError(f"unknown operator {name!r}; choose from {OPERATOR_NAMES}")
    return table[name]
