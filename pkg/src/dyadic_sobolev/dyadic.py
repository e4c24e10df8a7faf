"""Dyadic intervals on [0, 1), step functions and the Haar transform.

Haar coefficients are stored flat in heap order: the interval at level ``j``
and position ``k`` lives at index ``2**j - 1 + k``.  A depth-``N`` step function
has ``2**N - 1`` Haar coefficients (levels ``0 .. N-1``) plus its mean.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

__all__ = [
    "DyadicIndex",
    "StepFunction",
    "HaarCoeffs",
    "haar_analyze",
    "haar_synthesize",
    "average",
    "averages",
    "inner",
    "common_depth",
    "level_weights",
]


@dataclass(frozen=True, order=True)
class DyadicIndex:
    """The dyadic interval ``2**-level * [pos, pos + 1)``."""

    level: int
    pos: int

    def __post_init__(self):
        if self.level < 0:
            raise ValueError(f"level must be nonnegative, got {self.level}")
        if not 0 <= self.pos < (1 << self.level):
            raise ValueError(f"pos {self.pos} out of range for level {self.level}")

    @property
    def measure(self) -> float:
        return 2.0 ** -self.level

    @property
    def left(self) -> "DyadicIndex":
        return DyadicIndex(self.level + 1, 2 * self.pos)

    @property
    def right(self) -> "DyadicIndex":
        return DyadicIndex(self.level + 1, 2 * self.pos + 1)

    @property
    def parent(self) -> "DyadicIndex":
        if self.level == 0:
            raise ValueError("the unit interval has no parent")
        return DyadicIndex(self.level - 1, self.pos // 2)

    @property
    def is_left_child(self) -> bool:
        return self.level > 0 and self.pos % 2 == 0

    @property
    def endpoints(self) -> tuple[float, float]:
        return self.pos * self.measure, (self.pos + 1) * self.measure

    @property
    def heap_index(self) -> int:
        return (1 << self.level) - 1 + self.pos

    @classmethod
    def from_heap(cls, index: int) -> "DyadicIndex":
        level = (index + 1).bit_length() - 1
        return cls(level, index + 1 - (1 << level))

    def contains(self, other: "DyadicIndex") -> bool:
        """True if ``other`` is a (not necessarily strict) subinterval."""
        if other.level < self.level:
            return False
        return other.pos >> (other.level - self.level) == self.pos

    def disjoint(self, other: "DyadicIndex") -> bool:
        return not (self.contains(other) or other.contains(self))

    def ancestors(self) -> Iterator["DyadicIndex"]:
        """Strict ancestors, nearest first."""
        level, pos = self.level, self.pos
        while level > 0:
            level, pos = level - 1, pos >> 1
            yield DyadicIndex(level, pos)

    def leaf_slice(self, depth: int) -> slice:
        """Leaves of a depth-``depth`` grid covered by this interval."""
        if depth < self.level:
            raise ValueError(f"depth {depth} is coarser than level {self.level}")
        width = 1 << (depth - self.level)
        return slice(self.pos * width, (self.pos + 1) * width)


def intervals(max_level: int, min_level: int = 0) -> Iterator[DyadicIndex]:
    for j in range(min_level, max_level + 1):
        for k in range(1 << j):
            yield DyadicIndex(j, k)


def level_weights(depth: int, power: float) -> np.ndarray:
    """``|I|**power`` for every interval of levels ``0 .. depth-1``, heap order."""
    levels = np.repeat(np.arange(depth), 1 << np.arange(depth))
    return 2.0 ** (-power * levels)


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class StepFunction:
    """A function constant on each of the ``2**depth`` leaves of level ``depth``."""

    depth: int
    values: np.ndarray

    def __post_init__(self):
        values = _frozen(self.values)
        if values.shape != (1 << self.depth,):
            raise ValueError(
                f"depth {self.depth} needs {1 << self.depth} values, got shape {values.shape}"
            )
        object.__setattr__(self, "values", values)

    @classmethod
    def from_values(cls, values) -> "StepFunction":
        values = np.asarray(values, dtype=float)
        depth = len(values).bit_length() - 1
        if len(values) != 1 << depth:
            raise ValueError(f"length {len(values)} is not a power of two")
        return cls(depth, values)

    @classmethod
    def constant(cls, c: float, depth: int = 0) -> "StepFunction":
        return cls(depth, np.full(1 << depth, float(c)))

    @classmethod
    def indicator(cls, interval: DyadicIndex, depth: int | None = None) -> "StepFunction":
        depth = interval.level if depth is None else depth
        values = np.zeros(1 << depth)
        values[interval.leaf_slice(depth)] = 1.0
        return cls(depth, values)

    @classmethod
    def haar(cls, interval: DyadicIndex, depth: int | None = None) -> "StepFunction":
        """The Haar function ``h_I``, at its natural depth ``level + 1`` by default."""
        depth = interval.level + 1 if depth is None else depth
        values = np.zeros(1 << depth)
        amp = interval.measure ** -0.5
        values[interval.left.leaf_slice(depth)] = amp
        values[interval.right.leaf_slice(depth)] = -amp
        return cls(depth, values)

    def refine(self, depth: int) -> "StepFunction":
        if depth < self.depth:
            raise ValueError(f"cannot refine depth {self.depth} to coarser depth {depth}")
        if depth == self.depth:
            return self
        return StepFunction(depth, np.repeat(self.values, 1 << (depth - self.depth)))

    def integral(self) -> float:
        return float(self.values.sum()) * 2.0 ** -self.depth

    def __call__(self, x):
        """Point evaluation on [0, 1); the right endpoint maps to the last leaf."""
        idx = np.minimum((np.asarray(x) * (1 << self.depth)).astype(int), (1 << self.depth) - 1)
        return self.values[idx]

    def _binary(self, other, op) -> "StepFunction":
        if isinstance(other, StepFunction):
            a, b = common_depth(self, other)
            return StepFunction(a.depth, op(a.values, b.values))
        return StepFunction(self.depth, op(self.values, float(other)))

    def __add__(self, other):
        return self._binary(other, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __rsub__(self, other):
        return StepFunction(self.depth, float(other) - self.values)

    def __mul__(self, other):
        return self._binary(other, np.multiply)

    __rmul__ = __mul__

    def __truediv__(self, c: float):
        return StepFunction(self.depth, self.values / float(c))

    def __neg__(self):
        return StepFunction(self.depth, -self.values)

    def allclose(self, other: "StepFunction", atol: float = 1e-12, rtol: float = 0.0) -> bool:
        a, b = common_depth(self, other)
        return bool(np.allclose(a.values, b.values, atol=atol, rtol=rtol))

    def to_json(self) -> dict:
        return {"depth": self.depth, "values": self.values.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "StepFunction":
        return cls(int(obj["depth"]), obj["values"])

    def __repr__(self):
        return f"StepFunction(depth={self.depth}, values={self.values!r})"


@dataclass(frozen=True, eq=False)
class HaarCoeffs:
    """Mean plus Haar coefficients ``(f, h_I)`` for levels ``0 .. depth-1``."""

    depth: int
    mean: float
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = _frozen(self.coeffs)
        if coeffs.shape != ((1 << self.depth) - 1,):
            raise ValueError(
                f"depth {self.depth} needs {(1 << self.depth) - 1} coefficients, got {coeffs.shape}"
            )
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "mean", float(self.mean))

    @classmethod
    def zeros(cls, depth: int) -> "HaarCoeffs":
        return cls(depth, 0.0, np.zeros((1 << depth) - 1))

    @classmethod
    def from_vector(cls, vector) -> "HaarCoeffs":
        """Inverse of :meth:`vector`: ``[mean, c_0, c_1, ...]``."""
        vector = np.asarray(vector, dtype=float)
        depth = len(vector).bit_length() - 1
        return cls(depth, vector[0], vector[1:])

    def vector(self) -> np.ndarray:
        return np.concatenate(([self.mean], self.coeffs))

    def level(self, j: int) -> np.ndarray:
        if not 0 <= j < self.depth:
            return np.zeros(1 << j)
        return self.coeffs[(1 << j) - 1:(1 << (j + 1)) - 1]

    def __getitem__(self, interval: DyadicIndex) -> float:
        if interval.level >= self.depth:
            return 0.0
        return float(self.coeffs[interval.heap_index])

    def refine(self, depth: int) -> "HaarCoeffs":
        if depth < self.depth:
            raise ValueError(f"cannot refine depth {self.depth} to coarser depth {depth}")
        coeffs = np.zeros((1 << depth) - 1)
        coeffs[: len(self.coeffs)] = self.coeffs
        return HaarCoeffs(depth, self.mean, coeffs)

    def scale(self, coeff_factors, mean_factor: float) -> "HaarCoeffs":
        return HaarCoeffs(self.depth, self.mean * mean_factor, self.coeffs * coeff_factors)

    def __add__(self, other: "HaarCoeffs") -> "HaarCoeffs":
        depth = max(self.depth, other.depth)
        a, b = self.refine(depth), other.refine(depth)
        return HaarCoeffs(depth, a.mean + b.mean, a.coeffs + b.coeffs)

    def __sub__(self, other: "HaarCoeffs") -> "HaarCoeffs":
        return self + other.scale(-1.0, -1.0)

    def allclose(self, other: "HaarCoeffs", atol: float = 1e-12) -> bool:
        depth = max(self.depth, other.depth)
        a, b = self.refine(depth), other.refine(depth)
        return bool(abs(a.mean - b.mean) <= atol and np.allclose(a.coeffs, b.coeffs, rtol=0, atol=atol))

    def to_json(self) -> dict:
        return {
            "depth": self.depth,
            "mean": self.mean,
            "coeffs": [
                {"level": I.level, "pos": I.pos, "value": float(self.coeffs[i])}
                for i, I in enumerate(intervals(self.depth - 1))
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "HaarCoeffs":
        depth = int(obj["depth"])
        coeffs = np.zeros((1 << depth) - 1)
        for entry in obj.get("coeffs", []):
            I = DyadicIndex(int(entry["level"]), int(entry["pos"]))
            if I.level >= depth:
                raise ValueError(f"coefficient at level {I.level} exceeds depth {depth}")
            coeffs[I.heap_index] = float(entry["value"])
        return cls(depth, float(obj.get("mean", 0.0)), coeffs)

    def __repr__(self):
        return f"HaarCoeffs(depth={self.depth}, mean={self.mean!r}, coeffs={self.coeffs!r})"


# Batched kernels along the last axis; the public functions wrap these.


def _analyze(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = values.shape[-1]
    depth = n.bit_length() - 1
    a = values
    details = []
    for j in range(depth - 1, -1, -1):
        left, right = a[..., 0::2], a[..., 1::2]
        details.append((left - right) * (0.5 * 2.0 ** (-0.5 * j)))
        a = 0.5 * (left + right)
    details.reverse()
    if details:
        coeffs = np.concatenate(details, axis=-1)
    else:
        coeffs = np.zeros(values.shape[:-1] + (0,))
    return a[..., 0], coeffs


def _synthesize(mean: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    depth = (coeffs.shape[-1] + 1).bit_length() - 1
    a = np.asarray(mean, dtype=float)[..., None]
    for j in range(depth):
        c = coeffs[..., (1 << j) - 1:(1 << (j + 1)) - 1] * 2.0 ** (0.5 * j)
        nxt = np.empty(a.shape[:-1] + (2 * a.shape[-1],))
        nxt[..., 0::2] = a + c
        nxt[..., 1::2] = a - c
        a = nxt
    return a


def _pyramid(values: np.ndarray) -> list[np.ndarray]:
    """Averages over every interval, one array per level ``0 .. depth``."""
    depth = values.shape[-1].bit_length() - 1
    levels = [values]
    a = values
    for _ in range(depth):
        a = 0.5 * (a[..., 0::2] + a[..., 1::2])
        levels.append(a)
    levels.reverse()
    return levels


def _to_leaves(level_values: np.ndarray, depth: int) -> np.ndarray:
    j = level_values.shape[-1].bit_length() - 1
    return np.repeat(level_values, 1 << (depth - j), axis=-1)


def haar_analyze(f: StepFunction) -> HaarCoeffs:
    mean, coeffs = _analyze(f.values)
    return HaarCoeffs(f.depth, float(mean), coeffs)


def haar_synthesize(c: HaarCoeffs) -> StepFunction:
    return StepFunction(c.depth, _synthesize(np.float64(c.mean), c.coeffs))


def averages(f: StepFunction) -> list[np.ndarray]:
    """``<f>_I`` for all intervals, indexed ``[level][pos]`` for levels ``0 .. depth``."""
    return _pyramid(f.values)


def average(f: StepFunction, interval: DyadicIndex) -> float:
    if interval.level >= f.depth:
        return float(f.values[interval.pos >> (interval.level - f.depth)])
    return float(f.values[interval.leaf_slice(f.depth)].mean())


def common_depth(f: StepFunction, g: StepFunction) -> tuple[StepFunction, StepFunction]:
    depth = max(f.depth, g.depth)
    return f.refine(depth), g.refine(depth)


def inner(f: StepFunction, g: StepFunction) -> float:
    a, b = common_depth(f, g)
    return float(np.dot(a.values, b.values)) * 2.0 ** -a.depth
