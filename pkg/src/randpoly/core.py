"""Multi-index combinatorics, ensemble descriptions and grid plumbing.

Everything here is pure and reentrant; multi-indices are plain tuples of
non-negative ints in a fixed graded-lexicographic order so that any seeded
computation built on top of the coefficient layout is reproducible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

MAX_VARIABLES = 4


class Field(Enum):
    """Coefficient field of the random ensemble."""

    REAL = "real"
    COMPLEX = "complex"

    @classmethod
    def parse(cls, value) -> "Field":
        if isinstance(value, Field):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown coefficient field {value!r}") from None


def _validate_index(J: Sequence[int]) -> tuple[int, ...]:
    J = tuple(int(j) for j in J)
    if not J:
        raise ValueError("multi-index must have at least one entry")
    if any(j < 0 for j in J):
        raise ValueError(f"multi-index entries must be non-negative, got {J}")
    return J


def multinomial(N: int, J: Sequence[int]) -> int:
    """Exact multinomial coefficient N! / ((N - |J|)! * prod(j_q!)).

    Raises ValueError when |J| > N.  The result is an exact Python int;
    use log_multinomial for the float/log-scale companion.
    """
    J = _validate_index(J)
    order = sum(J)
    if order > N:
        raise ValueError(f"multi-index order {order} exceeds degree {N}")
    out = 1
    remaining = N
    for j in J:
        out *= math.comb(remaining, j)
        remaining -= j
    return out


def log_multinomial(N: int, J: Sequence[int]) -> float:
    """log of multinomial(N, J) via lgamma; relative error ~1e-14."""
    J = _validate_index(J)
    order = sum(J)
    if order > N:
        raise ValueError(f"multi-index order {order} exceeds degree {N}")
    out = math.lgamma(N + 1) - math.lgamma(N - order + 1)
    for j in J:
        out -= math.lgamma(j + 1)
    return out


def dimension(m: int, N: int) -> int:
    """Number of multi-indices with |J| <= N in m variables: C(N+m, m)."""
    return math.comb(N + m, m)


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for head in range(total, -1, -1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


@lru_cache(maxsize=None)
def _enumerate_cached(m: int, N: int) -> tuple[tuple[int, ...], ...]:
    out = []
    for order in range(N + 1):
        out.extend(_compositions(order, m))
    return tuple(out)


def enumerate_indices(m: int, N: int) -> list[tuple[int, ...]]:
    """All multi-indices with |J| <= N, graded-lexicographically ordered.

    Grades ascend; within a grade the first coordinate descends, so the
    layout starts at (0,...,0) and ends at (0,...,0,N).  The order is the
    canonical coefficient layout and is stable across runs.
    """
    if m < 1:
        raise ValueError(f"need at least one variable, got m={m}")
    if N < 0:
        raise ValueError(f"degree must be non-negative, got N={N}")
    return list(_enumerate_cached(m, N))


@dataclass(frozen=True)
class EnsembleSpec:
    """Random polynomial system: m equations of degree N in m variables."""

    m: int
    N: int
    field: Field = Field.REAL
    seed: int = 0

    def __post_init__(self):
        if not 1 <= self.m <= MAX_VARIABLES:
            raise ValueError(f"m must be in 1..{MAX_VARIABLES}, got {self.m}")
        if self.N < 1:
            raise ValueError(f"degree must be >= 1, got {self.N}")
        object.__setattr__(self, "field", Field.parse(self.field))
        seed = int(self.seed)
        if not 0 <= seed < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        object.__setattr__(self, "seed", seed)

    @property
    def dimension(self) -> int:
        """Coefficient-vector length D_N = C(N+m, m)."""
        return dimension(self.m, self.N)


@dataclass(frozen=True)
class ComplexPoint:
    """Point z in C^m with split real/imaginary views."""

    components: tuple[complex, ...]

    def __post_init__(self):
        comps = tuple(complex(c) for c in self.components)
        if not comps:
            raise ValueError("point must have at least one component")
        if not all(math.isfinite(c.real) and math.isfinite(c.imag) for c in comps):
            raise ValueError(f"point has non-finite components: {comps}")
        object.__setattr__(self, "components", comps)

    @classmethod
    def of(cls, z, m: int | None = None) -> "ComplexPoint":
        """Coerce a scalar or sequence into a point, optionally checking m."""
        if isinstance(z, ComplexPoint):
            pt = z
        elif isinstance(z, (complex, float, int)):
            pt = cls((complex(z),))
        else:
            pt = cls(tuple(complex(c) for c in z))
        if m is not None and pt.m != m:
            raise ValueError(f"expected a point in C^{m}, got C^{pt.m}")
        return pt

    @property
    def m(self) -> int:
        return len(self.components)

    @property
    def x(self) -> np.ndarray:
        return np.array([c.real for c in self.components])

    @property
    def y(self) -> np.ndarray:
        return np.array([c.imag for c in self.components])

    @property
    def z_dot_z(self) -> complex:
        """Non-conjugated square z.z = sum z_q^2."""
        return sum(c * c for c in self.components)

    @property
    def norm_sq(self) -> float:
        return float(sum(abs(c) ** 2 for c in self.components))

    @property
    def imag_norm(self) -> float:
        return float(math.sqrt(sum(c.imag**2 for c in self.components)))

    def is_real(self) -> bool:
        return all(c.imag == 0.0 for c in self.components)

    def asarray(self) -> np.ndarray:
        return np.array(self.components, dtype=complex)


@dataclass(frozen=True)
class GridSpec:
    """Sweep one real or imaginary coordinate, all others held fixed.

    `axis` is the 0-based coordinate index, `part` selects Re or Im of that
    coordinate, and `base` holds the fixed values (defaults to the origin).
    """

    m: int
    axis: int
    part: str
    start: float
    stop: float
    points: int
    base: tuple[complex, ...] | None = None

    def __post_init__(self):
        if not 1 <= self.m <= MAX_VARIABLES:
            raise ValueError(f"m must be in 1..{MAX_VARIABLES}, got {self.m}")
        if not 0 <= self.axis < self.m:
            raise ValueError(f"axis {self.axis} out of range for m={self.m}")
        if self.part not in ("real", "imag"):
            raise ValueError(f"part must be 'real' or 'imag', got {self.part!r}")
        if not self.start < self.stop:
            raise ValueError("grid requires start < stop")
        if self.points < 2:
            raise ValueError("grid requires at least 2 points")
        base = self.base if self.base is not None else (0j,) * self.m
        base = tuple(complex(c) for c in base)
        if len(base) != self.m:
            raise ValueError("base point dimension mismatch")
        object.__setattr__(self, "base", base)


def grid_points(g: GridSpec) -> list[ComplexPoint]:
    """Evenly spaced points along the grid axis, endpoints included."""
    values = np.linspace(g.start, g.stop, g.points)
    out = []
    for v in values:
        comps = list(g.base)
        zq = comps[g.axis]
        if g.part == "real":
            comps[g.axis] = complex(v, zq.imag)
        else:
            comps[g.axis] = complex(zq.real, v)
        out.append(ComplexPoint(tuple(comps)))
    return out
