"""Separated densities, smooth extension and grid/box geometry.

A density is supplied as a rank-P separated representation: coefficients
alpha_p and a P x n table of one-dimensional callables.  ``sample``
tabulates every factor once on the extended index set and deduplicates
identical sample vectors, which is what later lets the tensor contraction
collapse repeated factors (the n = 100 runs depend on this).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np


@dataclass(frozen=True)
class Box:
    """Axis-aligned box prod_j [lower_j, upper_j]."""

    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        if len(self.lower) != len(self.upper) or not self.lower:
            raise ValueError("lower/upper must be nonempty and of equal length")
        for lo, hi in zip(self.lower, self.upper):
            if not lo < hi:
                raise ValueError(f"degenerate box side [{lo}, {hi}]")

    @property
    def n(self) -> int:
        return len(self.lower)

    @classmethod
    def cube(cls, n: int, lo: float = -1.0, hi: float = 1.0) -> "Box":
        return cls((lo,) * n, (hi,) * n)


@dataclass(frozen=True)
class GridSpec:
    """Mesh width h, shape parameter D, extension radius r, and the box."""

    h: float
    box: Box
    shape_param: float = 3.0
    extension_radius: float = 5.0

    def __post_init__(self):
        if self.h <= 0 or self.shape_param <= 0 or self.extension_radius < 0:
            raise ValueError("h and shape parameter must be positive, radius >= 0")

    @property
    def n(self) -> int:
        return self.box.n

    @property
    def scaled_h(self) -> float:
        """h * sqrt(D), the natural length unit of the generating function."""
        return self.h * math.sqrt(self.shape_param)


def index_range(grid: GridSpec, j: int) -> tuple[int, int]:
    """Integers m with h*m strictly inside (P_j - r h sqrt(D), Q_j + r h sqrt(D))."""
    if not 0 <= j < grid.n:
        raise ValueError(f"dimension index {j} out of range")
    margin = grid.extension_radius * grid.scaled_h
    lo = grid.box.lower[j] - margin
    hi = grid.box.upper[j] + margin
    h = grid.h
    m_lo = math.floor(lo / h)
    while m_lo * h <= lo:
        m_lo += 1
    m_hi = math.ceil(hi / h)
    while m_hi * h >= hi:
        m_hi -= 1
    if m_lo > m_hi:
        raise ValueError(f"empty index range in dimension {j}; decrease h")
    return m_lo, m_hi


@dataclass(frozen=True)
class SeparatedDensity:
    """Sum_p alpha_p prod_j g_j^(p)(x_j) with one callable per (p, j) slot."""

    coefficients: tuple[complex, ...]
    factors: tuple[tuple[Callable[[float], float], ...], ...]

    def __post_init__(self):
        if len(self.coefficients) != len(self.factors) or not self.factors:
            raise ValueError("coefficients and factor rows must match and be nonempty")
        width = len(self.factors[0])
        if any(len(row) != width for row in self.factors):
            raise ValueError("factor table must be rectangular")

    @property
    def rank(self) -> int:
        return len(self.coefficients)

    @property
    def n(self) -> int:
        return len(self.factors[0])

    def __call__(self, x: Sequence[float]) -> complex:
        total = 0j
        for alpha, row in zip(self.coefficients, self.factors):
            prod = 1.0
            for g, xv in zip(row, x):
                prod *= g(xv)
            total += alpha * prod
        return total


@dataclass(frozen=True)
class SampledDensity:
    """Factor tables of a SeparatedDensity on the extended grid.

    ``vectors`` holds the distinct sample vectors; ``vector_ids[p][j]``
    indexes into it.  Identical (up to bit level) factor samples share one
    vector, so the number of distinct one-dimensional sums in the cubature
    is the number of distinct (vector, geometry) pairs rather than rank x n.
    """

    grid: GridSpec
    coefficients: tuple[complex, ...]
    vector_ids: tuple[tuple[int, ...], ...]
    vectors: tuple[np.ndarray, ...]
    ranges: tuple[tuple[int, int], ...]

    @property
    def rank(self) -> int:
        return len(self.coefficients)

    @property
    def n(self) -> int:
        return len(self.vector_ids[0])

    def table(self, p: int, j: int) -> np.ndarray:
        return self.vectors[self.vector_ids[p][j]]


def sample(density: SeparatedDensity, grid: GridSpec) -> SampledDensity:
    """Tabulate every factor once over its dimension's index range."""
    if density.n != grid.n:
        raise ValueError(f"density dimension {density.n} != grid dimension {grid.n}")
    ranges = tuple(index_range(grid, j) for j in range(grid.n))
    abscissae = [grid.h * np.arange(lo, hi + 1) for lo, hi in ranges]

    vectors: list[np.ndarray] = []
    seen: dict[tuple, int] = {}
    by_callable: dict[tuple[int, int], int] = {}
    ids = []
    for row in density.factors:
        row_ids = []
        for j, g in enumerate(row):
            call_key = (id(g), j)
            vid = by_callable.get(call_key)
            if vid is None:
                vals = np.asarray([g(float(x)) for x in abscissae[j]], dtype=float)
                if not np.all(np.isfinite(vals)):
                    raise ValueError(f"factor samples non-finite in dimension {j}")
                vals.flags.writeable = False
                content_key = (ranges[j], vals.tobytes())
                vid = seen.get(content_key)
                if vid is None:
                    vid = len(vectors)
                    vectors.append(vals)
                    seen[content_key] = vid
                by_callable[call_key] = vid
            row_ids.append(vid)
        ids.append(tuple(row_ids))
    return SampledDensity(grid, tuple(complex(c) for c in density.coefficients),
                          tuple(ids), tuple(vectors), ranges)


# --- the product test problem ------------------------------------------------

def w_profile(x: float) -> float:
    """w(x) = (x^2 - 1)^2 e^x, the one-dimensional test profile."""
    return (x * x - 1.0) ** 2 * math.exp(x)


def w_profile_pp(x: float) -> float:
    """Second derivative of w, derived analytically."""
    q = x * x - 1.0
    return math.exp(x) * (q * q + 8.0 * x * q + 12.0 * x * x - 4.0)


def _restrict(g: Callable[[float], float]) -> Callable[[float], float]:
    def clipped(x: float) -> float:
        return g(x) if abs(x) < 1.0 else 0.0
    return clipped


def helmholtz_test_density(n: int, kappa_sq: float,
                           extension: str = "analytic") -> SeparatedDensity:
    """Separated representation of -(Laplace + kappa^2) prod_j w(x_j).

    Rank n+1: term p < n carries w'' in slot p and w elsewhere with
    coefficient -1; the last term carries -kappa^2 and all w.  With
    ``extension="analytic"`` the closed forms are evaluated on the whole
    extended interval; ``"zero"`` clips them outside [-1, 1].
    """
    if n < 1:
        raise ValueError("dimension must be >= 1")
    if extension == "analytic":
        w, wpp = w_profile, w_profile_pp
    elif extension == "zero":
        w, wpp = _restrict(w_profile), _restrict(w_profile_pp)
    else:
        raise ValueError(f"unknown extension mode {extension!r}")
    rows = []
    for p in range(n):
        rows.append(tuple(wpp if j == p else w for j in range(n)))
    rows.append((w,) * n)
    coeffs = (-1.0,) * n + (-float(kappa_sq),)
    return SeparatedDensity(coeffs, tuple(rows))


def gaussian_density(n: int) -> SeparatedDensity:
    """Rank-1 product of exp(-x^2) factors (full-space test density)."""
    g = lambda x: math.exp(-x * x)
    return SeparatedDensity((1.0,), (tuple(g for _ in range(n)),))
