# Location: src/latgauge/lattice.py
"""Periodic N x N grid, field containers and the symmetric discrete calculus.

Index convention: values[i, j] with i the row (y, increasing "up") and j the
column (x). Every stencil wraps modulo N.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np

Direction = Literal["x", "y"]
Site = tuple[int, int]

# axis carrying each direction in values[i, j]
_AXIS = {"x": 1, "y": 0}


@dataclass(frozen=True)
class GridSpec:
    n: int
    spacing: float = 1.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 3:
            raise ValueError(f"Grid needs N >= 3 sites per side, got {self.n}")
        if not self.spacing > 0:
            raise ValueError(f"Lattice spacing must be positive, got {self.spacing}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "spacing", float(self.spacing))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n, self.n)

    @property
    def n_sites(self) -> int:
        return self.n * self.n

    def wrap(self, site: Site) -> Site:
        return (site[0] % self.n, site[1] % self.n)

    def sites(self):
        """Row-major iteration over all sites."""
        for i in range(self.n):
            for j in range(self.n):
                yield (i, j)


def _frozen_array(values, grid: GridSpec) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, copy=True)
    if arr.shape != grid.shape:
        raise ValueError(f"Field values must have shape {grid.shape}, got {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ScalarField:
    grid: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen_array(self.values, self.grid))

    @classmethod
    def zeros(cls, grid: GridSpec) -> "ScalarField":
        return cls(grid, np.zeros(grid.shape))

    @classmethod
    def constant(cls, grid: GridSpec, value: float) -> "ScalarField":
        return cls(grid, np.full(grid.shape, float(value)))

    @classmethod
    def from_function(cls, grid: GridSpec, fn: Callable[[int, int], float]) -> "ScalarField":
        i, j = np.indices(grid.shape)
        return cls(grid, np.vectorize(fn, otypes=[float])(i, j))

    @classmethod
    def random(cls, grid: GridSpec, rng: np.random.Generator) -> "ScalarField":
        return cls(grid, rng.standard_normal(grid.shape))

    def at(self, site: Site) -> float:
        i, j = self.grid.wrap(site)
        return float(self.values[i, j])

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def total(self) -> float:
        return float(self.values.sum())

    def mean(self) -> float:
        return float(self.values.mean())

    def equals(self, other: "ScalarField", atol: float = 0.0) -> bool:
        if self.grid != other.grid:
            return False
        if atol == 0.0:
            return bool(np.array_equal(self.values, other.values))
        return bool(np.allclose(self.values, other.values, rtol=0.0, atol=atol))

    def with_value(self, site: Site, value: float) -> "ScalarField":
        arr = self.values.copy()
        arr[self.grid.wrap(site)] = value
        return ScalarField(self.grid, arr)

    def _coerce(self, other) -> np.ndarray | float:
        if isinstance(other, ScalarField):
            if other.grid != self.grid:
                raise ValueError("Fields live on different grids")
            return other.values
        return other

    def __add__(self, other) -> "ScalarField":
        return ScalarField(self.grid, self.values + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other) -> "ScalarField":
        return ScalarField(self.grid, self.values - self._coerce(other))

    def __rsub__(self, other) -> "ScalarField":
        return ScalarField(self.grid, self._coerce(other) - self.values)

    def __mul__(self, other) -> "ScalarField":
        return ScalarField(self.grid, self.values * self._coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "ScalarField":
        return ScalarField(self.grid, self.values / self._coerce(other))

    def __neg__(self) -> "ScalarField":
        return ScalarField(self.grid, -self.values)


@dataclass(frozen=True, eq=False)
class VectorField:
    x: ScalarField
    y: ScalarField

    def __post_init__(self):
        if self.x.grid != self.y.grid:
            raise ValueError("Vector components must share one grid")

    @property
    def grid(self) -> GridSpec:
        return self.x.grid

    @classmethod
    def zeros(cls, grid: GridSpec) -> "VectorField":
        return cls(ScalarField.zeros(grid), ScalarField.zeros(grid))

    @classmethod
    def from_arrays(cls, grid: GridSpec, x, y) -> "VectorField":
        return cls(ScalarField(grid, x), ScalarField(grid, y))

    @classmethod
    def random(cls, grid: GridSpec, rng: np.random.Generator) -> "VectorField":
        return cls(ScalarField.random(grid, rng), ScalarField.random(grid, rng))

    def component(self, direction: Direction) -> ScalarField:
        return self.x if direction == "x" else self.y

    def with_component(self, direction: Direction, value: ScalarField) -> "VectorField":
        if direction == "x":
            return VectorField(value, self.y)
        return VectorField(self.x, value)

    def sup_norm(self) -> float:
        return max(self.x.sup_norm(), self.y.sup_norm())

    def dot(self, other: "VectorField") -> float:
        """Sum over sites and components of self . other."""
        return float(np.sum(self.x.values * other.x.values + self.y.values * other.y.values))

    def equals(self, other: "VectorField", atol: float = 0.0) -> bool:
        return self.x.equals(other.x, atol) and self.y.equals(other.y, atol)

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.x - other.x, self.y - other.y)

    def __mul__(self, scale: float) -> "VectorField":
        return VectorField(self.x * scale, self.y * scale)

    __rmul__ = __mul__

    def __neg__(self) -> "VectorField":
        return VectorField(-self.x, -self.y)


def _check_direction(direction: str) -> None:
    if direction not in _AXIS:
        raise ValueError(f"Direction must be 'x' or 'y', got {direction!r}")


def shift(f: ScalarField, direction: Direction, offset: int) -> ScalarField:
    """Return g with g[i, j] = f at the site `offset` steps along `direction`."""
    _check_direction(direction)
    return ScalarField(f.grid, np.roll(f.values, -offset, axis=_AXIS[direction]))


def dbar(f: ScalarField, direction: Direction) -> ScalarField:
    """Symmetric difference (f[+1] - f[-1]) / 2a along `direction`."""
    _check_direction(direction)
    axis = _AXIS[direction]
    ahead = np.roll(f.values, -1, axis=axis)
    behind = np.roll(f.values, 1, axis=axis)
    return ScalarField(f.grid, (ahead - behind) / (2.0 * f.grid.spacing))


def curl_z(q: VectorField) -> ScalarField:
    """b = dbar_x(q_y) - dbar_y(q_x)."""
    return dbar(q.y, "x") - dbar(q.x, "y")


def divergence(p: VectorField) -> ScalarField:
    return dbar(p.x, "x") + dbar(p.y, "y")


def gradient(f: ScalarField) -> VectorField:
    return VectorField(dbar(f, "x"), dbar(f, "y"))


def laplacian(f: ScalarField) -> ScalarField:
    """dbar_x dbar_x + dbar_y dbar_y; a stride-2 stencil, not the nearest-neighbour one."""
    return divergence(gradient(f))


def sum_by_parts_residual(f: ScalarField, g: ScalarField, direction: Direction) -> float:
    """Sum of g*dbar(f) + f*dbar(g); zero on any periodic grid."""
    if f.grid != g.grid:
        raise ValueError("Fields live on different grids")
    terms = g.values * dbar(f, direction).values + f.values * dbar(g, direction).values
    return float(np.sum(terms))


def product_rule_rhs(f: ScalarField, g: ScalarField, direction: Direction) -> ScalarField:
    """Right side of the symmetric product rule for dbar(f*g)."""
    g_avg = (shift(g, direction, 1) + shift(g, direction, -1)) * 0.5
    f_avg = (shift(f, direction, 1) + shift(f, direction, -1)) * 0.5
    return g_avg * dbar(f, direction) + f_avg * dbar(g, direction)
