# Location: src/latgauge/algebra.py
"""Exact algebra of field-linear operators.

An operator is sum c_k q_k + sum d_k p_k + s with rational coefficients, keyed by
(i, j, component). Stencils are written for a = 1, so the symmetric derivative
carries a factor 1/2; the physical 1/a comes back in `sector_label`.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Literal, Mapping

import numpy as np
import sympy as sp

from latgauge.lattice import GridSpec, ScalarField, Site, VectorField
from latgauge.spectral import zero_mode_projection

logger = logging.getLogger(__name__)

Component = Literal["x", "y"]
Key = tuple[int, int, str]
HALF = sp.Rational(1, 2)


def _clean(coeffs: Mapping[Key, object]) -> dict[Key, sp.Rational]:
    out = {}
    for key, value in coeffs.items():
        value = sp.Rational(value)
        if value != 0:
            out[key] = value
    return out


class LinearOperator:
    """Immutable field-linear operator with exact coefficients."""

    __slots__ = ("q_coeffs", "p_coeffs", "scalar")

    def __init__(self, q_coeffs=None, p_coeffs=None, scalar=0):
        object.__setattr__(self, "q_coeffs", _clean(q_coeffs or {}))
        object.__setattr__(self, "p_coeffs", _clean(p_coeffs or {}))
        object.__setattr__(self, "scalar", sp.Rational(scalar))

    def __setattr__(self, name, value):
        raise AttributeError("LinearOperator is immutable")

    @property
    def support(self) -> set[Site]:
        return {(i, j) for i, j, _ in self.q_coeffs} | {(i, j) for i, j, _ in self.p_coeffs}

    def bounding_box(self) -> tuple[Site, Site] | None:
        sites = self.support
        if not sites:
            return None
        rows = [i for i, _ in sites]
        cols = [j for _, j in sites]
        return (min(rows), min(cols)), (max(rows), max(cols))

    def is_zero(self) -> bool:
        return not self.q_coeffs and not self.p_coeffs and self.scalar == 0

    def _combine(self, other: "LinearOperator", sign: int) -> "LinearOperator":
        q = dict(self.q_coeffs)
        for k, v in other.q_coeffs.items():
            q[k] = q.get(k, 0) + sign * v
        p = dict(self.p_coeffs)
        for k, v in other.p_coeffs.items():
            p[k] = p.get(k, 0) + sign * v
        return LinearOperator(q, p, self.scalar + sign * other.scalar)

    def __add__(self, other: "LinearOperator") -> "LinearOperator":
        return self._combine(other, 1)

    def __sub__(self, other: "LinearOperator") -> "LinearOperator":
        return self._combine(other, -1)

    def __mul__(self, factor) -> "LinearOperator":
        factor = sp.Rational(factor)
        return LinearOperator(
            {k: v * factor for k, v in self.q_coeffs.items()},
            {k: v * factor for k, v in self.p_coeffs.items()},
            self.scalar * factor,
        )

    __rmul__ = __mul__

    def __neg__(self) -> "LinearOperator":
        return self * -1

    def __eq__(self, other) -> bool:
        if not isinstance(other, LinearOperator):
            return NotImplemented
        return (
            self.q_coeffs == other.q_coeffs
            and self.p_coeffs == other.p_coeffs
            and self.scalar == other.scalar
        )

    def __hash__(self):
        return hash(
            (frozenset(self.q_coeffs.items()), frozenset(self.p_coeffs.items()), self.scalar)
        )

    def __repr__(self) -> str:
        return f"LinearOperator({render(self)})"


def _key(grid: GridSpec, site: Site, component: str) -> Key:
    if component not in ("x", "y"):
        raise ValueError(f"Component must be 'x' or 'y', got {component!r}")
    i, j = grid.wrap(site)
    return (i, j, component)


def q_op(grid: GridSpec, site: Site, component: Component, coeff=1) -> LinearOperator:
    return LinearOperator(q_coeffs={_key(grid, site, component): coeff})


def p_op(grid: GridSpec, site: Site, component: Component, coeff=1) -> LinearOperator:
    return LinearOperator(p_coeffs={_key(grid, site, component): coeff})


def _accumulate(grid: GridSpec, terms) -> dict[Key, sp.Rational]:
    out: dict[Key, sp.Rational] = {}
    for site, component, coeff in terms:
        key = _key(grid, site, component)
        out[key] = out.get(key, 0) + coeff
    return out


def b_op(grid: GridSpec, site: Site) -> LinearOperator:
    """Magnetic field dbar_x q_y - dbar_y q_x at `site`."""
    i, j = site
    return LinearOperator(
        q_coeffs=_accumulate(
            grid,
            [
                ((i, j + 1), "y", HALF),
                ((i, j - 1), "y", -HALF),
                ((i + 1, j), "x", -HALF),
                ((i - 1, j), "x", HALF),
            ],
        )
    )


def constraint_op(grid: GridSpec, site: Site) -> LinearOperator:
    """Field part of the Gauss constraint, dbar_x p_x + dbar_y p_y at `site`."""
    i, j = site
    return LinearOperator(
        p_coeffs=_accumulate(
            grid,
            [
                ((i, j + 1), "x", HALF),
                ((i, j - 1), "x", -HALF),
                ((i + 1, j), "y", HALF),
                ((i - 1, j), "y", -HALF),
            ],
        )
    )


def commutator_scalar(lhs: LinearOperator, rhs: LinearOperator) -> sp.Rational:
    """c with [lhs, rhs] = i hbar c."""
    total = sp.Rational(0)
    for key, value in lhs.q_coeffs.items():
        total += value * rhs.p_coeffs.get(key, 0)
    for key, value in lhs.p_coeffs.items():
        total -= value * rhs.q_coeffs.get(key, 0)
    return total


def _touching_centers(op: LinearOperator, grid: GridSpec) -> set[Site]:
    """Constraint centers whose stencil meets a q or p coefficient of `op`."""
    centers = set()
    for i, j, _ in list(op.q_coeffs) + list(op.p_coeffs):
        for di, dj in ((0, 1), (0, -1), (1, 0), (-1, 0)):
            centers.add(grid.wrap((i + di, j + dj)))
    return centers


def is_gauge_invariant(op: LinearOperator, grid: GridSpec) -> bool:
    """True iff op commutes with the constraint at every site."""
    return all(
        commutator_scalar(op, constraint_op(grid, c)) == 0 for c in _touching_centers(op, grid)
    )


def gauss_charge(op: LinearOperator, grid: GridSpec) -> dict[Site, sp.Rational]:
    """Nonzero [op, C(n)] per center n.

    For a dressing exponent this is the charge it moves: the matter hop it
    accompanies must cancel it for the product to commute with every C_rho.
    """
    out = {}
    for center in sorted(_touching_centers(op, grid)):
        value = commutator_scalar(op, constraint_op(grid, center))
        if value != 0:
            out[center] = value
    return out


# ---------- regions ----------


@dataclass(frozen=True)
class Region:
    origin: Site
    width: int
    height: int | None = None

    def __post_init__(self):
        if self.height is None:
            object.__setattr__(self, "height", self.width)
        if self.width < 1 or self.height < 1:
            raise ValueError(f"Region sides must be positive, got {self.width}x{self.height}")
        if self.width != self.height:
            raise ValueError("Only square regions are supported")

    def sites(self) -> list[Site]:
        i0, j0 = self.origin
        return [(i0 + di, j0 + dj) for di in range(self.height) for dj in range(self.width)]

    def contains(self, site: Site) -> bool:
        i0, j0 = self.origin
        return i0 <= site[0] < i0 + self.height and j0 <= site[1] < j0 + self.width

    def is_interior(self, site: Site) -> bool:
        i0, j0 = self.origin
        return i0 < site[0] < i0 + self.height - 1 and j0 < site[1] < j0 + self.width - 1

    def interior_sites(self) -> list[Site]:
        return [s for s in self.sites() if self.is_interior(s)]

    def is_corner(self, site: Site) -> bool:
        i0, j0 = self.origin
        return site[0] in (i0, i0 + self.height - 1) and site[1] in (j0, j0 + self.width - 1)

    def check(self, grid: GridSpec) -> None:
        i0, j0 = self.origin
        if i0 < 0 or j0 < 0 or i0 + self.height > grid.n or j0 + self.width > grid.n:
            raise ValueError(f"{self} does not fit on an N={grid.n} grid")
        if self.width + 2 > grid.n:
            raise ValueError(f"{self} leaves no room for a boundary halo on N={grid.n}")

    def disjoint(self, other: "Region") -> bool:
        return not set(self.sites()) & set(other.sites())

    @classmethod
    def centered(cls, center: Site, size: int) -> "Region":
        half = size // 2
        return cls((center[0] - half, center[1] - half), size)


def cross_support(center: Site) -> list[Site]:
    i, j = center
    return [(i - 1, j), (i, j - 1), center, (i, j + 1), (i + 1, j)]


# ---------- generator sets ----------


@dataclass(frozen=True)
class GeneratorLabel:
    kind: str  # P, B, CROSS, EDGE, CORNER
    site: Site
    detail: str = ""
    stencil: bool = False

    def __str__(self) -> str:
        tail = f":{self.detail}" if self.detail else ""
        return f"{self.kind}{tail}({self.site[0]},{self.site[1]})"


@dataclass(frozen=True)
class GeneratorSet:
    generators: tuple[LinearOperator, ...]
    labels: tuple[GeneratorLabel, ...]

    def __post_init__(self):
        if len(self.generators) != len(self.labels):
            raise ValueError("Every generator needs exactly one label")

    def __len__(self) -> int:
        return len(self.generators)

    def of_kind(self, kind: str) -> list[tuple[GeneratorLabel, LinearOperator]]:
        return [(lab, g) for lab, g in zip(self.labels, self.generators) if lab.kind == kind]


def _keys_for(sites: Iterable[Site], grid: GridSpec) -> list[Key]:
    return [_key(grid, s, c) for s in sites for c in ("x", "y")]


def _coeff_matrix(ops: list[LinearOperator], keys: list[Key], part: str) -> sp.Matrix:
    """Columns are operators, rows are keys."""
    if not keys:
        return sp.zeros(0, len(ops))
    cols = []
    for op in ops:
        coeffs = op.q_coeffs if part == "q" else op.p_coeffs
        cols.append([coeffs.get(k, 0) for k in keys])
    if not cols:
        return sp.zeros(len(keys), 0)
    return sp.Matrix(cols).T


def rank(ops: list[LinearOperator]) -> int:
    """Rank over the rationals of the q and p coefficient vectors."""
    if not ops:
        return 0
    keys = sorted({k for op in ops for k in list(op.q_coeffs)})
    pkeys = sorted({k for op in ops for k in list(op.p_coeffs)})
    q = _coeff_matrix(ops, keys, "q")
    p = _coeff_matrix(ops, pkeys, "p")
    return sp.Matrix.vstack(q, p).rank()


def in_span(op: LinearOperator, basis: list[LinearOperator]) -> bool:
    return rank(basis + [op]) == rank(basis)


def gauge_invariant_nullspace(support, grid: GridSpec) -> list[LinearOperator]:
    """Pure-q operators on `support` (a Region or sites) commuting with every constraint.

    Basis in reduced row echelon form over the row-major (site, x before y) key order.
    """
    sites = support.sites() if isinstance(support, Region) else list(support)
    if isinstance(support, Region):
        support.check(grid)
    keys = _keys_for(sites, grid)
    probe = LinearOperator(q_coeffs={k: 1 for k in keys})
    centers = sorted(_touching_centers(probe, grid))
    system = sp.Matrix(
        [[constraint_op(grid, c).p_coeffs.get(k, 0) for k in keys] for c in centers]
    )
    vectors = system.nullspace()
    logger.debug("Nullspace on %d keys has dimension %d", len(keys), len(vectors))
    if not vectors:
        return []
    reduced, _ = sp.Matrix.hstack(*vectors).T.rref()
    basis = []
    for r in range(reduced.rows):
        row = reduced.row(r)
        if any(row):
            basis.append(LinearOperator(q_coeffs=dict(zip(keys, row))))
    return basis


def local_generators(region: Region, grid: GridSpec) -> GeneratorSet:
    """All p's at region sites (x before y), then every b with its stencil inside."""
    region.check(grid)
    gens: list[LinearOperator] = []
    labels: list[GeneratorLabel] = []
    for site in region.sites():
        for component in ("x", "y"):
            gens.append(p_op(grid, site, component))
            labels.append(GeneratorLabel("P", site, component))
    for site in region.interior_sites():
        gens.append(b_op(grid, site))
        labels.append(GeneratorLabel("B", site, stencil=True))
    return GeneratorSet(tuple(gens), tuple(labels))


def _restricted(op: LinearOperator, region: Region) -> LinearOperator:
    return LinearOperator(
        p_coeffs={k: v for k, v in op.p_coeffs.items() if region.contains((k[0], k[1]))}
    )


def _catalog(region: Region, grid: GridSpec) -> list[tuple[GeneratorLabel, LinearOperator]]:
    """Candidate center elements in preference order."""
    out = []
    for site in region.interior_sites():
        out.append((GeneratorLabel("CROSS", site, stencil=True), constraint_op(grid, site)))

    i0, j0 = region.origin
    halo = Region((i0 - 1, j0 - 1), region.width + 2)
    for site in halo.sites():
        if region.is_interior(site):
            continue
        truncated = _restricted(constraint_op(grid, site), region)
        if len(truncated.p_coeffs) > 1:
            out.append((GeneratorLabel("EDGE", site, "truncated", stencil=True), truncated))

    for site in region.sites():
        for component in ("x", "y"):
            single = p_op(grid, site, component)
            if region.is_corner(site):
                label = GeneratorLabel("CORNER", site, component)
            elif _normal_to_boundary(region, site, component):
                label = GeneratorLabel("EDGE", site, f"normal-{component}")
            else:
                label = GeneratorLabel("EDGE", site, f"isolated-{component}")
            out.append((label, single))
    return out


def _normal_to_boundary(region: Region, site: Site, component: str) -> bool:
    i0, j0 = region.origin
    on_side = site[1] in (j0, j0 + region.width - 1)
    on_top_bottom = site[0] in (i0, i0 + region.height - 1)
    return (component == "x" and on_side) or (component == "y" and on_top_bottom)


def _commutes_with_all(op: LinearOperator, gens: GeneratorSet) -> bool:
    return all(commutator_scalar(op, g) == 0 for g in gens.generators)


@lru_cache(maxsize=32)
def center_basis(region: Region, grid: GridSpec) -> GeneratorSet:
    """Basis of the elements of span(local_generators) commuting with every generator.

    Catalog elements (crosses, truncated crosses, free single p's) are taken
    greedily while they add rank; nullspace vectors fill any remainder.
    """
    gens = local_generators(region, grid)
    omega = sp.Matrix(
        [[commutator_scalar(g, h) for h in gens.generators] for g in gens.generators]
    )
    null = omega.nullspace()
    dimension = len(null)
    center_vectors = [
        sum((g * c for g, c in zip(gens.generators, vec) if c != 0), LinearOperator())
        for vec in null
    ]

    catalog = [(lab, op) for lab, op in _catalog(region, grid) if _commutes_with_all(op, gens)]
    residual = [(GeneratorLabel("EDGE", region.origin, "residual"), op) for op in center_vectors]
    candidates = catalog + residual

    keys = _keys_for(region.sites(), grid)
    qkeys = sorted({k for op in center_vectors for k in op.q_coeffs})
    matrix = sp.Matrix.vstack(
        _coeff_matrix([op for _, op in candidates], keys, "p"),
        _coeff_matrix([op for _, op in candidates], qkeys, "q"),
    )
    _, pivots = matrix.rref()
    chosen = [candidates[k] for k in pivots]
    if len(chosen) != dimension:
        raise ArithmeticError(f"Center basis has {len(chosen)} elements, expected {dimension}")
    logger.debug("Center of %s on N=%d has dimension %d", region, grid.n, dimension)
    return GeneratorSet(tuple(op for _, op in chosen), tuple(lab for lab, _ in chosen))


def evaluate(op: LinearOperator, p_field: VectorField) -> float:
    """Apply the p part of op to a classical momentum configuration."""
    total = 0.0
    for (i, j, c), coeff in op.p_coeffs.items():
        total += float(coeff) * p_field.component(c).at((i, j))
    return total


def sector_label(
    p_field: VectorField, region: Region, rho: ScalarField | None = None
) -> list[float]:
    """Values of every center basis element on p_field, in basis order.

    Stencil elements carry 1/a. With rho given, CROSS labels are checked against
    Gauss's law (rho minus its zero-mode part) and a mismatch is logged.
    """
    grid = p_field.grid
    basis = center_basis(region, grid)
    labels = []
    for lab, op in zip(basis.labels, basis.generators):
        value = evaluate(op, p_field)
        labels.append(value / grid.spacing if lab.stencil else value)

    if rho is not None:
        neutral = rho - zero_mode_projection(rho)
        for lab, value in zip(basis.labels, labels):
            if lab.kind == "CROSS" and abs(value + neutral.at(lab.site)) > 1e-8:
                logger.warning(
                    "Cross label at %s is %.6g but Gauss's law expects %.6g",
                    lab.site,
                    value,
                    -neutral.at(lab.site),
                )
    return labels


def _fmt(value: sp.Rational) -> str:
    return str(value)


def render(op: LinearOperator) -> str:
    """One-line text form, e.g. '1/2*q_y(3,4) - 1/2*q_y(3,2)'."""
    parts = []
    for name, coeffs in (("q", op.q_coeffs), ("p", op.p_coeffs)):
        for (i, j, c), v in sorted(coeffs.items()):
            parts.append((v, f"{name}_{c}({i},{j})"))
    if op.scalar != 0:
        parts.append((op.scalar, ""))
    if not parts:
        return "0"
    text = ""
    for v, sym in parts:
        mag = abs(v)
        if not sym:
            body = _fmt(mag)
        elif mag == 1:
            body = sym
        else:
            body = f"{_fmt(mag)}*{sym}"
        if not text:
            text = f"-{body}" if v < 0 else body
        else:
            text += f" - {body}" if v < 0 else f" + {body}"
    return text


def render_grid(op: LinearOperator, region: Region) -> str:
    """Site map of a region: '*' where op has a coefficient, '.' elsewhere."""
    support = op.support
    i0, j0 = region.origin
    rows = []
    # i grows upward, so print top row first
    for i in reversed(range(i0, i0 + region.height)):
        cols = range(j0, j0 + region.width)
        rows.append("".join("*" if (i, j) in support else "." for j in cols))
    return "\n".join(rows)


def to_document(basis: GeneratorSet) -> list[dict]:
    """JSON-ready dump with coefficients as rational strings."""
    out = []
    for lab, op in zip(basis.labels, basis.generators):
        out.append(
            {
                "label": str(lab),
                "kind": lab.kind,
                "site": list(lab.site),
                "detail": lab.detail,
                "q": {f"{i},{j},{c}": _fmt(v) for (i, j, c), v in sorted(op.q_coeffs.items())},
                "p": {f"{i},{j},{c}": _fmt(v) for (i, j, c), v in sorted(op.p_coeffs.items())},
                "text": render(op),
            }
        )
    return out


def as_numpy(op: LinearOperator, grid: GridSpec) -> tuple[np.ndarray, np.ndarray]:
    """Float arrays of the q and p coefficients, shape (2, N, N) for (x, y)."""
    q = np.zeros((2, *grid.shape))
    p = np.zeros((2, *grid.shape))
    for target, coeffs in ((q, op.q_coeffs), (p, op.p_coeffs)):
        for (i, j, c), v in coeffs.items():
            target[0 if c == "x" else 1, i, j] = float(v)
    return q, p
