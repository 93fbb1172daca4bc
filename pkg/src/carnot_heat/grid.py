"""Cell-centred grids on boxes, grid functions and quadrature."""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import InvalidArgument

__all__ = [
    "BoxDomain",
    "Grid",
    "GridFunction",
    "quadrature",
    "sobolev_norm",
    "write_csv",
    "read_csv",
]


@dataclass(frozen=True)
class BoxDomain:
    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lower)
        hi = tuple(float(v) for v in self.upper)
        if len(lo) != len(hi) or not lo:
            raise InvalidArgument("lower and upper must be nonempty and of equal length")
        if any(not a < b for a, b in zip(lo, hi)):
            raise InvalidArgument(f"degenerate box: lower={lo}, upper={hi}")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self) -> int:
        return len(self.lower)

    def corners(self) -> np.ndarray:
        """All ``2**dim`` corners, shape ``(dim, 2**dim)``."""
        return np.array(list(itertools.product(*zip(self.lower, self.upper)))).T


@dataclass(frozen=True)
class Grid:
    """Uniform grid with nodes at cell centres ``lower + (i + 1/2) h``."""

    domain: BoxDomain
    n_cells: tuple[int, ...]

    def __post_init__(self):
        n = tuple(int(k) for k in self.n_cells)
        if len(n) != self.domain.dim:
            raise InvalidArgument(f"n_cells has {len(n)} entries for a {self.domain.dim}-d box")
        if any(k < 3 for k in n):
            raise InvalidArgument(f"need at least 3 nodes per axis, got {n}")
        object.__setattr__(self, "n_cells", n)

    @classmethod
    def uniform(cls, lower, upper, n_cells) -> "Grid":
        lower = tuple(np.atleast_1d(lower).astype(float))
        upper = tuple(np.atleast_1d(upper).astype(float))
        n = np.broadcast_to(np.asarray(n_cells, dtype=int), (len(lower),))
        return cls(BoxDomain(lower, upper), tuple(int(k) for k in n))

    @property
    def dim(self) -> int:
        return self.domain.dim

    @property
    def shape(self) -> tuple[int, ...]:
        return self.n_cells

    @cached_property
    def h(self) -> np.ndarray:
        lo = np.array(self.domain.lower)
        hi = np.array(self.domain.upper)
        return (hi - lo) / np.array(self.n_cells)

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.h))

    def axis(self, k: int, pad: int = 0) -> np.ndarray:
        """Node coordinates along axis ``k``, extended by ``pad`` ghost nodes per side."""
        i = np.arange(-pad, self.n_cells[k] + pad)
        return self.domain.lower[k] + (i + 0.5) * self.h[k]

    def coordinates(self, pad: int = 0) -> np.ndarray:
        """Node coordinates, shape ``(dim, *shape)`` (ghost layers included if ``pad``)."""
        axes = [self.axis(k, pad) for k in range(self.dim)]
        return np.stack(np.meshgrid(*axes, indexing="ij"))

    @cached_property
    def nodes(self) -> np.ndarray:
        return self.coordinates()

    def refine(self, times: int = 1) -> "Grid":
        return Grid(self.domain, tuple(k * 2**times for k in self.n_cells))

    def sample(self, f, dirichlet: bool = True) -> "GridFunction":
        """Sample ``f(coords)`` (coords of shape ``(dim, *shape)``) at the nodes."""
        values = np.broadcast_to(np.asarray(f(self.nodes), dtype=float), self.shape)
        return GridFunction(self, np.array(values), dirichlet=dirichlet)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Nodal values on a grid.

    ``dirichlet=True`` marks a member of the zero-trace class: the function
    extends by zero outside the box and difference stencils impose ``u = 0``
    on the boundary.  ``dirichlet=False`` marks a sampled smooth function
    whose boundary values are unknown; stencils then extrapolate.
    """

    grid: Grid
    values: np.ndarray = field(repr=False)
    dirichlet: bool = True

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.grid.shape:
            raise InvalidArgument(f"values have shape {v.shape}, grid has {self.grid.shape}")
        object.__setattr__(self, "values", v)

    def at(self, index) -> float:
        """Value at an integer multi-index; zero outside the node set."""
        index = tuple(int(i) for i in index)
        if len(index) != self.grid.dim:
            raise InvalidArgument("index has wrong length")
        if any(not 0 <= i < n for i, n in zip(index, self.grid.shape)):
            return 0.0
        return float(self.values[index])

    def with_values(self, values) -> "GridFunction":
        return GridFunction(self.grid, values, self.dirichlet)

    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))


def quadrature(f: GridFunction) -> float:
    """Midpoint rule over the box."""
    return float(np.sum(f.values) * f.grid.cell_volume)


def sobolev_norm(g, u: GridFunction, p: float, eps_reg: float = 0.0) -> float:
    """Discrete ``(int |grad_H u|^p + |u|^p dx)^(1/p)``."""
    from .calculus import horizontal_gradient

    if not p > 1:
        raise InvalidArgument(f"p must exceed 1, got {p}")
    grad = horizontal_gradient(g, u)
    gnorm2 = sum(c.values**2 for c in grad.components)
    if eps_reg:
        gnorm2 = gnorm2 + eps_reg**2
    integrand = gnorm2 ** (p / 2) + np.abs(u.values) ** p
    return float((np.sum(integrand) * u.grid.cell_volume) ** (1.0 / p))


def write_csv(f: GridFunction, path) -> None:
    """Write ``i1,...,iN,value`` rows with 17 significant digits."""
    Path(path).write_text(to_csv_text(f))


def to_csv_text(f: GridFunction) -> str:
    buf = io.StringIO()
    n = f.grid.dim
    buf.write(",".join([f"i{k + 1}" for k in range(n)] + ["value"]) + "\n")
    idx = np.indices(f.grid.shape).reshape(n, -1).T.tolist()
    for i, v in zip(idx, f.values.ravel().tolist()):
        buf.write(",".join(map(str, i)) + "," + format(v, ".17g") + "\n")
    return buf.getvalue()


def read_csv(path, grid: Grid, dirichlet: bool = True) -> GridFunction:
    """Inverse of :func:`write_csv`; nodes missing from the file are zero."""
    values = np.zeros(grid.shape)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if len(header) != grid.dim + 1 or header[-1] != "value":
            raise InvalidArgument(f"CSV header {header} does not match a {grid.dim}-d grid")
        for row in reader:
            if not row:
                continue
            idx = tuple(int(s) for s in row[:-1])
            if any(not 0 <= i < n for i, n in zip(idx, grid.shape)):
                raise InvalidArgument(f"CSV index {idx} outside grid {grid.shape}")
            values[idx] = float(row[-1])
    return GridFunction(grid, values, dirichlet)
