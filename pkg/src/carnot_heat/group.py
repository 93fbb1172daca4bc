"""Stratified Lie groups in exponential coordinates.

A group is described by data only: the strata dimensions, the coefficient
functions of the first-stratum left-invariant vector fields, and the group
law.  All callables are vectorised over trailing axes, so a point may be a
plain vector of length ``N`` or an array of shape ``(N, *batch)``.

Field indices are zero-based: ``vector_field(g, 0, x)`` is the field called
``X_1`` in the usual notation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InvalidArgument

__all__ = [
    "GroupDescriptor",
    "euclidean",
    "heisenberg",
    "by_name",
    "multiply",
    "dilate",
    "vector_field",
    "coefficient_matrix",
    "horizontal_norm",
]


@dataclass(frozen=True)
class GroupDescriptor:
    """A stratified group ``(R^N, law)`` with dilation weights ``1..r``.

    ``coeff(j, x)`` returns the ``N`` coefficients of the ``j``-th horizontal
    field at ``x`` (shape ``(N, *batch)``).  ``law(x, y)`` returns ``x o y``.
    """

    name: str
    strata_dims: tuple[int, ...]
    coeff: Callable[[int, np.ndarray], np.ndarray] = field(repr=False, compare=False)
    law: Callable[[np.ndarray, np.ndarray], np.ndarray] = field(repr=False, compare=False)

    def __post_init__(self):
        dims = tuple(int(d) for d in self.strata_dims)
        if not dims or any(d <= 0 for d in dims):
            raise InvalidArgument(f"strata_dims must be nonempty and positive, got {self.strata_dims}")
        object.__setattr__(self, "strata_dims", dims)

    @property
    def total_dim(self) -> int:
        return sum(self.strata_dims)

    @property
    def horizontal_dim(self) -> int:
        return self.strata_dims[0]

    @property
    def step(self) -> int:
        return len(self.strata_dims)

    @property
    def dilation_weights(self) -> np.ndarray:
        return np.repeat(np.arange(1, self.step + 1), self.strata_dims)


def _as_point(g: GroupDescriptor, x, name="x") -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 0 or x.shape[0] != g.total_dim:
        raise InvalidArgument(
            f"{name} has leading dimension {x.shape[:1]}, expected {g.total_dim} for group {g.name}"
        )
    return x


def euclidean(n: int) -> GroupDescriptor:
    """The abelian group ``(R^n, +)``: one stratum, ``X_j = d/dx_j``."""
    n = int(n)
    if n < 1:
        raise InvalidArgument("euclidean dimension must be >= 1")

    def coeff(j, x):
        out = np.zeros_like(np.asarray(x, dtype=float))
        out[j] = 1.0
        return out

    def law(x, y):
        return np.asarray(x, dtype=float) + np.asarray(y, dtype=float)

    return GroupDescriptor(f"euclidean:{n}", (n,), coeff, law)


def heisenberg(n: int = 1) -> GroupDescriptor:
    """The Heisenberg group ``H^n`` with coordinates ``(x_1..x_n, y_1..y_n, t)``.

    Law: ``t'' = t + t' + (x.y' - y.x')/2``; horizontal fields
    ``X_k = d/dx_k - (y_k/2) d/dt`` and ``Y_k = d/dy_k + (x_k/2) d/dt``.
    """
    n = int(n)
    if n < 1:
        raise InvalidArgument("heisenberg index must be >= 1")
    N = 2 * n + 1

    def coeff(j, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        out[j] = 1.0
        if j < n:
            out[N - 1] = -0.5 * x[n + j]
        else:
            out[N - 1] = 0.5 * x[j - n]
        return out

    def law(a, b):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        out = a + b
        out[N - 1] = a[N - 1] + b[N - 1] + 0.5 * (
            np.sum(a[:n] * b[n : 2 * n], axis=0) - np.sum(a[n : 2 * n] * b[:n], axis=0)
        )
        return out

    return GroupDescriptor(f"heisenberg:{n}", (2 * n, 1), coeff, law)


def by_name(name: str) -> GroupDescriptor:
    """Parse ``"euclidean:<N>"`` or ``"heisenberg:<n>"``."""
    kind, _, arg = name.strip().partition(":")
    try:
        k = int(arg) if arg else 1
    except ValueError:
        raise InvalidArgument(f"bad group name {name!r}") from None
    if kind == "euclidean":
        return euclidean(k)
    if kind == "heisenberg":
        return heisenberg(k)
    raise InvalidArgument(f"unknown group {name!r}; use 'euclidean:<N>' or 'heisenberg:<n>'")


def multiply(g: GroupDescriptor, x, y) -> np.ndarray:
    x = _as_point(g, x, "x")
    y = _as_point(g, y, "y")
    return g.law(x, y)


def dilate(g: GroupDescriptor, lam: float, x) -> np.ndarray:
    """Anisotropic dilation: stratum ``k`` is scaled by ``lam**k``."""
    if not lam > 0:
        raise InvalidArgument(f"dilation factor must be positive, got {lam}")
    x = _as_point(g, x)
    w = g.dilation_weights.reshape((-1,) + (1,) * (x.ndim - 1))
    return x * float(lam) ** w


def vector_field(g: GroupDescriptor, j: int, x) -> np.ndarray:
    if not 0 <= j < g.horizontal_dim:
        raise InvalidArgument(f"field index {j} outside 0..{g.horizontal_dim - 1}")
    return g.coeff(j, _as_point(g, x))


def coefficient_matrix(g: GroupDescriptor, x) -> np.ndarray:
    """Stack of all horizontal field coefficients, shape ``(N1, N, *batch)``."""
    x = _as_point(g, x)
    return np.stack([g.coeff(j, x) for j in range(g.horizontal_dim)])


def horizontal_norm(g: GroupDescriptor, x) -> np.ndarray:
    """Euclidean norm ``|x'|`` of the first-stratum part."""
    x = _as_point(g, x)
    return np.sqrt(np.sum(x[: g.horizontal_dim] ** 2, axis=0))
