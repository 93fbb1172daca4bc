"""Horizontal gradient, horizontal divergence and the p-sub-Laplacian on grids.

Two discretisations live here.

* :func:`horizontal_gradient` and :func:`horizontal_divergence` apply the
  fields ``X_j = sum_m b_jm(x) d_m`` with fourth-order centred differences
  (ghost values from :mod:`._stencils`).
* :func:`p_sub_laplacian` uses the compact conservative form
  ``div(K grad u)`` with ``K = m(x) B^T B``: normal fluxes on cell faces with
  face-averaged ``K_kk``, mixed terms from face-averaged centred differences.
  On a Euclidean group with ``p = 2`` this is exactly the standard
  ``2N + 1``-point Laplacian.  The conservative form is valid because
  left-invariant fields of a stratified group are divergence free.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from . import _stencils as st
from .errors import InvalidArgument, SingularCoefficientError
from .group import GroupDescriptor, coefficient_matrix
from .inequalities import nonneg_power
from .grid import Grid, GridFunction

__all__ = [
    "HorizontalField",
    "horizontal_gradient",
    "horizontal_divergence",
    "p_sub_laplacian",
    "p_sub_laplacian_array",
    "p_flux",
    "coefficients_on_grid",
    "sub_laplacian_matrix",
]

DEFAULT_EPS_REG = 1e-8


@dataclass(frozen=True)
class HorizontalField:
    """``N1`` grid functions, one per horizontal field."""

    grid: Grid
    components: tuple[GridFunction, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        if any(c.grid != self.grid for c in comps):
            raise InvalidArgument("all components of a horizontal field must share its grid")
        object.__setattr__(self, "components", comps)

    def __len__(self):
        return len(self.components)

    @property
    def dirichlet(self) -> bool:
        return all(c.dirichlet for c in self.components)

    def norm(self) -> GridFunction:
        return GridFunction(self.grid, np.sqrt(sum(c.values**2 for c in self.components)), dirichlet=False)


def _check(g: GroupDescriptor, grid: Grid):
    if grid.dim != g.total_dim:
        raise InvalidArgument(f"grid is {grid.dim}-d but group {g.name} has dimension {g.total_dim}")


@lru_cache(maxsize=64)
def coefficients_on_grid(g: GroupDescriptor, grid: Grid, pad: int = 0) -> tuple:
    """Per-field coefficients ``b[j][m]`` on the (padded) nodes.

    Identically zero entries are ``None`` and constant entries are plain
    floats, so callers can skip or cheapen the corresponding products.
    """
    B = coefficient_matrix(g, grid.coordinates(pad))
    out = []
    for j in range(g.horizontal_dim):
        row = []
        for m in range(g.total_dim):
            b = B[j, m]
            if not np.any(b):
                row.append(None)
            elif np.all(b == b.flat[0]):
                row.append(float(b.flat[0]))
            else:
                b = np.ascontiguousarray(b)
                b.setflags(write=False)
                row.append(b)
        out.append(tuple(row))
    return tuple(out)


def _mul(b, a):
    return a if (isinstance(b, float) and b == 1.0) else b * a


def _combine(row, D):
    acc = None
    for m, bjm in enumerate(row):
        if bjm is not None:
            term = _mul(bjm, D[m])
            acc = term if acc is None else acc + term
    return acc


def _mode(dirichlet: bool) -> str:
    return "dirichlet" if dirichlet else "extrapolate"


def _partials4(values: np.ndarray, grid: Grid, dirichlet: bool) -> list[np.ndarray]:
    n = grid.dim
    U = st.pad(values, n, 2, _mode(dirichlet))
    out = []
    for m in range(n):
        D = st.d4(U, U.ndim - n + m, grid.h[m])
        out.append(st.crop(D, n, 2, skip=m))
    return out


def horizontal_gradient(g: GroupDescriptor, u: GridFunction) -> HorizontalField:
    """``(X_1 u, ..., X_N1 u)`` with fourth-order centred differences."""
    _check(g, u.grid)
    D = _partials4(u.values, u.grid, u.dirichlet)
    b = coefficients_on_grid(g, u.grid)
    comps = []
    for j in range(g.horizontal_dim):
        acc = np.broadcast_to(_combine(b[j], D), u.grid.shape)
        comps.append(GridFunction(u.grid, np.array(acc), dirichlet=False))
    return HorizontalField(u.grid, tuple(comps))


def horizontal_divergence(g: GroupDescriptor, F: HorizontalField) -> GridFunction:
    """``sum_j X_j F_j`` with the same stencils as :func:`horizontal_gradient`."""
    _check(g, F.grid)
    if len(F) != g.horizontal_dim:
        raise InvalidArgument(f"field has {len(F)} components, group needs {g.horizontal_dim}")
    b = coefficients_on_grid(g, F.grid)
    acc = np.zeros(F.grid.shape)
    for j, comp in enumerate(F.components):
        acc = acc + _combine(b[j], _partials4(comp.values, F.grid, comp.dirichlet))
    return GridFunction(F.grid, acc, dirichlet=False)


def p_flux(g: GroupDescriptor, u: GridFunction, p: float, eps_reg: float = DEFAULT_EPS_REG) -> HorizontalField:
    """Nodal flux ``(|grad_H u|^2 + eps^2)^((p-2)/2) grad_H u``."""
    grad = horizontal_gradient(g, u)
    s = sum(c.values**2 for c in grad.components) + eps_reg**2
    m = _coefficient(s, p, eps_reg)
    return HorizontalField(u.grid, tuple(c.with_values(m * c.values) for c in grad.components))


def _coefficient(s: np.ndarray, p: float, eps_reg: float) -> np.ndarray:
    if p < 2 and eps_reg == 0 and np.any(s == 0):
        raise SingularCoefficientError("zero horizontal gradient with p < 2 and eps_reg = 0")
    with np.errstate(divide="ignore", invalid="ignore"):
        return nonneg_power(s, (p - 2) / 2)


def p_sub_laplacian_array(
    g: GroupDescriptor,
    grid: Grid,
    values: np.ndarray,
    p: float,
    eps_reg: float = DEFAULT_EPS_REG,
    dirichlet: bool = True,
    return_stats: bool = False,
):
    """Compact ``L_p`` on raw arrays of shape ``(*batch, *grid.shape)``.

    With ``return_stats`` also returns ``(max, min)`` of ``|grad_H u|^2`` over
    the nodes and first ghost layer, which the step-size rule needs.
    """
    n = grid.dim
    h = grid.h
    U = st.pad(values, n, 2, "odd" if dirichlet else "extrapolate")
    E = st.crop(U, n, 1)  # nodes plus one ghost layer
    ax = [k - n for k in range(n)]  # from the end, so batch axes broadcast

    D = [st.crop(st.d2(U, ax[m], h[m]), n, 1, skip=m) for m in range(n)]
    b = coefficients_on_grid(g, grid, 1)
    G = [_combine(b[j], D) for j in range(g.horizontal_dim)]
    s = G[0] * G[0]
    for Gj in G[1:]:
        s = s + Gj * Gj
    stats = (float(np.max(s)), float(np.min(s))) if return_stats else None
    if p == 2:
        mcoef = None
    else:
        mcoef = _coefficient(s + eps_reg**2 if eps_reg else s, p, eps_reg)

    out = None
    for k in range(n):
        Kkk = None
        Q = None
        for j in range(g.horizontal_dim):
            bjk = b[j][k]
            if bjk is None:
                continue
            Kkk = _mul(bjk, bjk) if Kkk is None else Kkk + _mul(bjk, bjk)
            if sum(c is not None for c in b[j]) > 1:
                # only fields with components off axis k contribute mixed terms
                rest = G[j] - _mul(bjk, D[k])
                Q = _mul(bjk, rest) if Q is None else Q + _mul(bjk, rest)
        if Kkk is None:
            continue
        a = ax[k]
        diff = (st.shift(E, a, 1, None) - st.shift(E, a, 0, -1)) / h[k]
        if mcoef is None and isinstance(Kkk, float):
            flux = diff if Kkk == 1.0 else Kkk * diff
        else:
            Kn = Kkk if mcoef is None else mcoef * Kkk
            Kf = 0.5 * (st.shift(Kn, a, 1, None) + st.shift(Kn, a, 0, -1))
            flux = Kf * diff
        if Q is not None:
            Qn = Q if mcoef is None else mcoef * Q
            flux = flux + 0.5 * (st.shift(Qn, a, 1, None) + st.shift(Qn, a, 0, -1))
        flux = st.crop(flux, n, 1, skip=k)
        term = (st.shift(flux, a, 1, None) - st.shift(flux, a, 0, -1)) / h[k]
        out = term if out is None else out + term
    if out is None:
        out = np.zeros(values.shape)
    return (out, stats) if return_stats else out


def p_sub_laplacian(
    g: GroupDescriptor, u: GridFunction, p: float, eps_reg: float = DEFAULT_EPS_REG
) -> GridFunction:
    """``L_p u = sum_j X_j((|grad_H u|^2 + eps^2)^((p-2)/2) X_j u)``."""
    _check(g, u.grid)
    if not p > 1:
        raise InvalidArgument(f"p must exceed 1, got {p}")
    if eps_reg < 0:
        raise InvalidArgument("eps_reg must be nonnegative")
    vals = p_sub_laplacian_array(g, u.grid, u.values, p, eps_reg, u.dirichlet)
    return GridFunction(u.grid, vals, dirichlet=False)


@lru_cache(maxsize=16)
def sub_laplacian_matrix(g: GroupDescriptor, grid: Grid) -> sp.csr_matrix:
    """The ``p = 2`` compact operator (zero-trace ghosts) as a sparse matrix.

    Each row only touches nodes in the surrounding ``3^N`` box, so ``3^N``
    probes with indicator vectors of the residue classes ``i mod 3`` recover
    every entry.
    """
    _check(g, grid)
    n = grid.dim
    idx = np.indices(grid.shape)
    flat = np.arange(int(np.prod(grid.shape))).reshape(grid.shape)
    rows, cols, vals = [], [], []
    for colour in itertools.product(range(3), repeat=n):
        mask = np.all([idx[k] % 3 == colour[k] for k in range(n)], axis=0)
        y = p_sub_laplacian_array(g, grid, mask.astype(float), 2.0, 0.0, True)
        # the unique probed column in each row's box: shift every index to its class
        col_idx = [idx[k] + (colour[k] - idx[k] + 1) % 3 - 1 for k in range(n)]
        inside = np.all([(c >= 0) & (c < grid.shape[k]) for k, c in enumerate(col_idx)], axis=0)
        keep = inside & (y != 0)
        rows.append(flat[keep])
        cols.append(flat[tuple(c[keep] for c in col_idx)])
        vals.append(y[keep])
    size = flat.size
    A = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(size, size))
    A.sort_indices()
    return A
