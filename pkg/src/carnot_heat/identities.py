"""Convergence studies and property sweeps shared by the tests and the CLI.

The two closed-form identities checked here hold on any stratified group
for ``x' != 0``:

    |grad_H |x'|^gamma| = gamma |x'|^(gamma-1),
    div_H (x' / |x'|^gamma) = (N1 - gamma) / |x'|^gamma.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import _stencils as st
from .calculus import HorizontalField, horizontal_divergence, horizontal_gradient, p_sub_laplacian_array
from .group import GroupDescriptor, euclidean, heisenberg
from .grid import Grid, GridFunction
from .inequalities import lindqvist_lower_bound, odd_power_gap, pairing_gap

__all__ = [
    "ConvergenceResult",
    "gradient_identity_error",
    "divergence_identity_error",
    "convergence_study",
    "stencil_equivalence",
    "lindqvist_sweep",
    "odd_power_sweep",
]


@dataclass(frozen=True)
class ConvergenceResult:
    identity: str
    gamma: float
    h: tuple[float, float]
    errors: tuple[float, float]
    order: float
    passed: bool

    def as_dict(self) -> dict:
        d = asdict(self)
        d["h"] = list(self.h)
        d["errors"] = list(self.errors)
        return d


def _radius(g: GroupDescriptor, X: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(X[: g.horizontal_dim] ** 2, axis=0))


def gradient_identity_error(g: GroupDescriptor, grid: Grid, gamma: float, r_min: float = 0.2) -> float:
    """Max relative error of ``|grad_H |x'|^gamma|`` over nodes with ``|x'| >= r_min``."""
    r = _radius(g, grid.nodes)
    u = GridFunction(grid, r**gamma, dirichlet=False)
    num = horizontal_gradient(g, u).norm().values
    exact = gamma * r ** (gamma - 1)
    mask = r >= r_min
    return float(np.max(np.abs(num[mask] - exact[mask]) / np.abs(exact[mask])))


def divergence_identity_error(g: GroupDescriptor, grid: Grid, gamma: float, r_min: float = 0.2) -> float:
    """Max relative error of ``div_H (x'/|x'|^gamma)`` over nodes with ``|x'| >= r_min``."""
    n1 = g.horizontal_dim
    if n1 == gamma:
        raise ValueError("the divergence vanishes identically for gamma = N1; relative error undefined")
    X = grid.nodes
    r = _radius(g, X)
    with np.errstate(divide="ignore", invalid="ignore"):
        comps = tuple(GridFunction(grid, X[j] / r**gamma, dirichlet=False) for j in range(n1))
    num = horizontal_divergence(g, HorizontalField(grid, comps)).values
    exact = (n1 - gamma) / r**gamma
    mask = r >= r_min
    return float(np.max(np.abs(num[mask] - exact[mask]) / np.abs(exact[mask])))


def convergence_study(
    identity: str,
    gamma: float,
    g: GroupDescriptor | None = None,
    lower=-1.0,
    upper=1.0,
    n_coarse: int = 64,
    tol: float = 1e-3,
    min_order: float = 1.8,
) -> ConvergenceResult:
    """Two-grid study (``n_coarse`` and ``2 n_coarse`` cells per axis) of one identity."""
    g = g or heisenberg(1)
    fn = {"gradient": gradient_identity_error, "divergence": divergence_identity_error}[identity]
    coarse = Grid.uniform(np.full(g.total_dim, lower), np.full(g.total_dim, upper), n_coarse)
    fine = coarse.refine()
    e0 = fn(g, coarse, gamma)
    e1 = fn(g, fine, gamma)
    order = math.log2(e0 / e1) if e1 > 0 else math.inf
    return ConvergenceResult(
        identity,
        float(gamma),
        (float(coarse.h.max()), float(fine.h.max())),
        (e0, e1),
        order,
        bool(e1 <= tol and order >= min_order),
    )


def stencil_equivalence(dim: int = 2, n: int = 17, seed: int = 0) -> bool:
    """``p = 2``, ``eps = 0`` on Euclidean ``R^dim`` equals the ``2 dim + 1``-point Laplacian bit for bit."""
    grid = Grid.uniform(np.zeros(dim), np.ones(dim), n)
    u = np.random.default_rng(seed).standard_normal(grid.shape)
    got = p_sub_laplacian_array(euclidean(dim), grid, u, 2.0, 0.0, True)
    U = st.pad(u, dim, 1, "odd")
    ref = None
    for k in range(dim):
        idx = [slice(1, -1)] * dim
        idx[k] = slice(None)
        E = U[tuple(idx)]
        h = grid.h[k]
        face = (st.shift(E, k, 1, None) - st.shift(E, k, 0, -1)) / h
        term = (st.shift(face, k, 1, None) - st.shift(face, k, 0, -1)) / h
        ref = term if ref is None else ref + term
    return bool(np.array_equal(got, ref))


def lindqvist_sweep(n: int = 100_000, ps=(1.5, 2.0, 3.0, 4.5), dims=(1, 2, 3), seed: int = 0) -> dict:
    """Worst scaled margins of ``pairing_gap >= lindqvist_lower_bound`` and ``pairing_gap >= 0``.

    The first margin is ``(gap - bound) / (1 + |c| + |d|)^(2p)``; it passes
    at ``>= -1e-12``.
    """
    rng = np.random.default_rng(seed)
    worst_bound = math.inf
    worst_gap = math.inf
    for p in ps:
        for dim in dims:
            scale = 10.0 ** rng.uniform(-3, 1, (n, 1))
            c = rng.standard_normal((n, dim)) * scale
            d = np.where(rng.random((n, 1)) < 0.1, c + 1e-6 * rng.standard_normal((n, dim)), rng.standard_normal((n, dim)) * scale)
            gap = pairing_gap(c, d, p)
            bound = lindqvist_lower_bound(c, d, p)
            w = (1 + np.linalg.norm(c, axis=-1) + np.linalg.norm(d, axis=-1)) ** (2 * p)
            worst_bound = min(worst_bound, float(np.min((gap - bound) / w)))
            worst_gap = min(worst_gap, float(np.min(gap)))
    return {
        "min_scaled_margin": worst_bound,
        "min_pairing_gap": worst_gap,
        "passed": bool(worst_bound >= -1e-12 and worst_gap >= 0),
    }


def odd_power_sweep(n: int = 100_000, seed: int = 0) -> dict:
    """``sign(odd_power_gap(u, v, beta)) == sign(u - v)`` on random triples.

    Besides generic draws the sample holds the three sign cases
    ``0 <= v < u``, ``v < 0 <= u`` and ``v < u < 0`` and ties ``u = v``.
    """
    rng = np.random.default_rng(seed)
    beta = rng.uniform(0.05, 6.0, n)
    u = rng.standard_normal(n) * 10.0 ** rng.uniform(-3, 2, n)
    v = rng.standard_normal(n) * 10.0 ** rng.uniform(-3, 2, n)
    k = n // 8
    a, b = np.sort(rng.uniform(0, 5, (2, k)), axis=0)
    u[:k], v[:k] = b, a  # 0 <= v < u
    u[k : 2 * k], v[k : 2 * k] = rng.uniform(0, 5, k), -rng.uniform(1e-3, 5, k)  # v < 0 <= u
    u[2 * k : 3 * k], v[2 * k : 3 * k] = -a, -b  # v < u < 0
    v[3 * k : 4 * k] = u[3 * k : 4 * k]  # ties
    mismatches = int(np.sum(np.sign(odd_power_gap(u, v, beta)) != np.sign(u - v)))
    return {"samples": n, "mismatches": mismatches, "passed": mismatches == 0}
