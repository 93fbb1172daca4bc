"""Explicit super-solution ``V(x) = L exp(sigma |x' - x0'|)`` and the bound it gives.

``x'`` is the first-stratum part of a point.  The base point ``x0'`` sits
outside the first-stratum projection of the box at distance at least ``eps``
and closer than ``r' + 1`` to every point of it, where ``r' = max |x'|``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .calculus import p_sub_laplacian_array
from .errors import InfeasibleError, InvalidArgument
from .group import GroupDescriptor
from .grid import BoxDomain, Grid, GridFunction
from .solver import ProblemSpec, SolverConfig, Trajectory, reaction

__all__ = [
    "BarrierParams",
    "Inequality39Report",
    "r_prime",
    "choose_x0",
    "barrier_params",
    "make_barrier",
    "inflate_L",
    "barrier_value",
    "barrier_function",
    "mp_operator",
    "analytic_lp_barrier",
    "verify_inequality_39",
    "global_bound",
]

DEFAULT_EPS = 0.5


@dataclass(frozen=True)
class BarrierParams:
    L: float
    sigma: float
    x0_prime: tuple[float, ...]
    eps: float
    r_prime: float

    def __post_init__(self):
        if not self.L > 0 or not self.sigma > 0:
            raise InvalidArgument("L and sigma must be positive")
        if not 0 < self.eps < 1:
            raise InvalidArgument(f"eps must lie in (0, 1), got {self.eps}")
        if not self.r_prime > 0:
            raise InvalidArgument("r_prime must be positive")
        object.__setattr__(self, "x0_prime", tuple(float(c) for c in self.x0_prime))

    def as_dict(self) -> dict:
        return {
            "L": self.L,
            "sigma": self.sigma,
            "x0_prime": list(self.x0_prime),
            "eps": self.eps,
            "r_prime": self.r_prime,
        }


@dataclass(frozen=True)
class Inequality39Report:
    min_margin: float
    argmin_r: float
    samples: int
    ok: bool

    def as_dict(self) -> dict:
        return {"min_margin": self.min_margin, "argmin_r": self.argmin_r, "samples": self.samples, "ok": self.ok}


def _projection(domain: BoxDomain, g: GroupDescriptor):
    if domain.dim != g.total_dim:
        raise InvalidArgument(f"box is {domain.dim}-d but group {g.name} has dimension {g.total_dim}")
    n1 = g.horizontal_dim
    return np.array(domain.lower[:n1]), np.array(domain.upper[:n1])


def r_prime(domain: BoxDomain, g: GroupDescriptor) -> float:
    """``max |x'|`` over the closed box; attained at a corner of the projection."""
    lo, hi = _projection(domain, g)
    return float(np.sqrt(np.sum(np.maximum(np.abs(lo), np.abs(hi)) ** 2)))


def _distance_range(lo, hi, x0):
    """Min and max of ``|x0 - y|`` over the box ``[lo, hi]``."""
    near = np.clip(x0, lo, hi)
    far = np.where(np.abs(x0 - lo) >= np.abs(x0 - hi), lo, hi)
    return float(np.linalg.norm(x0 - near)), float(np.linalg.norm(x0 - far))


def choose_x0(domain: BoxDomain, g: GroupDescriptor, eps: float = DEFAULT_EPS) -> np.ndarray:
    """Base point ``eps`` before the projection along the first axis, centred in the others.

    Both constraints ``eps <= |x0' - x'| < r' + 1`` are verified on the closed
    projection, which covers every grid node.
    """
    if not 0 < eps < 1:
        raise InvalidArgument(f"eps must lie in (0, 1), got {eps}")
    lo, hi = _projection(domain, g)
    x0 = 0.5 * (lo + hi)
    x0[0] = lo[0] - eps
    dmin, dmax = _distance_range(lo, hi, x0)
    cap = r_prime(domain, g) + 1.0
    if dmin < eps * (1 - 1e-12):
        raise InfeasibleError(f"lower side violated: distance {dmin:.6g} < eps = {eps}")
    if dmax >= cap:
        raise InfeasibleError(
            f"upper side violated: max distance {dmax:.6g} >= r' + 1 = {cap:.6g} for eps = {eps}"
        )
    return x0


def barrier_params(p: float, q: float, beta: float, N1: int, eps: float, r_prime: float) -> tuple[float, float]:
    """``(sigma, L)`` making the barrier a super-solution; needs ``p <= q < beta + 1``."""
    if not p > 1:
        raise InvalidArgument(f"p must exceed 1, got {p}")
    if not (p <= q < beta + 1):
        raise InvalidArgument(f"requires p <= q < beta+1, got p={p}, q={q}, beta={beta}")
    if not 0 < eps < 1:
        raise InvalidArgument(f"eps must lie in (0, 1), got {eps}")
    if not r_prime > 0:
        raise InvalidArgument("r_prime must be positive")
    if q > p:
        sigma = 1.0 / ((q - p) * (r_prime + 1.0))
        A = (p - 1) * sigma**p + (N1 - 1) / eps * sigma ** (p - 1)
        L = max((2 * math.e) ** (1 / (beta + 1 - q)), (2 * A) ** (1 / (beta + 1 - p)))
    else:
        sigma = 1.0
        L = max(2.0 ** (1 / (beta + 1 - q)), (2 * (p - 1 + (N1 - 1) / eps)) ** (1 / (beta + 1 - p)))
    return sigma, L


def make_barrier(domain: BoxDomain, g: GroupDescriptor, p: float, q: float, beta: float, eps: float = DEFAULT_EPS) -> BarrierParams:
    """Place ``x0'`` and compute ``(sigma, L)`` in one go."""
    x0 = choose_x0(domain, g, eps)
    rp = r_prime(domain, g)
    sigma, L = barrier_params(p, q, beta, g.horizontal_dim, eps, rp)
    return BarrierParams(L, sigma, tuple(x0), eps, rp)


def inflate_L(params: BarrierParams, u0: GridFunction) -> BarrierParams:
    """Double ``L`` until ``L >= sup u0``."""
    target = float(np.max(u0.values)) if u0.values.size else 0.0
    L = params.L
    while L < target:
        L *= 2.0
    return params if L == params.L else replace(params, L=L)


def barrier_value(params: BarrierParams, x) -> np.ndarray:
    """``L exp(sigma |x' - x0'|)`` for points ``x`` of shape ``(N, ...)`` (or ``(N1, ...)``)."""
    x = np.asarray(x, dtype=float)
    n1 = len(params.x0_prime)
    x0 = np.asarray(params.x0_prime).reshape((n1,) + (1,) * (x.ndim - 1))
    r = np.sqrt(np.sum((x[:n1] - x0) ** 2, axis=0))
    return params.L * np.exp(params.sigma * r)


def barrier_function(params: BarrierParams, grid: Grid) -> GridFunction:
    """The barrier sampled on the nodes (a smooth function, not zero-trace)."""
    return grid.sample(lambda X: barrier_value(params, X), dirichlet=False)


def global_bound(params: BarrierParams) -> float:
    return params.L * math.exp(params.sigma * (params.r_prime + 1.0))


def analytic_lp_barrier(params: BarrierParams, p: float, x) -> np.ndarray:
    """Closed form of ``L_p V`` away from ``x0'``:
    ``((p-1) sigma^p + (N1-1)/r sigma^(p-1)) L^(p-1) exp((p-1) sigma r)``."""
    x = np.asarray(x, dtype=float)
    n1 = len(params.x0_prime)
    x0 = np.asarray(params.x0_prime).reshape((n1,) + (1,) * (x.ndim - 1))
    r = np.sqrt(np.sum((x[:n1] - x0) ** 2, axis=0))
    s, L = params.sigma, params.L
    return ((p - 1) * s**p + (n1 - 1) / r * s ** (p - 1)) * L ** (p - 1) * np.exp((p - 1) * s * r)


def _mp_static(spec: ProblemSpec, cfg: SolverConfig, v: GridFunction) -> np.ndarray:
    vals = v.values
    if np.any(vals < 0):
        for e in (spec.q - 1, spec.beta):
            if e != int(e):
                raise InvalidArgument("negative values with a non-integer exponent")
    lap = p_sub_laplacian_array(spec.group, v.grid, vals, spec.p, cfg.eps_reg, v.dirichlet)
    return -lap - reaction(vals, spec.beta, spec.q, spec.gamma, spec.alpha)


def mp_operator(spec: ProblemSpec, cfg: SolverConfig, v):
    """``M_p v = v_t - L_p v - alpha v^(q-1) + gamma v^beta``.

    A :class:`GridFunction` is treated as time independent.  For a
    :class:`Trajectory` ``v_t`` is a forward difference (backward at the
    last sample) and one grid function per sample is returned.
    """
    if isinstance(v, GridFunction):
        return GridFunction(v.grid, _mp_static(spec, cfg, v), dirichlet=False)
    if not isinstance(v, Trajectory):
        raise InvalidArgument("mp_operator expects a GridFunction or a Trajectory")
    t = v.times
    if len(t) < 2:
        raise InvalidArgument("a trajectory needs at least two samples")
    out = []
    for k, s in enumerate(v.states):
        j = k + 1 if k < len(t) - 1 else k - 1
        vt = (v.states[j].values - s.values) / (t[j] - t[k])
        out.append(GridFunction(s.grid, vt + _mp_static(spec, cfg, s), dirichlet=False))
    return out


def verify_inequality_39(params: BarrierParams, p: float, q: float, beta: float, N1: int, samples: int = 1000) -> Inequality39Report:
    """Worst ``RHS - LHS`` of the pointwise super-solution inequality

    ``(p-1) s^p + (N1-1)/r s^(p-1) + L^(q-p) e^((q-p) s r) <= L^(beta+1-p) e^((beta+1-p) s r)``

    over ``samples`` values of ``r`` spread uniformly on ``[eps, r' + 1]``.
    """
    if int(samples) < 1:
        raise InvalidArgument("samples must be a positive integer")
    r = np.linspace(params.eps, params.r_prime + 1.0, int(samples))
    s, L = params.sigma, params.L
    lhs = (p - 1) * s**p + (N1 - 1) / r * s ** (p - 1) + L ** (q - p) * np.exp((q - p) * s * r)
    rhs = L ** (beta + 1 - p) * np.exp((beta + 1 - p) * s * r)
    margin = rhs - lhs
    k = int(np.argmin(margin))
    return Inequality39Report(float(margin[k]), float(r[k]), int(samples), bool(margin[k] >= 0))
