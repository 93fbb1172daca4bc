"""Explicit time integration of the nonlinear heat p-sub-Laplacian problem

    u_t - L_p u = -gamma |u|^(beta-1) u + alpha |u|^(q-2) u   in Omega,
    u = 0 on the boundary,  u(0) = u0,

together with the weak-form residual and the comparison harness.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .calculus import (
    DEFAULT_EPS_REG,
    coefficients_on_grid,
    horizontal_gradient,
    p_flux,
    p_sub_laplacian_array,
    sub_laplacian_matrix,
)
from .errors import InvalidArgument, MaxStepsExceeded, NumericalBlowUp, PreconditionError
from .group import GroupDescriptor
from .grid import BoxDomain, Grid, GridFunction, quadrature
from .inequalities import GronwallReport, GronwallSample, gronwall_check, signed_power

__all__ = [
    "ProblemSpec",
    "SolverConfig",
    "Trajectory",
    "CompareReport",
    "reaction",
    "rhs",
    "stable_dt",
    "step",
    "solve",
    "solve_many",
    "positive_part",
    "weak_residual",
    "compare",
    "comparison_gronwall",
    "constant_trajectory",
]


@dataclass(frozen=True)
class ProblemSpec:
    group: GroupDescriptor
    p: float
    beta: float
    q: float
    gamma: float
    alpha: float
    T: float
    u0: GridFunction

    def __post_init__(self):
        if not self.p > 1:
            raise InvalidArgument(f"p must exceed 1, got {self.p}")
        if not self.beta > 0:
            raise InvalidArgument(f"beta must be positive, got {self.beta}")
        if not self.q >= 1:
            raise InvalidArgument(f"q must be at least 1, got {self.q}")
        if self.gamma < 0 or self.alpha < 0:
            raise InvalidArgument("gamma and alpha must be nonnegative")
        if not self.T > 0:
            raise InvalidArgument(f"T must be positive, got {self.T}")
        if self.u0.grid.dim != self.group.total_dim:
            raise InvalidArgument("u0 grid dimension does not match the group")
        v = self.u0.values
        if not np.all(np.isfinite(v)):
            raise InvalidArgument("u0 must be finite")
        if np.any(v < 0):
            raise InvalidArgument("u0 must be nonnegative")

    @property
    def grid(self) -> Grid:
        return self.u0.grid

    @property
    def domain(self) -> BoxDomain:
        return self.u0.grid.domain

    def with_u0(self, u0: GridFunction) -> "ProblemSpec":
        return ProblemSpec(self.group, self.p, self.beta, self.q, self.gamma, self.alpha, self.T, u0)

    def params(self) -> dict:
        return {
            "group": self.group.name,
            "p": self.p,
            "beta": self.beta,
            "q": self.q,
            "gamma": self.gamma,
            "alpha": self.alpha,
            "T": self.T,
            "lower": list(self.domain.lower),
            "upper": list(self.domain.upper),
            "n_cells": list(self.grid.n_cells),
        }


@dataclass(frozen=True)
class SolverConfig:
    eps_reg: float = DEFAULT_EPS_REG
    cfl_safety: float = 0.5
    output_stride: int = 1
    max_steps: int = 10_000_000
    # sup|u| beyond this is reported as blow-up
    blowup_threshold: float = 1e8
    compare_atol: float = 1e-8
    compare_rtol: float = 1e-6

    def __post_init__(self):
        if self.eps_reg < 0:
            raise InvalidArgument("eps_reg must be nonnegative")
        if not 0 < self.cfl_safety <= 1:
            raise InvalidArgument("cfl_safety must lie in (0, 1]")
        if int(self.output_stride) < 1 or int(self.max_steps) < 1:
            raise InvalidArgument("output_stride and max_steps must be positive")

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class Trajectory:
    times: np.ndarray
    states: list[GridFunction]
    status: str = "complete"
    blowup_time: float | None = None
    steps: int = 0

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if len(self.times) != len(self.states) or len(self.times) == 0:
            raise InvalidArgument("times and states must be nonempty and of equal length")
        if self.times[0] != 0 or np.any(np.diff(self.times) <= 0):
            raise InvalidArgument("times must start at 0 and increase strictly")

    @property
    def grid(self) -> Grid:
        return self.states[0].grid

    @property
    def values(self) -> np.ndarray:
        return np.stack([s.values for s in self.states])

    @property
    def blew_up(self) -> bool:
        return self.status == "blowup"

    def sup_norms(self) -> np.ndarray:
        return np.array([s.sup() for s in self.states])


@dataclass(frozen=True)
class CompareReport:
    max_violation: float
    violation_time: float
    ordered: bool
    tolerance: float
    sup_v: float

    def as_dict(self) -> dict:
        return asdict(self)


def reaction(u, beta: float, q: float, gamma: float, alpha: float):
    """``-gamma |u|^(beta-1) u + alpha |u|^(q-2) u`` with ``0 -> 0``."""
    return -gamma * signed_power(u, beta) + alpha * signed_power(u, q - 1)


def _rhs_array(spec: ProblemSpec, cfg: SolverConfig, values: np.ndarray, dirichlet: bool = True) -> np.ndarray:
    lap = p_sub_laplacian_array(spec.group, spec.grid, values, spec.p, cfg.eps_reg, dirichlet)
    return lap + reaction(values, spec.beta, spec.q, spec.gamma, spec.alpha)


def rhs(spec: ProblemSpec, cfg: SolverConfig, u: GridFunction) -> GridFunction:
    """``L_p u + reaction(u)`` nodewise."""
    if u.grid != spec.grid:
        raise InvalidArgument("u is not on the problem grid")
    return GridFunction(u.grid, _rhs_array(spec, cfg, u.values, u.dirichlet), dirichlet=False)


def _geometric_bound(g: GroupDescriptor, grid: Grid) -> float:
    """Gershgorin bound of the compact stencil with unit coefficient:
    ``max_x [4 sum_k K_kk / h_k^2 + sum_{k != l} |K_kl| / (h_k h_l)]``, ``K = B^T B``.
    """
    b = coefficients_on_grid(g, grid, 1)
    h = grid.h
    n = grid.dim
    total = np.zeros(grid.coordinates(1).shape[1:])
    for k in range(n):
        for l in range(n):
            Kkl = 0.0
            for j in range(g.horizontal_dim):
                if b[j][k] is not None and b[j][l] is not None:
                    Kkl = Kkl + b[j][k] * b[j][l]
            if k == l:
                total = total + 4.0 * Kkl / h[k] ** 2
            else:
                total = total + np.abs(Kkl) / (h[k] * h[l])
    return float(np.max(total))


_GEOM_CACHE: dict = {}


def _geometry(g: GroupDescriptor, grid: Grid) -> float:
    key = (g, grid)
    if key not in _GEOM_CACHE:
        _GEOM_CACHE[key] = _geometric_bound(g, grid)
    return _GEOM_CACHE[key]


def _gradient_stats(spec: ProblemSpec, cfg: SolverConfig, values: np.ndarray):
    _, stats = p_sub_laplacian_array(
        spec.group, spec.grid, values, spec.p, cfg.eps_reg, True, return_stats=True
    )
    return stats


def _dt_from_stats(spec: ProblemSpec, cfg: SolverConfig, stats, sup: float) -> float:
    p, eps = spec.p, cfg.eps_reg
    if p == 2:
        mmax = 1.0
    else:
        smax, smin = stats
        s = (smax if p > 2 else smin) + eps**2
        if s == 0:
            mmax = 0.0 if p > 2 else math.inf
        else:
            mmax = s ** ((p - 2) / 2)
    D = max(1.0, p - 1.0) * mmax
    geom = _geometry(spec.group, spec.grid)
    dt_diff = math.inf if D == 0 else 2.0 / (D * geom)

    def _pow(e):
        return 0.0 if (sup == 0 and e < 0) else sup**e

    dreac = spec.gamma * spec.beta * _pow(spec.beta - 1) + spec.alpha * abs(spec.q - 1) * _pow(spec.q - 2)
    dt_reac = 1.0 / (1.0 + dreac)
    dt = cfg.cfl_safety * min(dt_diff, dt_reac)
    if not dt > 0:
        raise NumericalBlowUp("stable time step collapsed to zero")
    return dt


def stable_dt(spec: ProblemSpec, cfg: SolverConfig, u: GridFunction) -> float:
    """Explicit-Euler step bound from the diffusion CFL and the reaction stiffness.

    For a Euclidean grid with ``p = 2`` this is ``cfl h^2 / (2N)``.
    """
    stats = _gradient_stats(spec, cfg, u.values) if spec.p != 2 else None
    return _dt_from_stats(spec, cfg, stats, u.sup())


def _check_state(cfg, new, step_index):
    if not np.all(np.isfinite(new)):
        raise NumericalBlowUp(f"non-finite values at step {step_index}", step=step_index)
    if np.max(np.abs(new)) > cfg.blowup_threshold:
        raise NumericalBlowUp(f"sup|u| exceeded {cfg.blowup_threshold:g} at step {step_index}", step=step_index)
    return new


def _step_array(spec, cfg, values, dt, step_index=None):
    return _check_state(cfg, values + dt * _rhs_array(spec, cfg, values), step_index)


def step(spec: ProblemSpec, cfg: SolverConfig, u: GridFunction, dt: float, step_index: int | None = None) -> GridFunction:
    """One forward-Euler step ``u + dt * rhs(u)``."""
    if dt < 0:
        raise InvalidArgument("dt must be nonnegative")
    if dt == 0:
        return u.with_values(u.values.copy())
    return GridFunction(u.grid, _step_array(spec, cfg, u.values, dt, step_index), dirichlet=True)


def solve(spec: ProblemSpec, cfg: SolverConfig | None = None) -> Trajectory:
    return solve_many([spec], cfg)[0]


def _compatible(a: ProblemSpec, b: ProblemSpec) -> bool:
    return (
        a.group == b.group
        and a.grid == b.grid
        and (a.p, a.beta, a.q, a.gamma, a.alpha, a.T) == (b.p, b.beta, b.q, b.gamma, b.alpha, b.T)
    )


def solve_many(specs, cfg: SolverConfig | None = None) -> list[Trajectory]:
    """Integrate problems that differ only in ``u0`` with a shared step sequence.

    All returned trajectories carry identical time stamps.  On blow-up every
    trajectory is truncated at the last finite state and marked.
    """
    cfg = cfg or SolverConfig()
    specs = list(specs)
    if not specs:
        return []
    ref = specs[0]
    if not all(_compatible(ref, s) for s in specs):
        raise InvalidArgument("solve_many needs problems that differ only in u0")
    U = np.stack([s.u0.values for s in specs])
    T = ref.T
    t = 0.0
    steps = 0
    times = [0.0]
    records = [U.copy()]
    status = "complete"
    blowup_time = None
    stride = int(cfg.output_stride)
    # p = 2 is linear with time-independent coefficients: assemble once
    A = sub_laplacian_matrix(ref.group, ref.grid) if ref.p == 2 else None
    while t < T:
        if steps >= cfg.max_steps:
            trajs = _pack(ref, times, records, "max_steps", None, steps)
            raise MaxStepsExceeded(f"max_steps={cfg.max_steps} reached at t={t:.6g} < T={T}", trajs)
        try:
            if A is not None:
                lap, stats = (A @ U.reshape(len(U), -1).T).T.reshape(U.shape), None
            else:
                lap, stats = p_sub_laplacian_array(
                    ref.group, ref.grid, U, ref.p, cfg.eps_reg, True, return_stats=True
                )
            R = lap + reaction(U, ref.beta, ref.q, ref.gamma, ref.alpha)
            dt = _dt_from_stats(ref, cfg, stats, float(np.max(np.abs(U))))
            last = t + dt >= T * (1 - 1e-13)
            if last:
                dt = T - t
            elif not t + dt > t:
                raise NumericalBlowUp(f"time step {dt:.3g} no longer advances t = {t:.6g}", step=steps)
            U = _check_state(cfg, U + dt * R, steps)
        except NumericalBlowUp:
            status = "blowup"
            blowup_time = t
            if times[-1] != t:
                times.append(t)
                records.append(U.copy())
            break
        steps += 1
        t = T if last else t + dt
        if steps % stride == 0 or last:
            times.append(t)
            records.append(U.copy())
    return _pack(ref, times, records, status, blowup_time, steps)


def _pack(ref, times, records, status, blowup_time, steps):
    out = []
    for b in range(records[0].shape[0]):
        states = [GridFunction(ref.grid, r[b], dirichlet=True) for r in records]
        out.append(Trajectory(np.array(times), states, status, blowup_time, steps))
    return out


def constant_trajectory(v: GridFunction, times) -> Trajectory:
    """A time-independent function sampled at ``times``."""
    times = np.asarray(times, dtype=float)
    return Trajectory(times, [v] * len(times))


def positive_part(u: GridFunction, v: GridFunction) -> GridFunction:
    """``max(u - v, 0)`` nodewise."""
    if u.grid != v.grid:
        raise InvalidArgument("positive_part needs functions on the same grid")
    return GridFunction(u.grid, np.maximum(u.values - v.values, 0.0), dirichlet=True)


def _check_pair(a: Trajectory, b: Trajectory):
    if a.grid != b.grid:
        raise InvalidArgument("trajectories live on different grids")
    if a.times.shape != b.times.shape or not np.array_equal(a.times, b.times):
        raise InvalidArgument("trajectories are sampled at different times")


def weak_residual(spec: ProblemSpec, cfg: SolverConfig, traj: Trajectory, phi: Trajectory) -> float:
    """Space-time weak-form residual against a nonnegative test function.

    ``R = iint (u_t phi + flux(u) . grad_H phi) + iint (gamma |u|^(beta-1) u - alpha |u|^(q-2) u) phi``;
    ``R ~ 0`` for a solution, ``R <= 0`` for a sub- and ``R >= 0`` for a
    super-solution.  ``u_t`` is a forward difference between recorded
    states (backward at the final time); the time integral is trapezoidal.
    """
    _check_pair(traj, phi)
    if len(traj.times) < 2:
        raise InvalidArgument("weak_residual needs at least two time samples")
    if any(np.any(s.values < 0) for s in phi.states):
        raise InvalidArgument("test function must be nonnegative")
    t = traj.times
    K = len(t)
    integrand = np.empty(K)
    for k in range(K):
        u = traj.states[k]
        ph = phi.states[k]
        if k < K - 1:
            dudt = (traj.states[k + 1].values - u.values) / (t[k + 1] - t[k])
        else:
            dudt = (u.values - traj.states[k - 1].values) / (t[k] - t[k - 1])
        flux = p_flux(spec.group, u, spec.p, cfg.eps_reg)
        gphi = horizontal_gradient(spec.group, ph)
        dot = sum(a.values * b.values for a, b in zip(flux.components, gphi.components))
        reac = -reaction(u.values, spec.beta, spec.q, spec.gamma, spec.alpha)
        integrand[k] = np.sum((dudt + reac) * ph.values + dot) * u.grid.cell_volume
    return float(np.sum(0.5 * (integrand[1:] + integrand[:-1]) * np.diff(t)))


def compare(spec: ProblemSpec, cfg: SolverConfig, traj_u: Trajectory, traj_v: Trajectory) -> CompareReport:
    """Largest ordering violation ``max (u - v)^+`` over all recorded states."""
    _check_pair(traj_u, traj_v)
    if np.any(traj_u.states[0].values > traj_v.states[0].values):
        raise PreconditionError("initial ordering u(0) <= v(0) does not hold")
    worst = 0.0
    when = 0.0
    for t, a, b in zip(traj_u.times, traj_u.states, traj_v.states):
        viol = float(np.max(a.values - b.values))
        if viol > worst:
            worst, when = viol, float(t)
    sup_v = float(max(s.sup() for s in traj_v.states))
    tol = max(cfg.compare_atol, cfg.compare_rtol * sup_v)
    return CompareReport(worst, when, worst <= tol, tol, sup_v)


def comparison_gronwall(spec: ProblemSpec, traj_u: Trajectory, traj_v: Trajectory, tol: float = 1e-12) -> GronwallReport:
    """Gronwall check on ``f(t) = int (u - v)^+^2 dx`` with ``g = 2 alpha sup (difference quotient)``."""
    _check_pair(traj_u, traj_v)
    f = []
    quot = 0.0
    for a, b in zip(traj_u.states, traj_v.states):
        f.append(quadrature(positive_part(a, b).with_values(np.maximum(a.values - b.values, 0.0) ** 2)))
        mask = a.values > b.values
        if np.any(mask):
            ua, vb = a.values[mask], b.values[mask]
            dq = (signed_power(ua, spec.q - 1) - signed_power(vb, spec.q - 1)) / (ua - vb)
            quot = max(quot, float(np.max(dq)))
    L = 2.0 * spec.alpha * quot
    return gronwall_check(GronwallSample(traj_u.times, np.array(f), np.full(len(f), L)), tol=tol)
