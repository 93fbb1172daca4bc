"""Algebraic kernels behind the comparison argument.

All vector functions accept arrays whose *last* axis is the vector
dimension, so a batch of pairs is evaluated in one call.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument

__all__ = [
    "nonneg_power",
    "signed_power",
    "vector_signed_power",
    "pairing_gap",
    "lindqvist_lower_bound",
    "odd_power_gap",
    "GronwallSample",
    "GronwallReport",
    "gronwall_check",
]


def nonneg_power(a, e: float) -> np.ndarray:
    """``a**e`` for ``a >= 0``; quarter-integer exponents avoid ``pow``."""
    a = np.asarray(a, dtype=float)
    k4 = 4 * e
    if k4 != int(k4) or not 0 <= e <= 8:
        return a**e
    k, r = divmod(int(k4), 4)
    out = None
    if r:
        root = np.sqrt(a)
        out = root if r == 2 else np.sqrt(root) if r == 1 else root * np.sqrt(root)
    for _ in range(k):
        out = a if out is None else out * a
    return np.ones_like(a) if out is None else out


def signed_power(u, s: float) -> np.ndarray:
    """``|u|^(s-1) u`` with ``0 -> 0`` for every ``s > 0``."""
    u = np.asarray(u, dtype=float)
    if np.ndim(s) or s < 1:
        with np.errstate(divide="ignore", invalid="ignore"):
            out = u * np.abs(u) ** (np.asarray(s, dtype=float) - 1)
        return np.where(u == 0, 0.0, out)
    if s == 1:
        return u
    if s == 2:
        return u * np.abs(u)
    if s == 3:
        return u * u * u
    return u * nonneg_power(np.abs(u), s - 1)


def vector_signed_power(c, s: float) -> np.ndarray:
    """``|c|^(s-1) c`` for vectors along the last axis, ``0 -> 0``."""
    c = np.asarray(c, dtype=float)
    n = np.linalg.norm(c, axis=-1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(n > 0, n ** (s - 1), 0.0)
    return scale * c


def _pair(c, d):
    c = np.atleast_1d(np.asarray(c, dtype=float))
    d = np.atleast_1d(np.asarray(d, dtype=float))
    if c.shape != d.shape:
        raise InvalidArgument(f"dimension mismatch: {c.shape} vs {d.shape}")
    return c, d


def pairing_gap(c, d, p: float):
    """``(|c|^(p-2) c - |d|^(p-2) d) . (c - d)``."""
    c, d = _pair(c, d)
    diff = vector_signed_power(c, p - 1) - vector_signed_power(d, p - 1)
    return np.sum(diff * (c - d), axis=-1)


def lindqvist_lower_bound(c, d, p: float):
    """Lower bound for :func:`pairing_gap`.

    ``p >= 2``: ``(4/p^2) | |d|^((p-2)/2) d - |c|^((p-2)/2) c |^2``;
    ``1 < p < 2``: ``(p-1) |d-c|^2 (1 + |c|^2 + |d|^2)^((p-2)/2)``.
    Both reduce to ``|c - d|^2`` at ``p = 2``.
    """
    c, d = _pair(c, d)
    if p >= 2:
        w = vector_signed_power(d, p / 2) - vector_signed_power(c, p / 2)
        return (4.0 / p**2) * np.sum(w * w, axis=-1)
    diff2 = np.sum((d - c) ** 2, axis=-1)
    weight = 1.0 + np.sum(c * c, axis=-1) + np.sum(d * d, axis=-1)
    return (p - 1) * diff2 * weight ** ((p - 2) / 2)


def odd_power_gap(u, v, beta: float):
    """``|u|^(beta-1) u - |v|^(beta-1) v``; has the sign of ``u - v``."""
    return signed_power(u, beta) - signed_power(v, beta)


@dataclass(frozen=True)
class GronwallSample:
    times: np.ndarray
    f_values: np.ndarray
    g_values: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        f = np.asarray(self.f_values, dtype=float)
        g = np.broadcast_to(np.asarray(self.g_values, dtype=float), t.shape)
        if t.ndim != 1 or f.shape != t.shape:
            raise InvalidArgument("times and f_values must be 1-d of equal length")
        if np.any(np.diff(t) <= 0):
            raise InvalidArgument("times must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "f_values", f)
        object.__setattr__(self, "g_values", np.array(g))


@dataclass(frozen=True)
class GronwallReport:
    premise_ok: bool
    conclusion_ok: bool
    max_ratio: float
    final_ratio: float
    worst_premise_excess: float
    worst_conclusion_excess: float

    def as_dict(self) -> dict:
        return {
            "premise_ok": self.premise_ok,
            "conclusion_ok": self.conclusion_ok,
            "max_ratio": self.max_ratio,
            "final_ratio": self.final_ratio,
            "worst_premise_excess": self.worst_premise_excess,
            "worst_conclusion_excess": self.worst_conclusion_excess,
        }


def gronwall_check(s: GronwallSample, tol: float = 1e-12) -> GronwallReport:
    """Check ``f' <= g f`` and ``f(t) <= f(0) exp(int_0^t g)`` on samples.

    The premise uses forward differences against ``g_k max(f_k, f_k+1)``;
    the integral of ``g`` is the cumulative trapezoid rule.  Ratios use
    ``0/0 := 0``.
    """
    t, f, g = s.times, s.f_values, s.g_values
    dt = np.diff(t)
    slope = np.diff(f) / dt
    allowed = g[:-1] * np.maximum(f[:-1], f[1:])
    premise_excess = slope - allowed
    G = np.concatenate([[0.0], np.cumsum(0.5 * (g[1:] + g[:-1]) * dt)])
    bound = f[0] * np.exp(G)
    conclusion_excess = f - bound
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(bound != 0, f / bound, np.where(f == 0, 0.0, np.inf))
    return GronwallReport(
        premise_ok=bool(np.all(premise_excess <= tol)) if len(dt) else True,
        conclusion_ok=bool(np.all(conclusion_excess <= tol)),
        max_ratio=float(np.max(ratio)),
        final_ratio=float(ratio[-1]),
        worst_premise_excess=float(np.max(premise_excess)) if len(dt) else 0.0,
        worst_conclusion_excess=float(np.max(conclusion_excess)),
    )
