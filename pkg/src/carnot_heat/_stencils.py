"""Ghost-layer padding and difference kernels on arrays whose last axes are spatial.

Ghost policies:

``"odd"``
    ghost ``-k`` is ``-u[k-1]``: the linear interpolant vanishes on the cell
    face, i.e. a homogeneous Dirichlet condition for the compact second-order
    stencil (keeps that stencil monotone).
``"dirichlet"``
    polynomial extrapolation through the zero boundary value at the face and
    the first four nodes; used by the fourth-order first-derivative stencils.
``"extrapolate"``
    polynomial extrapolation through the first five nodes, for functions
    with unknown (nonzero) boundary values.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

MAX_DEGREE = 4


def lagrange_weights(sample_positions, target) -> np.ndarray:
    s = np.asarray(sample_positions, dtype=float)
    w = np.ones(len(s))
    for i in range(len(s)):
        for j in range(len(s)):
            if i != j:
                w[i] *= (target - s[j]) / (s[i] - s[j])
    return w


@lru_cache(maxsize=None)
def _ghost_weights(mode: str, n: int, width: int) -> tuple[np.ndarray, ...]:
    """Weights on the first nodes for ghosts at positions -1, -2, ..., -width."""
    if mode == "extrapolate":
        deg = min(MAX_DEGREE, n - 1)
        pos = np.arange(deg + 1)
        return tuple(lagrange_weights(pos, -k) for k in range(1, width + 1))
    if mode == "dirichlet":
        m = min(MAX_DEGREE, n)
        pos = np.concatenate([[-0.5], np.arange(m)])
        # drop the weight on the zero boundary value
        return tuple(lagrange_weights(pos, -k)[1:] for k in range(1, width + 1))
    raise ValueError(f"unknown ghost mode {mode!r}")


def pad_axis(a: np.ndarray, axis: int, width: int, mode: str) -> np.ndarray:
    a = np.moveaxis(a, axis, 0)
    n = a.shape[0]
    if mode == "odd":
        if width > n:
            raise ValueError("odd ghost layer wider than the grid")
        lo = -a[:width][::-1]
        hi = -a[n - width :][::-1]
    else:
        weights = _ghost_weights(mode, n, width)
        k = len(weights[0])
        lo = np.stack([np.tensordot(w, a[:k], axes=1) for w in weights[::-1]])
        rev = a[::-1]
        hi = np.stack([np.tensordot(w, rev[:k], axes=1) for w in weights])
    out = np.concatenate([lo, a, hi])
    return np.moveaxis(out, 0, axis)


def pad(a: np.ndarray, ndim: int, width: int, mode: str) -> np.ndarray:
    """Pad the last ``ndim`` axes; corners are filled by successive padding."""
    for k in range(ndim):
        a = pad_axis(a, a.ndim - ndim + k, width, mode)
    return a


def crop(a: np.ndarray, ndim: int, width: int, skip: int | None = None) -> np.ndarray:
    """Remove ``width`` entries per side from each of the last ``ndim`` axes except ``skip``."""
    if width == 0:
        return a
    idx = [slice(None)] * a.ndim
    for k in range(ndim):
        if k != skip:
            idx[a.ndim - ndim + k] = slice(width, -width)
    return a[tuple(idx)]


def shift(a: np.ndarray, axis: int, start: int, stop: int | None) -> np.ndarray:
    idx = [slice(None)] * a.ndim
    idx[axis] = slice(start, stop)
    return a[tuple(idx)]


def d4(a: np.ndarray, axis: int, h: float) -> np.ndarray:
    """Fourth-order centred first difference; shortens ``axis`` by 4."""
    return (
        -shift(a, axis, 4, None) + 8.0 * shift(a, axis, 3, -1) - 8.0 * shift(a, axis, 1, -3) + shift(a, axis, 0, -4)
    ) / (12.0 * h)


def d2(a: np.ndarray, axis: int, h: float) -> np.ndarray:
    """Second-order centred first difference; shortens ``axis`` by 2."""
    return (shift(a, axis, 2, None) - shift(a, axis, 0, -2)) / (2.0 * h)
