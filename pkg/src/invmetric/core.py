"""Complex linear algebra substrate.

Vectors of C^n are plain 1-D complex numpy arrays. Matrices act on column
vectors, so a map C^n -> C^m has an (m, n) Jacobian.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg

from .errors import DimensionError, DomainError

__all__ = [
    "AngleDecomposition",
    "as_vector",
    "decompose_along",
    "fd_jacobian",
    "hermitian_inner",
    "norm",
    "operator_norm",
    "operator_norm_with_direction",
]


def as_vector(z) -> np.ndarray:
    """Coerce a scalar or sequence to a 1-D complex array."""
    v = np.atleast_1d(np.asarray(z, dtype=complex))
    if v.ndim != 1:
        raise DimensionError(f"expected a vector, got array of shape {v.shape}")
    if v.size == 0:
        raise DimensionError("vector must have at least one entry")
    return v


def hermitian_inner(z, w) -> complex:
    """Return <z, w> = sum_k z_k * conj(w_k)."""
    z, w = as_vector(z), as_vector(w)
    if z.shape != w.shape:
        raise DimensionError(f"dimension mismatch: {z.size} vs {w.size}")
    return complex(np.sum(z * np.conj(w)))


def norm(z) -> float:
    # BLAS nrm2 rescales, so tiny or huge entries neither underflow nor overflow
    return float(scipy.linalg.norm(as_vector(z)))


@dataclass(frozen=True)
class AngleDecomposition:
    """Split of a vector along a complex line and its orthogonal complement."""

    parallel: np.ndarray
    orthogonal: np.ndarray
    alpha: float


def decompose_along(u, p) -> AngleDecomposition:
    """Project ``u`` onto the complex line [p] with the Hermitian projection.

    ``alpha`` is the angle between ``u`` and the line, in [0, pi/2].
    """
    u, p = as_vector(u), as_vector(p)
    if u.shape != p.shape:
        raise DimensionError(f"dimension mismatch: {u.size} vs {p.size}")
    pp = np.vdot(p, p).real
    if pp == 0.0:
        raise DomainError("undefined complex line: p = 0")
    parallel = (np.vdot(p, u) / pp) * p
    orthogonal = u - parallel
    alpha = math.atan2(np.linalg.norm(orthogonal), np.linalg.norm(parallel))
    return AngleDecomposition(parallel, orthogonal, alpha)


def _check_finite(J: np.ndarray) -> None:
    if not np.all(np.isfinite(J)):
        raise DomainError("matrix has non-finite entries")


def operator_norm_with_direction(J, rtol: float = 1e-10, max_iter: int = 10_000):
    """Largest singular value of ``J`` and a unit vector attaining it.

    Power iteration on J^* J. Accepts a batch of matrices with shape
    (..., m, n); returns arrays of shape (...) and (..., n).
    """
    J = np.asarray(J, dtype=complex)
    if J.ndim < 2:
        raise DimensionError("operator_norm needs a matrix")
    _check_finite(J)
    G = np.conj(np.swapaxes(J, -1, -2)) @ J
    n = J.shape[-1]
    batch = J.shape[:-2]

    best_val = np.zeros(batch)
    best_vec = np.zeros(batch + (n,), dtype=complex)
    # Several deterministic starts so a start orthogonal to the top
    # eigenvector cannot stall the iteration.
    starts = [np.ones(n, dtype=complex) + 0.1j * np.arange(n)] + list(np.eye(n, dtype=complex))
    for start in starts:
        v = np.broadcast_to(start / np.linalg.norm(start), batch + (n,)).copy()
        lam = np.zeros(batch)
        for _ in range(max_iter):
            w = (G @ v[..., None])[..., 0]
            wn = np.linalg.norm(w, axis=-1)
            new_lam = np.real(np.sum(np.conj(v) * w, axis=-1))
            safe = wn > 0
            v = np.where(safe[..., None], w / np.where(safe, wn, 1.0)[..., None], v)
            done = np.abs(new_lam - lam) <= rtol * np.maximum(np.abs(new_lam), 1e-300)
            lam = new_lam
            if np.all(done | ~safe):
                break
        w = (J @ v[..., None])[..., 0]
        val = np.linalg.norm(w, axis=-1)
        take = val > best_val
        best_val = np.where(take, val, best_val)
        best_vec = np.where(take[..., None], v, best_vec)
    if not batch:
        return float(best_val), best_vec
    return best_val, best_vec


def operator_norm(J, rtol: float = 1e-10, max_iter: int = 10_000):
    """Operator norm (C^n, Euclidean) -> (C^m, Euclidean) of ``J``."""
    return operator_norm_with_direction(J, rtol, max_iter)[0]


def fd_jacobian(f: Callable, a, h: float | None = None) -> np.ndarray:
    """Central-difference complex Jacobian of a holomorphic map at ``a``.

    ``f`` takes a batch of points with shape (k, n) and returns (k, m); any
    :class:`~invmetric.maps.HoloMap` works through its ``batch`` method.
    Steps are taken along the real coordinate axes, which for holomorphic
    maps yields the complex partial derivatives.
    """
    a = as_vector(a)
    n = a.size
    if h is None:
        h = 1e-6 * max(1.0, float(np.linalg.norm(a)))
    steps = h * np.eye(n, dtype=complex)
    pts = np.concatenate([a + steps, a - steps])
    batch = getattr(f, "batch", f)
    vals = np.asarray(batch(pts), dtype=complex).reshape(2 * n, -1)
    return ((vals[:n] - vals[n:]) / (2 * h)).T
