"""Unit-ball geometry: Mobius automorphisms, distortion, Kobayashi norm and distance."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import as_vector, decompose_along
from .domains import Ball
from .errors import DimensionError, DomainError
from .maps import HoloMap, _ball_mobius_jac, _ball_mobius_value
from .planar import Norm, _artanh_stable

__all__ = [
    "FinslerValue",
    "ball_finsler",
    "distortion_M",
    "distortion_batch",
    "gradient_D",
    "invariant_gradient",
    "invariant_gradient_batch",
    "kob_dist_ball",
    "kob_norm_ball",
    "mobius_apply",
    "mobius_derivative",
    "s_factor",
]


@dataclass(frozen=True)
class FinslerValue:
    """A Kobayashi-Finsler norm evaluation at ``base`` in direction ``dir``."""

    base: np.ndarray
    dir: np.ndarray
    value: float
    normalization: str = "kob"

    def __float__(self) -> float:
        return self.value


def _in_ball(p, what="point") -> np.ndarray:
    p = np.asarray(p, dtype=complex)
    if np.any(np.linalg.norm(p, axis=-1) >= 1.0):
        raise DomainError(f"{what} outside the unit ball")
    return p


def s_factor(p) -> np.ndarray:
    """s_p = sqrt(1 - |p|^2)."""
    p = _in_ball(p)
    s = np.sqrt(1.0 - np.sum(np.abs(p) ** 2, axis=-1))
    return float(s) if np.ndim(s) == 0 else s


def mobius_apply(a, z) -> np.ndarray:
    """phi_a(z) = (a - P_a z - s_a Q_a z)/(1 - <z, a>); phi_0 = -identity. Broadcasts over a and z."""
    a, z = _in_ball(np.atleast_1d(a), "parameter"), _in_ball(z)
    if z.shape[-1] != a.shape[-1]:
        raise DimensionError("parameter and point dimensions differ")
    return _ball_mobius_value(a, z)


def mobius_derivative(a, z) -> np.ndarray:
    """Exact complex Jacobian of phi_a at z (quotient rule on the closed form)."""
    a, z = _in_ball(np.atleast_1d(a), "parameter"), _in_ball(z)
    if z.shape[-1] != a.shape[-1]:
        raise DimensionError("parameter and point dimensions differ")
    return _ball_mobius_jac(a, z)


def distortion_M(p, u) -> float:
    """Euclidean stretch |d(phi_p)_p u| / |u| via the angle between u and [p]."""
    p, u = _in_ball(as_vector(p)), as_vector(u)
    if p.shape != u.shape:
        raise DimensionError("point and tangent dimensions differ")
    if not np.any(u):
        raise DomainError("zero tangent")
    s2 = 1.0 - float(np.vdot(p, p).real)
    if s2 == 1.0:
        return 1.0
    alpha = decompose_along(u, p).alpha
    return float(np.sqrt(np.cos(alpha) ** 2 / s2 ** 2 + np.sin(alpha) ** 2 / s2))


def distortion_batch(p, u) -> np.ndarray:
    """Vectorized M(p, u) over arrays of shape (..., n); M is 0/0 -> nan for u = 0."""
    p, u = np.asarray(p, dtype=complex), np.asarray(u, dtype=complex)
    s2 = 1.0 - np.sum(np.abs(p) ** 2, axis=-1)
    uu = np.sum(np.abs(u) ** 2, axis=-1)
    up = np.abs(np.sum(u * np.conj(p), axis=-1)) ** 2
    # cos^2(alpha) |u|^2 = |<u,p>|^2/|p|^2, sin^2 = 1 - cos^2
    pp = 1.0 - s2
    with np.errstate(invalid="ignore", divide="ignore"):
        cos2 = np.where(pp > 0, up / np.where(pp > 0, pp, 1.0) / uu, 0.0)
        return np.sqrt(cos2 / s2 ** 2 + (1.0 - cos2) / s2)


def ball_finsler(p, u) -> np.ndarray:
    """Vectorized Kobayashi-Finsler norm M(p, u)|u| of the ball.

    Equals sqrt(|u|^2/s^2 + |<u,p>|^2/s^4), which is regular at u = 0.
    """
    p, u = np.asarray(p, dtype=complex), np.asarray(u, dtype=complex)
    s2 = 1.0 - np.sum(np.abs(p) ** 2, axis=-1)
    uu = np.sum(np.abs(u) ** 2, axis=-1)
    up = np.abs(np.sum(u * np.conj(p), axis=-1)) ** 2
    return np.sqrt(uu / s2 + up / s2 ** 2)


def kob_norm_ball(p, u) -> FinslerValue:
    p, u = _in_ball(as_vector(p)), as_vector(u)
    if p.shape != u.shape:
        raise DimensionError("point and tangent dimensions differ")
    if not np.any(u):
        return FinslerValue(p, u, 0.0)
    return FinslerValue(p, u, distortion_M(p, u) * float(np.linalg.norm(u)))


def kob_dist_ball(a, b, norm="kob"):
    """artanh |phi_a(b)| (``kob``) or twice that (``hyp``); vectorized over (..., n)."""
    norm = Norm.parse(norm)
    a, b = _in_ball(a), _in_ball(b)
    if a.shape[-1] != b.shape[-1]:
        raise DimensionError("points live in balls of different dimension")
    delta = np.linalg.norm(_ball_mobius_value(a, b), axis=-1)
    # 1 - |phi_a(b)|^2 = (1 - |a|^2)(1 - |b|^2)/|1 - <b, a>|^2
    ab = np.sum(b * np.conj(a), axis=-1)
    one_minus = (1 - np.sum(np.abs(a) ** 2, -1)) * (1 - np.sum(np.abs(b) ** 2, -1)) / np.abs(1 - ab) ** 2
    same = np.all(a == b, axis=-1)
    d = np.where(same | (delta == 0), 0.0, _artanh_stable(delta, one_minus))
    if norm is Norm.HYP:
        d = 2.0 * d
    return float(d) if np.ndim(d) == 0 else d


def _scalar_map(f: HoloMap) -> None:
    if f.dim_out != 1:
        raise DimensionError("expected a scalar-valued map")


def gradient_D(f: HoloMap, z) -> np.ndarray:
    """Vector of complex partials (D_1 f, ..., D_n f)(z)."""
    _scalar_map(f)
    z = _in_ball(as_vector(z))
    return np.atleast_1d(f.jacobian(z)[0])


def invariant_gradient_batch(f: HoloMap, z) -> np.ndarray:
    """D(f o phi_z)(0) = Df(z) (d phi_z)_0 for z of shape (..., n)."""
    _scalar_map(f)
    z = _in_ball(z)
    grad = f.jacobian(z)[..., 0, :]
    dphi0 = _ball_mobius_jac(z, np.zeros_like(z))
    return np.einsum("...j,...jk->...k", grad, dphi0)


def invariant_gradient(f: HoloMap, z) -> np.ndarray:
    return invariant_gradient_batch(f, as_vector(z))
