"""Kobayashi norms and distances on polydisks and products of planar domains.

On a product the Kobayashi-Finsler norm is the largest factor norm and the
distance is the largest factor distance. Factor densities are taken in the
Kobayashi normalization (half the curvature -1 density); ``normalization="hyp"``
reproduces the literal Hyp-density max formula for comparison only.
"""
from __future__ import annotations

import numpy as np

from .ball import FinslerValue
from .core import as_vector
from .domains import PlanarDomain, ProductDomain, polydisk
from .errors import DimensionError, DomainError
from .planar import Norm, hyp_density, hyp_distance

__all__ = [
    "finsler_polydisk",
    "finsler_product",
    "kob_dist_polydisk",
    "kob_dist_product",
    "polydisk_image_norm",
    "product_finsler",
    "real_projection_contract",
    "strip_square",
]


def strip_square(a: float = -1.0, b: float = 1.0) -> ProductDomain:
    s = PlanarDomain.strip(a, b)
    return ProductDomain((s, s))


def _coords(omega: ProductDomain, z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if z.shape[-1] != omega.dim:
        raise DimensionError(f"expected points of C^{omega.dim}, got shape {z.shape}")
    return z


def kob_dist_product(omega: ProductDomain, z, w, norm="kob"):
    """max_k dist_{D_k}(z_k, w_k) for simply connected factors."""
    z, w = _coords(omega, z), _coords(omega, w)
    parts = [hyp_distance(f, z[..., k], w[..., k], norm) for k, f in enumerate(omega.factors)]
    d = np.max(np.stack(np.broadcast_arrays(*parts), axis=-1), axis=-1)
    return float(d) if np.ndim(d) == 0 else d


def kob_dist_polydisk(z, w, norm="kob"):
    z = np.asarray(z, dtype=complex)
    return kob_dist_product(polydisk(z.shape[-1]), z, w, norm)


def product_finsler(omega: ProductDomain, p, u, normalization="kob") -> np.ndarray:
    """Vectorized max_k rho_k(p_k) |u_k| with rho the kob (or literal hyp) density.

    Accepts non-simply-connected factors; used by the path oracle.
    """
    p, u = _coords(omega, p), _coords(omega, u)
    scale = 1.0 if Norm.parse(normalization) is Norm.HYP else 0.5
    vals = [scale * hyp_density(f, p[..., k]) * np.abs(u[..., k]) for k, f in enumerate(omega.factors)]
    return np.max(np.stack(np.broadcast_arrays(*vals), axis=-1), axis=-1)


def finsler_product(omega: ProductDomain, p, u, normalization="kob") -> FinslerValue:
    """Kobayashi-Finsler norm of a product of simply connected planar domains."""
    for f in omega.factors:
        if not f.simply_connected:
            raise DomainError("finsler_product needs simply connected factors; "
                              "use the path oracle for punctured-disk factors")
    p, u = as_vector(p), as_vector(u)
    omega.require(_coords(omega, p))
    if u.shape != p.shape:
        raise DimensionError("point and tangent dimensions differ")
    norm = Norm.parse(normalization)
    return FinslerValue(p, u, float(product_finsler(omega, p, u, norm)), norm.value)


def finsler_polydisk(p, u) -> FinslerValue:
    """max(|u_1|/s_c^2, |u_2|/s_d^2) at p = (c, d); any number of coordinates."""
    p, u = as_vector(p), as_vector(u)
    return finsler_product(polydisk(p.size), p, u)


def polydisk_image_norm(p, u) -> float:
    """Euclidean norm of (phi_c, phi_d)'(p) u: sqrt(sum |u_k|^2 / s_k^4).

    This bounds but is not the Finsler norm; the Finsler norm is the max form.
    """
    p, u = as_vector(p), as_vector(u)
    s2 = 1.0 - np.abs(p) ** 2
    if np.any(s2 <= 0):
        raise DomainError("point outside the polydisk")
    return float(np.sqrt(np.sum(np.abs(u) ** 2 / s2 ** 2)))


def real_projection_contract(p, q, a: float = -1.0, b: float = 1.0) -> tuple:
    """(dist(Re p, Re q), dist(p, q)) in the strip square S(a, b)^2, Kobayashi normalization.

    The first never exceeds the second: the strip density depends on Re w only.
    """
    omega = strip_square(a, b)
    p, q = _coords(omega, p), _coords(omega, q)
    omega.require(p)
    omega.require(q)
    d_re = kob_dist_product(omega, p.real.astype(complex), q.real.astype(complex))
    d_full = kob_dist_product(omega, p, q)
    return d_re, d_full
