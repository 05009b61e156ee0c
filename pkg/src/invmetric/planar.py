"""Hyperbolic densities, distances and conformal charts of the model planar domains.

Every number leaving this module is tagged with a normalization: ``hyp`` is
the curvature -1 density (2/(1-|z|^2) on the disk) and ``kob`` is the
Kobayashi normalization, exactly half of it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import maps
from .domains import PlanarDomain
from .errors import DomainError

__all__ = [
    "DensityValue",
    "Norm",
    "ahlfors_schwarz_slack",
    "chart_from_disk",
    "chart_to_disk",
    "covering_from_disk",
    "density",
    "hyp_density",
    "hyp_distance",
    "kob_density",
    "pseudo_hyperbolic",
]


class Norm(str, Enum):
    HYP = "hyp"
    KOB = "kob"

    @classmethod
    def parse(cls, value) -> "Norm":
        try:
            return cls(value.value if isinstance(value, Norm) else str(value).lower())
        except ValueError:
            raise DomainError(f"unknown normalization {value!r} (use hyp or kob)") from None


@dataclass(frozen=True)
class DensityValue:
    at: complex
    hyp: float
    kob: float


def _inside(dom: PlanarDomain, z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if not np.all(dom.contains(z)):
        raise DomainError(f"point outside domain {dom}")
    return z


def hyp_density(dom: PlanarDomain, z) -> np.ndarray:
    """Curvature -1 density of ``dom`` at ``z`` (vectorized)."""
    z = _inside(dom, z)
    if dom.kind == "disk":
        return 2.0 / (1.0 - np.abs(z) ** 2)
    if dom.kind == "halfplane":
        return 1.0 / z.real
    if dom.kind == "strip":
        if not dom.bounded_strip:
            return 1.0 / (z.real - dom.a)
        # affine chart onto S(-1, 1), then (pi/2)/cos(pi u/2) scaled by the chart's derivative
        scale = 2.0 / (dom.b - dom.a)
        u = (2.0 * z.real - dom.a - dom.b) / (dom.b - dom.a)
        return (math.pi / 2) / np.cos(math.pi * u / 2) * scale
    r = np.abs(z)
    return -1.0 / (r * np.log(r))


def kob_density(dom: PlanarDomain, z) -> np.ndarray:
    return 0.5 * hyp_density(dom, z)


def density(dom: PlanarDomain, z: complex) -> DensityValue:
    hyp = float(hyp_density(dom, complex(z)))
    return DensityValue(complex(z), hyp, hyp / 2)


def _delta_pair(dom: PlanarDomain, z1, z2):
    """Pseudo-hyperbolic distance delta and 1 - delta^2 computed without cancellation."""
    if not dom.simply_connected:
        raise DomainError("pseudo-hyperbolic distance needs a simply connected domain; "
                          "the punctured disk is not simply connected")
    z1, z2 = _inside(dom, z1), _inside(dom, z2)
    if dom.kind == "halfplane" or (dom.kind == "strip" and not dom.bounded_strip):
        shift = 0.0 if dom.kind == "halfplane" else dom.a
        w1, w2 = z1 - shift, z2 - shift
        den = np.abs(w2 + np.conj(w1))
        delta = np.abs(w2 - w1) / den
        one_minus = 4.0 * w1.real * w2.real / den ** 2
        return delta, one_minus
    if dom.kind == "strip":
        chart = chart_to_disk(dom)
        z1, z2 = chart(z1, check=False), chart(z2, check=False)
    den = np.abs(1.0 - np.conj(z1) * z2)
    delta = np.abs(z2 - z1) / den
    one_minus = (1.0 - np.abs(z1) ** 2) * (1.0 - np.abs(z2) ** 2) / den ** 2
    return delta, one_minus


def pseudo_hyperbolic(dom: PlanarDomain, z1, z2):
    """delta(z1, z2) in [0, 1); computed in the disk chart for strips."""
    delta, _ = _delta_pair(dom, z1, z2)
    return float(delta) if np.ndim(delta) == 0 else delta


def _artanh_stable(delta, one_minus_sq):
    # artanh(d) = log(1 + d) - log(1 - d^2)/2
    return np.log1p(delta) - 0.5 * np.log(one_minus_sq)


def hyp_distance(dom: PlanarDomain, z1, z2, norm="kob"):
    """Hyperbolic distance: ``kob`` gives artanh(delta), ``hyp`` twice that."""
    norm = Norm.parse(norm)
    delta, one_minus = _delta_pair(dom, z1, z2)
    d = _artanh_stable(delta, one_minus)
    d = np.where(delta == 0, 0.0, d)
    if norm is Norm.HYP:
        d = 2.0 * d
    return float(d) if np.ndim(d) == 0 else d


_DISK = PlanarDomain.disk()


def chart_to_disk(dom: PlanarDomain) -> maps.HoloMap:
    """Conformal bijection of a simply connected model domain onto the disk."""
    if not dom.simply_connected:
        raise DomainError("the punctured disk has no conformal chart onto the disk")
    if dom.kind == "disk":
        m = maps.identity(1)
    elif dom.kind == "halfplane":
        m = maps.elementwise("inverse_cayley")
    elif dom.bounded_strip:
        # w -> tan(pi t/4) with t = (2w - a - b)/(b - a)
        k = math.pi / (2.0 * (dom.b - dom.a))
        m = maps.compose(maps.elementwise("tan"), maps.affine([[k]], [-k * (dom.a + dom.b) / 2.0]))
    else:
        # Strip(a, inf) goes through the half-plane
        m = maps.compose(maps.elementwise("inverse_cayley"), maps.affine([[1.0]], [-dom.a]))
    return maps.HoloMap(m.expr, dom, _DISK, f"chart:{dom}")


def chart_from_disk(dom: PlanarDomain) -> maps.HoloMap:
    """Inverse of :func:`chart_to_disk`; for the punctured disk, the universal covering."""
    if not dom.simply_connected:
        return covering_from_disk()
    if dom.kind == "disk":
        m = maps.identity(1)
    elif dom.kind == "halfplane":
        m = maps.elementwise("cayley")
    elif dom.bounded_strip:
        half = (dom.b - dom.a) / 2.0
        m = maps.compose(
            maps.affine([[half * 4.0 / math.pi]], [(dom.a + dom.b) / 2.0]),
            maps.elementwise("arctan"),
        )
    else:
        m = maps.compose(maps.affine([[1.0]], [dom.a]), maps.elementwise("cayley"))
    return maps.HoloMap(m.expr, _DISK, dom, f"chart-inverse:{dom}")


def covering_from_disk(scale: float = 1.0) -> maps.HoloMap:
    """z -> exp(-scale * (1 + z)/(1 - z)), a holomorphic covering of the punctured disk."""
    if scale <= 0:
        raise DomainError("covering scale must be positive")
    m = maps.compose(maps.elementwise("exp"), maps.affine([[-scale]]), maps.elementwise("cayley"))
    return maps.HoloMap(m.expr, _DISK, PlanarDomain.punctured_disk(), "punctured-covering")


def ahlfors_schwarz_slack(F: maps.HoloMap, z):
    """2/(1 - |z|^2) - Hyp(F(z)) |F'(z)| for F from the disk into ``F.target``.

    Nonnegative for every holomorphic F; zero for charts and coverings.
    """
    dom = F.target
    if not isinstance(dom, PlanarDomain):
        raise DomainError("ahlfors_schwarz_slack needs a map with a planar target")
    z = _inside(_DISK, z)
    w = F(z)
    if not np.all(dom.contains(w)):
        raise DomainError(f"F(z) lies outside the target {dom}")
    s = 2.0 / (1.0 - np.abs(z) ** 2) - hyp_density(dom, w) * np.abs(F.deriv(z))
    return float(s) if np.ndim(s) == 0 else s
