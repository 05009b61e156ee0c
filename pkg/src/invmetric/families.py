"""Deterministic samplers of holomorphic/harmonic map families and of domain points.

Member ``j`` of a family depends only on (seed, kind, j), so families can be
generated in any order or in parallel. Members 0 and 1 are fixed witnesses
(identity-like maps and automorphisms or charts); later members mix
automorphisms, strict contractions and near-boundary stress cases.
"""
from __future__ import annotations

import math
import zlib

import numpy as np
from scipy.stats import norm as _normal
from scipy.stats import qmc

from . import maps
from .domains import Ball, Interval, PlanarDomain, ProductDomain, polydisk
from .errors import DomainError
from .planar import chart_from_disk, covering_from_disk

__all__ = [
    "FAMILY_KINDS",
    "member_rng",
    "quasi_points",
    "random_points",
    "sample_family",
    "sample_member",
]

MARGIN = 1e-3
RMAX = 1.0 - MARGIN

FAMILY_KINDS = (
    "disk-to-disk",
    "disk-to-planar",
    "ball-to-ball",
    "ball-to-planar",
    "ball-to-punctured-disk",
    "ball2-to-product",
    "polydisk-to-polydisk",
    "polydisk-to-ball",
    "harmonic-disk-to-interval",
    "pluriharmonic-ball2-to-interval-sq",
)

DISK = PlanarDomain.disk()


def _key(text: str) -> int:
    return zlib.crc32(text.encode("utf-8"))


def member_rng(seed: int, kind: str, index: int) -> np.random.Generator:
    return np.random.default_rng([int(seed) & 0xFFFFFFFF, _key(kind), int(index)])


# -- random parameters --------------------------------------------------------

def _rand_disk(rng, rmax=RMAX) -> complex:
    r = rmax * math.sqrt(rng.random())
    return complex(r * np.exp(2j * math.pi * rng.random()))


def _rand_ball(rng, n, rmax=RMAX) -> np.ndarray:
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v) * rmax * rng.random() ** (1.0 / (2 * n))


def _rand_unit(rng, n) -> np.ndarray:
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v)


def _rand_unitary(rng, n) -> np.ndarray:
    G = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    Q, R = np.linalg.qr(G)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def _rand_contraction(rng, m, n, rmin=0.2) -> np.ndarray:
    G = rng.normal(size=(m, n)) + 1j * rng.normal(size=(m, n))
    return G / np.linalg.norm(G, 2) * rng.uniform(rmin, 1.0)


def _covering_scale(rng) -> float:
    # exp(-c A_0) underflows to 0 for c Re A_0 > ~700; Re A_0 <= 2/margin on sampled points
    return float(rng.uniform(0.05, 0.3))


def _isometric_embedding(rng, m, n) -> np.ndarray:
    """m x n matrix with orthonormal columns (n <= m) or rows (n > m)."""
    if n <= m:
        return _rand_unitary(rng, m)[:, :n]
    return _rand_unitary(rng, n)[:m, :]


# -- disk self-maps -----------------------------------------------------------

def _disk_self_map(rng, index: int) -> maps.HoloMap:
    if index == 0:
        return maps.identity(1, DISK).with_label("identity")
    if index == 1:
        return maps.disk_mobius(_rand_disk(rng), rng.uniform(0, 2 * math.pi)).with_label("disk-automorphism")
    kind = rng.choice(["automorphism", "blaschke", "squeeze", "power", "near-boundary"])
    if kind == "automorphism":
        return maps.disk_mobius(_rand_disk(rng), rng.uniform(0, 2 * math.pi)).with_label("disk-automorphism")
    if kind == "near-boundary":
        a = RMAX * np.exp(2j * math.pi * rng.random())
        return maps.disk_mobius(a, rng.uniform(0, 2 * math.pi)).with_label("near-boundary-automorphism")
    if kind == "blaschke":
        zeros = [_rand_disk(rng) for _ in range(int(rng.integers(2, 4)))]
        return maps.blaschke(zeros, rng.uniform(0, 2 * math.pi)).with_label("blaschke-product")
    if kind == "squeeze":
        r = rng.uniform(0.1, RMAX)
        t = _rand_disk(rng, (1.0 - r) * RMAX)
        inner = maps.disk_mobius(_rand_disk(rng), rng.uniform(0, 2 * math.pi))
        m = maps.compose(maps.affine([[r]], [t]), inner)
        return maps.HoloMap(m.expr, DISK, DISK, "squeeze")
    k = int(rng.integers(2, 5))
    m = maps.compose(maps.disk_mobius(_rand_disk(rng)), maps.elementwise("power", k=k),
                     maps.disk_mobius(_rand_disk(rng)))
    return maps.HoloMap(m.expr, DISK, DISK, f"power-{k}")


def _center_disk(f: maps.HoloMap) -> maps.HoloMap:
    """Post-compose with T_{f(0)} so that the result fixes 0."""
    b = complex(f(0.0))
    if b == 0:
        return f
    m = maps.compose(maps.disk_mobius(b), f)
    return maps.HoloMap(m.expr, f.source, f.target, f.label)


# -- ball maps ----------------------------------------------------------------

def _ball_map(rng, index: int, n: int, m: int) -> maps.HoloMap:
    src, dst = Ball(n), (Ball(m) if m > 1 else DISK)

    def wrap(h, label):
        return maps.HoloMap(h.expr, src, dst, label)

    if index == 0:
        if n == m:
            return wrap(maps.identity(n), "identity")
        E = np.eye(m, n)
        return wrap(maps.affine(E), "embedding" if n < m else "coordinate-projection")
    if index == 1 or rng.random() < 0.25:
        # automorphism of B_n followed by an isometric embedding / automorphism of B_m
        h = maps.compose(maps.ball_mobius(_rand_ball(rng, n)), maps.affine(_rand_unitary(rng, n)))
        if n != m:
            h = maps.compose(maps.affine(_isometric_embedding(rng, m, n)), h)
        if m > 1:
            h = maps.compose(maps.ball_mobius(_rand_ball(rng, m)), h)
        elif n == 1:
            h = maps.compose(maps.disk_mobius(_rand_disk(rng)), h)
        label = "ball-automorphism" if n == m else ("geodesic-embedding" if n < m else "projection-composite")
        return wrap(h, label)
    kind = rng.choice(["contraction", "tuple", "powers", "scalar"])
    if kind == "contraction":
        L = _rand_contraction(rng, m, n)
        h = maps.compose(maps.affine(L), maps.ball_mobius(_rand_ball(rng, n)))
        if m > 1:
            h = maps.compose(maps.ball_mobius(_rand_ball(rng, m)), h)
        return wrap(h, "linear-contraction")
    if kind == "tuple":
        parts = []
        for _ in range(m):
            g = _disk_self_map(rng, 2)
            c = _rand_unit(rng, n) * rng.uniform(0.3, 1.0)
            parts.append(maps.compose(g, maps.inner(c)))
        h = maps.compose(maps.affine(np.eye(m) / math.sqrt(m)), maps.tuple_map(*parts))
        return wrap(h, "scaled-tuple")
    if kind == "powers":
        ks = rng.integers(1, 4, size=n)
        parts = [maps.compose(maps.elementwise("power", k=int(k)), maps.project(j, n)) for j, k in enumerate(ks)]
        h = maps.compose(maps.tuple_map(*parts), maps.ball_mobius(_rand_ball(rng, n)))
        h = maps.compose(maps.affine(_rand_contraction(rng, m, n, rmin=0.5)), h)
        return wrap(h, "coordinate-powers")
    g = _disk_self_map(rng, 2)
    h = maps.compose(g, maps.inner(_rand_unit(rng, n) * rng.uniform(0.3, 1.0)),
                     maps.ball_mobius(_rand_ball(rng, n)))
    if m > 1:
        h = maps.compose(maps.affine(_rand_unit(rng, m)[:, None]), h)
    return wrap(h, "through-disk")


def _center_ball(f: maps.HoloMap) -> maps.HoloMap:
    """Post-compose with phi_{f(0)} so that the result fixes 0."""
    b = np.atleast_1d(f(np.zeros(f.dim_in) if f.dim_in > 1 else 0.0))
    if not np.any(b):
        return f
    outer = maps.ball_mobius(b) if b.size > 1 else maps.disk_mobius(complex(b[0]))
    m = maps.compose(outer, f)
    return maps.HoloMap(m.expr, f.source, f.target, f.label)


def _ball_to_disk(rng, index: int, n: int) -> maps.HoloMap:
    f = _ball_map(rng, index, n, 1)
    if f.dim_out != 1:
        raise AssertionError("ball-to-disk map must be scalar")
    return f


# -- polydisk maps ------------------------------------------------------------

def _polydisk_to_disk(rng, n: int) -> maps.HoloMap:
    kind = rng.choice(["coordinate", "average", "product"])
    if kind == "coordinate":
        base = maps.project(int(rng.integers(n)), n)
    elif kind == "average":
        w = rng.random(n) + 0.05
        base = maps.affine((w / w.sum())[None, :] * np.exp(2j * math.pi * rng.random(n)))
    else:
        # square of a coordinate average stays in the disk
        base = maps.compose(maps.elementwise("power", k=2), maps.affine(np.full((1, n), 1.0 / n)))
    return maps.compose(_disk_self_map(rng, 2), base)


def _polydisk_map(rng, index: int, n: int, m: int) -> maps.HoloMap:
    src, dst = polydisk(n), polydisk(m)
    if index == 0 and n == m:
        return maps.identity(n, src).with_label("identity")
    if index <= 1 or rng.random() < 0.2:
        perm = rng.permutation(m) % n
        parts = [maps.compose(maps.disk_mobius(_rand_disk(rng), rng.uniform(0, 2 * math.pi)),
                              maps.project(int(j), n)) for j in perm]
        label = "polydisk-automorphism" if n == m and len(set(perm.tolist())) == n else "coordinate-automorphisms"
        return maps.HoloMap(maps.tuple_map(*parts).expr, src, dst, label)
    parts = [_polydisk_to_disk(rng, n) for _ in range(m)]
    return maps.HoloMap(maps.tuple_map(*parts).expr, src, dst, "polydisk-contraction")


def _polydisk_to_ball(rng, index: int, n: int, m: int) -> maps.HoloMap:
    src, dst = polydisk(n), Ball(m)
    if index == 0:
        # z -> z/sqrt(n) followed by an isometric embedding
        E = _isometric_embedding(rng, m, n) if n <= m else np.eye(m, n)
        h = maps.affine(E / math.sqrt(n))
        return maps.HoloMap(h.expr, src, dst, "scaled-inclusion")
    parts = [_polydisk_to_disk(rng, n) for _ in range(m)]
    h = maps.compose(maps.affine(_rand_contraction(rng, m, m, rmin=0.5) / math.sqrt(m)), maps.tuple_map(*parts))
    if m > 1:
        h = maps.compose(maps.ball_mobius(_rand_ball(rng, m)), h)
    return maps.HoloMap(h.expr, src, dst, "polydisk-to-ball")


# -- public samplers ----------------------------------------------------------

def sample_member(kind: str, seed: int, index: int, **opts):
    """Member ``index`` of a map family; see :data:`FAMILY_KINDS`.

    Options: ``n``, ``m`` (dimensions), ``target`` (planar domain or product),
    ``interval`` ((a, b) for harmonic targets), ``centered`` (force f(0) = 0,
    or Re h(0) at the interval midpoint), ``complex_valued`` (harmonic maps
    Re F + i s Im G), ``scale`` (covering parameter).
    """
    rng = member_rng(seed, kind + repr(sorted((k, str(v)) for k, v in opts.items())), index)
    centered = bool(opts.get("centered", False))
    if kind == "disk-to-disk":
        f = _disk_self_map(rng, index)
        return _center_disk(f) if centered else f
    if kind == "disk-to-planar":
        target = opts.get("target", PlanarDomain.strip())
        g = _disk_self_map(rng, index)
        if centered:
            g = _center_disk(g)
        chart = chart_from_disk(target) if target.simply_connected else covering_from_disk(_covering_scale(rng))
        label = "chart" if g.label == "identity" else (
            "chart-automorphism" if "automorphism" in g.label else g.label)
        if not target.simply_connected:
            label = "covering" if "automorphism" in g.label or g.label == "identity" else g.label
        return maps.HoloMap(maps.compose(chart, g).expr, DISK, target, label)
    if kind == "ball-to-ball":
        n, m = int(opts.get("n", 2)), int(opts.get("m", 2))
        f = _ball_map(rng, index, n, m)
        return _center_ball(f) if centered else f
    if kind == "ball-to-planar":
        n, target = int(opts.get("n", 2)), opts.get("target", PlanarDomain.strip())
        g = _ball_to_disk(rng, index, n)
        chart = chart_from_disk(target) if target.simply_connected else covering_from_disk(_covering_scale(rng))
        return maps.HoloMap(maps.compose(chart, g).expr, Ball(n), target, g.label)
    if kind == "ball-to-punctured-disk":
        return sample_member("ball-to-planar", seed, index, n=opts.get("n", 2),
                             target=PlanarDomain.punctured_disk())
    if kind == "ball2-to-product":
        omega = opts.get("target", polydisk(2))
        parts = []
        for k, dom in enumerate(omega.factors):
            g = _ball_to_disk(rng, index, 2) if index != 0 else maps.project(k, 2)
            chart = chart_from_disk(dom) if dom.simply_connected else covering_from_disk(_covering_scale(rng))
            parts.append(maps.compose(chart, g))
        label = "coordinate-charts" if index == 0 else "ball-to-product"
        return maps.HoloMap(maps.tuple_map(*parts).expr, Ball(2), omega, label)
    if kind == "polydisk-to-polydisk":
        return _polydisk_map(rng, index, int(opts.get("n", 2)), int(opts.get("m", 2)))
    if kind == "polydisk-to-ball":
        return _polydisk_to_ball(rng, index, int(opts.get("n", 2)), int(opts.get("m", 2)))
    if kind == "harmonic-disk-to-interval":
        a, b = opts.get("interval", (-1.0, 1.0))
        F = sample_member("disk-to-planar", seed, index, target=PlanarDomain.strip(a, b), centered=centered)
        label = "sharp-arctan" if index == 0 else F.label
        if not opts.get("complex_valued", False):
            return maps.HarmonicMap(F, target=Interval(a, b), label=label)
        scale = float(rng.uniform(-5.0, 5.0))
        variant = rng.choice(["g_a", "f_a", "other"])
        if variant == "g_a":
            G = None
        elif variant == "f_a":
            G = maps.identity(1, DISK)
        else:
            G = _disk_self_map(rng, 2)
        return maps.HarmonicMap(F, scale, G, PlanarDomain.strip(a, b), f"{label}/{variant}")
    if kind == "pluriharmonic-ball2-to-interval-sq":
        a, b = opts.get("interval", (-1.0, 1.0))
        omega = ProductDomain((PlanarDomain.strip(a, b),) * 2)
        F = sample_member("ball2-to-product", seed, index, target=omega)
        return maps.HarmonicMap(F, target=(Interval(a, b), Interval(a, b)), label=F.label)
    raise DomainError(f"unknown map family {kind!r}")


def sample_family(kind: str, seed: int, count: int, **opts) -> list:
    """``count`` members of a family, deterministic in ``seed``."""
    if count < 1:
        raise DomainError("count must be >= 1")
    return [sample_member(kind, seed, j, **opts) for j in range(count)]


# -- points -------------------------------------------------------------------

def _uniform_dims(space) -> int:
    if isinstance(space, Ball):
        return 2 * space.n + 1
    if isinstance(space, ProductDomain):
        return 2 * space.dim
    return 2


def _planar_from_uniform(dom: PlanarDomain, u, margin) -> np.ndarray:
    u1, u2 = u[..., 0], u[..., 1]
    rmax = 1.0 - margin
    if dom.kind == "disk":
        return rmax * np.sqrt(u1) * np.exp(2j * math.pi * u2)
    if dom.kind == "punctured":
        r = np.sqrt(margin ** 2 + u1 * (rmax ** 2 - margin ** 2))
        return r * np.exp(2j * math.pi * u2)
    if dom.kind == "halfplane" or not dom.bounded_strip:
        # Cayley image of a disk point, radius chosen so that Re w >= margin
        rr = math.sqrt(1.0 - 4.0 * margin)
        z = rr * np.sqrt(u1) * np.exp(2j * math.pi * u2)
        w = (1 + z) / (1 - z)
        return w if dom.kind == "halfplane" else w + dom.a
    x = dom.a + margin + u1 * (dom.b - dom.a - 2 * margin)
    y = (dom.b - dom.a) * _normal.ppf(np.clip(u2, 1e-12, 1 - 1e-12))
    return x + 1j * y


def _from_uniform(space, u, margin) -> np.ndarray:
    if isinstance(space, PlanarDomain):
        return _planar_from_uniform(space, u, margin)
    if isinstance(space, ProductDomain):
        cols = [_planar_from_uniform(f, u[..., 2 * k:2 * k + 2], margin) for k, f in enumerate(space.factors)]
        return np.stack(cols, axis=-1)
    n = space.n
    g = _normal.ppf(np.clip(u[..., :2 * n], 1e-12, 1 - 1e-12))
    v = g[..., :n] + 1j * g[..., n:]
    v = v / np.linalg.norm(v, axis=-1, keepdims=True)
    r = (1.0 - margin) * u[..., 2 * n] ** (1.0 / (2 * n))
    return v * r[..., None]


def random_points(space, rng: np.random.Generator, count: int, margin: float = MARGIN) -> np.ndarray:
    """Pseudo-random points of ``space`` with boundary margin >= ``margin``."""
    return _from_uniform(space, rng.random((count, _uniform_dims(space))), margin)


def quasi_points(space, count: int, seed: int = 0, margin: float = MARGIN) -> np.ndarray:
    """Scrambled-Sobol points of ``space`` with boundary margin >= ``margin``."""
    sob = qmc.Sobol(_uniform_dims(space), scramble=True, seed=seed)
    m = max(1, math.ceil(math.log2(count)))
    u = sob.random_base2(m)[:count]
    return _from_uniform(space, u, margin)
