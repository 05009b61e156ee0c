"""Inequality suites: seeded sweeps of map families and points, with slack reports.

Every check yields rows (lhs, rhs) with slack = rhs - lhs; a row violates
the inequality when slack < -tolerance and is an equality witness when
|slack| < 1e-8. Checks are written in scale-free form where the two sides
can be tiny, so that the absolute tolerance stays meaningful.

Work is split by map: map j draws its points from a generator seeded by
(seed, suite id, j), so results do not depend on the number of workers.
"""
from __future__ import annotations

import csv
import io
import json
import math
import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import maps
from .ball import ball_finsler, invariant_gradient_batch, kob_dist_ball
from .domains import Ball, PlanarDomain, ProductDomain, polydisk
from .errors import DomainError, InvMetricError, UnknownSuiteError
from .families import random_points, sample_member
from .oracle import path_oracle
from .planar import chart_to_disk, hyp_density, hyp_distance, pseudo_hyperbolic
from .product import kob_dist_product, product_finsler, strip_square

__all__ = [
    "DEFAULT_TOLERANCE",
    "InequalitySuite",
    "SUITES",
    "VerificationReport",
    "WITNESS_THRESHOLD",
    "run_all",
    "run_suite",
    "suite_ids",
]

DEFAULT_TOLERANCE = 1e-9
WITNESS_THRESHOLD = 1e-8
FOUR_OVER_PI = 4.0 / math.pi

DISK = PlanarDomain.disk()
S0 = PlanarDomain.strip(-1.0, 1.0)


# -- rows -----------------------------------------------------------------------

@dataclass
class Block:
    """Rows of one check for one map: arrays indexed by local sample number."""

    check: str
    lhs: np.ndarray
    rhs: np.ndarray
    inputs: list  # one dict per sample


@dataclass
class Job:
    seed: int
    suite: str
    map_index: int
    first: int  # global index of this map's first sample
    count: int
    rng: np.random.Generator
    options: dict


def _enc(z) -> list:
    z = np.asarray(z, dtype=complex)
    if z.ndim == 0:
        return [float(z.real), float(z.imag)]
    return [_enc(v) for v in z]


def _inputs(**arrays) -> list:
    keys = list(arrays)
    n = len(np.asarray(arrays[keys[0]]))
    return [{k: _enc(np.asarray(arrays[k])[j]) for k in keys} for j in range(n)]


def _unit_vectors(rng, count, n) -> np.ndarray:
    v = rng.normal(size=(count, n)) + 1j * rng.normal(size=(count, n))
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def _opnorm(J: np.ndarray) -> np.ndarray:
    return np.linalg.svd(J, compute_uv=False)[..., 0]


def _kob_planar(dom: PlanarDomain, w) -> np.ndarray:
    return 0.5 * hyp_density(dom, w)


def _ratio(num, den) -> np.ndarray:
    num, den = np.asarray(num, dtype=float), np.asarray(den, dtype=float)
    return np.where(den > 0, num / np.where(den > 0, den, 1.0), np.where(num > 0, np.inf, 0.0))


# -- planar suites --------------------------------------------------------------

def _schwarz_pick(job: Job):
    f = sample_member("disk-to-disk", job.seed, job.map_index)
    z = random_points(DISK, job.rng, job.count)
    w = random_points(DISK, job.rng, job.count)
    fz, fw = f(z), f(w)
    inputs = _inputs(z=z, w=w)
    deriv = Block("derivative", np.abs(f.deriv(z)) * (1 - np.abs(z) ** 2), 1 - np.abs(fz) ** 2, inputs)
    delta = Block("delta", pseudo_hyperbolic(DISK, fz, fw), pseudo_hyperbolic(DISK, z, w), inputs)
    return f, [deriv, delta]


def _harmonic_points(job: Job, real_fraction=0.25):
    z = random_points(DISK, job.rng, job.count)
    k = int(job.count * real_fraction)
    z[:k] = z[:k].real * 0 + np.abs(z[:k]) * np.sign(job.rng.random(k) - 0.5)
    if job.count:
        z[0] = 0.0
    return z


def _kv(job: Job, form: str):
    h = sample_member("harmonic-disk-to-interval", job.seed, job.map_index, centered=True)
    z = _harmonic_points(job)
    u = h(z)
    grad = maps.gradient_norm(h, z)
    lhs = grad * (1 - np.abs(z) ** 2)
    if form == "strip":
        rhs = FOUR_OVER_PI * np.cos(0.5 * math.pi * u)
    else:
        rhs = FOUR_OVER_PI * (1 - u ** 2)
    return h, [Block(f"gradient-{form}", lhs, rhs, _inputs(z=z))]


def _kv_strip(job):
    return _kv(job, "strip")


def _kv_disk(job):
    return _kv(job, "disk")


_KAVU_DOMAINS = (DISK, PlanarDomain.half_plane(), PlanarDomain.strip(0.0, 3.0), PlanarDomain.strip(2.0, math.inf))
_KAVU_ORACLE_EVERY = 25


def _kavu_distance(job: Job):
    """Disk distance of v(z1), v(z2) against (4/pi) times the distance in D."""
    h = sample_member("harmonic-disk-to-interval", job.seed, job.map_index)
    if job.map_index % _KAVU_ORACLE_EVERY == _KAVU_ORACLE_EVERY - 1:
        # punctured disk: v is the restriction of a disk harmonic map; the
        # right side is the path-oracle length (an upper estimate of the distance)
        dom = PlanarDomain.punctured_disk()
        count = min(job.count, 2)
        z1, z2 = random_points(dom, job.rng, count), random_points(dom, job.rng, count)
        v1, v2 = h(z1), h(z2)
        d_v = hyp_distance(DISK, v1.astype(complex), v2.astype(complex))
        d_d = np.array([path_oracle(dom, a, b, segments=64).value for a, b in zip(z1, z2)])
        block = Block("distance-punctured-oracle", d_v, FOUR_OVER_PI * d_d, _inputs(z1=z1, z2=z2))
        return h, [block], count
    dom = _KAVU_DOMAINS[job.map_index % len(_KAVU_DOMAINS)]
    v = h if dom.kind == "disk" else maps.HarmonicMap(
        maps.compose(h.analytic, chart_to_disk(dom)), target=h.target, label=h.label)
    z1, z2 = random_points(dom, job.rng, job.count), random_points(dom, job.rng, job.count)
    v1, v2 = v(z1), v(z2)
    lhs = hyp_distance(DISK, v1.astype(complex), v2.astype(complex))
    rhs = FOUR_OVER_PI * hyp_distance(dom, z1, z2)
    return v, [Block(f"distance-{dom.kind}", lhs, rhs, _inputs(z1=z1, z2=z2))]


_ANGLE_TARGETS = (S0, PlanarDomain.strip(0.0, 3.0), PlanarDomain.strip(0.0, math.inf))


def _har_angle(job: Job):
    """|Re df(h)| Hyp_G(f z) <= Hyp_D(z) for unit h: the largest stretch, the gradient and a random h."""
    G = _ANGLE_TARGETS[job.map_index % len(_ANGLE_TARGETS)]
    F = sample_member("disk-to-planar", job.seed, job.map_index, target=G)
    rng = job.rng
    variant = int(rng.integers(3))
    scale = 0.0 if job.map_index == 0 else float(rng.uniform(-5, 5))
    imag = None if variant == 0 else (maps.identity(1, DISK) if variant == 1 else
                                      sample_member("disk-to-disk", job.seed, job.map_index + 1))
    f = maps.HarmonicMap(F, scale, imag, G, f"{F.label}/scale={scale:.3f}")
    z = random_points(DISK, rng, job.count)
    R = f.real_jacobian(z)
    if R.shape[-2] == 1:  # real-valued: pad an Im row of zeros
        R = np.concatenate([R, np.zeros_like(R)], axis=-2)
    _, _, vh = np.linalg.svd(R)
    h_max = vh[..., 0, :]
    grad = R[..., 0, :]
    gnorm = np.linalg.norm(grad, axis=-1, keepdims=True)
    h_grad = np.where(gnorm > 0, grad / np.where(gnorm > 0, gnorm, 1.0), h_max)
    theta = rng.uniform(0, 2 * math.pi, job.count)
    h_rand = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    dens_g = hyp_density(G, np.real(F(z)).astype(complex))
    dens_d = hyp_density(DISK, z)
    inputs = _inputs(z=z)
    blocks = []
    for name, h in (("max-stretch", h_max), ("gradient", h_grad), ("random", h_rand)):
        re_part = np.abs(np.einsum("...j,...j->...", R[..., 0, :], h))
        # divide by Hyp_D(z) to keep the check scale free
        blocks.append(Block(f"angle-{name}", re_part * dens_g / dens_d, np.ones(job.count), inputs))
    return f, blocks


def _re_growth(job: Job):
    h = sample_member("harmonic-disk-to-interval", job.seed, job.map_index, centered=True, complex_valued=True)
    z = _harmonic_points(job, real_fraction=0.5)
    lhs = np.abs(np.real(h(z)))
    rhs = FOUR_OVER_PI * np.arctan(np.abs(z))
    return h, [Block("real-part-growth", lhs, rhs, _inputs(z=z))]


_AHLFORS_TARGETS = (DISK, PlanarDomain.half_plane(), S0, PlanarDomain.strip(0.0, 3.0),
                    PlanarDomain.strip(1.0, math.inf), PlanarDomain.punctured_disk())


def _ahlfors(job: Job):
    G = _AHLFORS_TARGETS[job.map_index % len(_AHLFORS_TARGETS)]
    F = sample_member("disk-to-planar", job.seed, job.map_index // len(_AHLFORS_TARGETS), target=G)
    z = random_points(DISK, job.rng, job.count)
    lhs = hyp_density(G, F(z)) * np.abs(F.deriv(z)) * (1 - np.abs(z) ** 2) / 2
    return F, [Block(f"density-{G.kind}", lhs, np.ones(job.count), _inputs(z=z))]


# -- ball suites ----------------------------------------------------------------

_BALL_SHAPES = ((2, 2), (2, 1), (3, 2), (2, 3), (3, 3))


def _ball_pair(job: Job):
    return _BALL_SHAPES[job.map_index % len(_BALL_SHAPES)]


def _ball_schwarz_0(job: Job):
    n, m = _ball_pair(job)
    f = sample_member("ball-to-ball", job.seed, job.map_index, n=n, m=m, centered=True)
    a = random_points(Ball(n), job.rng, job.count)
    fa = f(a)
    lhs = np.abs(fa) if m == 1 else np.linalg.norm(fa, axis=-1)
    return f, [Block("norm", lhs, np.linalg.norm(a, axis=-1), _inputs(a=a))]


def _ball_distortion(job: Job):
    n, m = _ball_pair(job)
    f = sample_member("ball-to-ball", job.seed, job.map_index, n=n, m=m)
    a = random_points(Ball(n), job.rng, job.count)
    u = _unit_vectors(job.rng, job.count, n)
    b = f(a).reshape(job.count, m)
    ustar = np.einsum("...ij,...j->...i", f.jacobian(a), u)
    ratio = _ratio(ball_finsler(b, ustar), ball_finsler(a, u))
    return f, [Block("finsler-ratio", ratio, np.ones(job.count), _inputs(a=a, u=u))]


def _ball_kalaj(job: Job):
    n, m = job.options.get("shape", (2, 1))
    f = sample_member("ball-to-ball", job.seed, job.map_index, n=n, m=m)
    a = random_points(Ball(n), job.rng, job.count)
    b = f(a).reshape(job.count, m)
    lhs = (1 - np.sum(np.abs(a) ** 2, -1)) * _opnorm(f.jacobian(a))
    rhs = np.sqrt(1 - np.sum(np.abs(b) ** 2, -1))
    return f, [Block("operator-norm", lhs, rhs, _inputs(a=a))]


def _contraction_member(job: Job):
    """Map for the Kobayashi contraction suites, with its source and target distances/norms."""
    kinds = (
        ("disk-to-disk", {}, DISK, DISK),
        ("ball-to-ball", {"n": 2, "m": 2}, Ball(2), Ball(2)),
        ("ball-to-ball", {"n": 3, "m": 2}, Ball(3), Ball(2)),
        ("ball-to-ball", {"n": 2, "m": 3}, Ball(2), Ball(3)),
        ("polydisk-to-polydisk", {"n": 2, "m": 2}, polydisk(2), polydisk(2)),
        ("polydisk-to-ball", {"n": 2, "m": 2}, polydisk(2), Ball(2)),
        ("ball2-to-product", {"target": ProductDomain((S0, PlanarDomain.half_plane()))}, Ball(2),
         ProductDomain((S0, PlanarDomain.half_plane()))),
    )
    kind, opts, src, dst = kinds[job.map_index % len(kinds)]
    f = sample_member(kind, job.seed, job.map_index // len(kinds), **opts)
    return f, src, dst


def _as_rows(x, n) -> np.ndarray:
    return np.asarray(x, dtype=complex).reshape(-1, n)


def _distance(space, z, w):
    if isinstance(space, PlanarDomain):
        return hyp_distance(space, z[..., 0], w[..., 0])
    if isinstance(space, Ball):
        return kob_dist_ball(z, w)
    return kob_dist_product(space, z, w)


def _finsler(space, p, u):
    if isinstance(space, PlanarDomain):
        return _kob_planar(space, p[..., 0]) * np.abs(u[..., 0])
    if isinstance(space, Ball):
        return ball_finsler(p, u)
    return product_finsler(space, p, u)


def _dim(space) -> int:
    return 1 if isinstance(space, PlanarDomain) else space.dim


def _kob_contraction(job: Job):
    f, src, dst = _contraction_member(job)
    n, m = _dim(src), _dim(dst)
    z, w = random_points(src, job.rng, job.count), random_points(src, job.rng, job.count)
    fz, fw = _as_rows(f(z), m), _as_rows(f(w), m)
    lhs = _distance(dst, fz, fw)
    rhs = _distance(src, _as_rows(z, n), _as_rows(w, n))
    return f, [Block("distance", lhs, rhs, _inputs(z=z, w=w))]


def _kob_tangent(job: Job):
    f, src, dst = _contraction_member(job)
    n, m = _dim(src), _dim(dst)
    a = random_points(src, job.rng, job.count)
    u = _unit_vectors(job.rng, job.count, n)
    J = f.jacobian(a)
    ustar = np.einsum("...ij,...j->...i", J, u)
    ratio = _ratio(_finsler(dst, _as_rows(f(a), m), ustar), _finsler(src, _as_rows(a, n), u))
    return f, [Block("finsler-ratio", ratio, np.ones(job.count), _inputs(a=a, u=u))]


_PRODUCT_TARGETS = (
    polydisk(2),
    strip_square(),
    ProductDomain((PlanarDomain.half_plane(),) * 2),
    ProductDomain((S0, PlanarDomain.half_plane())),
    ProductDomain((PlanarDomain.strip(0.0, 3.0), DISK)),
)


def _ball_to_product(job: Job):
    omega = _PRODUCT_TARGETS[job.map_index % len(_PRODUCT_TARGETS)]
    f = sample_member("ball2-to-product", job.seed, job.map_index // len(_PRODUCT_TARGETS), target=omega)
    a = random_points(Ball(2), job.rng, job.count)
    u = _unit_vectors(job.rng, job.count, 2)
    if job.count:
        a[0], u[0] = 0.0, (1.0, 0.0)  # extremal probe for coordinate charts
    ustar = np.einsum("...ij,...j->...i", f.jacobian(a), u)
    ratio = _ratio(product_finsler(omega, f(a), ustar), ball_finsler(a, u))
    return f, [Block("finsler-ratio", ratio, np.ones(job.count), _inputs(a=a, u=u))]


def _pluriharmonic(job: Job):
    a, b = job.options.get("interval", (-1.0, 1.0))
    h = sample_member("pluriharmonic-ball2-to-interval-sq", job.seed, job.map_index, interval=(a, b))
    z, w = random_points(Ball(2), job.rng, job.count), random_points(Ball(2), job.rng, job.count)
    if job.count:
        # both points on the real z_1 axis: equality for the coordinate charts
        r = job.rng.uniform(-0.9, 0.9, 2)
        z[0], w[0] = (r[0], 0.0), (r[1], 0.0)
    omega = strip_square(a, b)
    lhs = kob_dist_product(omega, h(z).astype(complex), h(w).astype(complex))
    rhs = kob_dist_ball(z, w)
    return h, [Block("distance", lhs, rhs, _inputs(z=z, w=w))]


def _invariant_gradient(job: Job):
    fixed = job.options.get("n")
    n = int(fixed) if fixed else (2, 3)[job.map_index % 2]
    idx = job.map_index if fixed else job.map_index // 2
    if idx % 3 == 2:
        f = sample_member("ball-to-planar", job.seed, idx, n=n, target=S0)
    else:
        f = sample_member("ball-to-ball", job.seed, idx, n=n, m=1)
    z = random_points(Ball(n), job.rng, job.count)
    if job.count >= 2:
        r = job.rng.uniform(0.1, 0.9, 2)
        z[0] = np.eye(n)[0] * r[0]  # parallel to Df for f = z_1
        z[1] = np.eye(n)[1] * r[1]  # orthogonal to Df for f = z_1
    s2 = 1 - np.sum(np.abs(z) ** 2, -1)
    df = np.linalg.norm(f.jacobian(z)[..., 0, :], axis=-1)
    dt = np.linalg.norm(invariant_gradient_batch(f, z), axis=-1)
    ratio = _ratio(dt, df)
    inputs = _inputs(z=z)
    return f, [Block("lower", s2, ratio, inputs), Block("upper", ratio, np.sqrt(s2), inputs)]


_BLOCH_TARGETS = (DISK, PlanarDomain.half_plane(), S0, PlanarDomain.strip(1.0, math.inf), PlanarDomain.punctured_disk())


def _dyak_bloch(job: Job):
    """Kobayashi-normalized bounds for f: B_n -> G planar."""
    G = _BLOCH_TARGETS[job.map_index % len(_BLOCH_TARGETS)]
    n = (2, 3)[(job.map_index // len(_BLOCH_TARGETS)) % 2]
    f = sample_member("ball-to-planar", job.seed, job.map_index // len(_BLOCH_TARGETS), n=n, target=G)
    a = random_points(Ball(n), job.rng, job.count)
    u = _unit_vectors(job.rng, job.count, n)
    if job.count:
        a[0] = 0.0
    grad = f.jacobian(a)[..., 0, :]
    k = _kob_planar(G, f(a))
    s2 = 1 - np.sum(np.abs(a) ** 2, -1)
    tangent = k * np.abs(np.sum(grad * u, -1))
    inputs = _inputs(a=a, u=u)
    return f, [
        Block("tangent-ratio", _ratio(tangent, ball_finsler(a, u)), np.ones(job.count), inputs),
        Block("gradient", k * np.linalg.norm(grad, axis=-1) * s2, np.ones(job.count), inputs),
        Block("invariant-gradient", k * np.linalg.norm(invariant_gradient_batch(f, a), axis=-1),
              np.ones(job.count), inputs),
    ]


def _dyakonov(job: Job):
    n = (2, 3)[job.map_index % 2]
    f = sample_member("ball-to-punctured-disk", job.seed, job.map_index // 2, n=n)
    a = random_points(Ball(n), job.rng, job.count)
    if job.count:
        a[0] = np.eye(n)[0] * job.rng.uniform(-0.9, 0.9)
    b = np.abs(f(a))
    grad = np.linalg.norm(f.jacobian(a)[..., 0, :], axis=-1)
    lhs = _ratio((1 - np.sum(np.abs(a) ** 2, -1)) * grad, 2 * b * -np.log(b))
    return f, [Block("punctured-gradient", lhs, np.ones(job.count), _inputs(a=a))]


# -- registry -------------------------------------------------------------------

@dataclass(frozen=True)
class SuiteDef:
    id: str
    generator: str
    description: str
    run: Callable
    per_map: int = 20


SUITES = {s.id: s for s in (
    SuiteDef("schwarz-pick-disk", "disk-to-disk", "|f'(z)|(1-|z|^2) <= 1-|f(z)|^2 and delta(fz, fw) <= delta(z, w)",
             _schwarz_pick),
    SuiteDef("kv-strip", "harmonic-disk-to-interval", "|grad f|(1-|z|^2) <= (4/pi) cos(pi f/2), f(0) = 0", _kv_strip),
    SuiteDef("kv-disk", "harmonic-disk-to-interval", "|grad f|(1-|z|^2) <= (4/pi)(1-f^2), f(0) = 0", _kv_disk),
    SuiteDef("kavu-distance", "harmonic-disk-to-interval",
             "Kob_disk(v z1, v z2) <= (4/pi) Kob_D(z1, z2) on disk, half-plane, strips, punctured disk",
             _kavu_distance),
    SuiteDef("har-angle", "harmonic-disk-to-interval",
             "|Re df(h)| Hyp_G(f z) <= Hyp_disk(z) for complex harmonic f into a strip", _har_angle),
    SuiteDef("re-growth", "harmonic-disk-to-interval", "|Re h(z)| <= (4/pi) arctan|z|, h(0) = 0", _re_growth),
    SuiteDef("ball-schwarz-0", "ball-to-ball", "|f(a)| <= |a| when f(0) = 0", _ball_schwarz_0),
    SuiteDef("ball-distortion", "ball-to-ball", "M(b, u*)|u*| <= M(a, u)|u|", _ball_distortion),
    SuiteDef("ball-kalaj", "ball-to-ball", "(1-|a|^2)||f'(a)|| <= sqrt(1-|f(a)|^2)", _ball_kalaj, per_map=1),
    SuiteDef("kob-contraction", "mixed", "Kob(f z, f w) <= Kob(z, w)", _kob_contraction),
    SuiteDef("kob-tangent", "mixed", "k(f a, f'(a) u) <= k(a, u)", _kob_tangent),
    SuiteDef("ball-to-product", "ball2-to-product", "k_Omega(b, u*) <= M_B2(a, u)|u|", _ball_to_product),
    SuiteDef("pluriharmonic", "pluriharmonic-ball2-to-interval-sq",
             "Kob_{S(a,b)^2}(u z, u w) <= Kob_B2(z, w)", _pluriharmonic),
    SuiteDef("invariant-gradient", "ball-to-ball", "s^2|Df| <= |invariant Df| <= s|Df| on B_2 and B_3",
             _invariant_gradient),
    SuiteDef("dyak-bloch", "ball-to-planar",
             "kob_G(b)|f'(a)u| <= M(a,u)|u|, kob_G |f'| s^2 <= 1, kob_G |invariant Df| <= 1", _dyak_bloch),
    SuiteDef("dyakonov", "ball-to-punctured-disk", "(1-|a|^2)|f'(a)| <= 2|b| ln(1/|b|)", _dyakonov),
    SuiteDef("ahlfors", "disk-to-planar", "Hyp_G(F z)|F'(z)| <= 2/(1-|z|^2)", _ahlfors),
)}


def suite_ids() -> list:
    return sorted(SUITES)


@dataclass(frozen=True)
class InequalitySuite:
    """A configured run: suite id, sample count, seed and tolerance."""

    id: str
    samples: int = 1000
    seed: int = 42
    tolerance: float = DEFAULT_TOLERANCE
    options: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.id not in SUITES:
            raise UnknownSuiteError(f"unknown suite {self.id!r}; known: {', '.join(suite_ids())}")
        if self.samples < 1:
            raise DomainError("samples must be >= 1")

    @property
    def generator(self) -> str:
        return SUITES[self.id].generator


# -- reports --------------------------------------------------------------------

@dataclass
class VerificationReport:
    suite: str
    seed: int
    samples: int
    tolerance: float
    violations: list
    min_slack: float
    max_slack: float
    mean_slack: float
    equality_witnesses: list
    runtime_ms: float
    rows: int = 0
    checks: dict = field(default_factory=dict)
    slack_rows: list = field(default_factory=list, repr=False, compare=False)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self, runtime: bool = True) -> dict:
        d = {
            "suite": self.suite,
            "seed": self.seed,
            "samples": self.samples,
            "tolerance": self.tolerance,
            "rows": self.rows,
            "checks": self.checks,
            "violations": self.violations,
            "min_slack": self.min_slack,
            "max_slack": self.max_slack,
            "mean_slack": self.mean_slack,
            "equality_witnesses": self.equality_witnesses,
        }
        if runtime:
            d["runtime_ms"] = self.runtime_ms
        return d

    def to_json(self, runtime: bool = True, indent=None) -> str:
        return json.dumps(self.to_dict(runtime), indent=indent, sort_keys=False)

    @classmethod
    def from_dict(cls, d: dict) -> "VerificationReport":
        return cls(
            suite=d["suite"], seed=int(d["seed"]), samples=int(d["samples"]),
            tolerance=float(d["tolerance"]), violations=list(d["violations"]),
            min_slack=float(d["min_slack"]), max_slack=float(d["max_slack"]),
            mean_slack=float(d["mean_slack"]), equality_witnesses=list(d["equality_witnesses"]),
            runtime_ms=float(d.get("runtime_ms", 0.0)), rows=int(d.get("rows", 0)),
            checks=dict(d.get("checks", {})),
        )

    @classmethod
    def from_json(cls, text: str) -> "VerificationReport":
        return cls.from_dict(json.loads(text))

    def slack_csv(self) -> str:
        """One row per evaluated inequality: index, map, check, inputs, lhs, rhs, slack."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "map_index", "check", "inputs", "lhs", "rhs", "slack"])
        for r in self.slack_rows:
            w.writerow([r["index"], r["map_index"], r["check"], json.dumps(r["inputs"]),
                        repr(r["lhs"]), repr(r["rhs"]), repr(r["slack"])])
        return buf.getvalue()


def _job_count(samples: int, per_map: int) -> list:
    counts = [per_map] * (samples // per_map)
    if samples % per_map:
        counts.append(samples % per_map)
    return counts


def _run_job(suite: InequalitySuite, map_index: int, first: int, count: int):
    rng = np.random.default_rng([suite.seed & 0xFFFFFFFF, zlib.crc32(suite.id.encode()), map_index])
    job = Job(suite.seed, suite.id, map_index, first, count, rng, suite.options)
    try:
        with np.errstate(divide="ignore", invalid="ignore"):
            out = SUITES[suite.id].run(job)
    except InvMetricError as exc:
        raise type(exc)(f"suite {suite.id}, seed {suite.seed}, map {map_index}: {exc}") from exc
    if len(out) == 3:
        m, blocks, used = out
    else:
        (m, blocks), used = out, count
    return map_index, first, used, m, blocks


def run_suite(suite, samples: int = None, seed: int = None, tolerance: float = None,
              workers: int = 1, keep_rows: bool = False, **options) -> VerificationReport:
    """Run one suite and aggregate a deterministic report.

    ``suite`` is an id or an :class:`InequalitySuite`. Samples are split into
    maps of ``per_map`` points; results are merged in map order, so the report
    is identical for any ``workers``.
    """
    if not isinstance(suite, InequalitySuite):
        suite = InequalitySuite(
            suite,
            1000 if samples is None else samples,
            42 if seed is None else seed,
            DEFAULT_TOLERANCE if tolerance is None else tolerance,
            options,
        )
    start = time.perf_counter()
    per_map = SUITES[suite.id].per_map
    counts = _job_count(suite.samples, per_map)
    firsts = np.concatenate([[0], np.cumsum(counts)[:-1]]).astype(int)
    tasks = [(suite, j, int(firsts[j]), c) for j, c in enumerate(counts)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(lambda t: _run_job(*t), tasks))
    else:
        results = [_run_job(*t) for t in tasks]
    results.sort(key=lambda r: r[0])

    slacks, violations, witnesses, slack_rows = [], [], [], []
    checks: dict = {}
    for map_index, first, used, m, blocks in results:
        map_json = None
        for blk in blocks:
            lhs = np.asarray(blk.lhs, dtype=float)
            rhs = np.asarray(blk.rhs, dtype=float)
            slack = rhs - lhs
            slacks.append(slack)
            stats = checks.setdefault(blk.check, {"rows": 0, "violations": 0, "min_slack": math.inf})
            stats["rows"] += int(slack.size)
            bad = ~(slack >= -suite.tolerance)  # NaN counts as a violation
            stats["violations"] += int(np.sum(bad))
            finite = slack[np.isfinite(slack)]
            if finite.size:
                stats["min_slack"] = min(stats["min_slack"], float(np.min(finite)))
            for j in np.flatnonzero(bad):
                if map_json is None:
                    map_json = m.to_dict()
                violations.append({
                    "index": first + int(j), "map_index": map_index, "check": blk.check,
                    "label": m.label, "inputs": blk.inputs[j], "lhs": float(lhs[j]),
                    "rhs": float(rhs[j]), "slack": float(slack[j]), "map": map_json,
                })
            for j in np.flatnonzero(np.abs(slack) < WITNESS_THRESHOLD):
                witnesses.append({"index": first + int(j), "map_index": map_index, "check": blk.check,
                                  "label": m.label, "slack": float(slack[j])})
            if keep_rows:
                for j in range(slack.size):
                    slack_rows.append({"index": first + j, "map_index": map_index, "check": blk.check,
                                       "inputs": blk.inputs[j], "lhs": float(lhs[j]),
                                       "rhs": float(rhs[j]), "slack": float(slack[j])})
    allslack = np.concatenate(slacks) if slacks else np.zeros(0)
    finite = allslack[np.isfinite(allslack)]
    for stats in checks.values():
        if math.isinf(stats["min_slack"]):
            stats["min_slack"] = None
    report = VerificationReport(
        suite=suite.id, seed=suite.seed, samples=suite.samples, tolerance=suite.tolerance,
        violations=violations,
        min_slack=float(np.min(finite)) if finite.size else 0.0,
        max_slack=float(np.max(finite)) if finite.size else 0.0,
        mean_slack=float(np.mean(finite)) if finite.size else 0.0,
        equality_witnesses=witnesses,
        runtime_ms=round((time.perf_counter() - start) * 1000.0, 3),
        rows=int(allslack.size), checks=checks, slack_rows=slack_rows,
    )
    return report


def run_all(samples: int = 1000, seed: int = 42, tolerance: float = DEFAULT_TOLERANCE,
            workers: int = 1, keep_rows: bool = False) -> list:
    """Every registered suite, in sorted id order."""
    return [run_suite(s, samples, seed, tolerance, workers, keep_rows) for s in suite_ids()]
