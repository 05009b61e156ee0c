"""Which density normalization makes the product max-formula a Kobayashi-Finsler norm.

The norm k(p, u) is recovered from the path oracle as d(p - tu/2, p + tu/2)/t
for small t, and compared with the max formula built from the Kobayashi
densities (half the curvature -1 densities) and from the curvature -1
densities themselves.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .domains import PlanarDomain, ProductDomain, polydisk
from .families import random_points
from .oracle import path_oracle
from .product import product_finsler

__all__ = ["AuditCase", "AuditReport", "extremal_disk_radius", "normalization_audit"]

ORACLE_TOLERANCE = 1e-3
FACTOR_TOLERANCE = 1e-9


@dataclass(frozen=True)
class AuditCase:
    space: str
    point: list
    vector: list
    kob: float
    hyp: float
    oracle: float
    hyp_over_kob: float
    kob_error: float
    extremal_radius_kob: float | None
    extremal_radius_hyp: float | None


@dataclass
class AuditReport:
    cases: list
    seed: int
    step: float
    matches: str
    kob_max_error: float
    hyp_factor_range: tuple
    flagged: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        pd = [c for c in self.cases if c.space.startswith("polydisk")]
        return (all(c.kob_error <= ORACLE_TOLERANCE for c in pd)
                and all(abs(c.hyp_over_kob - 2.0) <= FACTOR_TOLERANCE for c in pd))

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "step": self.step,
            "matches": self.matches,
            "passed": self.passed,
            "kob_max_error": self.kob_max_error,
            "hyp_factor_range": list(self.hyp_factor_range),
            "flagged": self.flagged,
            "cases": [c.__dict__ for c in self.cases],
        }


def _enc(v) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v, dtype=complex)]


def extremal_disk_radius(p, u, value: float) -> float:
    """max |nu_i| for the polydisk disk zeta -> (T_{-c}(zeta nu_1), T_{-d}(zeta nu_2)) with derivative u/value.

    The disk lies in the polydisk iff the result is <= 1; it is extremal iff it equals 1.
    """
    p, u = np.asarray(p, dtype=complex), np.asarray(u, dtype=complex)
    s2 = 1.0 - np.abs(p) ** 2
    return float(np.max(np.abs(u) / (value * s2)))


def _case(space: ProductDomain, p, u, t: float) -> AuditCase:
    kob = float(product_finsler(space, p, u, "kob"))
    hyp = float(product_finsler(space, p, u, "hyp"))
    oracle = path_oracle(space, p - 0.5 * t * u, p + 0.5 * t * u).value / t
    radius = space.is_polydisk
    return AuditCase(
        space=str(space), point=_enc(p), vector=_enc(u), kob=kob, hyp=hyp, oracle=oracle,
        hyp_over_kob=hyp / kob, kob_error=abs(oracle - kob),
        extremal_radius_kob=extremal_disk_radius(p, u, kob) if radius else None,
        extremal_radius_hyp=extremal_disk_radius(p, u, hyp) if radius else None,
    )


def normalization_audit(seed: int = 42, cases: int = 20, step: float = 1e-4,
                        halfplane_cases: int = 3) -> AuditReport:
    """Compare both variants of the product max formula with the path oracle.

    Runs ``cases`` random (p, u) on the bidisk, with |p_i| <= 0.9 and unit u,
    plus ``halfplane_cases`` on the product of two right half-planes.
    """
    rng = np.random.default_rng([seed, 9])
    out = []
    spaces = [(polydisk(2), cases, 0.1), (ProductDomain((PlanarDomain.half_plane(),) * 2), halfplane_cases, 0.1)]
    for space, count, margin in spaces:
        pts = random_points(space, rng, count, margin=margin)
        for p in pts:
            u = rng.normal(size=2) + 1j * rng.normal(size=2)
            u /= np.linalg.norm(u)
            out.append(_case(space, p, u, step))
    pd = [c for c in out if c.space.startswith("polydisk")]
    kob_err = max(c.kob_error for c in pd)
    hyp_err = max(abs(c.oracle - c.hyp) for c in pd)
    factors = [c.hyp_over_kob for c in out]
    matches = "kob" if kob_err <= ORACLE_TOLERANCE < hyp_err else ("hyp" if hyp_err <= ORACLE_TOLERANCE else "none")
    flagged = []
    if matches == "kob":
        flagged.append("hyp variant reads {:.6f}x the oracle-consistent value".format(float(np.mean(factors))))
    return AuditReport(out, seed, step, matches, kob_err, (min(factors), max(factors)), flagged)
