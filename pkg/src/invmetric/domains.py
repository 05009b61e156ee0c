"""Descriptors for the model domains.

Planar domains work on complex arrays of any shape (each entry is a point of
the plane). Several-variable domains work on arrays of shape (..., n) whose
last axis holds the coordinates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError

__all__ = [
    "Ball",
    "Interval",
    "PlanarDomain",
    "ProductDomain",
    "Space",
    "parse_domain",
    "parse_space",
    "polydisk",
]

_KINDS = ("disk", "halfplane", "strip", "punctured")


@dataclass(frozen=True)
class PlanarDomain:
    """Unit disk, right half-plane, strip a < Re z < b (b may be inf), or punctured disk."""

    kind: str
    a: float = -1.0
    b: float = 1.0

    dim = 1

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise DomainError(f"unknown planar domain kind {self.kind!r}")
        if self.kind == "strip" and not (math.isfinite(self.a) and self.a < self.b):
            raise DomainError(f"strip requires finite a < b, got ({self.a}, {self.b})")

    @classmethod
    def disk(cls) -> PlanarDomain:
        return cls("disk")

    @classmethod
    def half_plane(cls) -> PlanarDomain:
        return cls("halfplane")

    @classmethod
    def strip(cls, a: float = -1.0, b: float = 1.0) -> PlanarDomain:
        return cls("strip", float(a), float(b))

    @classmethod
    def punctured_disk(cls) -> PlanarDomain:
        return cls("punctured")

    @property
    def simply_connected(self) -> bool:
        return self.kind != "punctured"

    @property
    def bounded_strip(self) -> bool:
        return self.kind == "strip" and math.isfinite(self.b)

    def margin(self, z) -> np.ndarray:
        """Euclidean distance to the boundary (negative outside)."""
        z = np.asarray(z, dtype=complex)
        if self.kind == "disk":
            return 1.0 - np.abs(z)
        if self.kind == "halfplane":
            return z.real
        if self.kind == "strip":
            return np.minimum(z.real - self.a, self.b - z.real)
        r = np.abs(z)
        return np.minimum(r, 1.0 - r)

    def contains(self, z) -> np.ndarray:
        return self.margin(z) > 0

    def require(self, z) -> None:
        if not np.all(self.contains(z)):
            raise DomainError(f"point outside domain {self}")

    def project(self, z, margin: float = 1e-6) -> np.ndarray:
        """Move points closer than ``margin`` to the boundary back inside."""
        z = np.array(z, dtype=complex)
        if self.kind in ("disk", "punctured"):
            r = np.abs(z)
            lo = margin if self.kind == "punctured" else 0.0
            target = np.clip(r, lo, 1.0 - margin)
            unit = np.where(r > 0, z / np.where(r > 0, r, 1.0), 1.0)
            return np.where(r == target, z, unit * target)
        if self.kind == "halfplane":
            return np.maximum(z.real, margin) + 1j * z.imag
        return np.clip(z.real, self.a + margin, self.b - margin) + 1j * z.imag

    def __str__(self) -> str:
        if self.kind == "strip":
            return f"strip:{_fmt(self.a)}:{_fmt(self.b)}"
        return self.kind


@dataclass(frozen=True)
class Ball:
    """Unit ball of C^n."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("ball dimension must be >= 1")

    @property
    def dim(self) -> int:
        return self.n

    def margin(self, z) -> np.ndarray:
        return 1.0 - np.linalg.norm(np.asarray(z, dtype=complex), axis=-1)

    def contains(self, z) -> np.ndarray:
        return self.margin(z) > 0

    def require(self, z) -> None:
        if not np.all(self.contains(z)):
            raise DomainError(f"point outside the unit ball of C^{self.n}")

    def project(self, z, margin: float = 1e-6) -> np.ndarray:
        z = np.array(z, dtype=complex)
        r = np.linalg.norm(z, axis=-1, keepdims=True)
        limit = 1.0 - margin
        return np.where(r > limit, z * (limit / np.where(r > 0, r, 1.0)), z)

    def __str__(self) -> str:
        return f"ball:{self.n}"


@dataclass(frozen=True)
class ProductDomain:
    """Cartesian product of planar domains; the polydisk is a product of disks."""

    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors:
            raise DomainError("product needs at least one factor")
        for f in self.factors:
            if not isinstance(f, PlanarDomain):
                raise DomainError(f"product factors must be planar domains, got {f!r}")

    @property
    def dim(self) -> int:
        return len(self.factors)

    @property
    def is_polydisk(self) -> bool:
        return all(f.kind == "disk" for f in self.factors)

    def margin(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        m = [f.margin(z[..., k]) for k, f in enumerate(self.factors)]
        return np.min(np.stack(m, axis=-1), axis=-1)

    def contains(self, z) -> np.ndarray:
        return self.margin(z) > 0

    def require(self, z) -> None:
        if not np.all(self.contains(z)):
            raise DomainError(f"point outside product domain {self}")

    def project(self, z, margin: float = 1e-6) -> np.ndarray:
        z = np.array(z, dtype=complex)
        for k, f in enumerate(self.factors):
            z[..., k] = f.project(z[..., k], margin)
        return z

    def __str__(self) -> str:
        if self.is_polydisk:
            return f"polydisk:{self.dim}"
        return "product:" + ",".join(str(f) for f in self.factors)


def polydisk(n: int) -> ProductDomain:
    return ProductDomain((PlanarDomain.disk(),) * n)


@dataclass(frozen=True)
class Interval:
    """Open real interval (a, b); the target of real harmonic maps."""

    a: float = -1.0
    b: float = 1.0

    def __post_init__(self):
        if not self.a < self.b:
            raise DomainError(f"interval requires a < b, got ({self.a}, {self.b})")

    def margin(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.minimum(x - self.a, self.b - x)

    def contains(self, x) -> np.ndarray:
        return self.margin(x) > 0

    @property
    def strip(self) -> PlanarDomain:
        return PlanarDomain.strip(self.a, self.b)

    def __str__(self) -> str:
        return f"interval:{_fmt(self.a)}:{_fmt(self.b)}"


Space = Union[PlanarDomain, Ball, ProductDomain]


def _fmt(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(float(x))


def _float(text: str, ctx: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise DomainError(f"bad number {text!r} in {ctx!r}") from None


def parse_domain(text: str) -> PlanarDomain:
    """Parse ``disk``, ``halfplane``, ``strip:a:b`` (b may be ``inf``) or ``punctured``."""
    parts = text.strip().lower().split(":")
    kind = parts[0]
    if kind == "strip":
        if len(parts) != 3:
            raise DomainError(f"strip needs bounds, e.g. strip:-1:1 (got {text!r})")
        return PlanarDomain.strip(_float(parts[1], text), _float(parts[2], text))
    if len(parts) == 1 and kind in ("disk", "halfplane", "punctured"):
        return PlanarDomain(kind)
    raise DomainError(f"unknown planar domain {text!r}")


def parse_space(text: str) -> Space:
    """Parse a planar domain or ``ball:n``, ``polydisk:n``, ``product:D1,D2,...``."""
    text = text.strip().lower()
    head, _, rest = text.partition(":")
    if head in ("ball", "polydisk"):
        try:
            n = int(rest)
        except ValueError:
            raise DomainError(f"bad dimension in {text!r}") from None
        if n < 1:
            raise DomainError(f"dimension must be >= 1 in {text!r}")
        return Ball(n) if head == "ball" else polydisk(n)
    if head == "product":
        if not rest:
            raise DomainError("product needs factors, e.g. product:disk,halfplane")
        return ProductDomain(tuple(parse_domain(p) for p in rest.split(",")))
    return parse_domain(text)
