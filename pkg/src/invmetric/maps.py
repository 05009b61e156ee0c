"""Holomorphic maps as expression trees with exact derivatives.

A map C^n -> C^m is a tree of blocks. Every block knows its value and its
complex Jacobian; :class:`Compose` applies the chain rule, so derivatives of
composite maps are exact up to floating point.

Array convention for :class:`HoloMap`: a side of dimension one is *planar*
and carries no coordinate axis. A disk self-map therefore takes and returns
plain complex arrays, a map B_2 -> C returns shape (...) and its derivative
(the gradient) shape (..., 2), and a map B_2 -> B_3 has Jacobian (..., 3, 2).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import ClassVar, Optional

import numpy as np

from .core import operator_norm
from .domains import Interval, Space, parse_space
from .errors import DimensionError, DomainError

__all__ = [
    "Affine", "BallMobius", "Blaschke", "Block", "Cayley", "Compose", "Constant",
    "Exp", "HarmonicMap", "HoloMap", "Identity", "Inner", "InverseCayley", "Log",
    "Power", "Project", "Tan", "Arctan", "Tuple",
    "affine", "ball_mobius", "blaschke", "compose", "constant", "deriv",
    "disk_mobius", "elementwise", "evaluate", "gradient_norm", "identity", "inner",
    "map_from_dict", "project", "tuple_map",
]

_REGISTRY: dict = {}


def _register(cls):
    _REGISTRY[cls.name] = cls
    return cls


def _enc(z) -> list:
    """JSON encoding of complex scalars/arrays as nested [re, im] pairs."""
    arr = np.asarray(z, dtype=complex)
    if arr.ndim == 0:
        return [float(arr.real), float(arr.imag)]
    return [_enc(x) for x in arr]


def _dec(obj) -> np.ndarray:
    arr = np.asarray(obj, dtype=float)
    return arr[..., 0] + 1j * arr[..., 1]


def _tup(z) -> tuple:
    return tuple(complex(x) for x in np.ravel(np.asarray(z, dtype=complex)))


class Block:
    """Node of a map expression. Subclasses are frozen dataclasses."""

    name: ClassVar[str] = ""

    @property
    def dim_in(self) -> int:
        raise NotImplementedError

    @property
    def dim_out(self) -> int:
        raise NotImplementedError

    def value(self, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def jac(self, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def params(self) -> dict:
        return {}

    def children(self) -> tuple:
        return ()

    def to_dict(self) -> dict:
        d = {"block": self.name}
        p = self.params()
        if p:
            d["params"] = p
        c = self.children()
        if c:
            d["children"] = [child.to_dict() for child in c]
        return d


def block_from_dict(d: dict) -> Block:
    try:
        cls = _REGISTRY[d["block"]]
    except KeyError:
        raise DomainError(f"unknown map block {d.get('block')!r}") from None
    children = [block_from_dict(c) for c in d.get("children", [])]
    return cls.from_params(d.get("params", {}), children)


def _eye(n, shape):
    return np.broadcast_to(np.eye(n, dtype=complex), shape + (n, n))


@_register
@dataclass(frozen=True)
class Identity(Block):
    n: int = 1
    name: ClassVar[str] = "identity"

    dim_in = property(lambda self: self.n)
    dim_out = property(lambda self: self.n)

    def value(self, z):
        return z

    def jac(self, z):
        return _eye(self.n, z.shape[:-1])

    def params(self):
        return {"n": self.n}

    @classmethod
    def from_params(cls, p, children):
        return cls(int(p["n"]))


@_register
@dataclass(frozen=True)
class Constant(Block):
    c: tuple
    n: int = 1
    name: ClassVar[str] = "constant"

    dim_in = property(lambda self: self.n)
    dim_out = property(lambda self: len(self.c))

    def value(self, z):
        return np.broadcast_to(np.array(self.c, dtype=complex), z.shape[:-1] + (len(self.c),)).copy()

    def jac(self, z):
        return np.zeros(z.shape[:-1] + (len(self.c), self.n), dtype=complex)

    def params(self):
        return {"c": _enc(self.c), "n": self.n}

    @classmethod
    def from_params(cls, p, children):
        return cls(_tup(_dec(p["c"])), int(p["n"]))


@_register
@dataclass(frozen=True)
class Affine(Block):
    """z -> A z + b."""

    A: tuple  # row-major, shape (m, n)
    b: tuple
    shape: tuple
    name: ClassVar[str] = "affine"

    dim_in = property(lambda self: self.shape[1])
    dim_out = property(lambda self: self.shape[0])

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.A, dtype=complex).reshape(self.shape)

    def value(self, z):
        return z @ self.matrix.T + np.array(self.b, dtype=complex)

    def jac(self, z):
        return np.broadcast_to(self.matrix, z.shape[:-1] + self.shape)

    def params(self):
        return {"A": _enc(self.matrix), "b": _enc(self.b)}

    @classmethod
    def from_params(cls, p, children):
        A = np.atleast_2d(_dec(p["A"]))
        return cls(_tup(A), _tup(_dec(p["b"])), A.shape)


@_register
@dataclass(frozen=True)
class Project(Block):
    """Coordinate projection z -> z_k (0-based)."""

    k: int
    n: int
    name: ClassVar[str] = "project"

    dim_in = property(lambda self: self.n)
    dim_out = property(lambda self: 1)

    def value(self, z):
        return z[..., self.k:self.k + 1]

    def jac(self, z):
        J = np.zeros(z.shape[:-1] + (1, self.n), dtype=complex)
        J[..., 0, self.k] = 1.0
        return J

    def params(self):
        return {"k": self.k, "n": self.n}

    @classmethod
    def from_params(cls, p, children):
        return cls(int(p["k"]), int(p["n"]))


@_register
@dataclass(frozen=True)
class Inner(Block):
    """z -> <z, c> = sum_k z_k conj(c_k)."""

    c: tuple
    name: ClassVar[str] = "inner"

    dim_in = property(lambda self: len(self.c))
    dim_out = property(lambda self: 1)

    def value(self, z):
        return (z @ np.conj(np.array(self.c, dtype=complex)))[..., None]

    def jac(self, z):
        row = np.conj(np.array(self.c, dtype=complex))
        return np.broadcast_to(row, z.shape[:-1] + (1, len(self.c)))

    def params(self):
        return {"c": _enc(self.c)}

    @classmethod
    def from_params(cls, p, children):
        return cls(_tup(_dec(p["c"])))


class _Elementwise(Block):
    """Scalar function applied to every coordinate; diagonal Jacobian."""

    def f(self, z):
        raise NotImplementedError

    def df(self, z):
        raise NotImplementedError

    dim_in = property(lambda self: self.n)
    dim_out = property(lambda self: self.n)

    def value(self, z):
        return self.f(z)

    def jac(self, z):
        d = self.df(z)
        J = np.zeros(z.shape + (self.n,), dtype=complex)
        idx = np.arange(self.n)
        J[..., idx, idx] = d
        return J

    def params(self):
        return {"n": self.n}

    @classmethod
    def from_params(cls, p, children):
        return cls(int(p.get("n", 1)))


@_register
@dataclass(frozen=True)
class Tan(_Elementwise):
    n: int = 1
    name: ClassVar[str] = "tan"

    def f(self, z):
        return np.tan(z)

    def df(self, z):
        return 1.0 / np.cos(z) ** 2


@_register
@dataclass(frozen=True)
class Arctan(_Elementwise):
    n: int = 1
    name: ClassVar[str] = "arctan"

    def f(self, z):
        bad = (z.real == 0) & (np.abs(z.imag) >= 1)
        if np.any(bad):
            raise DomainError("arctan evaluated on its branch cut")
        return np.arctan(z)

    def df(self, z):
        return 1.0 / (1.0 + z * z)


@_register
@dataclass(frozen=True)
class Exp(_Elementwise):
    n: int = 1
    name: ClassVar[str] = "exp"

    def f(self, z):
        return np.exp(z)

    def df(self, z):
        return np.exp(z)


@_register
@dataclass(frozen=True)
class Log(_Elementwise):
    """Principal logarithm; the cut (-inf, 0] is rejected."""

    n: int = 1
    name: ClassVar[str] = "log"

    def f(self, z):
        if np.any((z.imag == 0) & (z.real <= 0)):
            raise DomainError("principal log of a nonpositive real")
        return np.log(z)

    def df(self, z):
        return 1.0 / z


@_register
@dataclass(frozen=True)
class Cayley(_Elementwise):
    """(1 + z)/(1 - z): disk onto the right half-plane."""

    n: int = 1
    name: ClassVar[str] = "cayley"

    def f(self, z):
        if np.any(z == 1):
            raise DomainError("cayley map has a pole at 1")
        return (1 + z) / (1 - z)

    def df(self, z):
        return 2.0 / (1 - z) ** 2


@_register
@dataclass(frozen=True)
class InverseCayley(_Elementwise):
    """(w - 1)/(w + 1): right half-plane onto the disk."""

    n: int = 1
    name: ClassVar[str] = "inverse_cayley"

    def f(self, z):
        if np.any(z == -1):
            raise DomainError("inverse cayley map has a pole at -1")
        return (z - 1) / (z + 1)

    def df(self, z):
        return 2.0 / (z + 1) ** 2


@_register
@dataclass(frozen=True)
class Power(_Elementwise):
    k: int = 2
    n: int = 1
    name: ClassVar[str] = "power"

    def __post_init__(self):
        if self.k < 0:
            raise DomainError("power exponent must be a nonnegative integer")

    def f(self, z):
        return z ** self.k

    def df(self, z):
        if self.k == 0:
            return np.zeros_like(z)
        return self.k * z ** (self.k - 1)

    def params(self):
        return {"k": self.k, "n": self.n}

    @classmethod
    def from_params(cls, p, children):
        return cls(int(p["k"]), int(p.get("n", 1)))


@_register
@dataclass(frozen=True)
class Blaschke(Block):
    """exp(i theta) * prod_k (z - a_k)/(1 - conj(a_k) z); a disk self-map."""

    zeros: tuple
    theta: float = 0.0
    name: ClassVar[str] = "blaschke"

    dim_in = property(lambda self: 1)
    dim_out = property(lambda self: 1)

    def __post_init__(self):
        if any(abs(a) >= 1 for a in self.zeros):
            raise DomainError("Blaschke zeros must lie in the unit disk")

    def _factors(self, z):
        fs, ds = [], []
        for a in self.zeros:
            den = 1 - np.conj(a) * z
            fs.append((z - a) / den)
            ds.append((1 - abs(a) ** 2) / den ** 2)
        return fs, ds

    def value(self, z):
        fs, _ = self._factors(z)
        out = np.full(z.shape, np.exp(1j * self.theta), dtype=complex)
        for f in fs:
            out = out * f
        return out

    def jac(self, z):
        fs, ds = self._factors(z)
        total = np.zeros(z.shape, dtype=complex)
        for k in range(len(fs)):
            term = ds[k]
            for j, f in enumerate(fs):
                if j != k:
                    term = term * f
            total = total + term
        return (np.exp(1j * self.theta) * total)[..., None]

    def params(self):
        return {"zeros": [_enc(a) for a in self.zeros], "theta": self.theta}

    @classmethod
    def from_params(cls, p, children):
        return cls(tuple(complex(*a) for a in p["zeros"]), float(p.get("theta", 0.0)))


def _ball_mobius_value(a, z):
    """phi_a(z) = (a - P_a z - s_a Q_a z)/(1 - <z, a>), broadcasting over a and z.

    Uses P_a z + s_a Q_a z = s_a z + a <z, a>/(1 + s_a), which is regular at a = 0
    and gives phi_0 = -identity.
    """
    s = np.sqrt(1.0 - np.sum(np.abs(a) ** 2, axis=-1))[..., None]
    za = np.sum(z * np.conj(a), axis=-1)[..., None]
    num = a - s * z - a * za / (1.0 + s)
    return num / (1.0 - za)


def _ball_mobius_jac(a, z):
    s = np.sqrt(1.0 - np.sum(np.abs(a) ** 2, axis=-1))[..., None, None]
    za = np.sum(z * np.conj(a), axis=-1)[..., None]
    den = 1.0 - za
    num = a - s[..., 0] * z - a * za / (1.0 + s[..., 0])
    n = z.shape[-1]
    outer_aa = a[..., :, None] * np.conj(a)[..., None, :]
    dnum = -(s * np.eye(n) + outer_aa / (1.0 + s))
    # d(1/den) = conj(a)^T / den^2
    return dnum / den[..., None] + num[..., :, None] * np.conj(a)[..., None, :] / (den ** 2)[..., None]


@_register
@dataclass(frozen=True)
class BallMobius(Block):
    """Involutive automorphism phi_a of the unit ball swapping 0 and a."""

    a: tuple
    name: ClassVar[str] = "ball_mobius"

    dim_in = property(lambda self: len(self.a))
    dim_out = property(lambda self: len(self.a))

    def __post_init__(self):
        if np.linalg.norm(np.array(self.a)) >= 1:
            raise DomainError("ball Mobius parameter must lie in the open ball")

    def value(self, z):
        return _ball_mobius_value(np.array(self.a, dtype=complex), z)

    def jac(self, z):
        return _ball_mobius_jac(np.array(self.a, dtype=complex), z)

    def params(self):
        return {"a": _enc(self.a)}

    @classmethod
    def from_params(cls, p, children):
        return cls(_tup(_dec(p["a"])))


@_register
@dataclass(frozen=True)
class Tuple(Block):
    """Stacks the outputs of maps sharing a source: z -> (f_1(z), ..., f_k(z))."""

    parts: tuple
    name: ClassVar[str] = "tuple"

    def __post_init__(self):
        dims = {p.dim_in for p in self.parts}
        if len(dims) != 1:
            raise DimensionError("tuple components must share their source dimension")

    dim_in = property(lambda self: self.parts[0].dim_in)
    dim_out = property(lambda self: sum(p.dim_out for p in self.parts))

    def value(self, z):
        return np.concatenate([p.value(z) for p in self.parts], axis=-1)

    def jac(self, z):
        return np.concatenate([p.jac(z) for p in self.parts], axis=-2)

    def children(self):
        return self.parts

    @classmethod
    def from_params(cls, p, children):
        return cls(tuple(children))


@_register
@dataclass(frozen=True)
class Compose(Block):
    """outer o inner."""

    outer: Block
    inner: Block
    name: ClassVar[str] = "compose"

    def __post_init__(self):
        if self.outer.dim_in != self.inner.dim_out:
            raise DimensionError(
                f"cannot compose: outer takes C^{self.outer.dim_in}, inner gives C^{self.inner.dim_out}"
            )

    dim_in = property(lambda self: self.inner.dim_in)
    dim_out = property(lambda self: self.outer.dim_out)

    def value(self, z):
        return self.outer.value(self.inner.value(z))

    def jac(self, z):
        w = self.inner.value(z)
        return self.outer.jac(w) @ self.inner.jac(z)

    def children(self):
        return (self.outer, self.inner)

    @classmethod
    def from_params(cls, p, children):
        return cls(children[0], children[1])


def _space_str(s) -> Optional[str]:
    return None if s is None else str(s)


def _parse_target(text):
    if text is None:
        return None
    if text.startswith("interval:"):
        _, a, b = text.split(":")
        return Interval(float(a), float(b))
    if text.startswith("intervals:"):
        return tuple(_parse_target("interval:" + t) for t in text[len("intervals:"):].split(","))
    return parse_space(text)


@dataclass(frozen=True)
class HoloMap:
    """A holomorphic map with declared source and target domains."""

    expr: Block
    source: Optional[Space] = None
    target: Optional[Space] = None
    label: str = field(default="", compare=False)

    @property
    def dim_in(self) -> int:
        return self.expr.dim_in

    @property
    def dim_out(self) -> int:
        return self.expr.dim_out

    def _prepare(self, z, check: bool) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        if self.dim_in == 1:
            z = z[..., None]
        elif z.shape[-1:] != (self.dim_in,):
            raise DimensionError(f"expected points of C^{self.dim_in}, got shape {z.shape}")
        if check and self.source is not None:
            inside = self.source.contains(z[..., 0] if self.dim_in == 1 else z)
            if not np.all(inside):
                raise DomainError(f"evaluation point outside source {self.source}")
        return z

    def batch(self, z) -> np.ndarray:
        """Raw evaluation: (..., n) -> (..., m), no squeezing, no domain check."""
        return self.expr.value(np.asarray(z, dtype=complex))

    def __call__(self, z, check: bool = True):
        v = self.expr.value(self._prepare(z, check))
        return v[..., 0] if self.dim_out == 1 else v

    def deriv(self, z, check: bool = True):
        """Exact complex Jacobian, with planar sides squeezed (see module docstring)."""
        J = self.expr.jac(self._prepare(z, check))
        if self.dim_out == 1 and self.dim_in == 1:
            return J[..., 0, 0]
        if self.dim_out == 1:
            return J[..., 0, :]
        if self.dim_in == 1:
            return J[..., :, 0]
        return J

    def jacobian(self, z, check: bool = True) -> np.ndarray:
        """Exact Jacobian with shape (..., m, n) regardless of dimensions."""
        return self.expr.jac(self._prepare(z, check))

    def compose(self, inner: "HoloMap") -> "HoloMap":
        return compose(self, inner)

    def with_label(self, label: str) -> "HoloMap":
        return HoloMap(self.expr, self.source, self.target, label)

    def to_dict(self) -> dict:
        return {
            "expr": self.expr.to_dict(),
            "source": _space_str(self.source),
            "target": _target_str(self.target),
            "label": self.label,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "HoloMap":
        return cls(
            block_from_dict(d["expr"]),
            _parse_target(d.get("source")),
            _parse_target(d.get("target")),
            d.get("label", ""),
        )

    @classmethod
    def from_json(cls, text: str) -> "HoloMap":
        return cls.from_dict(json.loads(text))


def _target_str(t):
    if isinstance(t, tuple):
        return "intervals:" + ",".join(str(i)[len("interval:"):] for i in t)
    return _space_str(t)


def map_from_dict(d: dict):
    if "analytic" in d:
        return HarmonicMap.from_dict(d)
    return HoloMap.from_dict(d)


def evaluate(m: HoloMap, z):
    return m(z)


def deriv(m: HoloMap, z):
    return m.deriv(z)


def compose(*maps: HoloMap) -> HoloMap:
    """compose(f, g, h) = f o g o h; source from the innermost, target from the outermost."""
    if not maps:
        raise DimensionError("compose needs at least one map")
    expr = maps[-1].expr
    for m in reversed(maps[:-1]):
        expr = Compose(m.expr, expr)
    return HoloMap(expr, maps[-1].source, maps[0].target)


# -- builders ---------------------------------------------------------------

def identity(n: int = 1, source=None) -> HoloMap:
    return HoloMap(Identity(n), source, source)


def constant(c, n: int = 1) -> HoloMap:
    return HoloMap(Constant(_tup(c), n))


def affine(A, b=None) -> HoloMap:
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    b = np.zeros(A.shape[0], dtype=complex) if b is None else np.atleast_1d(np.asarray(b, dtype=complex))
    if b.shape != (A.shape[0],):
        raise DimensionError("affine offset has the wrong length")
    return HoloMap(Affine(_tup(A), _tup(b), A.shape))


def project(k: int, n: int) -> HoloMap:
    if not 0 <= k < n:
        raise DimensionError(f"coordinate {k} out of range for C^{n}")
    return HoloMap(Project(k, n))


def inner(c) -> HoloMap:
    return HoloMap(Inner(_tup(c)))


def elementwise(name: str, n: int = 1, k: int = 2) -> HoloMap:
    blocks = {"tan": Tan, "arctan": Arctan, "exp": Exp, "log": Log,
              "cayley": Cayley, "inverse_cayley": InverseCayley}
    if name == "power":
        return HoloMap(Power(k, n))
    try:
        return HoloMap(blocks[name](n))
    except KeyError:
        raise DomainError(f"unknown elementwise block {name!r}") from None


def blaschke(zeros, theta: float = 0.0) -> HoloMap:
    from .domains import PlanarDomain

    disk = PlanarDomain.disk()
    return HoloMap(Blaschke(tuple(complex(a) for a in zeros), float(theta)), disk, disk)


def disk_mobius(a: complex, theta: float = 0.0) -> HoloMap:
    """exp(i theta) (z - a)/(1 - conj(a) z); with theta = 0 this is T_a."""
    return blaschke([a], theta)


def ball_mobius(a) -> HoloMap:
    from .domains import Ball

    a = _tup(a)
    B = Ball(len(a))
    return HoloMap(BallMobius(a), B, B)


def tuple_map(*parts: HoloMap) -> HoloMap:
    return HoloMap(Tuple(tuple(p.expr for p in parts)), parts[0].source)


# -- harmonic maps ----------------------------------------------------------

def _real_jacobian(J: np.ndarray) -> tuple:
    """Real parts (A, B) of a complex Jacobian J = A + iB.

    In real coordinates (x, y) of the source, d(Re F) = [A, -B] and
    d(Im F) = [B, A].
    """
    return J.real, J.imag


@dataclass(frozen=True)
class HarmonicMap:
    """Re F, or Re F + i * scale * Im G (G defaults to F).

    With ``imag_scale == 0`` the map is real valued (pluriharmonic when the
    source has several variables). The complex variant realizes the f_a/g_a
    family of harmonic maps into a strip.
    """

    analytic: HoloMap
    imag_scale: float = 0.0
    imag_map: Optional[HoloMap] = None
    target: object = None
    label: str = field(default="", compare=False)

    @property
    def part(self) -> str:
        return "real" if self.imag_scale == 0 else "real+imag"

    @property
    def source(self):
        return self.analytic.source

    def __call__(self, z, check: bool = True):
        F = self.analytic(z, check)
        if self.imag_scale == 0:
            return np.real(F)
        G = F if self.imag_map is None else self.imag_map(z, check)
        return np.real(F) + 1j * self.imag_scale * np.imag(G)

    def real_jacobian(self, z, check: bool = True) -> np.ndarray:
        """Jacobian in real coordinates, shape (..., rows, 2n).

        Source coordinates are ordered (Re z_1..Re z_n, Im z_1..Im z_n); rows are
        Re of each output, followed by Im rows for the complex variant.
        """
        A, B = _real_jacobian(self.analytic.jacobian(z, check))
        rows = [np.concatenate([A, -B], axis=-1)]
        if self.imag_scale != 0:
            J2 = A + 1j * B if self.imag_map is None else self.imag_map.jacobian(z, check)
            A2, B2 = _real_jacobian(J2)
            rows.append(self.imag_scale * np.concatenate([B2, A2], axis=-1))
        return np.concatenate(rows, axis=-2)

    def to_dict(self) -> dict:
        d = {"analytic": self.analytic.to_dict(), "imag_scale": self.imag_scale, "label": self.label}
        if self.imag_map is not None:
            d["imag_map"] = self.imag_map.to_dict()
        if self.target is not None:
            d["target"] = _target_str(self.target)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "HarmonicMap":
        im = d.get("imag_map")
        return cls(
            HoloMap.from_dict(d["analytic"]),
            float(d.get("imag_scale", 0.0)),
            None if im is None else HoloMap.from_dict(im),
            _parse_target(d.get("target")),
            d.get("label", ""),
        )


def gradient_norm(h: HarmonicMap, z):
    """|grad h| for real-valued h, otherwise the maximal stretch L_h of dh.

    For h = Re F with F holomorphic the Cauchy-Riemann equations give
    |grad Re F| = |F'| (the Euclidean norm of the complex gradient).
    """
    R = h.real_jacobian(z)
    if h.imag_scale == 0 and R.shape[-2] == 1:
        return np.linalg.norm(R[..., 0, :], axis=-1)
    return operator_norm(R)
