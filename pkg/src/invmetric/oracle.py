"""Path-minimization oracle for integrated Kobayashi distances.

Interior nodes of a polyline are optimized by red-black block coordinate
descent: every node takes a safeguarded Newton step, built from a
finite-difference model of its local energy. The descent minimizes the
discrete energy sum(L_i^2) of the segment lengths L_i; its minimizers are
shortest polylines with nodes equally spaced in Finsler length, which keeps
near-boundary stretches resolved. Levels run coarse to fine, each doubling the
segment count by inserting midpoints. The reported value is the accurately
integrated length of an admissible polyline, an upper bound for the distance.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ball import ball_finsler
from .domains import Ball, PlanarDomain, ProductDomain
from .errors import DimensionError, DomainError
from .planar import hyp_distance
from .product import kob_dist_product

__all__ = [
    "OracleResult",
    "PathProblem",
    "closed_form_distance",
    "finsler_function",
    "path_length",
    "path_oracle",
]

# 3-point Gauss-Legendre on [0, 1] for the objective
_GL3_T = 0.5 + 0.5 * np.array([-np.sqrt(0.6), 0.0, np.sqrt(0.6)])
_GL3_W = np.array([5.0, 8.0, 5.0]) / 18.0
_PROJECT_MARGIN = 1e-6
_MIN_GAIN = 1e-12
_FTOL = 1e-7
_FD_STEP = 1e-4  # finite-difference step relative to the shorter adjacent segment
_BACKTRACKS = 3
_SMOOTHING = 32.0


@dataclass(frozen=True)
class PathProblem:
    """Minimize the Finsler length between two points of ``space``."""

    space: object
    start: np.ndarray
    end: np.ndarray
    segments: int = 256
    max_iters: int = 500

    def __post_init__(self):
        if self.segments < 2:
            raise DomainError("segments must be >= 2")
        if self.max_iters < 1:
            raise DomainError("max_iters must be >= 1")
        object.__setattr__(self, "start", _as_point(self.space, self.start))
        object.__setattr__(self, "end", _as_point(self.space, self.end))


@dataclass(frozen=True)
class OracleResult:
    value: float
    converged: bool
    iterations: int
    segments: int
    path: np.ndarray = field(repr=False)

    def __float__(self) -> float:
        return self.value


def _dim(space) -> int:
    return 1 if isinstance(space, PlanarDomain) else space.dim


def _as_point(space, z) -> np.ndarray:
    z = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
    if z.size != _dim(space):
        raise DimensionError(f"expected a point of C^{_dim(space)} for {space}")
    inside = space.contains(z[0] if isinstance(space, PlanarDomain) else z)
    if not np.all(inside):
        raise DomainError(f"endpoint outside {space}")
    return z


def _planar_kob_density(dom: PlanarDomain, z: np.ndarray) -> np.ndarray:
    # unchecked version of the kob density, used on nodes already kept inside
    if dom.kind == "disk":
        return 1.0 / (1.0 - np.abs(z) ** 2)
    if dom.kind == "halfplane":
        return 0.5 / z.real
    if dom.kind == "strip":
        if not dom.bounded_strip:
            return 0.5 / (z.real - dom.a)
        width = dom.b - dom.a
        u = (2.0 * z.real - dom.a - dom.b) / width
        return (np.pi / 2) / np.cos(np.pi * u / 2) / width
    r = np.abs(z)
    return -0.5 / (r * np.log(r))


def finsler_function(space, smoothing: float = None):
    """Vectorized Kobayashi-Finsler norm (p, u) -> k(p, u) on arrays (..., n).

    For products, ``smoothing`` = q replaces the max over factors by the
    q-norm of the factor norms, an upper bound that is smooth where the max
    has kinks.
    """
    if isinstance(space, PlanarDomain):
        return lambda p, u: _planar_kob_density(space, p[..., 0]) * np.abs(u[..., 0])
    if isinstance(space, Ball):
        return ball_finsler
    if isinstance(space, ProductDomain):
        def norm(p, u):
            vals = np.stack([_planar_kob_density(f, p[..., k]) * np.abs(u[..., k])
                             for k, f in enumerate(space.factors)], axis=-1)
            top = np.max(vals, axis=-1)
            if smoothing is None:
                return top
            safe = np.where(top > 0, top, 1.0)
            return top * np.sum((vals / safe[..., None]) ** smoothing, axis=-1) ** (1.0 / smoothing)
        return norm
    raise DomainError(f"no Finsler norm for {space!r}")


def closed_form_distance(space, a, b) -> float:
    """Kobayashi distance (kob normalization) where a closed form exists."""
    a, b = _as_point(space, a), _as_point(space, b)
    if isinstance(space, PlanarDomain):
        return hyp_distance(space, a[0], b[0], "kob")
    if isinstance(space, Ball):
        from .ball import kob_dist_ball

        return kob_dist_ball(a, b)
    if isinstance(space, ProductDomain):
        return kob_dist_product(space, a, b)
    raise DomainError(f"no closed form for {space!r}")


def _segment_costs(norm, a, b, t=_GL3_T, w=_GL3_W) -> np.ndarray:
    d = b - a
    pts = a[..., None, :] + t[:, None] * d[..., None, :]
    return norm(pts, d[..., None, :]) @ w


def path_length(space, nodes, rtol: float = 1e-14) -> float:
    """Finsler length of a polyline by adaptive composite 5-point Gauss quadrature.

    Each segment's panel count doubles until its value stabilizes, so segments
    near the boundary (where densities vary fast) are resolved.
    """
    nodes = np.asarray(nodes, dtype=complex)
    norm = finsler_function(space)
    x, wx = np.polynomial.legendre.leggauss(5)
    a, b = nodes[:-1], nodes[1:]

    def panels(idx, pieces):
        t = ((np.arange(pieces)[:, None] + 0.5 + 0.5 * x[None, :]) / pieces).ravel()
        w = np.tile(wx / (2.0 * pieces), pieces)
        return _segment_costs(norm, a[idx], b[idx], t, w)

    idx = np.arange(len(a))
    pieces = 4
    vals = panels(idx, pieces)
    out = vals.copy()
    while idx.size and pieces < 1 << 14:
        pieces *= 2
        finer = panels(idx, pieces)
        out[idx] = finer
        done = np.abs(finer - vals) <= rtol * np.abs(finer) + 1e-300
        idx, vals = idx[~done], finer[~done]
    return float(np.sum(out))


def _project(space, z: np.ndarray) -> np.ndarray:
    if isinstance(space, PlanarDomain):
        return space.project(z[..., 0], _PROJECT_MARGIN)[..., None]
    return space.project(z, _PROJECT_MARGIN)


def _punctured_axes(space) -> list:
    if isinstance(space, PlanarDomain):
        return [0] if space.kind == "punctured" else []
    if isinstance(space, ProductDomain):
        return [k for k, f in enumerate(space.factors) if f.kind == "punctured"]
    return []


def _initial_path(space, a, b, segments) -> np.ndarray:
    t = np.linspace(0.0, 1.0, segments + 1)[:, None]
    nodes = a + t * (b - a)
    for k in _punctured_axes(space):
        # geometric interpolation in polar form never passes through the puncture
        la, lb = np.log(a[k]), np.log(b[k])
        dphi = np.angle(b[k] / a[k])
        nodes[:, k] = np.exp(la + t[:, 0] * (lb.real - la.real) + 1j * (la.imag + t[:, 0] * dphi))
    return _project(space, nodes)


def _level_sizes(segments: int) -> list:
    base = segments
    while base % 2 == 0 and base > 4:
        base //= 2
    sizes = [base]
    while sizes[-1] < segments:
        sizes.append(sizes[-1] * 2)
    return sizes


def _refine(nodes: np.ndarray) -> np.ndarray:
    out = np.empty((2 * len(nodes) - 1, nodes.shape[1]), dtype=complex)
    out[0::2] = nodes
    out[1::2] = 0.5 * (nodes[:-1] + nodes[1:])
    return out


def _to_real(z: np.ndarray) -> np.ndarray:
    return np.concatenate([z.real, z.imag], axis=-1)


def _to_complex(x: np.ndarray) -> np.ndarray:
    n = x.shape[-1] // 2
    return x[..., :n] + 1j * x[..., n:]


def _local_model(local, prev, cur, nxt, f0):
    """Finite-difference gradient and Hessian of each node's local energy in real coordinates.

    Uses 2d axis probes and d(d-1)/2 diagonal probes, all evaluated in one batch.
    Nodes whose probes leave the domain get a zero gradient.
    """
    x0 = _to_real(cur)
    m, d = x0.shape
    eye = np.eye(d)
    ell = np.minimum(np.linalg.norm(cur - prev, axis=-1), np.linalg.norm(nxt - cur, axis=-1))
    h = _FD_STEP * np.maximum(ell, 1e-12 * (1.0 + np.linalg.norm(cur, axis=-1)))
    pairs = [(i, j) for i in range(d) for j in range(i + 1, d)]
    dirs = np.concatenate([eye, -eye] + ([np.array([eye[i] + eye[j] for i, j in pairs])] if pairs else []))
    vals = local(prev, _to_complex(x0 + h[:, None] * dirs[:, None, :]), nxt)
    fp, fm = vals[:d], vals[d:2 * d]
    g = ((fp - fm) / (2.0 * h)).T
    H = np.empty((m, d, d))
    H[:, np.arange(d), np.arange(d)] = ((fp + fm - 2.0 * f0) / h ** 2).T
    for k, (i, j) in enumerate(pairs):
        v = (vals[2 * d + k] - fp[i] - fp[j] + f0) / h ** 2
        H[:, i, j] = H[:, j, i] = v
    bad = ~(np.all(np.isfinite(g), axis=-1) & np.all(np.isfinite(H), axis=(-2, -1)))
    g[bad] = 0.0
    H[bad] = eye
    return x0, g, H


def _newton_steps(g: np.ndarray, H: np.ndarray) -> np.ndarray:
    """-|H|^{-1} g with eigenvalues replaced by their moduli (descent even off convexity)."""
    w, V = np.linalg.eigh(H)
    wabs = np.maximum(np.abs(w), 1e-12 * np.max(np.abs(w), axis=-1, keepdims=True) + 1e-300)
    coef = np.einsum("mji,mj->mi", V, g) / wabs
    return -np.einsum("mij,mj->mi", V, coef)


def _descend(space, norm, nodes, max_iters: int, tol: float, ftol: float):
    """Red-black block coordinate descent on the discrete energy sum(L_i^2).

    Each node takes a Newton step for its local energy (two adjacent segments)
    in its 2n real coordinates, clipped to a per-node trust radius and halved
    on failure. Stops when no node moves more than ``tol`` or a sweep lowers
    the energy by less than ``ftol`` relative. Returns (nodes, sweeps, converged).
    """
    nseg = len(nodes) - 1
    radius = np.full(nseg + 1, 0.25 * np.max(np.abs(np.diff(nodes, axis=0))) + tol)
    colors = [c for c in (np.arange(1, nseg, 2), np.arange(2, nseg, 2)) if c.size]

    def local(prev, y, nxt):
        return _segment_costs(norm, prev, y) ** 2 + _segment_costs(norm, y, nxt) ** 2

    energy = np.sum(_segment_costs(norm, nodes[:-1], nodes[1:]) ** 2)
    for sweep in range(1, max_iters + 1):
        largest = 0.0
        for J in colors:
            prev, nxt, cur = nodes[J - 1], nodes[J + 1], nodes[J]
            f0 = local(prev, cur, nxt)
            x0, g, H = _local_model(local, prev, cur, nxt, f0)
            step = _newton_steps(g, H)
            length = np.linalg.norm(step, axis=-1)
            step *= np.minimum(1.0, radius[J] / np.maximum(length, 1e-300))[:, None]
            accepted = np.zeros(len(J), dtype=bool)
            for attempt in range(_BACKTRACKS):
                trial = _project(space, _to_complex(x0 + step))
                ok = ~accepted & (local(prev, trial, nxt) < f0 * (1.0 - _MIN_GAIN))
                cur[ok] = trial[ok]
                moved = np.linalg.norm(step, axis=-1)
                # first-try success may widen the radius; later successes set it to the step taken
                grown = np.maximum(radius[J], np.minimum(2.0 * moved, 4.0 * radius[J]))
                radius[J] = np.where(ok, grown if attempt == 0 else moved, radius[J])
                if np.any(ok):
                    largest = max(largest, float(np.max(moved[ok])))
                accepted |= ok
                if accepted.all():
                    break
                step = np.where(accepted[:, None], step, 0.25 * step)
            radius[J] = np.where(accepted, radius[J], 0.25 * np.linalg.norm(step, axis=-1) + tol)
            nodes[J] = cur
        new_energy = np.sum(_segment_costs(norm, nodes[:-1], nodes[1:]) ** 2)
        stalled = energy - new_energy <= ftol * new_energy
        energy = new_energy
        if largest < tol or stalled:
            return nodes, sweep, True
    return nodes, max_iters, False


def path_oracle(problem, start=None, end=None, *, segments: int = 256, max_iters: int = 500,
                tol: float = 1e-8, ftol: float = None) -> OracleResult:
    """Integrated Kobayashi distance between two points, by polyline minimization.

    Accepts a :class:`PathProblem` or ``(space, start, end)``. The value is in
    Kobayashi normalization; ``converged`` is False when some level hit
    ``max_iters`` sweeps before the step size fell below ``tol``. The value is
    the shortest polyline length met over the coarse-to-fine levels.
    """
    if not isinstance(problem, PathProblem):
        problem = PathProblem(problem, start, end, segments, max_iters)
    space, a, b = problem.space, problem.start, problem.end
    norm = finsler_function(space, _SMOOTHING)
    sizes = _level_sizes(problem.segments)
    nodes = _initial_path(space, a, b, sizes[0])
    total, converged = 0, True
    if np.array_equal(a, b):
        nodes = _initial_path(space, a, b, problem.segments)
        return OracleResult(0.0, True, 0, problem.segments, nodes)
    base_ftol = _FTOL if ftol is None else ftol
    best_value, best_nodes = np.inf, nodes
    with np.errstate(invalid="ignore", divide="ignore"):
        for level, size in enumerate(sizes):
            if level:
                nodes = _refine(nodes)
            # levels are independent of the target size, so a finer run repeats every coarser level
            nodes, sweeps, ok = _descend(space, norm, nodes, problem.max_iters, tol, base_ftol)
            total += sweeps
            converged = converged and ok
            length = path_length(space, nodes)
            if length <= best_value:
                best_value, best_nodes = length, nodes.copy()
    value = best_value
    while len(best_nodes) < len(nodes):
        best_nodes = _refine(best_nodes)
    nodes = best_nodes
    return OracleResult(value, converged, total, problem.segments, nodes)
