import math

import numpy as np
import pytest

from invmetric.domains import Ball, PlanarDomain, ProductDomain, polydisk
from invmetric.errors import DimensionError, DomainError
from invmetric.families import random_points
from invmetric.oracle import PathProblem, closed_form_distance, path_length, path_oracle

ATANH_HALF = math.atanh(0.5)
# frozen values of the default-resolution oracle (256 segments)
FROZEN = {
    "disk": 0.5493061443340549,
    "polydisk": 0.5493061443340549,
    "ball": 0.5493061443340549,
}


@pytest.mark.parametrize("space,a,b,key", [
    (PlanarDomain.disk(), 0, 0.5, "disk"),
    (polydisk(2), [0, 0], [0.5, 0.3], "polydisk"),
    (Ball(2), [0, 0], [0.5, 0], "ball"),
])
def test_examples(space, a, b, key):
    res = path_oracle(space, a, b)
    assert ATANH_HALF - 1e-12 <= res.value <= ATANH_HALF + 1e-3
    assert res.value == pytest.approx(FROZEN[key], abs=1e-12)
    assert res.segments == 256 and res.path.shape[0] == 257


@pytest.mark.parametrize("space", [
    PlanarDomain.disk(), PlanarDomain.half_plane(), PlanarDomain.strip(), PlanarDomain.strip(0, 3),
    PlanarDomain.strip(1, math.inf), Ball(2), Ball(3), polydisk(2),
    ProductDomain((PlanarDomain.half_plane(), PlanarDomain.strip())),
], ids=str)
def test_sandwich(space):
    rng = np.random.default_rng(7)
    a, b = random_points(space, rng, 3, margin=1e-2), random_points(space, rng, 3, margin=1e-2)
    for p, q in zip(a, b):
        closed = closed_form_distance(space, p, q)
        res = path_oracle(space, p, q, segments=128)
        assert closed - 1e-12 <= res.value <= closed + 1e-3
        assert np.all(space.contains(res.path[:, 0] if isinstance(space, PlanarDomain) else res.path))


def test_punctured_radial_distance():
    # log lifts the punctured disk to the left half-plane, where the radial
    # segment is a geodesic: d = |log(log r2 / log r1)|/2
    dom = PlanarDomain.punctured_disk()
    for r1, r2 in [(0.2, 0.6), (0.05, 0.9), (0.5, 0.51)]:
        expected = 0.5 * abs(math.log(math.log(r2) / math.log(r1)))
        res = path_oracle(dom, r1, r2, segments=64)
        assert expected - 1e-9 <= res.value <= expected + 1e-3


def test_punctured_is_below_disk_distance():
    # the inclusion into the disk contracts
    dom = PlanarDomain.punctured_disk()
    a, b = 0.3 * np.exp(0.4j), 0.6 * np.exp(2.5j)
    res = path_oracle(dom, a, b, segments=64)
    assert res.value >= closed_form_distance(PlanarDomain.disk(), a, b) - 1e-12
    assert np.all(dom.contains(res.path[:, 0]))


def test_monotone_refinement():
    space = polydisk(2)
    a, b = np.array([0.1 + 0.7j, -0.5]), np.array([-0.8j, 0.6 + 0.2j])
    vals = [path_oracle(space, a, b, segments=s).value for s in (16, 32, 64, 128)]
    assert all(v2 <= v1 + 1e-9 for v1, v2 in zip(vals, vals[1:]))


def test_straight_path_length_exact_on_radius():
    nodes = np.linspace(0, 0.9, 17)[:, None].astype(complex)
    assert path_length(PlanarDomain.disk(), nodes) == pytest.approx(math.atanh(0.9), rel=1e-12)


def test_equal_endpoints_and_validation():
    assert path_oracle(Ball(2), [0.1, 0.2], [0.1, 0.2]).value == 0
    with pytest.raises(DomainError):
        PathProblem(Ball(2), [0, 0], [0.5, 0], segments=1)
    with pytest.raises(DomainError):
        path_oracle(Ball(2), [0, 0], [1.0, 0])
    with pytest.raises(DimensionError):
        path_oracle(Ball(2), [0, 0], [0.5])


def test_problem_object_and_float():
    res = path_oracle(PathProblem(PlanarDomain.disk(), 0, 0.5, segments=32))
    assert float(res) == res.value and res.segments == 32
