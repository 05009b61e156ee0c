import json
import math

import numpy as np
import pytest

from invmetric import maps
from invmetric.core import fd_jacobian
from invmetric.domains import Ball, PlanarDomain, ProductDomain
from invmetric.errors import DimensionError, DomainError
from invmetric.families import FAMILY_KINDS, quasi_points, random_points, sample_member
from invmetric.planar import chart_from_disk, chart_to_disk

DISK = PlanarDomain.disk()
S0 = PlanarDomain.strip()


def test_chart_block_examples():
    f0 = chart_to_disk(S0)
    assert f0(0.0) == 0
    assert f0.deriv(0.0) == pytest.approx(math.pi / 4, rel=1e-15)


def test_ball_mobius_composed_twice_is_identity():
    rng = np.random.default_rng(0)
    for a in random_points(Ball(3), rng, 20):
        f = maps.ball_mobius(a)
        ff = maps.compose(f, f)
        z = random_points(Ball(3), rng, 50)
        assert np.allclose(ff(z), z, atol=1e-10)


def test_disk_mobius_derivative_at_zero_point():
    for z1 in [0.3, 0.5 - 0.2j, -0.9j]:
        T = maps.disk_mobius(z1)
        assert T(z1) == 0
        assert T.deriv(z1) == pytest.approx(1 / (1 - abs(z1) ** 2), rel=1e-13)


def test_principal_log_branch_rejected():
    with pytest.raises(DomainError, match="nonpositive"):
        maps.elementwise("log")(-1.0 + 0j, check=False)
    with pytest.raises(DomainError):
        maps.elementwise("nope")


def test_out_of_domain_and_dimension_errors():
    with pytest.raises(DomainError):
        maps.disk_mobius(0.2)(1.5)
    with pytest.raises(DimensionError):
        maps.ball_mobius([0.1, 0.2])(np.zeros(3))
    with pytest.raises(DomainError):
        maps.blaschke([1.2])


def _members():
    out = []
    for j in range(12):
        out.append(sample_member("disk-to-disk", 3, j))
        out.append(sample_member("disk-to-planar", 3, j, target=PlanarDomain.strip(0, 2)))
        out.append(sample_member("disk-to-planar", 3, j, target=PlanarDomain.punctured_disk()))
        out.append(sample_member("ball-to-ball", 3, j, n=2, m=3))
        out.append(sample_member("ball-to-planar", 3, j, n=3, target=PlanarDomain.strip(1, math.inf)))
        out.append(sample_member("ball2-to-product", 3, j, target=ProductDomain((S0, PlanarDomain.half_plane()))))
        out.append(sample_member("polydisk-to-polydisk", 3, j))
        out.append(sample_member("polydisk-to-ball", 3, j, n=2, m=2))
    return out


@pytest.mark.parametrize("f", _members(), ids=lambda f: f"{f.source}->{f.target}:{f.label}")
def test_chain_rule_matches_fd(f):
    z = quasi_points(f.source, 8, seed=1, margin=0.05)
    for a in z:
        a = np.atleast_1d(a)
        exact = f.jacobian(a if a.size > 1 else a[0])
        assert np.allclose(exact, fd_jacobian(f, a), atol=1e-6, rtol=1e-6)


def test_chain_rule_is_structural():
    g = maps.compose(maps.elementwise("arctan"), maps.disk_mobius(0.3))
    f = maps.compose(maps.elementwise("exp"), maps.affine([[-0.5]]), maps.elementwise("cayley"))
    h = maps.compose(f, g)
    z = quasi_points(DISK, 1000, seed=2, margin=0.01)
    assert np.allclose(h.deriv(z), f.deriv(g(z)) * g.deriv(z), rtol=1e-13, atol=0)


def test_fd_agrees_on_1000_points():
    f = sample_member("ball-to-ball", 9, 5, n=2, m=2)
    pts = quasi_points(Ball(2), 1000, seed=9, margin=0.01)
    J = f.jacobian(pts)
    worst = max(np.max(np.abs(J[k] - fd_jacobian(f, pts[k]))) for k in range(len(pts)))
    assert worst < 1e-6


@pytest.mark.parametrize("j", range(6))
def test_serialization_round_trip(j):
    for f in [sample_member("ball-to-ball", 1, j, n=3, m=2),
              sample_member("disk-to-planar", 1, j, target=PlanarDomain.punctured_disk()),
              sample_member("harmonic-disk-to-interval", 1, j, complex_valued=True),
              sample_member("pluriharmonic-ball2-to-interval-sq", 1, j)]:
        d = json.loads(json.dumps(f.to_dict()))
        g = maps.map_from_dict(d)
        assert g.to_dict() == f.to_dict()
        z = quasi_points(f.source, 16, seed=j)
        assert np.array_equal(g(z), f(z))


def test_gradient_norm_examples():
    ident = maps.HarmonicMap(maps.identity(1, DISK))
    assert maps.gradient_norm(ident, 0.3) == pytest.approx(1)
    sharp = maps.HarmonicMap(chart_from_disk(S0))
    assert maps.gradient_norm(sharp, 0.0) == pytest.approx(4 / math.pi, rel=1e-14)


def test_g_a_stretch_grows_linearly():
    F = chart_from_disk(S0)
    for a in [1.0, 10.0, 100.0, 1e4]:
        g = maps.HarmonicMap(F, a)
        assert maps.gradient_norm(g, 0.0) == pytest.approx(a * 4 / math.pi, rel=1e-12)
