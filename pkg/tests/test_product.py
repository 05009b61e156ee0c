import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from invmetric import maps
from invmetric.domains import PlanarDomain, ProductDomain, parse_space, polydisk
from invmetric.errors import DomainError
from invmetric.families import random_points
from invmetric.planar import chart_to_disk, hyp_density
from invmetric.product import (finsler_polydisk, finsler_product, kob_dist_polydisk, kob_dist_product,
                               polydisk_image_norm, product_finsler, real_projection_contract, strip_square)

U2 = polydisk(2)
HALF2 = ProductDomain((PlanarDomain.half_plane(),) * 2)


def test_polydisk_distance_examples():
    z = np.array([0.1j, -0.3])
    assert kob_dist_polydisk(z, z) == 0
    assert kob_dist_polydisk([0, 0], [0.5, 0.3]) == pytest.approx(math.atanh(0.5), rel=1e-15)
    assert kob_dist_polydisk([0, 0], [0.5, 0.3], "hyp") == pytest.approx(math.log(3), rel=1e-15)
    w = np.array([0.4, 0.2 + 0.1j])
    assert kob_dist_polydisk(z[::-1], w[::-1]) == kob_dist_polydisk(z, w)
    with pytest.raises(DomainError):
        kob_dist_polydisk([0, 1.2], [0, 0])


def test_finsler_polydisk_examples():
    assert float(finsler_polydisk([0, 0], [1, 0])) == 1
    assert float(finsler_polydisk([0, 0], [0.8, 0.6j])) == pytest.approx(0.8)
    assert float(finsler_polydisk([0.6, 0.8], [1, 1])) == pytest.approx(1 / 0.36)
    assert float(finsler_polydisk([0.3, 0.1], [0, 0])) == 0


def test_finsler_product_examples():
    rng = np.random.default_rng(1)
    for p, u in zip(random_points(U2, rng, 50), rng.normal(size=(50, 2)) + 1j * rng.normal(size=(50, 2))):
        assert float(finsler_product(U2, p, u)) == float(finsler_polydisk(p, u))
    assert float(finsler_product(HALF2, [1, 1], [1, 0])) == pytest.approx(0.5)
    assert float(finsler_product(HALF2, [1, 1], [1, 0], "hyp")) == pytest.approx(1.0)
    with pytest.raises(DomainError, match="simply connected"):
        finsler_product(ProductDomain((PlanarDomain.punctured_disk(), PlanarDomain.disk())), [0.5, 0], [1, 0])


def test_half_plane_product_matches_cayley_transport():
    rng = np.random.default_rng(2)
    c = chart_to_disk(PlanarDomain.half_plane())
    for p in random_points(HALF2, rng, 50, margin=0.05):
        u = rng.normal(size=2) + 1j * rng.normal(size=2)
        q, v = c(p), c.deriv(p) * u
        assert float(finsler_product(HALF2, p, u)) == pytest.approx(float(finsler_polydisk(q, v)), rel=1e-10)


@settings(max_examples=50)
@given(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False))
def test_finsler_product_homogeneous(c):
    p, u = np.array([0.3, 1.2 + 4j]), np.array([1 - 2j, 0.5])
    om = ProductDomain((PlanarDomain.disk(), PlanarDomain.strip(0, 3)))
    assert float(finsler_product(om, p, c * u)) == pytest.approx(abs(c) * float(finsler_product(om, p, u)),
                                                                 rel=1e-12, abs=1e-15)


def test_finsler_polydisk_monotone_in_moduli():
    rng = np.random.default_rng(3)
    for _ in range(200):
        p = random_points(U2, rng, 1)[0]
        u = rng.normal(size=2) + 1j * rng.normal(size=2)
        grow = 1 + rng.random(2) * (0.999 / np.abs(p) - 1)
        assert float(finsler_polydisk(p * grow, u)) >= float(finsler_polydisk(p, u)) * (1 - 1e-14)


def test_image_norm_matches_jacobian():
    rng = np.random.default_rng(4)
    for p in random_points(U2, rng, 100):
        u = rng.normal(size=2) + 1j * rng.normal(size=2)
        phi = maps.tuple_map(maps.compose(maps.disk_mobius(p[0]), maps.project(0, 2)),
                             maps.compose(maps.disk_mobius(p[1]), maps.project(1, 2)))
        assert polydisk_image_norm(p, u) == pytest.approx(np.linalg.norm(phi.jacobian(p) @ u), rel=1e-9)


def test_real_projection_examples():
    p = np.array([0.3 + 0.5j, -0.2 - 1j])
    assert real_projection_contract(p, p) == (0, 0)
    q = np.array([-0.6 + 0.5j, 0.7 - 1j])
    first, second = real_projection_contract(p, q)
    assert first == pytest.approx(second, abs=1e-10)


def test_real_projection_contracts_and_density_depends_on_real_part():
    rng = np.random.default_rng(5)
    sq = strip_square()
    p, q = random_points(sq, rng, 1000), random_points(sq, rng, 1000)
    for a, b in zip(p, q):
        first, second = real_projection_contract(a, b)
        assert first <= second + 1e-9
    s = PlanarDomain.strip(-1, 1)
    assert np.allclose(hyp_density(s, p[:, 0]), hyp_density(s, p[:, 0].real), rtol=1e-14)


def test_vectorized_product_finsler():
    rng = np.random.default_rng(6)
    om = parse_space("product:disk,strip:0:3")
    p = random_points(om, rng, 20)
    u = rng.normal(size=(20, 2)) + 1j * rng.normal(size=(20, 2))
    vals = product_finsler(om, p, u)
    assert np.allclose(vals, [float(finsler_product(om, a, b)) for a, b in zip(p, u)])
    assert np.allclose(kob_dist_product(om, p, p[::-1]), [kob_dist_product(om, a, b) for a, b in zip(p, p[::-1])])
