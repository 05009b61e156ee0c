import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from invmetric import maps
from invmetric.ball import (distortion_M, distortion_batch, gradient_D, invariant_gradient, kob_dist_ball,
                            kob_norm_ball, mobius_apply, mobius_derivative, s_factor)
from invmetric.core import fd_jacobian
from invmetric.domains import Ball
from invmetric.errors import DomainError
from invmetric.families import random_points, sample_member


def rand_ball(rng, count, n, margin=1e-3):
    return random_points(Ball(n), rng, count, margin=margin)


def rand_vec(rng, count, n):
    return rng.normal(size=(count, n)) + 1j * rng.normal(size=(count, n))


def test_mobius_examples():
    a = np.array([0.3 + 0.2j, -0.4j])
    assert np.allclose(mobius_apply(a, a), 0, atol=1e-15)
    assert np.allclose(mobius_apply(a, np.zeros(2)), a)
    assert np.allclose(mobius_apply(np.zeros(2), a), -a)
    assert np.allclose(mobius_derivative(np.zeros(3), np.array([0.1, 0.2, 0.3])), -np.eye(3))


def test_mobius_involution_sweep():
    rng = np.random.default_rng(1)
    for n in (1, 2, 3):
        a, z = rand_ball(rng, 1000, n), rand_ball(rng, 1000, n)
        assert np.allclose(mobius_apply(a, mobius_apply(a, z)), z, atol=1e-10)


def test_mobius_outside():
    with pytest.raises(DomainError):
        mobius_apply([0.1, 0], [1.0, 0])


def test_mobius_derivative_matches_fd():
    rng = np.random.default_rng(2)
    for a, z in zip(rand_ball(rng, 50, 2, 0.05), rand_ball(rng, 50, 2, 0.05)):
        f = maps.ball_mobius(a)
        assert np.allclose(mobius_derivative(a, z), fd_jacobian(f, z), atol=1e-6)


def test_mobius_derivative_stretch_at_center():
    a = np.array([0.6, 0.0])
    J = mobius_derivative(a, a)
    s2 = 1 - 0.36
    assert np.linalg.norm(J @ [1, 0]) == pytest.approx(1 / s2)
    assert np.linalg.norm(J @ [0, 1]) == pytest.approx(1 / math.sqrt(s2))


def test_distortion_examples():
    assert distortion_M(np.zeros(2), [0.3, 1j]) == pytest.approx(1)
    assert distortion_M([0.6, 0], [1, 0]) == pytest.approx(1.5625)
    assert distortion_M([0.6, 0], [0, 1]) == pytest.approx(1.25)
    with pytest.raises(DomainError, match="zero tangent"):
        distortion_M([0.1, 0], [0, 0])


def test_distortion_matches_fd_ratio_and_bracket():
    rng = np.random.default_rng(3)
    p, u = rand_ball(rng, 1000, 2), rand_vec(rng, 1000, 2)
    M = distortion_batch(p, u)
    for k in range(0, 1000, 10):
        J = fd_jacobian(maps.ball_mobius(p[k]), p[k], h=1e-7)
        ratio = np.linalg.norm(J @ u[k]) / np.linalg.norm(u[k])
        assert M[k] == pytest.approx(ratio, rel=1e-6)
    s = np.sqrt(s_factor(p) ** 2)
    assert np.all(1 / s <= M * (1 + 1e-12)) and np.all(M <= (1 / s ** 2) * (1 + 1e-12))


def test_kob_norm_examples():
    assert float(kob_norm_ball(np.zeros(2), [0.6, 0.8])) == pytest.approx(1)
    assert float(kob_norm_ball([0.3, 0.1], [0, 0])) == 0
    v = kob_norm_ball([0.6, 0], [1, 0])
    assert v.value == pytest.approx(1.5625) and v.normalization == "kob"


@settings(max_examples=50)
@given(st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False))
def test_kob_norm_homogeneous(c):
    p, u = np.array([0.3 + 0.1j, -0.5j]), np.array([0.2, 1 - 1j])
    assert float(kob_norm_ball(p, c * u)) == pytest.approx(abs(c) * float(kob_norm_ball(p, u)), rel=1e-12, abs=1e-15)


def test_kob_dist_examples():
    a = np.array([0.2, 0.1j])
    assert kob_dist_ball(a, a) == 0
    assert kob_dist_ball(np.zeros(2), [0.5, 0]) == pytest.approx(math.atanh(0.5), rel=1e-15)
    assert kob_dist_ball(np.zeros(2), [0.5, 0], "hyp") == pytest.approx(math.log(3), rel=1e-15)


def test_kob_dist_symmetric_and_invariant():
    rng = np.random.default_rng(4)
    a, b = rand_ball(rng, 1000, 3), rand_ball(rng, 1000, 3)
    assert np.allclose(kob_dist_ball(a, b), kob_dist_ball(b, a), atol=1e-10)
    c = rand_ball(rng, 1, 3)[0]
    assert np.allclose(kob_dist_ball(mobius_apply(c, a), mobius_apply(c, b)), kob_dist_ball(a, b),
                       rtol=1e-8, atol=1e-10)


def test_gradient_examples():
    f = maps.HoloMap(maps.project(0, 3).expr, Ball(3))
    assert np.allclose(gradient_D(f, [0.1, 0.2, 0.3]), [1, 0, 0])
    c = np.array([0.2, -0.3j])
    g = maps.HoloMap(maps.affine(c[None, :]).expr, Ball(2))
    assert np.allclose(gradient_D(g, [0.1, 0.4]), c)
    ident = maps.identity(3)
    assert np.linalg.norm(ident.jacobian(np.zeros(3))) == pytest.approx(math.sqrt(3))


def test_invariant_gradient_at_origin_and_fd():
    f = sample_member("ball-to-ball", 5, 3, n=2, m=1)
    z0 = np.zeros(2)
    assert np.linalg.norm(invariant_gradient(f, z0)) == pytest.approx(np.linalg.norm(gradient_D(f, z0)))
    z = np.array([0.4, 0.0])
    lin = maps.HoloMap(maps.project(0, 2).expr, Ball(2))
    comp = maps.compose(lin, maps.ball_mobius(z))
    fd = fd_jacobian(comp, np.zeros(2))[0]
    assert np.allclose(invariant_gradient(lin, z), fd, atol=1e-6)
    assert np.linalg.norm(invariant_gradient(lin, z)) == pytest.approx(1 - 0.16)


def test_invariant_gradient_sandwich():
    rng = np.random.default_rng(6)
    for n in (2, 3):
        for j in range(50):
            f = sample_member("ball-to-ball", 11, j, n=n, m=1)
            for z in rand_ball(rng, 20, n):
                s = float(s_factor(z))
                D = np.linalg.norm(gradient_D(f, z))
                Dt = np.linalg.norm(invariant_gradient(f, z))
                assert s ** 2 * D <= Dt + 1e-9 and Dt <= s * D + 1e-9
