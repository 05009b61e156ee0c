import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from invmetric.core import (decompose_along, fd_jacobian, hermitian_inner, norm, operator_norm,
                            operator_norm_with_direction)
from invmetric.errors import DimensionError, DomainError
from invmetric import maps

finite = st.floats(-10, 10, allow_nan=False)
cplx = st.builds(complex, finite, finite)


def vec(n):
    return st.lists(cplx, min_size=n, max_size=n).map(lambda v: np.array(v, dtype=complex))


def test_inner_examples():
    assert hermitian_inner([1, 0], [1, 0]) == 1
    assert hermitian_inner([1j, 0], [0, 1]) == 0
    assert hermitian_inner([1 + 1j, 2], [1, 1j]) == pytest.approx(1 - 1j)


def test_inner_dimension_mismatch():
    with pytest.raises(DimensionError):
        hermitian_inner([1, 2], [1])


@given(vec(3), vec(3))
def test_inner_conjugate_symmetry(z, w):
    assert hermitian_inner(z, w) == pytest.approx(np.conj(hermitian_inner(w, z)))


@given(vec(3))
def test_norm_nonnegative_zero_iff_zero(z):
    n = norm(z)
    assert n >= 0
    assert (n == 0) == (not np.any(z))


def test_decompose_examples():
    d = decompose_along([1, 0], [1, 0])
    assert np.allclose(d.parallel, [1, 0]) and np.allclose(d.orthogonal, 0) and d.alpha == 0
    d = decompose_along([0, 1], [1, 0])
    assert np.allclose(d.parallel, 0) and d.alpha == pytest.approx(math.pi / 2)
    assert decompose_along([1, 1], [1, 0]).alpha == pytest.approx(math.pi / 4)


def test_decompose_zero_line():
    with pytest.raises(DomainError, match="undefined complex line"):
        decompose_along([1, 0], [0, 0])


@given(vec(3), vec(3))
def test_decompose_invariants(u, p):
    if np.linalg.norm(p) < 1e-3:
        return
    d = decompose_along(u, p)
    nu = np.linalg.norm(u)
    assert np.allclose(d.parallel + d.orthogonal, u, atol=1e-12 * max(nu, 1))
    assert abs(np.vdot(d.orthogonal, d.parallel)) <= 1e-12 * max(nu ** 2, 1)
    assert np.linalg.norm(d.parallel) ** 2 + np.linalg.norm(d.orthogonal) ** 2 == pytest.approx(
        nu ** 2, rel=1e-12, abs=1e-300)
    assert math.cos(d.alpha) * nu == pytest.approx(np.linalg.norm(d.parallel), abs=1e-12 * max(nu, 1))
    assert math.sin(d.alpha) * nu == pytest.approx(np.linalg.norm(d.orthogonal), abs=1e-12 * max(nu, 1))
    assert 0 <= d.alpha <= math.pi / 2


def test_operator_norm_examples():
    assert operator_norm(np.eye(2)) == pytest.approx(1)
    assert operator_norm(np.diag([3, 4j])) == pytest.approx(4)
    assert operator_norm(np.array([[1, 1]])) == pytest.approx(math.sqrt(2))


def test_operator_norm_rejects_nonfinite():
    with pytest.raises(DomainError):
        operator_norm(np.array([[np.nan, 1]]))


@settings(max_examples=50)
@given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 2 ** 32 - 1))
def test_operator_norm_dominates_and_is_attained(m, n, seed):
    rng = np.random.default_rng(seed)
    J = rng.normal(size=(m, n)) + 1j * rng.normal(size=(m, n))
    val, v = operator_norm_with_direction(J)
    vs = rng.normal(size=(100, n)) + 1j * rng.normal(size=(100, n))
    vs /= np.linalg.norm(vs, axis=1, keepdims=True)
    assert np.all(np.linalg.norm(vs @ J.T, axis=1) <= val * (1 + 1e-10))
    assert np.linalg.norm(J @ v) == pytest.approx(val, rel=1e-8)
    assert val == pytest.approx(np.linalg.svd(J, compute_uv=False)[0], rel=1e-8)


def test_fd_jacobian_examples():
    ident = maps.identity(2)
    assert np.allclose(fd_jacobian(ident, [0.3, -0.2j]), np.eye(2), atol=1e-9)
    sq = maps.elementwise("power", k=2)
    assert fd_jacobian(sq, [1.0])[0, 0] == pytest.approx(2, abs=1e-6)


def test_fd_jacobian_ball_mobius():
    a = np.array([0.3 + 0.1j, -0.2j])
    f = maps.ball_mobius(a)
    z = np.array([0.1, 0.4 - 0.2j])
    assert np.allclose(fd_jacobian(f, z), f.jacobian(z), atol=1e-6)


def test_norm_extreme_magnitudes():
    assert norm([0, 0, 7.39e-174j]) == 7.39e-174
    assert norm([1e300, 1e300]) == pytest.approx(np.sqrt(2) * 1e300)
