import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from mpshell.rotation import (
    RotationLimitError,
    RotationState,
    curvature_vectors,
    lambda_derivatives,
    lambda_tensor,
    rotation_from_vector,
    shell_wryness,
    update_rotation,
)
from mpshell.tensor_core import axial, skew


def _random_vectors(rng, n, max_angle):
    axis = rng.normal(size=(n, 3))
    axis /= np.linalg.norm(axis, axis=1)[:, None]
    return axis * rng.uniform(0.0, max_angle, n)[:, None]


def test_rodrigues_matches_scipy(rng):
    th = _random_vectors(rng, 200, 3.0)
    np.testing.assert_allclose(rotation_from_vector(th), Rotation.from_rotvec(th).as_matrix(), atol=1e-13)


@pytest.mark.parametrize("angle", [0.0, 1e-9, 1e-5, 1e-3, 0.5, 2.0, 3.0])
def test_orthogonality(angle, rng):
    th = _random_vectors(rng, 1, 1.0)[0]
    th = th / np.linalg.norm(th) * angle
    r = rotation_from_vector(th)
    np.testing.assert_allclose(r.T @ r, np.eye(3), atol=1e-14)
    assert np.linalg.det(r) == pytest.approx(1.0)


def test_lambda_is_spin_operator(rng):
    # dR R^T = skew(Lambda dtheta), checked by central differences
    h = 1e-6
    for th in list(_random_vectors(rng, 20, 3.0)) + [np.zeros(3), np.array([1e-6, 0, 0])]:
        lam = lambda_tensor(th)
        r = rotation_from_vector(th)
        for k in range(3):
            e = np.eye(3)[k] * h
            dr = (rotation_from_vector(th + e) - rotation_from_vector(th - e)) / (2 * h)
            np.testing.assert_allclose(axial(dr @ r.T), lam[:, k], atol=1e-8)


def test_lambda_derivatives_fd(rng):
    h = 1e-6
    for th in list(_random_vectors(rng, 10, 3.0)) + [np.array([1e-5, -2e-5, 0.0]), np.zeros(3)]:
        dl, ddl = lambda_derivatives(th)
        for k in range(3):
            e = np.eye(3)[k] * h
            np.testing.assert_allclose(dl[..., k], (lambda_tensor(th + e) - lambda_tensor(th - e)) / (2 * h), atol=1e-8)
            ddl_fd = (lambda_derivatives(th + e, second=False) - lambda_derivatives(th - e, second=False)) / (2 * h)
            np.testing.assert_allclose(ddl[..., k], ddl_fd, atol=1e-7)


def test_update_matches_matrix_composition():
    # 10^4 random compositions; the oracle is the product of rotation matrices
    rng = np.random.default_rng(7)
    n = 10_000
    th = _random_vectors(rng, n, 2.0)
    dth = _random_vectors(rng, n, 0.8)
    out = update_rotation(th, dth, margin=0.0)
    composed = rotation_from_vector(dth) @ rotation_from_vector(th)
    ok = np.linalg.norm(out, axis=1) < np.pi - 1e-3
    err = np.abs(rotation_from_vector(out[ok]) - composed[ok]).max()
    assert ok.sum() > 0.9 * n
    assert err < 1e-12


def test_update_identity_and_inverse(rng):
    th = _random_vectors(rng, 50, 2.5)
    np.testing.assert_allclose(update_rotation(th, np.zeros_like(th)), th, atol=1e-14)
    np.testing.assert_allclose(update_rotation(np.zeros_like(th), th), th, atol=1e-14)
    np.testing.assert_allclose(update_rotation(th, -th), 0.0, atol=1e-14)


def test_update_limit():
    with pytest.raises(RotationLimitError):
        update_rotation(np.array([0.0, 0.0, 3.0]), np.array([0.0, 0.0, 0.1]))
    out = update_rotation(np.array([0.0, 0.0, 3.0]), np.array([0.0, 0.0, -0.1]))
    np.testing.assert_allclose(out, [0, 0, 2.9])


def test_rotation_state_compose():
    s = RotationState(np.array([0.0, 0.0, 0.3]))
    s.compose(np.array([0.0, 0.0, 0.2]))
    np.testing.assert_allclose(s.theta, [0, 0, 0.5])
    np.testing.assert_allclose(s.rotation, rotation_from_vector(s.theta))


def test_wryness_closed_form_matches_matrix_derivative(rng):
    # theta(X) linear on the surface; R_,a by central differences
    th0 = rng.normal(size=3)
    g = rng.normal(size=(3, 2))
    con = np.array([[1.0, 0.2, 0.0], [0.0, 0.8, 0.0]])
    q_inv = np.eye(3)
    h = 1e-6
    dr = np.stack(
        [(rotation_from_vector(th0 + h * g[:, a]) - rotation_from_vector(th0 - h * g[:, a])) / (2 * h) for a in range(2)]
    )
    gam = shell_wryness(rotation_from_vector(th0), dr, con, q_inv)
    k = curvature_vectors(th0, g)
    np.testing.assert_allclose(gam, k @ con, atol=1e-8)
    # skew(k_a) = R^T R_,a
    r = rotation_from_vector(th0)
    np.testing.assert_allclose(skew(k[:, 0]), r.T @ dr[0], atol=1e-8)
