import numpy as np
import pytest
from conftest import homogeneous_patch_residual, random_state, rigid_state, single_element

from mpshell.element import (
    N_NODAL,
    N_TOTAL,
    T_SLOTS,
    ElementState,
    b_matrices,
    condense_eas,
    eas_gradient,
    element_external_force,
    element_internal_force,
    element_tangent,
    evaluate,
    tangent_check,
)
from mpshell.geometry import deformation_gradient_parts, surface_frame_at
from mpshell.rotation import lambda_tensor, rotation_from_vector
from mpshell.shape import shape_functions
from mpshell.tensor_core import skew, vec9

BREM = np.array([[0.3, 0.1, -0.2]])
BEXT = np.array([0.1, 0.5, 0.2]) * 4e-7 * np.pi


def _fd_tangent(es, st, material, remnant=None, bext=None, h=1e-6):
    v = st.to_vector()
    k = np.zeros((N_TOTAL, N_TOTAL))
    for j in range(N_TOTAL):
        vp, vm = v.copy(), v.copy()
        vp[0, j] += h
        vm[0, j] -= h
        rp = evaluate(es, ElementState.from_vector(vp), material, remnant, bext, tangent=False).residual[0]
        rm = evaluate(es, ElementState.from_vector(vm), material, remnant, bext, tangent=False).residual[0]
        k[:, j] = (rp - rm) / (2 * h)
    return k


@pytest.mark.parametrize("curved", [False, True])
def test_tangent_matches_fd(curved, material, rng):
    es = single_element(curved=curved)
    st = random_state(rng)
    k = evaluate(es, st, material, BREM, BEXT).tangent[0]
    k_fd = _fd_tangent(es, st, material, BREM, BEXT)
    assert np.abs(k - k_fd).max() / np.abs(k).max() < 1e-7


def test_internal_force_is_energy_gradient(curved_element, material, rng):
    st = random_state(rng)
    r = evaluate(curved_element, st, material, tangent=False)
    v = st.to_vector()
    h = 1e-6
    g = np.zeros(N_TOTAL)
    for j in range(N_TOTAL):
        vp, vm = v.copy(), v.copy()
        vp[0, j] += h
        vm[0, j] -= h
        ep = evaluate(curved_element, ElementState.from_vector(vp), material, tangent=False).energy[0]
        em = evaluate(curved_element, ElementState.from_vector(vm), material, tangent=False).energy[0]
        g[j] = (ep - em) / (2 * h)
    # theta columns of the energy gradient use additive increments, like f_int
    assert np.abs(g - r.f_int[0]).max() / np.abs(r.f_int[0]).max() < 1e-7


def test_internal_tangent_symmetric(curved_element, material, rng):
    k = evaluate(curved_element, random_state(rng), material).k_int[0]
    assert np.abs(k - k.T).max() < 1e-10 * np.abs(k).max()


def test_tangent_check_helper(flat_element, material, rng):
    err, k, k_fd = tangent_check(flat_element, random_state(rng), material, BREM, BEXT)
    assert err < 1e-7
    assert k.shape == (1, N_TOTAL, N_TOTAL)


def test_block_wrappers(curved_element, material, rng):
    st = random_state(rng)
    r = evaluate(curved_element, st, material, BREM, BEXT)
    kvv, kva, kav, kaa = element_tangent(curved_element, st, material, BREM, BEXT)
    np.testing.assert_allclose(np.block([[kvv[0], kva[0]], [kav[0], kaa[0]]]), r.tangent[0])
    fv, fa = element_internal_force(curved_element, st, material)
    np.testing.assert_allclose(np.concatenate([fv[0], fa[0]]), r.f_int[0])
    fe = element_external_force(curved_element, st, BREM, BEXT)
    np.testing.assert_allclose(fe, r.f_ext[:, :N_NODAL])
    # magnetic load only acts on the rotation slots
    mask = np.ones(N_NODAL, bool)
    mask[T_SLOTS.ravel()] = False
    assert np.all(fe[0, mask] == 0.0)


def test_reference_state_is_stress_free(curved_element, material):
    r = evaluate(curved_element, ElementState.zeros(1), material)
    assert np.abs(r.f_int).max() < 1e-14
    # stored energy is only the constant 3 mu / 2 per unit volume
    assert r.energy[0] == pytest.approx(1.5 * material.mu * curved_element.volume()[0], rel=1e-12)


@pytest.mark.parametrize("curved", [False, True])
def test_rigid_motions_leave_no_internal_force(curved, material, rng):
    es = single_element(curved=curved)
    scale = np.abs(evaluate(es, random_state(rng, 0.05, 0.2), material, tangent=False).f_int).max()
    e_ref = evaluate(es, ElementState.zeros(1), material, tangent=False).energy[0]
    st = rigid_state(es, np.eye(3), c=rng.normal(size=3))
    assert np.abs(evaluate(es, st, material, tangent=False).f_int).max() < 1e-9 * scale
    for _ in range(5):
        R = rotation_from_vector(rng.normal(0, 1.0, 3))
        st = rigid_state(es, R, c=rng.normal(size=3))
        r = evaluate(es, st, material, tangent=False)
        assert np.abs(r.f_int).max() < 1e-9 * scale
        assert r.energy[0] == pytest.approx(e_ref, rel=1e-12)


def test_condensation_equals_coupled_solve(curved_element, material, rng):
    st = random_state(rng)
    r = evaluate(curved_element, st, material, BREM, BEXT)
    c = condense_eas(r.tangent, r.residual)
    # full solve with the nodal increment prescribed by the condensed system
    dv = np.linalg.solve(c.k[0], -c.r[0])
    da = c.recover_alpha(dv[None])[0]
    full = r.tangent[0] @ np.concatenate([dv, da]) + r.residual[0]
    assert np.abs(full).max() < 1e-9 * np.abs(r.residual).max()


def test_eas_gradient_matches_operator(curved_element, rng):
    alpha = rng.normal(size=6)
    es = curved_element
    J0 = np.linalg.inv(es.center_con[0])
    for g, (xi, eta) in enumerate(es.rule.points):
        fbar = eas_gradient(alpha, xi, eta, J0)
        np.testing.assert_allclose(np.einsum("ijp,p->ij", es.fbar_op[0, g], alpha), fbar, atol=1e-12)
    # only the third column of the parent-space tensor is enhanced
    ref = J0.T @ eas_gradient(alpha, 0.5, -0.2, J0) @ J0
    np.testing.assert_allclose(ref[:, :2], 0.0, atol=1e-12)
    np.testing.assert_allclose(ref[:, 2], [alpha[0] * 0.5 - 0.2 * alpha[1], alpha[2] * 0.5 - 0.2 * alpha[3],
                                           alpha[4] * 0.5 - 0.2 * alpha[5]])


def test_b_matrices_against_fd(curved_element, rng):
    es = curved_element
    st = random_state(rng, 0.05, 0.3)
    xi, eta, z = 0.3, -0.4, 0.05
    b0, b1, bw, b2, bbar = b_matrices(es.coords[0], es.directors[0], es.thickness[0], st, xi, eta, z)
    nu, dnu, nc, dnc = shape_functions(xi, eta)
    frame = surface_frame_at(es.coords, es.directors, dnu, nc, dnc)

    def parts(v):
        s = ElementState.from_vector(v)
        du = np.einsum("eIi,Ia->eai", s.u, dnu)
        w = np.einsum("eJi,J->ei", s.w, nc)
        dw = np.einsum("eJi,Ja->eai", s.w, dnc)
        phi = s.phi @ nc
        F0, F1 = deformation_gradient_parts(du, w, dw, phi, frame)
        return vec9(F0[0]), vec9(F1[0])

    v = st.to_vector()
    h = 1e-6
    for j in range(N_NODAL):
        vp, vm = v.copy(), v.copy()
        vp[0, j] += h
        vm[0, j] -= h
        (p0, p1), (m0, m1) = parts(vp), parts(vm)
        np.testing.assert_allclose(b0[:, j], (p0 - m0) / (2 * h), atol=1e-7)
        np.testing.assert_allclose(b1[:, j], (p1 - m1) / (2 * h), atol=1e-7)
    # spin part: skew(Lambda N_t dtheta) F*
    th = st.theta[0].T @ nc
    F0, F1 = [np.asarray(x) for x in parts(v)]
    from mpshell.tensor_core import unvec9

    fbar = eas_gradient(st.alpha[0], xi, eta, np.linalg.inv(surface_frame_at(es.coords, es.directors,
                                                                               *shape_functions(0, 0)[1:]).con[0]))
    fstar = unvec9(F0) + fbar + z * unvec9(F1)
    lam = lambda_tensor(th)
    for a in range(4):
        for i in range(3):
            col = T_SLOTS[i, a]
            dom = lam[:, i] * nc[a]
            np.testing.assert_allclose(bw[:, col], vec9(skew(dom) @ fstar), atol=1e-10)
    assert bbar.shape == (9, 6)


def test_homogeneous_patch():
    """Distorted flat patch under a plane-stress homogeneous state.

    U = R0^T A is symmetric with zero transverse shear and U33 chosen so
    that P33 = 0; interior nodes, directors, rotations, thickness stretch
    and enhanced parameters are then in equilibrium.
    """
    interior, alpha, boundary, scale = homogeneous_patch_residual()
    assert interior < 1e-8 * scale
    assert alpha < 1e-8 * scale
    # the boundary carries the traction resultant
    assert boundary > 1e-3 * scale
