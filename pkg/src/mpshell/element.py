"""Eight-node 10-parameter micropolar shell element with EAS enhancement.

Element DOF vector (58 entries)::

    [U1(8) U2(8) U3(8) | W1(4) W2(4) W3(4) | T1(4) T2(4) T3(4) | PHI(4) | ALPHA(6)]

The first 52 entries are nodal; the last six are the element-local
enhanced-strain parameters, condensed before assembly.

All routines evaluate a batch of elements at once.  Integration uses 2x2
Gauss points on the mid-surface and two points through the thickness.
"""

from dataclasses import dataclass

import numpy as np

from . import magnetics
from .constitutive import energy_density, material_stresses, material_tangents, pushforward_tangents
from .geometry import SurfaceFrame, surface_frame_at
from .rotation import InvalidConfigurationError, lambda_derivatives, lambda_tensor, rotation_from_vector
from .shape import GAUSS_2X2, GAUSS_THICKNESS, shape_functions
from .tensor_core import LEVI_CIVITA, flat_to_vec9_rows, vec9

N_U, N_C = 8, 4


def _einsum(*args):
    return np.einsum(*args, optimize=True)


N_NODAL = 3 * (N_U + N_C + N_C) + N_C  # 52
N_ALPHA = 6
N_TOTAL = N_NODAL + N_ALPHA

U_SLOTS = np.arange(24).reshape(3, 8)  # [component, node]
W_SLOTS = 24 + np.arange(12).reshape(3, 4)
T_SLOTS = 36 + np.arange(12).reshape(3, 4)
PHI_SLOTS = 48 + np.arange(4)
ALPHA_SLOTS = N_NODAL + np.arange(N_ALPHA)

# (row, column) of the enhanced reference gradient and the parent coordinate
# (0 = xi, 1 = eta) multiplying each of the six parameters
_EAS_MODES = [(0, 2, 0), (0, 2, 1), (1, 2, 0), (1, 2, 1), (2, 2, 0), (2, 2, 1)]


def _skew_times(a, dom):
    """``(skew(dom_n) a)_ij = -eps_ikm dom_mn a_kj`` for every column n.

    ``a`` is ``(..., 3, 3)`` and ``dom`` is ``(..., 3, n)`` (broadcast);
    the result is ``(..., 3, 3, n)``.
    """
    m = -np.einsum("ikm,...kj->...ijm", LEVI_CIVITA, a)
    out = m.reshape(m.shape[:-3] + (9, 3)) @ dom
    return out.reshape(out.shape[:-2] + (3, 3, out.shape[-1]))


def _point_operators(points):
    """Shape-function operators at parent points (independent of geometry)."""
    npt = len(points)
    nu = np.empty((npt, 8))
    dnu = np.empty((npt, 8, 2))
    nc = np.empty((npt, 4))
    dnc = np.empty((npt, 4, 2))
    for g, (xi, eta) in enumerate(points):
        nu[g], dnu[g], nc[g], dnc[g] = shape_functions(xi, eta)
    gu = np.zeros((npt, 2, 3, N_TOTAL))
    nw = np.zeros((npt, 3, N_TOTAL))
    dw = np.zeros((npt, 2, 3, N_TOTAL))
    nt = np.zeros((npt, 3, N_TOTAL))
    dt = np.zeros((npt, 2, 3, N_TOTAL))
    nph = np.zeros((npt, N_TOTAL))
    for i in range(3):
        gu[:, :, i, U_SLOTS[i]] = np.swapaxes(dnu, 1, 2)
        nw[:, i, W_SLOTS[i]] = nc
        dw[:, :, i, W_SLOTS[i]] = np.swapaxes(dnc, 1, 2)
        nt[:, i, T_SLOTS[i]] = nc
        dt[:, :, i, T_SLOTS[i]] = np.swapaxes(dnc, 1, 2)
    nph[:, PHI_SLOTS] = nc
    return dict(nu=nu, dnu=dnu, nc=nc, dnc=dnc, gu=gu, nw=nw, dw=dw, nt=nt, dt=dt, nph=nph)


@dataclass
class QuadratureRule:
    """Surface points, their weights, and the through-thickness rule."""

    points: np.ndarray
    weights: np.ndarray
    thickness_points: np.ndarray = GAUSS_THICKNESS

    @classmethod
    def gauss(cls):
        return cls(points=GAUSS_2X2.copy(), weights=np.ones(4))


def eas_gradient(alpha, xi, eta, J0):
    """Enhancing gradient ``Fbar = J0^-T Fbar_ref J0^-1``.

    ``J0`` is the 3x3 Jacobian with columns ``A_1, A_2, A_3`` at the element
    centre; ``Fbar_ref`` has the linear entries 13, 23, 33.
    """
    J0 = np.asarray(J0, dtype=float)
    if abs(np.linalg.det(J0)) < 1e-300:
        raise ValueError("singular element Jacobian")
    jinv = np.linalg.inv(J0)
    ref = np.zeros((3, 3))
    coords = (xi, eta)
    for p, (i, j, c) in enumerate(_EAS_MODES):
        ref[i, j] += alpha[p] * coords[c]
    return jinv.T @ ref @ jinv


def _eas_operator(con_center, points):
    """(ne, npt, 3, 3, 6) derivative of Fbar with respect to alpha."""
    ne = con_center.shape[0]
    out = np.zeros((ne, len(points), 3, 3, N_ALPHA))
    for p, (i, j, c) in enumerate(_EAS_MODES):
        outer = _einsum("ek,el->ekl", con_center[:, i, :], con_center[:, j, :])
        out[..., p] = points[None, :, c, None, None] * outer[:, None]
    return out


class ElementSet:
    """Reference geometry and quadrature data of a batch of shell elements.

    Parameters
    ----------
    coords : (ne, 8, 3) reference nodal coordinates (m).
    directors : (ne, 4, 3) reference corner directors.
    thickness : float or (ne,) array (m).
    rule : QuadratureRule, optional.
    """

    def __init__(self, coords, directors, thickness, rule=None):
        self.coords = np.asarray(coords, dtype=float)
        self.directors = np.asarray(directors, dtype=float)
        ne = self.coords.shape[0]
        self.ne = ne
        self.rule = rule or QuadratureRule.gauss()
        pts = np.asarray(self.rule.points, dtype=float)
        self.ops = _point_operators(pts)
        self.thickness = np.broadcast_to(np.asarray(thickness, dtype=float), (ne,)).copy()

        frames = [
            surface_frame_at(self.coords, self.directors, self.ops["dnu"][g], self.ops["nc"][g], self.ops["dnc"][g])
            for g in range(len(pts))
        ]
        self.frame = SurfaceFrame(*[np.stack([getattr(f, k) for f in frames], axis=1) for k in SurfaceFrame.__dataclass_fields__])
        _, dnu0, nc0, dnc0 = shape_functions(0.0, 0.0)
        center = surface_frame_at(self.coords, self.directors, dnu0, nc0, dnc0)
        self.center_con = center.con
        self.fbar_op = _eas_operator(center.con, pts)

        half = 0.5 * self.thickness
        self.z = half[:, None] * np.asarray(self.rule.thickness_points)[None, :]  # (ne, nt)
        z = self.z[:, None, :]
        q = np.eye(3) - z[..., None, None] * self.frame.curvature[:, :, None]
        detq = np.linalg.det(q)
        if np.any(detq <= 0.0):
            raise InvalidConfigurationError("singular shifter: thickness exceeds curvature radius")
        self.qinv = np.linalg.inv(q)
        self.weights = (
            np.asarray(self.rule.weights)[None, :, None]
            * half[:, None, None]
            * detq
            * self.frame.volume_jac[:, :, None]
        )

    def subset(self, idx):
        """ElementSet view restricted to the elements ``idx``."""
        out = object.__new__(ElementSet)
        out.coords, out.directors = self.coords[idx], self.directors[idx]
        out.ne = out.coords.shape[0]
        out.rule, out.ops = self.rule, self.ops
        out.thickness = self.thickness[idx]
        out.frame = SurfaceFrame(*[getattr(self.frame, k)[idx] for k in SurfaceFrame.__dataclass_fields__])
        out.center_con = self.center_con[idx]
        out.fbar_op = self.fbar_op[idx]
        out.z, out.qinv, out.weights = self.z[idx], self.qinv[idx], self.weights[idx]
        return out

    def volume(self):
        return self.weights.sum(axis=(1, 2))


@dataclass
class ElementState:
    """Nodal unknowns gathered per element."""

    u: np.ndarray  # (ne, 8, 3)
    w: np.ndarray  # (ne, 4, 3)
    theta: np.ndarray  # (ne, 4, 3)
    phi: np.ndarray  # (ne, 4)
    alpha: np.ndarray  # (ne, 6)

    @classmethod
    def zeros(cls, ne):
        return cls(np.zeros((ne, 8, 3)), np.zeros((ne, 4, 3)), np.zeros((ne, 4, 3)), np.zeros((ne, 4)), np.zeros((ne, 6)))

    def to_vector(self):
        """(ne, 58) element vectors in the block layout."""
        ne = self.u.shape[0]
        v = np.empty((ne, N_TOTAL))
        for i in range(3):
            v[:, U_SLOTS[i]] = self.u[:, :, i]
            v[:, W_SLOTS[i]] = self.w[:, :, i]
            v[:, T_SLOTS[i]] = self.theta[:, :, i]
        v[:, PHI_SLOTS] = self.phi
        v[:, ALPHA_SLOTS] = self.alpha
        return v

    @classmethod
    def from_vector(cls, v):
        v = np.atleast_2d(v)
        return cls(
            u=np.stack([v[:, U_SLOTS[i]] for i in range(3)], axis=-1),
            w=np.stack([v[:, W_SLOTS[i]] for i in range(3)], axis=-1),
            theta=np.stack([v[:, T_SLOTS[i]] for i in range(3)], axis=-1),
            phi=v[:, PHI_SLOTS].copy(),
            alpha=v[:, ALPHA_SLOTS].copy(),
        )


@dataclass
class ElementResult:
    """Element residual pieces and tangent (all arrays batched over elements)."""

    f_int: np.ndarray  # (ne, 58)
    f_ext: np.ndarray  # (ne, 58), nonzero only in rotation slots
    energy: np.ndarray  # (ne,)
    k_int: np.ndarray = None  # (ne, 58, 58), material + geometric
    k_load: np.ndarray = None  # (ne, 58, 58)

    @property
    def residual(self):
        return self.f_int - self.f_ext

    @property
    def tangent(self):
        return self.k_int - self.k_load


class _Kinematics:
    """Point-wise kinematic and stress quantities of a batch evaluation."""

    def __init__(self, es, st, material):
        ops, fr = es.ops, es.frame
        con_s = fr.con[:, :, :2, :]
        a3 = fr.con[:, :, 2, :]
        du = _einsum("eIi,gIa->egai", st.u, ops["dnu"])
        w = _einsum("eJi,gJ->egi", st.w, ops["nc"])
        dw = _einsum("eJi,gJa->egai", st.w, ops["dnc"])
        th = _einsum("eJi,gJ->egi", st.theta, ops["nc"])
        dth = _einsum("eJi,gJa->egia", st.theta, ops["dnc"])
        phi = _einsum("eJ,gJ->eg", st.phi, ops["nc"])
        d = fr.director + w
        f0 = np.eye(3) + _einsum("egai,egaj->egij", du, con_s) + _einsum("egi,egj->egij", w, a3)
        f1 = _einsum("egai,egaj->egij", fr.director_grad + dw, con_s) + 2.0 * phi[..., None, None] * _einsum(
            "egi,egj->egij", d, a3
        )
        fbar = _einsum("egijp,ep->egij", es.fbar_op, st.alpha)
        z = es.z[:, None, :, None, None]
        fstar = (f0 + fbar)[:, :, None] + z * f1[:, :, None]
        F = fstar @ es.qinv
        if np.any(np.linalg.det(F) <= 0.0):
            raise InvalidConfigurationError("deformation gradient with non-positive determinant")
        R = rotation_from_vector(th)
        lam = lambda_tensor(th)
        rt = np.swapaxes(R, -1, -2)[:, :, None]
        U = rt @ F
        kvec = np.swapaxes(lam, -1, -2) @ dth
        gamma = _einsum("egia,egaj->egij", kvec, con_s)[:, :, None] @ es.qinv
        P_mat, M_mat = material_stresses(U, gamma, material)
        qinv_t = np.swapaxes(es.qinv, -1, -2)
        Rb = R[:, :, None]
        self.__dict__.update(
            du=du, w=w, dw=dw, th=th, dth=dth, phi=phi, d=d, fstar=fstar, F=F, R=R, lam=lam, U=U,
            gamma=gamma, P_mat=P_mat, M_mat=M_mat, P0=Rb @ P_mat @ qinv_t, M0=Rb @ M_mat @ qinv_t,
            con_s=con_s, a3=a3,
        )
        self.psi = energy_density(U, gamma, material)


def _operators(es, kin, need_second):
    """Variation operators ``dF*``, ``delta omega``, B1 and B2 (row-major 3x3 x 58)."""
    ops = es.ops
    con_s, a3 = kin.con_s, kin.a3
    df0 = _einsum("gain,egaj->egijn", ops["gu"], con_s) + _einsum("gin,egj->egijn", ops["nw"], a3)
    df0[..., ALPHA_SLOTS] += es.fbar_op
    df1 = (
        _einsum("gain,egaj->egijn", ops["dw"], con_s)
        + 2.0 * kin.phi[..., None, None, None] * _einsum("gin,egj->egijn", ops["nw"], a3)
        + 2.0 * _einsum("gn,egi,egj->egijn", ops["nph"], kin.d, a3)
    )
    dfs = df0[:, :, None] + es.z[:, None, :, None, None, None] * df1[:, :, None]
    if need_second:
        dl, ddl = lambda_derivatives(kin.th)
    else:
        dl, ddl = lambda_derivatives(kin.th, second=False), None
    dom = _einsum("egij,gjn->egin", kin.lam, ops["nt"])
    lam_a = _einsum("egijk,egka->egaij", dl, kin.dth)
    dom_a = _einsum("egaij,gjn->egain", lam_a, ops["nt"]) + _einsum("egij,gajn->egain", kin.lam, ops["dt"])
    # (skew(w) F*)_iJ = -eps_ikm w_m F*_kJ
    sk = _skew_times(kin.fstar, dom[:, :, None])
    b1 = dfs - sk
    b2 = _einsum("egain,egaj->egijn", dom_a, con_s)
    return dict(dfs=dfs, dom=dom, dom_a=dom_a, b1=b1, b2=b2, dl=dl, ddl=ddl)


def evaluate(es, st, material, remnant=None, bext=None, tangent=True):
    """Internal/external force vectors and (optionally) tangent blocks.

    Parameters
    ----------
    es : ElementSet
    st : ElementState
    material : MaterialParams
    remnant : (ne, 3) referential remnant flux (T) or None.
    bext : (3,) applied flux (T) or None.
    """
    kin = _Kinematics(es, st, material)
    op = _operators(es, kin, need_second=tangent)
    wts = es.weights
    b1, b2 = op["b1"], op["b2"]
    f_int = _einsum("egtijn,egtij,egt->en", b1, kin.P0, wts) + _einsum("egijn,egtij,egt->en", b2, kin.M0, wts)
    energy = _einsum("egt,egt->e", kin.psi, wts)
    magnetic = remnant is not None and bext is not None and np.any(bext)
    f_ext = np.zeros_like(f_int)
    if magnetic:
        bext = np.asarray(bext, dtype=float)
        brem = np.asarray(remnant, dtype=float)[:, None, None, :]
        couple = magnetics.body_couple(kin.F, brem, bext)
        f_ext = magnetics.external_force(es.ops["nt"][None, :, None], couple, wts).sum(axis=(1, 2))
    res = ElementResult(f_int=f_int, f_ext=f_ext, energy=energy)
    if not tangent:
        return res

    ne = es.ne
    c1t, c4t = material_tangents(kin.U, material)
    Rb = np.broadcast_to(kin.R[:, :, None], kin.U.shape)
    c1 = pushforward_tangents(c1t, Rb, es.qinv)
    c4 = pushforward_tangents(c4t, Rb, es.qinv)
    b1v = flat_to_vec9_rows(b1)  # (e,g,t,9,n)
    b2v = flat_to_vec9_rows(b2)  # (e,g,9,n)
    n = N_TOTAL
    wv = wts[..., None, None]
    cb1 = (c1 @ b1v) * wv
    k = np.swapaxes(b1v.reshape(ne, -1, n), 1, 2) @ cb1.reshape(ne, -1, n)
    b2t = np.broadcast_to(b2v[:, :, None], b1v.shape)
    cb2 = (c4 @ b2t) * wv
    k += np.swapaxes(b2t.reshape(ne, -1, n), 1, 2) @ cb2.reshape(ne, -1, n)

    # stress rotation: dP0 contains skew(d omega) P0, dM0 contains skew(d omega) M0
    sp = _skew_times(kin.P0 * wts[..., None, None], op["dom"][:, :, None])
    k += np.swapaxes(b1.reshape(ne, -1, n), 1, 2) @ sp.reshape(ne, -1, n)
    sm = _skew_times(kin.M0 * wts[..., None, None], op["dom"][:, :, None])
    b2b = np.broadcast_to(b2[:, :, None], sm.shape)
    k += np.swapaxes(b2b.reshape(ne, -1, n), 1, 2) @ sm.reshape(ne, -1, n)

    ops = es.ops
    # thickness-stretch coupling: 2 z (dphi dw + Dphi dw) . P0 A^3
    p3 = _einsum("egtij,egj->egti", kin.P0, kin.a3)
    zw = 2.0 * es.z[:, None, :] * wts
    x = _einsum("egti,gin,egt->egn", p3, ops["nw"], zw)
    k += _einsum("ga,egb->eab", ops["nph"], x) + _einsum("ega,gb->eab", x, ops["nph"])

    # variation of Lambda inside -skew(d omega) F*
    tvec = _einsum("ijk,egtil,egtjl,egt->egk", LEVI_CIVITA, kin.P0, kin.fstar, wts)
    lt = _einsum("egi,egijk->egjk", tvec, op["dl"])
    k += _einsum("gja,egjk,gkb->eab", ops["nt"], lt, ops["nt"])

    # -P0 : skew(d omega) dF*
    ep = _einsum("ikm,egtij->egtmkj", LEVI_CIVITA, kin.P0 * wts[..., None, None]).reshape(ne, -1, 3, 9)
    x = ep @ op["dfs"].reshape(ne, -1, 9, n)  # (e, g*t, 3, n)
    x = x.reshape(ne, len(ops["nc"]), -1, 3, n).sum(axis=2)
    k += np.swapaxes(op["dom"].reshape(ne, -1, n), 1, 2) @ x.reshape(ne, -1, n)

    # couple-stress terms from the dependence of grad(delta omega) on theta
    msum = _einsum("egtij,egaj,egt->egai", kin.M0, kin.con_s, wts)
    h = _einsum("egai,egijkl,egka->egjl", msum, op["ddl"], kin.dth)
    k += _einsum("gja,egjl,glb->eab", ops["nt"], h, ops["nt"])
    ga = _einsum("egai,egijk->egajk", msum, op["dl"])
    k += _einsum("gjp,egajk,gakq->epq", ops["nt"], ga, ops["dt"])
    k += _einsum("gajp,egajk,gkq->epq", ops["dt"], ga, ops["nt"])
    res.k_int = k

    k_load = np.zeros_like(k)
    if magnetic:
        cop = magnetics.couple_operator(op["dfs"], es.qinv, brem, bext)
        k_load = magnetics.load_stiffness(ops["nt"][None, :, None], cop, wts).sum(axis=(1, 2))
    res.k_load = k_load
    return res


def element_internal_force(es, st, material):
    """(F_int_v, F_int_alpha) for every element of the batch."""
    r = evaluate(es, st, material, tangent=False)
    return r.f_int[:, :N_NODAL], r.f_int[:, N_NODAL:]


def element_external_force(es, st, remnant, bext):
    """Magnetic load vectors (rotation slots only), ``(ne, 52)``."""
    from .constitutive import MaterialParams

    dummy = MaterialParams(lam=0.0, mu=1.0, eta=0.0, length_scale=0.0)
    r = evaluate(es, st, dummy, remnant, bext, tangent=False)
    return r.f_ext[:, :N_NODAL]


def element_tangent(es, st, material, remnant=None, bext=None):
    """Blocks ``(K_vv, K_va, K_av, K_aa)`` of ``K_int - K_load``."""
    r = evaluate(es, st, material, remnant, bext, tangent=True)
    k = r.tangent
    a, b = slice(0, N_NODAL), slice(N_NODAL, N_TOTAL)
    return k[:, a, a], k[:, a, b], k[:, b, a], k[:, b, b]


@dataclass
class Condensed:
    """Statically condensed element system and the data to recover alpha."""

    k: np.ndarray  # (ne, 52, 52)
    r: np.ndarray  # (ne, 52)
    kaa_inv_kav: np.ndarray  # (ne, 6, 52)
    kaa_inv_ra: np.ndarray  # (ne, 6)

    def recover_alpha(self, dv):
        """``d alpha = -K_aa^-1 (r_a + K_av dv)`` for element increments ``dv``."""
        return -(self.kaa_inv_ra + _einsum("epn,en->ep", self.kaa_inv_kav, dv))


class SingularEasBlock(np.linalg.LinAlgError):
    pass


def condense_eas(k, r):
    """Schur complement of the enhanced-strain block.

    ``k`` is ``(ne, 58, 58)`` and ``r`` is ``(ne, 58)``.  Raises
    :class:`SingularEasBlock` when any ``K_aa`` is singular.
    """
    a, b = slice(0, N_NODAL), slice(N_NODAL, N_TOTAL)
    kaa = k[:, b, b]
    cond = np.linalg.cond(kaa)
    if np.any(~np.isfinite(cond)) or np.any(cond > 1e14):
        raise SingularEasBlock("singular enhanced-strain block")
    rhs = np.concatenate([k[:, b, a], r[:, b, None]], axis=2)
    sol = np.linalg.solve(kaa, rhs)
    kaa_inv_kav, kaa_inv_ra = sol[:, :, :N_NODAL], sol[:, :, N_NODAL]
    kc = k[:, a, a] - k[:, a, b] @ kaa_inv_kav
    rc = r[:, a] - _einsum("enp,ep->en", k[:, a, b], kaa_inv_ra)
    return Condensed(k=kc, r=rc, kaa_inv_kav=kaa_inv_kav, kaa_inv_ra=kaa_inv_ra)


def b_matrices(coords, directors, thickness, state, xi, eta, z):
    """B-matrices of one element at the parent point ``(xi, eta)`` and elevation ``z``.

    Returns ``(B0, B1, B_omegaF, B2, Bbar)`` as 9-row matrices in Vec9 order:
    ``B0`` and ``B1`` are the variations of F0 and F1, ``B_omegaF`` that of
    ``skew(delta omega) F*``, ``B2`` that of ``Grad_S delta omega`` (52
    columns each) and ``Bbar`` the 9x6 variation of Fbar.  The variation of
    the first strain measure is ``(B0 + z B1 - B_omegaF) dv + Bbar dalpha``.
    """
    rule = QuadratureRule(points=np.array([[xi, eta]]), weights=np.ones(1), thickness_points=np.array([0.0]))
    es = ElementSet(np.asarray(coords)[None], np.asarray(directors)[None], thickness, rule)
    es.z = np.array([[z]])
    q = np.eye(3) - z * es.frame.curvature[:, :, None]
    es.qinv = np.linalg.inv(q)
    kin = _Kinematics(es, state, _UNIT_MATERIAL)
    ops = es.ops
    con_s, a3 = kin.con_s, kin.a3
    df0 = _einsum("gain,egaj->egijn", ops["gu"], con_s) + _einsum("gin,egj->egijn", ops["nw"], a3)
    df1 = (
        _einsum("gain,egaj->egijn", ops["dw"], con_s)
        + 2.0 * kin.phi[..., None, None, None] * _einsum("gin,egj->egijn", ops["nw"], a3)
        + 2.0 * _einsum("gn,egi,egj->egijn", ops["nph"], kin.d, a3)
    )
    op = _operators(es, kin, need_second=False)
    sk = _skew_times(kin.fstar, op["dom"][:, :, None])
    nv = slice(0, N_NODAL)
    b0 = flat_to_vec9_rows(df0[0, 0])[:, nv]
    b1 = flat_to_vec9_rows(df1[0, 0])[:, nv]
    bw = flat_to_vec9_rows(sk[0, 0, 0])[:, nv]
    b2 = flat_to_vec9_rows(op["b2"][0, 0])[:, nv]
    bbar = flat_to_vec9_rows(es.fbar_op[0, 0])
    return b0, b1, bw, b2, bbar


def _unit_material():
    from .constitutive import MaterialParams

    return MaterialParams(lam=1.0, mu=1.0, eta=0.1, length_scale=0.1)


_UNIT_MATERIAL = _unit_material()


def stress_vectors(es, st, material):
    """Per-point first Piola stresses ``P0`` in Vec9 form, shape (ne, npt, nt, 9)."""
    kin = _Kinematics(es, st, material)
    return vec9(kin.P0)


def tangent_check(es, st, material, remnant=None, bext=None, h=1e-6):
    """Central-difference check of the element tangent.

    ``h`` is a scalar step or one step per element DOF.  Returns
    ``(err, k, k_fd)`` with ``err`` the largest entry of ``|K - K_fd|``
    relative to ``max |K|`` over all elements in ``es``.
    """
    res = evaluate(es, st, material, remnant, bext)
    v0 = st.to_vector()
    steps = np.broadcast_to(np.asarray(h, dtype=float), (N_TOTAL,))
    k_fd = np.zeros_like(res.tangent)
    for j in range(N_TOTAL):
        vp = v0.copy()
        vm = v0.copy()
        vp[:, j] += steps[j]
        vm[:, j] -= steps[j]
        rp = evaluate(es, ElementState.from_vector(vp), material, remnant, bext, tangent=False).residual
        rm = evaluate(es, ElementState.from_vector(vm), material, remnant, bext, tangent=False).residual
        k_fd[:, :, j] = (rp - rm) / (2 * steps[j])
    scale = np.abs(res.tangent).max()
    return float(np.abs(res.tangent - k_fd).max() / scale), res.tangent, k_fd
