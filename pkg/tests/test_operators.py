"""Dense operator assembly against separation-of-variables and identity oracles."""

import numpy as np
import pytest
import scipy.special as sp

from bie2d import geometry as geo
from bie2d import operators as op
from bie2d.quadrature import build_tables


def circle_eigs(kind, m, k, a):
    """Separation-of-variables eigenvalues of the parametrized operators on
    the radius-a circle (weighted densities carry the jacobian a)."""
    z = k * a
    if kind == "S":          # acting on the weighted density e^{im tau}
        return (1j * np.pi * a / 2) * sp.jv(m, z) * sp.hankel1(m, z) / a
    if kind == "K":
        return (1j * np.pi * a * k / 2) * sp.jvp(m, z) * sp.hankel1(m, z) - 0.5
    if kind == "KT":
        return (1j * np.pi * a * k / 2) * sp.jv(m, z) * sp.h1vp(m, z) + 0.5
    if kind == "N":          # output carries the weight a
        return a * (1j * np.pi * a * k * k / 2) * sp.jvp(m, z) * sp.h1vp(m, z)
    raise ValueError(kind)


@pytest.fixture(scope="module")
def disk_setup():
    a, n = 2.0, 48
    mesh = geo.build_mesh(geo.lq_ball(2, a), n)
    return a, mesh, build_tables(n)


def eig_of(mat, mesh, m):
    v = np.exp(1j * m * mesh.t)
    ratios = (mat @ v) / v
    assert np.abs(ratios - ratios[0]).max() < 1e-10
    return ratios[0]


@pytest.mark.parametrize("m", [0, 1, 3, -5, 9])
def test_single_layer_circle_oracle(disk_setup, m):
    a, mesh, tab = disk_setup
    k = 1.0
    S = op.assemble_single(k, mesh, tab).mat
    assert abs(eig_of(S, mesh, m) - circle_eigs("S", m, k, a)) < 1e-12


def test_single_layer_constant_density_unit_circle():
    # (S_1 1)(t) = (i pi / 2) J_0(1) H_0^(1)(1) on the un-graded unit circle
    mesh = geo.build_mesh(geo.lq_ball(2, 1.0), 32)
    tab = build_tables(32)
    S = op.assemble_single(1.0, mesh, tab).mat
    got = S @ np.ones(mesh.size)
    want = (1j * np.pi / 2) * sp.jv(0, 1.0) * sp.hankel1(0, 1.0)
    assert np.abs(got - want).max() < 1e-13


@pytest.mark.parametrize("m", [0, 2, 4, -3])
def test_double_layer_circle_oracle(disk_setup, m):
    a, mesh, tab = disk_setup
    k = 1.0
    K = op.assemble_double(k, mesh, tab).mat
    assert abs(eig_of(K, mesh, m) - circle_eigs("K", m, k, a)) < 1e-11
    assert np.abs(K @ np.zeros(mesh.size)).max() == 0.0


@pytest.mark.parametrize("m", [0, 2, 4, -3])
def test_adjoint_double_layer_circle_oracle(disk_setup, m):
    a, mesh, tab = disk_setup
    k = 1.0
    KT = op.assemble_adjdouble_w(k, mesh, tab).mat
    assert abs(eig_of(KT, mesh, m) - circle_eigs("KT", m, k, a)) < 1e-11


@pytest.mark.parametrize("m", [0, 1, 4, -6])
def test_hypersingular_circle_oracle(disk_setup, m):
    a, mesh, tab = disk_setup
    k = 1.0
    N = op.assemble_hyper_w(k, mesh, tab).mat
    assert abs(eig_of(N, mesh, m) - circle_eigs("N", m, k, a)) < 1e-10


def test_hypersingular_small_k_symbol():
    # Laplace limit on the unit circle: N^w e^{imt} -> -(|m|/2) e^{imt}
    mesh = geo.build_mesh(geo.lq_ball(2, 1.0), 32)
    tab = build_tables(32)
    N = op.assemble_hyper_w(0.05, mesh, tab).mat
    for m in (1, 3, 5):
        assert abs(eig_of(N, mesh, m) + m / 2.0) < 5e-3


def test_calderon_identity_circle():
    mesh = geo.build_mesh(geo.lq_ball(2, 1.0), 32)
    tab = build_tables(32)
    S = op.assemble_single(1.0, mesh, tab).mat
    K = op.assemble_double(1.0, mesh, tab).mat
    N = op.assemble_hyper_w(1.0, mesh, tab).mat
    rng = np.random.default_rng(0)
    coefs = rng.standard_normal(17) + 1j * rng.standard_normal(17)
    v = sum(c * np.exp(1j * m * mesh.t) for c, m in zip(coefs, range(-8, 9)))
    res = S @ (N @ v) + 0.25 * v - K @ (K @ v)
    assert np.abs(res).max() / np.abs(v).max() < 1e-6


def test_hypersingular_identity_on_square(square_mesh):
    # interior plane wave: N^w gD = (K^{T,w} - 1/2) gN^w
    tab = build_tables(square_mesh.n)
    k = 2.0
    d = np.array([0.6, 0.8])
    u = np.exp(1j * k * (square_mesh.x @ d))
    gd = u
    gnw = 1j * k * (square_mesh.nu @ d) * u
    N = op.assemble_hyper_w(k, square_mesh, tab).mat
    KT = op.assemble_adjdouble_w(k, square_mesh, tab).mat
    res = N @ gd - (KT @ gnw - 0.5 * gnw)
    assert np.abs(res).max() < 2e-2
    # refinement improves it
    mesh2 = geo.build_mesh(square_mesh.curve, 2 * square_mesh.n)
    tab2 = build_tables(2 * square_mesh.n)
    u2 = np.exp(1j * k * (mesh2.x @ d))
    gn2 = 1j * k * (mesh2.nu @ d) * u2
    res2 = op.assemble_hyper_w(k, mesh2, tab2).mat @ u2 \
        - (op.assemble_adjdouble_w(k, mesh2, tab2).mat @ gn2 - 0.5 * gn2)
    assert np.abs(res2).max() < 0.4 * np.abs(res).max()


def test_hyper_difference_consistency_circle(disk_setup):
    a, mesh, tab = disk_setup
    k1, k2 = 1.0, 2.0
    direct = op.assemble_hyper_w(k1, mesh, tab).mat - op.assemble_hyper_w(k2, mesh, tab).mat
    diff = op.assemble_hyper_diff_w(k1, k2, mesh, tab).mat
    v = np.exp(1j * 3 * mesh.t)
    assert np.abs((direct - diff) @ v).max() < 1e-8


def test_hyper_difference_consistency_square(square_mesh):
    tab = build_tables(square_mesh.n)
    k1, k2 = 1.0, 2.5
    direct = op.assemble_hyper_w(k1, square_mesh, tab).mat \
        - op.assemble_hyper_w(k2, square_mesh, tab).mat
    diff = op.assemble_hyper_diff_w(k1, k2, square_mesh, tab).mat
    # smooth corner-compatible density: trace of an analytic function
    v = np.exp(1j * 1.5 * (square_mesh.x @ np.array([0.3, 0.95]) ))
    assert np.abs((direct - diff) @ v).max() < 2e-5


def test_hyper_difference_zero_and_smoothing(square_mesh):
    tab = build_tables(square_mesh.n)
    assert np.abs(op.assemble_hyper_diff_w(2.0, 2.0, square_mesh, tab).mat).max() == 0.0
    # smoothing: image norms stay bounded under refinement
    norms = []
    for n in (32, 64):
        mesh = geo.build_mesh(square_mesh.curve, n)
        tabn = build_tables(n)
        D = op.assemble_hyper_diff_w(1.0, 2.0, mesh, tabn).mat
        v = np.exp(1j * 2.0 * (mesh.x @ np.array([1.0, 0.0])))
        norms.append(np.abs(D @ v).max())
    assert norms[1] < 2.0 * norms[0]


def test_windowed_single_matches_direct_split():
    # with a modest Im(kappa) the unwindowed splitting is still accurate, so
    # the windowed operator must agree with a plain complex-argument split
    from bie2d import kernels as ker
    kappa = 1.5 + 0.6j
    mesh = geo.build_mesh(geo.square(4.0), 48)
    tab = build_tables(48)
    win = op.assemble_single(kappa, mesh, tab).mat
    gt = ker.GeoSample(mesh.x[:, None, :], mesh.dx[:, None, :], mesh.ddx[:, None, :],
                       mesh.nu[:, None, :], mesh.jac[:, None])
    gs = ker.GeoSample(mesh.x[None, :, :], mesh.dx[None, :, :], mesh.ddx[None, :, :],
                       mesh.nu[None, :, :], mesh.jac[None, :])
    dt = mesh.t[:, None] - mesh.t[None, :]
    diag = np.eye(mesh.size, dtype=bool)
    logc, smooth = ker.single_split(kappa, gt, gs, dt, diag)
    direct = tab.R * logc + tab.h * smooth
    # different quadratures of the same operator: compare actions
    dens = mesh.jac * np.exp(1j * (mesh.x @ np.array([0.8, 0.2])))
    assert np.abs((win - direct) @ dens).max() < 1e-6


def test_windowed_hyper_matches_direct_difference():
    kappa = 1.5 + 0.6j
    mesh = geo.build_mesh(geo.square(4.0), 48)
    tab = build_tables(48)
    win = op.assemble_hyper_diff_w(kappa, kappa.real, mesh, tab).mat
    from bie2d import kernels as ker
    gt = ker.GeoSample(mesh.x[:, None, :], mesh.dx[:, None, :], mesh.ddx[:, None, :],
                       mesh.nu[:, None, :], mesh.jac[:, None])
    gs = ker.GeoSample(mesh.x[None, :, :], mesh.dx[None, :, :], mesh.ddx[None, :, :],
                       mesh.nu[None, :, :], mesh.jac[None, :])
    dt = mesh.t[:, None] - mesh.t[None, :]
    diag = np.eye(mesh.size, dtype=bool)
    logc, smooth = ker.hyper_diff_split(kappa, kappa.real, gt, gs, dt, diag)
    direct = tab.R * logc + tab.h * smooth
    dens = np.exp(1j * (mesh.x @ np.array([0.3, 0.9])))
    assert np.abs((win - direct) @ dens).max() < 2e-6


def test_window_function_profile():
    assert op.window(0.0) == 1.0
    assert op.window(np.pi / 4 - 1e-9) == 1.0
    assert op.window(np.pi / 2) == 0.0
    mid = op.window(np.pi / 3)
    assert 0.0 < mid < 1.0
    # smooth, even, periodic
    assert op.window(0.7) == op.window(-0.7) == op.window(0.7 + 2 * np.pi)


def test_complex_kappa_operators_finite_on_square():
    kappa = 18.0 + 4.0j
    mesh = geo.build_mesh(geo.square(4.0), 64)
    tab = build_tables(64)
    S = op.assemble_single(kappa, mesh, tab)
    N = op.assemble_hyper_w(kappa, mesh, tab)
    assert np.all(np.isfinite(S.mat)) and np.all(np.isfinite(N.mat))


def test_near_corner_rows_bounded_on_weighted_densities():
    # K^{T,w} rows grow near corners, but their action on corner-vanishing
    # densities stays bounded as the mesh refines
    curve = geo.square(4.0)
    sups = []
    for n in (32, 64, 128):
        mesh = geo.build_mesh(curve, n)
        tab = build_tables(n)
        KT = op.assemble_adjdouble_w(1.0, mesh, tab).mat
        dens = mesh.jac * np.exp(1j * (mesh.x @ np.array([1.0, -0.5])))
        sups.append(np.abs(KT @ dens).max())
    assert max(sups) < 2.0 * min(sups) + 1e-12


def test_ps_operators(disk_setup, rng):
    a, mesh, tab = disk_setup
    kappa = 2.5 + 1.0j
    PS = op.assemble_ps("S", kappa, mesh, tab).mat
    for m in (0, 3, -5):
        v = np.exp(1j * m * mesh.t)
        sym = 0.5 / np.sqrt(m**2 - kappa**2 + 0j)
        assert np.abs(PS @ v - sym * v).max() < 1e-12
    PN = op.assemble_ps("N", kappa, mesh, tab, weighted=True).mat
    PN0 = op.assemble_ps("N", kappa, mesh, tab, weighted=False).mat
    assert np.abs(PN - mesh.jac[:, None] * PN0).max() < 1e-14
    # circulant before the weight scaling
    assert np.abs(np.roll(np.roll(PN0, 1, 0), 1, 1) - PN0).max() < 1e-12
    with pytest.raises(op.OperatorError):
        op.assemble_ps("S", 2.0, mesh, tab)


def test_ps_spot_modes_n16():
    kappa = 2.5 + 1.0j
    mesh = geo.build_mesh(geo.lq_ball(2, 1.0), 16)
    tab = build_tables(16)
    PS = op.assemble_ps("S", kappa, mesh, tab).mat
    for m in (1, 5, 11):
        v = np.exp(1j * m * mesh.t)
        sym = 0.5 / np.sqrt(m * m - kappa * kappa + 0j)
        assert np.abs(PS @ v - sym * v).max() < 1e-12


def test_threaded_assembly_is_deterministic(square_mesh, monkeypatch):
    tab = build_tables(square_mesh.n)
    monkeypatch.delenv("BIE2D_THREADS", raising=False)
    op.configure_threads(1)
    serial = op.assemble_single(1.0, square_mesh, tab).mat
    op.configure_threads(2)
    try:
        threaded = op.assemble_single(1.0, square_mesh, tab).mat
    finally:
        op.configure_threads(1)
    assert np.array_equal(serial, threaded)


def test_threads_env_override(monkeypatch):
    monkeypatch.setenv("BIE2D_THREADS", "3")
    assert op.configure_threads(1) == 3
    monkeypatch.delenv("BIE2D_THREADS")
    assert op.configure_threads(2) == 2
    op.configure_threads(1)


def test_null_field_identity_square():
    from bie2d.formulations import TransmissionProblem, incident_traces
    from bie2d.postprocess import _layer_potentials
    mesh = geo.build_mesh(geo.square(4.0), 256)
    prob = TransmissionProblem(k1=1.0, k2=4.0)
    gd, gn = incident_traces(prob, mesh)
    ang = np.linspace(0, 2 * np.pi, 21)[:-1]
    pts = 6.0 * np.stack([np.cos(ang), np.sin(ang)], axis=1)
    sl, dl = _layer_potentials(1.0, mesh, pts, gn, gd)
    assert np.abs(-sl + dl).max() < 1e-6 * np.abs(gd).max()


def test_spectral_convergence_single_layer_circle():
    # superalgebraic decay of the single-layer error on analytic densities
    k = 1.0
    errs = []
    ref_mesh = geo.build_mesh(geo.lq_ball(2, 1.0), 128)
    for n in (8, 16, 32):
        mesh = geo.build_mesh(geo.lq_ball(2, 1.0), n)
        tab = build_tables(n)
        S = op.assemble_single(k, mesh, tab).mat
        dens = np.exp(np.cos(mesh.t))
        got = S @ dens
        want = (1j * np.pi / 2) * sum(
            sp.jv(m, k) * sp.hankel1(m, k) *
            np.mean(np.exp(np.cos(ref_mesh.t)) * np.exp(-1j * m * ref_mesh.t)) *
            np.exp(1j * m * mesh.t) for m in range(-12, 13))
        errs.append(np.abs(got - want).max())
    assert errs[1] < 1e-2 * errs[0] or errs[1] < 1e-11
    assert errs[2] < 1e-2 * errs[1] or errs[2] < 1e-11
