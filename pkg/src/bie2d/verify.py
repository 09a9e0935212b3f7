"""Fast oracle/invariant suite behind the `verify` CLI subcommand.

Each check prints one PASS/FAIL line; the suite is self-contained (no test
framework) and runs in well under a minute.
"""

import numpy as np

from . import geometry as geo
from . import operators as op
from .formulations import TransmissionProblem, build_system
from .linalg import gmres
from .postprocess import far_field, max_far_error, mie_reference
from .quadrature import build_tables, multiplier_symbol


def _check(name, value, tol):
    ok = value <= tol
    print(f"{'PASS' if ok else 'FAIL'}  {name}: {value:.3e} (tol {tol:g})")
    return ok


def verify_all(verbose=True):
    ok = True
    n = 32
    tab = build_tables(n)
    t = (np.arange(2 * n) + 0.5) * np.pi / n

    # log-quadrature exactness on trigonometric monomials
    worst = 0.0
    for m in range(1, n):
        worst = max(worst, np.abs(tab.R @ np.cos(m * t) + (2 * np.pi / m) * np.cos(m * t)).max())
        worst = max(worst, np.abs(tab.R @ np.sin(m * t) + (2 * np.pi / m) * np.sin(m * t)).max())
    ok &= _check("log-quadrature exactness (n=32)", worst, 1e-11)

    # PV quadrature: symbol -|m|/2 on complex exponentials
    worst = 0.0
    for m in range(1, n):
        v = np.exp(1j * m * t)
        worst = max(worst, np.abs(tab.T @ v + 0.5 * m * v).max())
    ok &= _check("PV-quadrature exactness (n=32)", worst, 1e-11)

    # differentiation matrix on cos t
    ok &= _check("differentiation matrix on cos(t)",
                 np.abs(tab.Dmat @ np.cos(t) + np.sin(t)).max(), 1e-12)

    # multiplier symbol asymptotics
    sym = multiplier_symbol("S", 2.5 + 1j, np.array([400.0]))
    ok &= _check("sigma_S large-mode asymptotics", abs(sym[0] * 800.0 - 1.0), 1e-4)

    # Calderon identity on the circle
    disk = geo.lq_ball(2, 1.0)
    mesh = geo.build_mesh(disk, n)
    S = op.assemble_single(1.0, mesh, tab).mat
    K = op.assemble_double(1.0, mesh, tab).mat
    N = op.assemble_hyper_w(1.0, mesh, tab).mat
    rng = np.random.default_rng(3)
    coefs = rng.standard_normal(17) + 1j * rng.standard_normal(17)
    v = sum(c * np.exp(1j * m * mesh.t) for c, m in zip(coefs, range(-8, 9)))
    res = S @ (N @ v) + 0.25 * v - K @ (K @ v)
    ok &= _check("Calderon identity (circle, n=32)",
                 np.abs(res).max() / np.abs(v).max(), 1e-6)

    # hyper vs hyper-difference consistency
    N2 = op.assemble_hyper_w(2.0, mesh, tab).mat
    D12 = op.assemble_hyper_diff_w(1.0, 2.0, mesh, tab).mat
    ok &= _check("hypersingular difference consistency",
                 np.abs((N - N2 - D12) @ v).max() / np.abs(v).max(), 1e-8)

    # null-field identity on the square
    sq = geo.square(4.0)
    mesh_sq = geo.build_mesh(sq, 256)
    tab_sq = build_tables(256)
    prob = TransmissionProblem(k1=1.0, k2=4.0, rho=1.0)
    from .formulations import incident_traces
    from .postprocess import _layer_potentials
    gd, gn = incident_traces(prob, mesh_sq)
    ang = np.linspace(0, 2 * np.pi, 21)[:-1]
    pts = 6.0 * np.stack([np.cos(ang), np.sin(ang)], axis=1)
    sl, dl = _layer_potentials(1.0, mesh_sq, pts, gn, gd)
    ok &= _check("null-field identity (square)", np.abs(-sl + dl).max(), 1e-6)

    # Laplace double-layer constant via the jump-term construction
    const_resp = double_layer_k0_part(1.0, mesh_sq, tab_sq)
    ok &= _check("Laplace double-layer constant (square)",
                 np.abs(const_resp + 0.5).max(), 1e-8)
    ndsq = op.assemble_hyper_diff_w(1.0, 1.0, mesh_sq, tab_sq).mat
    ok &= _check("zero hyper difference k1=k2", np.abs(ndsq).max(), 1e-14)

    # cubic-root property guarding the regularized formulation
    worst = 0.0
    for rho in (0.1, 0.5, 2.0, 10.0, 100.0):
        roots = cubic_roots(rho)
        if np.any(np.abs(np.imag(roots)) > 1e-9) or np.min(np.abs(np.real(roots))) <= 0.5:
            worst = 1.0
    ok &= _check("cubic-root property (all rho)", worst, 0.5)

    # quick disk solve vs the analytic reference
    mesh_d = geo.build_mesh(geo.lq_ball(2, 2.0), 48)
    tab_d = build_tables(48)
    ops = op.OperatorCache(mesh_d, tab_d)
    system = build_system("cfiesk", prob, mesh_d, ops)
    sol = gmres(system.apply, system.rhs, tol=1e-12, max_iter=200)
    tr = system.to_traces(sol.solution, prob, mesh_d, ops)
    eps = max_far_error(far_field(tr, prob, mesh_d, 256), mie_reference(2.0, prob, 256))
    ok &= _check("disk transmission vs separation of variables", eps, 1e-8)

    print("verify:", "ALL PASS" if ok else "FAILURES PRESENT")
    return bool(ok)


def double_layer_k0_part(k, mesh, tables):
    """Action of the k-independent double-layer terms on the constant density.

    Subtracts the wavenumber-difference term (i) from the assembled matrix,
    leaving the Laplace coupling plus the analytic jump; for constants the
    coupling cancels and the result must be the -1/2 constant.
    """
    from . import kernels as ker

    A = op.assemble_double(k, mesh, tables).mat
    gt = ker.GeoSample(mesh.x[:, None, :], mesh.dx[:, None, :], mesh.ddx[:, None, :],
                       mesh.nu[:, None, :], mesh.jac[:, None])
    gs = ker.GeoSample(mesh.x[None, :, :], mesh.dx[None, :, :], mesh.ddx[None, :, :],
                       mesh.nu[None, :, :], mesh.jac[None, :])
    dt = mesh.t[:, None] - mesh.t[None, :]
    diag = np.eye(mesh.size, dtype=bool)
    logc, smooth, h0 = ker.double_split(k, gt, gs, dt, diag)
    term_i = tables.R * logc + tables.h * (smooth - h0)
    return (A - term_i) @ np.ones(mesh.size)


def cubic_roots(rho):
    """Roots of x^3 - 3 beta x^2 + beta with beta = (rho+1)/(2(rho-1))."""
    beta = (rho + 1.0) / (2.0 * (rho - 1.0))
    return np.roots([1.0, -3.0 * beta, 0.0, beta])
