"""Kernel splittings for the weighted boundary operators.

Every boundary-operator kernel is written as

    kernel(t, tau) = log_coeff(t, tau) * ln(4 sin^2((t - tau)/2)) + smooth(t, tau)

with analytic log coefficients (Bessel J times geometry factors) and smooth
remainders obtained by direct subtraction off the diagonal; the diagonal
values use the closed forms involving the curve jacobian and curvature data.
All formulas accept complex wavenumbers (J is entire; Hankel arguments stay
off the branch cut for Im k >= 0), which the windowed complex-kappa
assembly relies on.

The array functions operate on broadcastable grids of precomputed geometry
samples; the pointwise split_* functions are thin wrappers used by tests
and diagnostics.
"""

from dataclasses import dataclass
from collections import namedtuple

import numpy as np

from .specfun import EULER_GAMMA, bessel_j, hankel1


class KernelError(ValueError):
    pass


@dataclass(frozen=True)
class SplitValue:
    log_coeff: complex
    smooth: complex

    def reconstruct(self, t, tau):
        """kernel value at (t, tau); off-diagonal only."""
        return self.log_coeff * log_factor(t - tau) + self.smooth


GeoSample = namedtuple("GeoSample", "x dx ddx nu jac")


def geo_at(curve, t):
    x, dx, ddx, nu, jac = curve.eval(t)
    return GeoSample(x, dx, ddx, nu, jac)


def log_factor(dt):
    """ln(4 sin^2(dt/2)), the periodic logarithmic singularity."""
    return np.log(4.0 * np.sin(np.asarray(dt) / 2.0) ** 2)


def _pair(gt, gs):
    """Displacement data between target and source samples."""
    r = gt.x - gs.x
    d = np.sqrt(r[..., 0] ** 2 + r[..., 1] ** 2)
    return r, d


def _dot(a, b):
    return a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1]


# -- array cores -----------------------------------------------------------
# Each returns (log_coeff, smooth) on the off-diagonal entries of the grid;
# diagonal entries (where `diag` is True) receive the closed-form limits.


def single_split(k, gt, gs, dt, diag=None):
    """Split of M_k, the kernel of the parametrized single layer S_k."""
    r, d = _pair(gt, gs)
    if diag is None:
        diag = np.zeros(np.shape(d), dtype=bool)
    ds = np.where(diag, 1.0, d)
    z = k * ds
    logc = -bessel_j(0, z) / (4.0 * np.pi)
    full = 0.25j * hankel1(0, np.where(diag, 1.0, z))
    smooth = full - logc * log_factor(np.where(diag, 1.0, dt))
    if np.any(diag):
        jac = np.broadcast_to(gt.jac, diag.shape)
        if np.any(jac[diag] == 0.0):
            raise KernelError("single-layer diagonal at a corner")
        logc = np.where(diag, -1.0 / (4.0 * np.pi), logc)
        dval = 0.25j - EULER_GAMMA / (2.0 * np.pi) - np.log(k * np.where(diag, jac, 1.0) / 2.0) / (2.0 * np.pi)
        smooth = np.where(diag, dval, smooth)
    return logc, smooth


def single_full(k, gt, gs):
    """Full kernel M_k off-diagonal (used by the windowed complex path)."""
    _, d = _pair(gt, gs)
    return 0.25j * hankel1(0, k * d)


def double_split(k, gt, gs, dt, diag=None):
    """Split of H_k (double layer) plus the Laplace kernel H_0."""
    r, d = _pair(gt, gs)
    if diag is None:
        diag = np.zeros(np.shape(d), dtype=bool)
    ds = np.where(diag, 1.0, d)
    z = k * ds
    nur = _dot(np.broadcast_to(gs.nu, r.shape), r)
    logc = -(k / (4.0 * np.pi)) * nur * bessel_j(1, z) / ds
    full = 0.25j * k * nur * hankel1(1, np.where(diag, 1.0, z)) / ds
    smooth = full - logc * log_factor(np.where(diag, 1.0, dt))
    h0 = nur / (2.0 * np.pi * ds**2)
    if np.any(diag):
        jac = np.broadcast_to(gt.jac, diag.shape)
        if np.any(jac[diag] == 0.0):
            raise KernelError("double-layer diagonal at a corner")
        nu_ddx = _dot(np.broadcast_to(gt.nu, r.shape), np.broadcast_to(gt.ddx, r.shape))
        dval = nu_ddx / (4.0 * np.pi * jac**2)
        logc = np.where(diag, 0.0, logc)
        smooth = np.where(diag, dval, smooth)
        h0 = np.where(diag, dval, h0)
    return logc, smooth, h0


def adjdouble_split(k, gt, gs, dt, diag=None):
    """Split of H_k^T, the kernel of the weighted adjoint double layer.

    H_k^T(t, tau) = H_k(tau, t) = -(ik/4) nu(t).r H_1(k|r|)/|r| with
    r = x(t) - x(tau); the sign makes the diagonal limit match the double
    layer's, as the transpose property requires.
    """
    r, d = _pair(gt, gs)
    if diag is None:
        diag = np.zeros(np.shape(d), dtype=bool)
    ds = np.where(diag, 1.0, d)
    z = k * ds
    nur = _dot(np.broadcast_to(gt.nu, r.shape), r)
    logc = (k / (4.0 * np.pi)) * nur * bessel_j(1, z) / ds
    full = -0.25j * k * nur * hankel1(1, np.where(diag, 1.0, z)) / ds
    smooth = full - logc * log_factor(np.where(diag, 1.0, dt))
    if np.any(diag):
        jac = np.broadcast_to(gt.jac, diag.shape)
        if np.any(jac[diag] == 0.0):
            raise KernelError("adjoint double-layer diagonal at a corner")
        nu_ddx = _dot(np.broadcast_to(gt.nu, r.shape), np.broadcast_to(gt.ddx, r.shape))
        dval = nu_ddx / (4.0 * np.pi * jac**2)
        logc = np.where(diag, 0.0, logc)
        smooth = np.where(diag, dval, smooth)
    return logc, smooth


def hyper_parts_split(k, gt, gs, dt, diag=None):
    """Splits of Q_k and D_k from the Maue decomposition of N_k^w."""
    r, d = _pair(gt, gs)
    if diag is None:
        diag = np.zeros(np.shape(d), dtype=bool)
    dots = _dot(np.broadcast_to(gt.dx, r.shape), np.broadcast_to(gs.dx, r.shape))
    m_log, m_smooth = single_split(k, gt, gs, dt, diag)
    q_log = k**2 * m_log * dots
    q_smooth = k**2 * m_smooth * dots
    ds = np.where(diag, 1.0, d)
    z = k * ds
    xpr = _dot(np.broadcast_to(gt.dx, r.shape), r)
    d_log = (k / (4.0 * np.pi)) * xpr * bessel_j(1, z) / ds
    dt_safe = np.where(diag, 1.0, dt)
    d_full = (1.0 / (4.0 * np.pi)) / np.tan(dt_safe / 2.0) - 0.25j * k * xpr * hankel1(1, np.where(diag, 1.0, z)) / ds
    d_smooth = d_full - d_log * log_factor(dt_safe)
    if np.any(diag):
        jac = np.broadcast_to(gt.jac, diag.shape)
        if np.any(jac[diag] == 0.0):
            raise KernelError("hypersingular diagonal at a corner")
        xp_xpp = _dot(np.broadcast_to(gt.dx, r.shape), np.broadcast_to(gt.ddx, r.shape))
        d_log = np.where(diag, 0.0, d_log)
        # diagonal limit of D_k is -(1/4pi) x'.x''/|x'|^2 (Taylor expansion of
        # the cot/Hankel cancellation; vanishes on curves of constant speed)
        d_smooth = np.where(diag, -xp_xpp / (4.0 * np.pi * jac**2), d_smooth)
    return (q_log, q_smooth), (d_log, d_smooth)


def _hessian_sandwich_vs_laplace(k, gt, gs, dt, diag):
    """L_{1,k} and the full sandwich nu(t)^T Hess(G_k - G_0) nu(tau)."""
    r, d = _pair(gt, gs)
    ds = np.where(diag, 1.0, d)
    z = k * ds
    nut = np.broadcast_to(gt.nu, r.shape)
    nus = np.broadcast_to(gs.nu, r.shape)
    nn = _dot(nut, nus)
    ntr = _dot(nut, r)
    nsr = _dot(nus, r)
    j0 = bessel_j(0, z)
    j1 = bessel_j(1, z)
    L1 = (k / (4.0 * np.pi)) * (j1 / ds * nn + (k * j0 - 2.0 * j1 / ds) * ntr * nsr / ds**2)
    zs = np.where(diag, 1.0, z)
    h0 = hankel1(0, zs)
    h1 = hankel1(1, zs)
    full = (-0.25j * k**2 * h0 * ntr * nsr / ds**2
            + (0.25j * zs * h1 - 1.0 / (2.0 * np.pi)) * (2.0 * ntr * nsr / ds**4 - nn / ds**2))
    return L1, full


def _hyper_diff_diag(k, jac):
    """Diagonal of L_{2,k}; vanishes with jac^2 at corners."""
    js = np.where(jac > 0.0, jac, 1.0)
    val = k**2 * (np.log(k * js / 2.0) / (4.0 * np.pi) - 0.125j
                  + (2.0 * EULER_GAMMA - 1.0) / (8.0 * np.pi)) * js**2
    return np.where(jac > 0.0, val, 0.0)


def hyper_diff_split(k1, k2, gt, gs, dt, diag=None):
    """Split of the kernel of N_{k1}^w - N_{k2}^w (smoothing difference).

    Finite everywhere, including corner diagonals where it vanishes.
    """
    r, d = _pair(gt, gs)
    if diag is None:
        diag = np.zeros(np.shape(d), dtype=bool)
    L1a, Fa = _hessian_sandwich_vs_laplace(k1, gt, gs, dt, diag)
    L1b, Fb = _hessian_sandwich_vs_laplace(k2, gt, gs, dt, diag)
    logc = -(L1a - L1b)
    lf = log_factor(np.where(diag, 1.0, dt))
    smooth = -((Fa - L1a * lf) - (Fb - L1b * lf))
    if np.any(diag):
        jac = np.broadcast_to(gt.jac, diag.shape)
        logc = np.where(diag, -(k1**2 - k2**2) * jac**2 / (8.0 * np.pi), logc)
        smooth = np.where(diag, -(_hyper_diff_diag(k1, jac) - _hyper_diff_diag(k2, jac)), smooth)
    return logc, smooth


def hyper_diff_full(k1, k2, gt, gs):
    """Full kernel of N_{k1}^w - N_{k2}^w off-diagonal (windowed remainder)."""
    r, d = _pair(gt, gs)
    dt = np.zeros(np.shape(d))
    diag = np.zeros(np.shape(d), dtype=bool)
    _, Fa = _hessian_sandwich_vs_laplace(k1, gt, gs, dt, diag)
    _, Fb = _hessian_sandwich_vs_laplace(k2, gt, gs, dt, diag)
    return -(Fa - Fb)


# -- pointwise evaluators -----------------------------------------------------

def _wrap(dt):
    return np.mod(dt + np.pi, 2.0 * np.pi) - np.pi


def _point_pair(mesh, t, tau):
    curve = mesh.curve if hasattr(mesh, "curve") else mesh
    gt = geo_at(curve, np.asarray(float(t)))
    gs = geo_at(curve, np.asarray(float(tau)))
    dt = _wrap(t - tau)
    diag = np.asarray(abs(dt) < 1e-14)
    return gt, gs, np.asarray(dt), diag


def split_single(k, mesh, t, tau):
    gt, gs, dt, diag = _point_pair(mesh, t, tau)
    logc, smooth = single_split(k, gt, gs, dt, diag)
    return SplitValue(complex(logc), complex(smooth))


def split_double(k, mesh, t, tau):
    gt, gs, dt, diag = _point_pair(mesh, t, tau)
    logc, smooth, h0 = double_split(k, gt, gs, dt, diag)
    return SplitValue(complex(logc), complex(smooth)), complex(h0)


def split_adjdouble(k, mesh, t, tau):
    gt, gs, dt, diag = _point_pair(mesh, t, tau)
    logc, smooth = adjdouble_split(k, gt, gs, dt, diag)
    return SplitValue(complex(logc), complex(smooth))


def split_hyper_parts(k, mesh, t, tau):
    gt, gs, dt, diag = _point_pair(mesh, t, tau)
    (ql, qs), (dl, dsm) = hyper_parts_split(k, gt, gs, dt, diag)
    return SplitValue(complex(ql), complex(qs)), SplitValue(complex(dl), complex(dsm))


def split_hyper_diff(k1, k2, mesh, t, tau):
    gt, gs, dt, diag = _point_pair(mesh, t, tau)
    logc, smooth = hyper_diff_split(k1, k2, gt, gs, dt, diag)
    return SplitValue(complex(logc), complex(smooth))
