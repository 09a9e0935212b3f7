"""Far/near field evaluation from solved traces and the disk (Mie) oracle.

The exterior scattered field is represented through the total-field traces,
u1 = -SL_1(gamma_N^1 u^t) + DL_1(gamma_D u^t); the weighted Neumann trace
absorbs the jacobian so plain trapezoid sums apply.  The far-field constant
e^{i pi/4} / sqrt(8 pi k1) comes from the large-argument Hankel asymptotics
and is cross-checked against direct potential evaluation at |x| = 1e6.
"""

from dataclasses import dataclass

import numpy as np
import scipy.special as _sp

from .specfun import greens, hankel1


class PostprocessError(ValueError):
    pass


class NearFieldAccuracyError(PostprocessError):
    """Requested evaluation point is too close to the boundary."""


@dataclass
class FarField:
    angles: np.ndarray       # direction angles, uniform starting at 0
    values: np.ndarray       # complex far-field samples u1_inf

    @property
    def directions(self):
        return np.stack([np.cos(self.angles), np.sin(self.angles)], axis=1)


def far_field_directions(num_dirs=1024):
    return 2.0 * np.pi * np.arange(num_dirs) / num_dirs


def far_field(traces, problem, mesh, num_dirs=1024):
    """Far-field pattern of the scattered exterior field."""
    k1 = problem.k1
    angles = far_field_directions(num_dirs)
    dirs = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    const = np.exp(0.25j * np.pi) / np.sqrt(8.0 * np.pi * k1)
    phase = np.exp(-1j * k1 * (dirs @ mesh.x.T))          # (Q, 2n)
    xn = dirs @ mesh.nu.T                                  # (Q, 2n)
    dens = -traces.neumann_w[None, :] - 1j * k1 * xn * traces.dirichlet[None, :]
    vals = const * mesh.h * np.sum(phase * dens, axis=1)
    return FarField(angles=angles, values=vals)


def max_far_error(calc, ref):
    """eps_inf: maximum pointwise far-field deviation."""
    if calc.angles.shape != ref.angles.shape or not np.allclose(calc.angles, ref.angles):
        raise PostprocessError("far fields sampled at different directions")
    return float(np.max(np.abs(calc.values - ref.values)))


def _winding(mesh, points):
    """Winding number of the discrete boundary around each point."""
    zb = mesh.x[:, 0] + 1j * mesh.x[:, 1]
    zp = points[:, 0] + 1j * points[:, 1]
    ratio = (np.roll(zb, -1)[None, :] - zp[:, None]) / (zb[None, :] - zp[:, None])
    return np.round(np.sum(np.angle(ratio), axis=1) / (2.0 * np.pi)).astype(int)


def _check_points(mesh, points, region):
    points = np.atleast_2d(np.asarray(points, dtype=float))
    d2 = np.sum((points[:, None, :] - mesh.x[None, :, :]) ** 2, axis=2)
    nearest = np.argmin(d2, axis=1)
    spacing = mesh.h * mesh.jac[nearest]
    if np.any(np.sqrt(d2[np.arange(len(points)), nearest]) < 5.0 * spacing):
        raise NearFieldAccuracyError("points closer than 5 mesh spacings to the boundary")
    wind = _winding(mesh, points)
    want = 1 if region == "interior" else 0
    if np.any(wind != want):
        raise PostprocessError(f"points are not strictly {region}")
    return points


def _layer_potentials(k, mesh, points, dens_single, dens_double):
    """SL_k(dens_single) - ... at points; densities carry the weight."""
    r = points[:, None, :] - mesh.x[None, :, :]
    d = np.sqrt(r[..., 0] ** 2 + r[..., 1] ** 2)
    sl = greens(k, d) @ dens_single if dens_single is not None else 0.0
    if dens_double is not None:
        rn = r[..., 0] * mesh.nu[None, :, 0] + r[..., 1] * mesh.nu[None, :, 1]
        dl = (0.25j * k * hankel1(1, k * d) * rn / d) @ dens_double
    else:
        dl = 0.0
    return mesh.h * sl, mesh.h * dl


def near_field(traces, problem, mesh, points, region):
    """Scattered exterior field u1 or total interior field u2 at points."""
    if region not in ("exterior", "interior"):
        raise PostprocessError("region must be 'exterior' or 'interior'")
    points = _check_points(mesh, points, region)
    if region == "exterior":
        sl, dl = _layer_potentials(problem.k1, mesh, points,
                                   traces.neumann_w, traces.dirichlet)
        return -sl + dl
    # interior traces via the transmission conditions: the total weighted
    # Neumann trace equals rho times the interior one; Dirichlet is shared
    sl, dl = _layer_potentials(problem.k2, mesh, points,
                               traces.neumann_w / problem.rho, traces.dirichlet)
    return sl - dl


# -- analytic disk oracle ---------------------------------------------------

def _mie_coefficients(radius, problem):
    k1, k2, rho = problem.k1, problem.k2, problem.rho
    alpha = np.arctan2(problem.direction[1], problem.direction[0])
    mmax = int(np.ceil(k1 * radius + 40))
    ms = np.arange(-mmax, mmax + 1)
    z1, z2 = k1 * radius, k2 * radius
    j1 = _sp.jv(ms, z1)
    j1p = _sp.jvp(ms, z1)
    h1 = _sp.hankel1(ms, z1)
    h1p = _sp.h1vp(ms, z1)
    j2 = _sp.jv(ms, z2)
    j2p = _sp.jvp(ms, z2)
    cm = np.exp(1j * ms * (np.pi / 2.0 - alpha))      # i^m e^{-im alpha}
    det = h1 * (-rho * k2 * j2p) - (-j2) * k1 * h1p
    if np.any(np.abs(det) < 1e-300):
        raise PostprocessError("singular Mie mode system")
    r1 = -cm * j1
    r2 = -cm * k1 * j1p
    am = (r1 * (-rho * k2 * j2p) - (-j2) * r2) / det
    bm = (h1 * r2 - r1 * k1 * h1p) / det
    return ms, am, bm, cm


def mie_reference(radius, problem, num_dirs=1024):
    """Analytic far field for the disk of the given radius.

    Per angular mode the 2x2 system enforces continuity of the total field
    and of the rho-weighted normal derivative; the far field uses the same
    asymptotic constant as far_field.
    """
    ms, am, _, _ = _mie_coefficients(radius, problem)
    angles = far_field_directions(num_dirs)
    const = np.sqrt(2.0 / (np.pi * problem.k1)) * np.exp(-0.25j * np.pi)
    vals = const * np.exp(1j * np.outer(angles, ms) - 0.5j * np.pi * ms[None, :]) @ am
    return FarField(angles=angles, values=vals)


def mie_near_field(radius, problem, points, region):
    """Analytic disk field at points: scattered u1 outside, total u2 inside."""
    ms, am, bm, _ = _mie_coefficients(radius, problem)
    points = np.atleast_2d(np.asarray(points, dtype=float))
    r = np.hypot(points[:, 0], points[:, 1])
    th = np.arctan2(points[:, 1], points[:, 0])
    if region == "exterior":
        if np.any(r <= radius):
            raise PostprocessError("exterior points must satisfy |x| > radius")
        rad = _sp.hankel1(ms[None, :], problem.k1 * r[:, None])
        coef = am
    elif region == "interior":
        if np.any(r >= radius):
            raise PostprocessError("interior points must satisfy |x| < radius")
        rad = _sp.jv(ms[None, :], problem.k2 * r[:, None])
        coef = bm
    else:
        raise PostprocessError("region must be 'exterior' or 'interior'")
    return (rad * np.exp(1j * np.outer(th, ms))) @ coef
