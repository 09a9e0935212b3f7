"""Bessel/Hankel special functions and the 2D Helmholtz Green's function.

Evaluation is delegated to scipy.special (cephes for real arguments, AMOS
for complex ones), which comfortably exceeds the 1e-12 relative accuracy
this solver needs inside its argument envelope.  The wrappers enforce the
envelope and the domain restrictions the kernel splittings rely on.
"""

import numpy as np
import scipy.special as _sp

# Euler-Mascheroni constant to 20 digits.
EULER_GAMMA = 0.57721566490153286061

# Accuracy envelope for |z|; scattering runs stay far below this.
_MAX_ABS_ARG = 1.0e4


class SpecFunDomainError(ValueError):
    """Argument outside the supported domain or accuracy envelope."""


def _check_envelope(z):
    a = np.max(np.abs(z)) if np.ndim(z) else abs(z)
    if not np.isfinite(a) or a > _MAX_ABS_ARG:
        raise SpecFunDomainError(f"argument magnitude {a} outside envelope {_MAX_ABS_ARG}")


def bessel_j(order, z):
    """Bessel function J_0 or J_1 of real or complex argument.

    Entire in z; complex arguments are evaluated with the AMOS routines.
    Scalars in, scalar out; arrays in, array out.
    """
    if order not in (0, 1):
        raise ValueError("order must be 0 or 1")
    z = np.asarray(z)
    _check_envelope(z)
    if np.iscomplexobj(z):
        return _sp.jv(order, z)
    return _sp.j0(z) if order == 0 else _sp.j1(z)


def bessel_y(order, x):
    """Bessel function of the second kind Y_0 or Y_1, real x > 0."""
    if order not in (0, 1):
        raise ValueError("order must be 0 or 1")
    x = np.asarray(x, dtype=float)
    _check_envelope(x)
    if np.any(x <= 0.0):
        raise SpecFunDomainError("Y_nu requires x > 0")
    return _sp.y0(x) if order == 0 else _sp.y1(x)


def hankel1(order, x):
    """Hankel function of the first kind H^(1)_0 or H^(1)_1.

    Real arguments must be positive (logarithmic singularity at 0); complex
    arguments must avoid the branch cut (-inf, 0].
    """
    if order not in (0, 1):
        raise ValueError("order must be 0 or 1")
    x = np.asarray(x)
    if np.iscomplexobj(x):
        bad = (x.imag == 0) & (x.real <= 0)
    else:
        bad = x <= 0.0
    if np.any(bad):
        raise SpecFunDomainError("hankel1 requires arguments off (-inf, 0]")
    return _sp.hankel1(order, x)


def greens(k, r):
    """Helmholtz free-space Green's function G_k(r) = (i/4) H^(1)_0(k r).

    k = 0 gives the Laplace fundamental solution -(1/2pi) log r.  Requires
    r > 0 and, for k != 0, Re k > 0 with Im k >= 0.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0.0):
        raise SpecFunDomainError("greens requires r > 0")
    if k == 0:
        return -np.log(r) / (2.0 * np.pi)
    if np.real(k) <= 0 or np.imag(k) < 0:
        raise SpecFunDomainError("greens requires Re k > 0 and Im k >= 0 (or k = 0)")
    return 0.25j * hankel1(0, k * r)


def greens_gradient(k, rvec):
    """Gradient of G_k at displacement rvec (shape (..., 2)), k real or complex."""
    rvec = np.asarray(rvec, dtype=float)
    d = np.sqrt(rvec[..., 0] ** 2 + rvec[..., 1] ** 2)
    if np.any(d <= 0.0):
        raise SpecFunDomainError("greens_gradient requires |rvec| > 0")
    if k == 0:
        scale = -1.0 / (2.0 * np.pi * d**2)
    else:
        scale = -0.25j * k * hankel1(1, k * d) / d
    return scale[..., None] * rvec
