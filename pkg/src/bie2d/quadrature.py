"""Periodic Nystrom quadrature machinery on 2n equispaced (shifted) nodes.

Log-weights R, principal-value cotangent weights T, the trapezoid rule,
the Fourier differentiation matrix, barycentric trigonometric interpolation,
and diagonal Fourier multipliers.  All weight formulas depend only on node
differences, so they hold unchanged on the half-shifted mesh.
"""

from dataclasses import dataclass

import numpy as np


class QuadratureError(ValueError):
    pass


@dataclass(frozen=True)
class QuadratureTables:
    """Dense weight tables for a 2n-node periodic mesh."""

    n: int
    R: np.ndarray       # log-kernel weights, R[i, j] = R_j(t_i)
    T: np.ndarray       # PV cotangent weights, T[i, j] = T_j(t_i)
    Dmat: np.ndarray    # spectral differentiation matrix
    h: float            # trapezoid weight pi/n


def _log_weight_profile(n):
    """R(l) = R_j(t_i) as a function of l = i - j (mod 2n)."""
    l = np.arange(2 * n)
    ang = l[:, None] * np.arange(1, n)[None, :] * np.pi / n
    prof = -(2.0 * np.pi / n) * np.sum(np.cos(ang) / np.arange(1, n)[None, :], axis=1)
    prof -= (np.pi / n**2) * (-1.0) ** l
    return prof


def _pv_weight_profile(n):
    """T(l) = T_j(t_i) as a function of l = i - j (mod 2n)."""
    l = np.arange(2 * n)
    ang = l[:, None] * np.arange(1, n)[None, :] * np.pi / n
    prof = -(0.5 / n) * np.sum(np.cos(ang) * np.arange(1, n)[None, :], axis=1)
    prof -= 0.25 * (-1.0) ** l
    return prof


def build_tables(n):
    """Quadrature tables for the 2n-node mesh (n >= 2)."""
    if n < 2:
        raise QuadratureError("need n >= 2")
    idx = np.arange(2 * n)
    diff = (idx[:, None] - idx[None, :]) % (2 * n)
    R = _log_weight_profile(n)[diff]
    T = _pv_weight_profile(n)[diff]
    sd = idx[:, None] - idx[None, :]
    with np.errstate(divide="ignore"):
        D = 0.5 * (-1.0) ** sd / np.tan(sd * np.pi / (2 * n))
    np.fill_diagonal(D, 0.0)
    return QuadratureTables(n=n, R=R, T=T, Dmat=D, h=np.pi / n)


def log_quadrature(tables, f_values, t_index):
    """Quadrature for int_0^2pi ln(4 sin^2((t-tau)/2)) f(tau) dtau at node t_index.

    Exact for f in the trigonometric interpolation space of the mesh.
    """
    f_values = np.asarray(f_values)
    if f_values.shape[0] != 2 * tables.n:
        raise QuadratureError("density length must be 2n")
    return tables.R[t_index] @ f_values


def pv_quadrature(tables, f_values, t_index):
    """Quadrature for (1/4pi) PV int_0^2pi cot((tau-t)/2) f'(tau) dtau at node t_index."""
    f_values = np.asarray(f_values)
    if f_values.shape[0] != 2 * tables.n:
        raise QuadratureError("density length must be 2n")
    return tables.T[t_index] @ f_values


def trig_interp_eval(values, nodes, t):
    """Evaluate the unique trigonometric interpolant through (nodes, values) at t.

    Uses the even-count cardinal kernel K(u) = (1/2n)[1 + 2 sum cos(mu) +
    cos(nu)], valid for any equispaced 2n-node grid (shifted or not).
    """
    values = np.asarray(values)
    nodes = np.asarray(nodes, dtype=float)
    N = nodes.shape[0]
    if N % 2 != 0:
        raise QuadratureError("need an even number of nodes")
    n = N // 2
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    u = np.atleast_1d(t)[:, None] - nodes[None, :]
    m = np.arange(1, n)
    kern = (1.0 + 2.0 * np.cos(u[..., None] * m).sum(axis=-1) + np.cos(n * u)) / N
    out = kern @ values
    return out[0] if scalar else out


def multiplier_symbol(kind, kappa, xi):
    """Principal symbols sigma_{S,kappa} and sigma_{N,kappa} at frequencies xi."""
    if np.imag(kappa) <= 0:
        raise QuadratureError("multiplier symbols need Im(kappa) > 0 (branch ambiguity)")
    xi = np.asarray(xi, dtype=float)
    root = np.sqrt(xi.astype(complex) ** 2 - complex(kappa) ** 2)
    if kind == "S":
        return 0.5 / root
    if kind == "N":
        return -0.5 * root
    raise QuadratureError("kind must be 'S' or 'N'")


def apply_multiplier(kind, kappa, values):
    """Apply the diagonal Fourier multiplier sigma_{kind,kappa} to nodal values.

    Forward DFT, scale mode m by sigma(m) for -n < m <= n, inverse DFT.  The
    result for kind 'N' is the un-weighted multiplier; callers wanting the
    weighted PS_N operator multiply pointwise by |x'| afterwards.
    """
    values = np.asarray(values)
    N = values.shape[0]
    if N % 2 != 0:
        raise QuadratureError("need an even number of samples")
    n = N // 2
    freqs = np.fft.fftfreq(N, d=1.0 / N)
    freqs[n] = n
    sym = multiplier_symbol(kind, kappa, freqs)
    return np.fft.ifft(sym * np.fft.fft(values))


def ps_matrix(kind, kappa, N):
    """Dense circulant matrix of apply_multiplier on N nodes."""
    if N % 2 != 0:
        raise QuadratureError("need an even number of samples")
    n = N // 2
    freqs = np.fft.fftfreq(N, d=1.0 / N)
    freqs[n] = n
    sym = multiplier_symbol(kind, kappa, freqs)
    col = np.fft.ifft(sym)  # action on the delta at node 0
    idx = np.arange(N)
    return col[(idx[:, None] - idx[None, :]) % N]
