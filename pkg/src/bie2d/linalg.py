"""Unrestarted complex GMRES with exact iteration accounting.

Arnoldi with modified Gram-Schmidt (no reorthogonalization), Givens-rotation
least squares, zero initial guess, relative residual measured against the
right-hand-side norm.  An Arnoldi breakdown means the current Krylov
subspace is invariant, so the least-squares iterate is exact and counts as
convergence when the implicit residual confirms it.
"""

from dataclasses import dataclass, field

import numpy as np


class GmresError(ValueError):
    pass


@dataclass
class GmresResult:
    solution: np.ndarray
    iterations: int
    residual_history: list = field(repr=False)
    converged: bool = False


def _givens(a, b):
    """LAPACK-style complex rotation: c real, s complex, c^2 + |s|^2 = 1,
    with c*a + s*b = r and -conj(s)*a + c*b = 0."""
    if b == 0:
        return 1.0, 0.0 + 0.0j, a
    if a == 0:
        return 0.0, np.conj(b) / abs(b), abs(b)
    denom = np.hypot(abs(a), abs(b))
    c = abs(a) / denom
    phase = a / abs(a)
    s = phase * np.conj(b) / denom
    return c, s, phase * denom


def gmres(apply, rhs, tol=1e-12, max_iter=None):
    """Solve A x = rhs for the linear map `apply`, starting from x = 0.

    Stops when the implicit relative residual drops to tol; returns the
    best iterate with converged = False if max_iter is hit first.
    """
    b = np.asarray(rhs, dtype=complex)
    nsys = b.shape[0]
    if max_iter is None:
        max_iter = nsys
    max_iter = int(min(max_iter, nsys))
    bnorm = float(np.linalg.norm(b))
    if bnorm == 0.0:
        raise GmresError("right-hand side must be nonzero")
    V = [b / bnorm]
    H = np.zeros((max_iter + 1, max_iter), dtype=complex)
    cs = np.zeros(max_iter)
    sn = np.zeros(max_iter, dtype=complex)
    g = np.zeros(max_iter + 1, dtype=complex)
    g[0] = bnorm
    history = [1.0]
    j = 0
    while j < max_iter:
        w = np.array(apply(V[j]), dtype=complex, copy=True)  # apply may alias its input
        for i in range(j + 1):
            H[i, j] = np.vdot(V[i], w)
            w -= H[i, j] * V[i]
        hnew = float(np.linalg.norm(w))
        H[j + 1, j] = hnew
        breakdown = hnew <= 1e-14 * bnorm
        if not breakdown:
            V.append(w / hnew)
        for i in range(j):
            hi, hi1 = H[i, j], H[i + 1, j]
            H[i, j] = cs[i] * hi + sn[i] * hi1
            H[i + 1, j] = -np.conj(sn[i]) * hi + cs[i] * hi1
        cs[j], sn[j], H[j, j] = _givens(H[j, j], H[j + 1, j])
        H[j + 1, j] = 0.0
        g[j + 1] = -np.conj(sn[j]) * g[j]
        g[j] = cs[j] * g[j]
        j += 1
        rel = abs(g[j]) / bnorm
        history.append(min(rel, history[-1]))
        if rel <= tol or breakdown:
            break
    m = j
    y = np.linalg.solve(np.triu(H[:m, :m]), g[:m])
    x = np.stack(V[:m], axis=1) @ y
    return GmresResult(solution=x, iterations=m,
                       residual_history=history, converged=history[-1] <= tol)
