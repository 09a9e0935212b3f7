"""The five discrete transmission systems and their right-hand sides.

Two-trace systems act on stacked unknowns [dirichlet; weighted neumann]
(each of length 2n); the single-equation system acts on the weighted
unphysical density mu^w.  Regularized and preconditioned systems are
expressed as compositions of the dense blocks rather than assembled
product matrices, which leaves GMRES iteration counts unchanged while
keeping one matrix per operator.
"""

from dataclasses import dataclass, field

import numpy as np


FORMULATIONS = ("cfiefk", "cfiefk2", "cfiesk", "cfier", "cfierps", "scfie")


class FormulationError(ValueError):
    pass


@dataclass(frozen=True)
class TransmissionProblem:
    """Physics of one scattering run."""

    k1: float
    k2: float
    rho: float = 1.0
    eta: float = None
    kappa: complex = None
    direction: tuple = (0.0, -1.0)

    def __post_init__(self):
        if self.k1 <= 0 or self.k2 <= 0:
            raise FormulationError("wavenumbers must be positive")
        if self.rho <= 0:
            raise FormulationError("contrast rho must be positive")
        if self.eta is None:
            object.__setattr__(self, "eta", float(self.k1))
        if self.eta == 0:
            raise FormulationError("coupling eta must be nonzero")
        if self.kappa is None:
            object.__setattr__(self, "kappa", 0.5 * (self.k1 + self.k2) + 1j * self.k1)
        if np.imag(self.kappa) <= 0:
            raise FormulationError("regularization wavenumber needs Im kappa > 0")
        d = np.asarray(self.direction, dtype=float)
        if abs(np.hypot(*d) - 1.0) > 1e-12:
            raise FormulationError("incidence direction must be a unit vector")
        object.__setattr__(self, "direction", (float(d[0]), float(d[1])))


def rho_value(mode, k1, k2):
    """Contrast for the named polarization mode."""
    if mode == "one":
        return 1.0
    if mode == "k_ratio":
        return (k1 / k2) ** 2
    raise FormulationError(f"unknown rho mode {mode!r}")


@dataclass
class TraceVector:
    """Total-field Dirichlet trace and weighted exterior Neumann trace."""

    dirichlet: np.ndarray
    neumann_w: np.ndarray


@dataclass
class ScfieDensity:
    mu_w: np.ndarray


@dataclass
class LinearSystem:
    """Matvec contract plus right-hand side for one formulation."""

    kind: str
    size: int
    apply: callable = field(repr=False)
    rhs: np.ndarray = field(repr=False)

    def to_traces(self, solution, problem=None, mesh=None, ops=None):
        """Map a converged solution vector to physical traces."""
        if self.kind == "scfie":
            return scfie_to_traces(problem, mesh, ops, solution)
        m = self.size // 2
        return TraceVector(dirichlet=solution[:m], neumann_w=solution[m:])


def incident_traces(problem, mesh):
    """Dirichlet and weighted Neumann traces of the plane wave on the mesh."""
    d = np.asarray(problem.direction)
    phase = np.exp(1j * problem.k1 * (mesh.x @ d))
    gamma_d = phase
    gamma_nw = 1j * problem.k1 * (mesh.nu @ d) * phase
    return gamma_d, gamma_nw


def _blocks_cfk(problem, ops):
    k1, k2, rho = problem.k1, problem.k2, problem.rho
    a11 = -(ops.double(k1).mat + ops.double(k2).mat)
    a12 = ops.single(k2).mat / rho + ops.single(k1).mat
    a21 = -(ops.hyper(k1).mat + rho * ops.hyper(k2).mat)
    a22 = ops.adjdouble(k1).mat + ops.adjdouble(k2).mat
    return a11, a12, a21, a22


def _blocks_csk(problem, ops):
    k1, k2, rho = problem.k1, problem.k2, problem.rho
    m = ops.mesh.size
    c = 0.5 * (1.0 / rho + 1.0)
    eye = np.eye(m)
    a11 = c * eye + ops.double(k2).mat - ops.double(k1).mat / rho
    a12 = (ops.single(k1).mat - ops.single(k2).mat) / rho
    a21 = -ops.hyper_diff(k1, k2).mat
    a22 = c * eye + ops.adjdouble(k1).mat - ops.adjdouble(k2).mat / rho
    return a11, a12, a21, a22


def _block_apply(blocks, v):
    a11, a12, a21, a22 = blocks
    m = a11.shape[0]
    top, bot = v[:m], v[m:]
    return np.concatenate([a11 @ top + a12 @ bot, a21 @ top + a22 @ bot])


def _regularizer_ops(kind, problem, ops):
    """S- and N-type regularizer blocks: locally-supported cutoff evaluations
    of S_kappa and N_kappa^w for CFIER, principal-symbol surrogates for
    CFIERPS.  Both choices regularize consistently (the same blocks build the
    right-hand side), so they steer the spectrum, not the solution."""
    kappa = problem.kappa
    if kind == "cfier":
        return ops.regularizer_single(kappa).mat, ops.regularizer_hyper(kappa).mat
    return ops.ps("S", kappa).mat, ops.ps("N", kappa, weighted=False).mat


def build_system(kind, problem, mesh, ops):
    """Discrete linear system and right-hand side for the named formulation."""
    kind = kind.lower()
    if kind not in FORMULATIONS:
        raise FormulationError(f"unknown formulation {kind!r}")
    if ops.mesh is not mesh:
        raise FormulationError("operator cache was assembled on a different mesh")
    gamma_d, gamma_nw = incident_traces(problem, mesh)
    rho = problem.rho
    m = mesh.size

    if kind == "scfie":
        return _build_scfie(problem, mesh, ops, gamma_d, gamma_nw)

    if kind in ("cfiefk", "cfiefk2"):
        blocks = _blocks_cfk(problem, ops)
        b = np.concatenate([gamma_d, gamma_nw])
        if kind == "cfiefk":
            return LinearSystem(kind, 2 * m, lambda v: _block_apply(blocks, v), b)
        # operator used as its own preconditioner: A(Av), rhs = A b
        return LinearSystem(kind, 2 * m,
                            lambda v: _block_apply(blocks, _block_apply(blocks, v)),
                            _block_apply(blocks, b))

    if kind == "cfiesk":
        blocks = _blocks_csk(problem, ops)
        b = np.concatenate([gamma_d / rho, gamma_nw])
        return LinearSystem(kind, 2 * m, lambda v: _block_apply(blocks, v), b)

    if kind in ("cfier", "cfierps"):
        csk = _blocks_csk(problem, ops)
        cfk = _blocks_cfk(problem, ops)
        s_reg, n_reg = _regularizer_ops(kind, problem, ops)
        c1 = rho / (rho + 1.0)
        c2 = 2.0 / (1.0 + rho)

        def apply(v):
            w = _block_apply(cfk, v)
            top, bot = w[:m], w[m:]
            reg = np.concatenate([s_reg @ bot, -rho * (n_reg @ top)])
            return c1 * _block_apply(csk, v) + c2 * reg

        rhs = np.concatenate([gamma_d + 2.0 * (s_reg @ gamma_nw),
                              -2.0 * rho * (n_reg @ gamma_d) + rho * gamma_nw]) / (rho + 1.0)
        return LinearSystem(kind, 2 * m, apply, rhs)

    raise FormulationError(kind)


def _build_scfie(problem, mesh, ops, gamma_d, gamma_nw):
    k1, k2, rho, eta = problem.k1, problem.k2, problem.rho, problem.eta
    s1 = ops.single(k1).mat
    s2 = ops.single(k2).mat
    kt1 = ops.adjdouble(k1).mat
    kt2 = ops.adjdouble(k2).mat
    k1m = ops.double(k1).mat
    ndiff = ops.hyper_diff(k1, k2).mat

    def apply(v):
        kt2v = kt2 @ v
        s2v = s2 @ v
        kw = -(kt2 @ (rho * v - 2.0 * kt2v)) - rho * (kt1 @ (v + 2.0 * kt2v)) \
            + 2.0 * (ndiff @ s2v)
        sw = -rho * (s1 @ (v + 2.0 * kt2v)) - (s2v - 2.0 * (k1m @ s2v))
        return -0.5 * (1.0 + rho) * v + kw - 1j * eta * sw

    rhs = gamma_nw - 1j * eta * gamma_d
    return LinearSystem("scfie", mesh.size, apply, rhs)


def scfie_to_traces(problem, mesh, ops, mu_w):
    """Physical traces from a converged weighted SCFIE density."""
    s2 = ops.single(problem.k2).mat
    kt2 = ops.adjdouble(problem.k2).mat
    dirichlet = -2.0 * (s2 @ mu_w)
    neumann_w = -problem.rho * (mu_w + 2.0 * (kt2 @ mu_w))
    return TraceVector(dirichlet=dirichlet, neumann_w=neumann_w)
