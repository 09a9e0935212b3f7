"""Solve orchestration shared by the CLI and the test suite.

A Workspace caches (mesh, tables, operator cache) per discretization so a
bench row shares assembled operators across formulations; reference
solutions are refined-CFIESK far fields at twice the requested unknowns
with GMRES tolerance 1e-12.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from . import geometry as geo
from .config import ConfigError
from .formulations import TransmissionProblem, build_system, rho_value
from .linalg import gmres
from .operators import OperatorCache, configure_threads
from .postprocess import FarField, far_field, max_far_error
from .quadrature import build_tables

REFERENCE_TOL = 1e-12
REFERENCE_REFINE = 2


class SolveFailure(RuntimeError):
    """GMRES did not reach the requested residual."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


@dataclass
class SolveReport:
    formulation: str
    k1: float
    k2: float
    rho: float
    unknowns: int
    p: int
    gmres_tol: float
    iterations: int
    converged: bool
    eps_inf: float
    matvec_ms: float
    total_ms: float
    farfield: FarField = field(repr=False, default=None)
    traces: object = field(repr=False, default=None)
    residual_history: list = field(repr=False, default_factory=list)


def formulation_n(kind, unknowns):
    """Mesh parameter n for a formulation at the displayed unknown count.

    Two-trace systems have 4n unknowns; the single equation has 2n, so at
    equal displayed unknowns it runs on a twice finer mesh.
    """
    if kind == "scfie":
        if unknowns % 2:
            raise ConfigError("scfie needs an even unknown count")
        return unknowns // 2
    if unknowns % 4:
        raise ConfigError("two-trace formulations need unknowns divisible by 4")
    return unknowns // 4


def default_p(kind, p=None):
    if p is not None:
        return p
    return 4 if kind == "scfie" else 3


class Workspace:
    """Caches meshes/tables/operator caches keyed by (geometry, n, p)."""

    def __init__(self, cfg):
        self.cfg = cfg
        self._disc = {}
        configure_threads(cfg.threads)

    def curve(self, p):
        kind = self.cfg.geometry_kind
        params = dict(self.cfg.geometry_params)
        if kind in ("square", "ushape", "polygon"):
            params["sigmoid"] = geo.SigmoidParams(p)
        return geo.builtin_geometry(kind, **params)

    def discretization(self, n, p):
        key = (n, p)
        if key not in self._disc:
            curve = self.curve(p)
            mesh = geo.build_mesh(curve, n)
            tables = build_tables(n)
            self._disc[key] = (mesh, tables, OperatorCache(mesh, tables))
        return self._disc[key]

    def drop(self, n, p):
        self._disc.pop((n, p), None)

    def clear(self):
        self._disc.clear()

    def problem(self, k1, k2):
        cfg = self.cfg
        rho = rho_value(cfg.rho_mode, k1, k2)
        eta = cfg.eta if cfg.eta is not None else k1
        kre = cfg.kappa_re if cfg.kappa_re is not None else 0.5 * (k1 + k2)
        kim = cfg.kappa_im if cfg.kappa_im is not None else k1
        return TransmissionProblem(k1=k1, k2=k2, rho=rho, eta=eta, kappa=kre + 1j * kim)

    def solve(self, kind, k1, k2, unknowns, tol=None, max_iter=None, reference=None):
        """One solve; eps_inf is measured against `reference` when given."""
        cfg = self.cfg
        tol = cfg.gmres_tol if tol is None else tol
        max_iter = cfg.gmres_max_iter if max_iter is None else max_iter
        n = formulation_n(kind, unknowns)
        p = default_p(kind, cfg.p)
        prob = self.problem(k1, k2)
        t0 = time.perf_counter()
        mesh, tables, ops = self.discretization(n, p)
        system = build_system(kind, prob, mesh, ops)
        rng = np.random.default_rng(12345)
        probe = rng.standard_normal(system.size) + 1j * rng.standard_normal(system.size)
        tm = time.perf_counter()
        system.apply(probe)
        matvec_ms = 1e3 * (time.perf_counter() - tm)
        result = gmres(system.apply, system.rhs, tol=tol, max_iter=max_iter)
        traces = system.to_traces(result.solution, prob, mesh, ops)
        ff = far_field(traces, prob, mesh, cfg.num_dirs)
        eps = max_far_error(ff, reference) if reference is not None else float("nan")
        total_ms = 1e3 * (time.perf_counter() - t0)
        return SolveReport(
            formulation=kind, k1=k1, k2=k2, rho=prob.rho, unknowns=unknowns,
            p=p, gmres_tol=tol, iterations=result.iterations,
            converged=result.converged, eps_inf=eps, matvec_ms=matvec_ms,
            total_ms=total_ms, farfield=ff, traces=traces,
            residual_history=result.residual_history)

    def reference_farfield(self, k1, k2, unknowns):
        """Refined-CFIESK far field: 2x the unknowns, GMRES tol 1e-12."""
        rep = self.solve("cfiesk", k1, k2, REFERENCE_REFINE * unknowns,
                         tol=REFERENCE_TOL, max_iter=max(self.cfg.gmres_max_iter, 2000))
        if not rep.converged:
            raise SolveFailure("reference CFIESK solve did not converge", rep)
        return rep.farfield


CSV_HEADER = "formulation,k1,k2,rho,unknowns,p,gmres_tol,iterations,eps_inf,matvec_ms,total_ms"


def csv_row(rep):
    return (f"{rep.formulation},{rep.k1:g},{rep.k2:g},{rep.rho:.12g},{rep.unknowns},"
            f"{rep.p},{rep.gmres_tol:g},{rep.iterations},{rep.eps_inf:.6e},"
            f"{rep.matvec_ms:.3f},{rep.total_ms:.3f}")


def run_solve(cfg):
    """Single solve with eps_inf against a refined reference."""
    ws = Workspace(cfg)
    kind = cfg.formulations[0]
    unknowns = cfg.unknowns[0]
    ref = ws.reference_farfield(cfg.k1, cfg.k2, unknowns)
    rep = ws.solve(kind, cfg.k1, cfg.k2, unknowns, reference=ref)
    if not rep.converged:
        raise SolveFailure(f"{kind} did not converge in {rep.iterations} iterations", rep)
    return rep


def run_convergence(cfg):
    """One report per (formulation, unknowns); shared reference at 2x finest."""
    ws = Workspace(cfg)
    ref = ws.reference_farfield(cfg.k1, cfg.k2, max(cfg.unknowns))
    ws.clear()
    reports = []
    for unknowns in cfg.unknowns:
        for kind in cfg.formulations:
            rep = ws.solve(kind, cfg.k1, cfg.k2, unknowns, reference=ref)
            if not rep.converged:
                raise SolveFailure(f"{kind} at {unknowns} unknowns did not converge", rep)
            reports.append(rep)
        ws.clear()
    return reports


def run_bench(cfg):
    """One report per (sweep row, formulation); per-row refined reference."""
    if not cfg.sweep:
        raise ConfigError("bench requires a bench.sweep of (k1, k2, unknowns) rows")
    ws = Workspace(cfg)
    reports = []
    for k1, k2, unknowns in cfg.sweep:
        ref = ws.reference_farfield(k1, k2, unknowns)
        ws.clear()
        for kind in cfg.formulations:
            rep = ws.solve(kind, k1, k2, unknowns, reference=ref)
            if not rep.converged:
                raise SolveFailure(f"{kind} at k1={k1} did not converge", rep)
            reports.append(rep)
        ws.clear()
    return reports


def write_reports_csv(path, reports):
    lines = [CSV_HEADER] + [csv_row(r) for r in reports]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def write_farfield(path, ff):
    lines = ["theta,re,im,abs"]
    for th, v in zip(ff.angles, ff.values):
        lines.append(f"{th:.15g},{v.real:.15g},{v.imag:.15g},{abs(v):.15g}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
