"""High-order Nystrom solvers for 2D Helmholtz transmission scattering on
piecewise-analytic curves with corners: graded meshes, weighted densities,
five boundary integral formulations, and a GMRES benchmark harness."""

from .geometry import (Curve, GradedMesh, SigmoidParams, build_mesh,
                       builtin_geometry, lq_ball, polygon, square, ushape)
from .formulations import (FORMULATIONS, LinearSystem, ScfieDensity, TraceVector,
                           TransmissionProblem, build_system, incident_traces,
                           rho_value, scfie_to_traces)
from .linalg import GmresResult, gmres
from .operators import (DenseOperator, OperatorCache, assemble_adjdouble_w,
                        assemble_double, assemble_hyper_diff_w,
                        assemble_hyper_w, assemble_ps, assemble_single)
from .postprocess import (FarField, far_field, max_far_error, mie_near_field,
                          mie_reference, near_field)
from .quadrature import (QuadratureTables, apply_multiplier, build_tables,
                         log_quadrature, pv_quadrature, trig_interp_eval)

__version__ = "0.1.0"

__all__ = [
    "Curve", "GradedMesh", "SigmoidParams", "build_mesh", "builtin_geometry",
    "lq_ball", "polygon", "square", "ushape", "FORMULATIONS", "LinearSystem", "ScfieDensity",
    "TraceVector", "TransmissionProblem", "build_system", "incident_traces",
    "rho_value", "scfie_to_traces", "GmresResult", "gmres", "DenseOperator",
    "OperatorCache", "assemble_adjdouble_w", "assemble_double",
    "assemble_hyper_diff_w", "assemble_hyper_w", "assemble_ps",
    "assemble_single", "FarField", "far_field", "max_far_error",
    "mie_near_field", "mie_reference", "near_field", "QuadratureTables",
    "apply_multiplier", "build_tables", "log_quadrature", "pv_quadrature",
    "trig_interp_eval", "__version__",
]
