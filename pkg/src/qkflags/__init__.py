"""Numerics for quasimap vertex functions, XXZ Bethe equations and their integrable duals."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    CollisionError,
    ContinuationError,
    ParameterFrame,
    PoleError,
    Poly,
    QKError,
    QuiverSpec,
    SingularSystemError,
    char_poly,
    frame_convert,
    poly_shift,
)
from .qseries import bracket, compact_bracket, q_pochhammer  # noqa: E402
from .vertex import (  # noqa: E402
    FixedPoint,
    Insertion,
    compact_vertex_series,
    eigenvalue_ratio,
    enumerate_fixed_points,
    vertex_series,
)
from .bethe import BetheProblem, BetheSolution, baxter_Q, momenta, solve_all, solve_compact  # noqa: E402
from .trs import TrsPoint, dual_lax, hamiltonian, lax, verify_dual, verify_spectrum  # noqa: E402
from .qq import desnanot_jacobi_residual, q_determinant, qq_residual, qq_system, solve_aux_Q, verify_qq  # noqa: E402
from .toda import TodaPoint, limit_check, toda_det, toda_hamiltonian, toda_lax, toda_point, verify_toda  # noqa: E402
