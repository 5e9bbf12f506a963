"""QQ-relations and their determinant solution for a gl(4) chain.

The auxiliary polynomials Q~_i are obtained by solving the (linear) QQ
relation at each level.  Every Q_j and Q~_j is then rebuilt as a ratio of a
q-Wronskian-like determinant of the linear polynomials u - p_i by a
Vandermonde determinant in zeta.  The Desnanot-Jacobi condensation identity
is what ties the two descriptions together.
"""
import numpy as np

from qkflags import BetheProblem, ParameterFrame, QuiverSpec, solve_all
from qkflags.bethe import baxter_Q, momenta
from qkflags.qq import aux_index_set, desnanot_jacobi_residual, q_determinant, q_matrix_at, qq_residual, qq_system

rng = np.random.default_rng(7)
n = 4
spec = QuiverSpec.complete_flag(n)
frame = ParameterFrame.from_q(
    0.3 + 0.1j, 0.6 - 0.3j,
    rng.normal(size=n) + 1j * rng.normal(size=n),
    0.5 * (rng.normal(size=n - 1) + 1j * rng.normal(size=n - 1)),
)
sol = solve_all(BetheProblem(spec, frame))[5]
sys = qq_system(sol)
print(f"solution from fixed point {sol.origin.label()}")
for i in range(1, n):
    print(f"  level {i}: Q~ = {np.round(sys.Qtilde[i - 1].coef, 5)}, "
          f"QQ residual {np.max(np.abs(qq_residual(sys, i).coef)):.1e}")

p, zeta, h = momenta(sol), frame.zeta(), frame.h
Q = baxter_Q(sol)
print("\ndeterminant reconstruction (max coefficient difference)")
for j in range(1, n + 1):
    line = f"  Q_{j}: {q_determinant(p, zeta, h, range(1, j + 1)).max_coef_diff(Q[j]):.1e}"
    if j < n:
        line += f"   Q~_{j}: {q_determinant(p, zeta, h, aux_index_set(j)).max_coef_diff(sys.Qtilde[j - 1]):.1e}"
    print(line)

M = q_matrix_at(p, zeta, h, range(1, n + 1), 0.3 + 0.2j)
print(f"\nDesnanot-Jacobi residual / det M at u = 0.3+0.2i: {abs(desnanot_jacobi_residual(M)) / abs(np.linalg.det(M)):.1e}")
