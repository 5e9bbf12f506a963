"""From XXZ Bethe roots to the tRS Lax matrix.

We track all 3! solutions of the gl(3) Bethe equations from the torus fixed
points, read off tRS momenta from the Baxter polynomials and check that the
Lax matrix at (zeta, p) has the equivariant parameters alpha as its
spectrum.  The dual Lax matrix exchanges the roles of zeta and alpha.
"""
import numpy as np

from qkflags import BetheProblem, ParameterFrame, QuiverSpec, solve_all
from qkflags.bethe import momenta
from qkflags.trs import dual_lax, lax, trs_point, verify_dual, verify_spectrum

rng = np.random.default_rng(42)
spec = QuiverSpec.complete_flag(3)
frame = ParameterFrame.from_q(
    0.3 + 0.1j, 1.6 + 0.4j,
    rng.normal(size=3) + 1j * rng.normal(size=3),
    0.5 * (rng.normal(size=2) + 1j * rng.normal(size=2)),
)
sols = solve_all(BetheProblem(spec, frame))
alpha = frame.alpha(3)
print("alpha =", np.round(np.sort_complex(alpha), 6))
print(f"{'start':>8} {'residual':>10} {'|det(u-L)-P|':>14} {'|Tr L^! - sum zeta|':>20}")
for s in sols:
    rep = verify_spectrum(s)
    dual = verify_dual(s)
    print(f"{s.origin.label():>8} {s.residual_norm:10.1e} {rep.charpoly_vs_P:14.1e} {dual.trace_residual:20.1e}")

s = sols[0]
pt = trs_point(s)
print("\nmomenta p_j = -Q_j(0)/Q_{j-1}(0):", np.round(momenta(s), 6))
print("eigenvalues of L:", np.round(np.sort_complex(np.linalg.eigvals(lax(pt))), 6))
Ld, pd = dual_lax(s)
print("eigenvalues of L^!:", np.round(np.sort_complex(np.linalg.eigvals(Ld)), 6))
print("zeta:", np.round(np.sort_complex(frame.zeta()), 6))
