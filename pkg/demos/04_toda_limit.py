"""The five-vertex model, the q-Toda chain and the hbar -> oo limit of tRS.

Five-vertex Bethe roots (the compact limit of XXZ) give a point of the
q-Toda phase space whose tridiagonal Lax matrix has det A(u) = prod (u - a).
Conversely, rescaling a q-Toda point into tRS coordinates and sending hbar
to infinity recovers the q-Toda Hamiltonians from the tRS ones.
"""
import numpy as np

from qkflags import QuiverSpec, solve_compact
from qkflags.toda import limit_check, toda_det, toda_hamiltonians, toda_point, verify_toda

rng = np.random.default_rng(3)
n = 3
a = rng.normal(size=n) + 1j * rng.normal(size=n)
zsharp = 0.5 * (rng.normal(size=n - 1) + 1j * rng.normal(size=n - 1))
sols = solve_compact(QuiverSpec.complete_flag(n), a, zsharp)

print(f"{len(sols)} five-vertex solutions")
for s in sols:
    rep = verify_toda(s)
    print(f"  {s.origin.label():>6}: |det A - M| {rep.det_vs_M:.1e}, max |H_r - e_r(a)| {max(rep.hamiltonian_vs_e):.1e}")

pt = toda_point(sols[0])
print("\ndet A(u) coefficients:", np.round(toda_det(pt).coef, 6))
print("q-Toda H_r:           ", np.round(toda_hamiltonians(pt), 6))

hbars = (1e2, 1e3, 1e4, 1e5)
rep = limit_check(pt, hbars)
print("\n|hbar^{-rn/2} H_r^tRS - H_r^qToda|")
print("   r " + "".join(f"{hb:>11.0e}" for hb in hbars))
for r, d in rep.differences.items():
    print(f"  {r:>2} " + "".join(f"{x:11.2e}" for x in d))
