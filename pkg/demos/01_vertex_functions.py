"""Vertex functions of T*Gr(1,2) and what they know about Bethe roots.

The bare vertex at a fixed point is a power series in the Kähler variable z.
For q close to 1 the ratio V^{(tau)}/V^{(1)} approaches the eigenvalue of
quantum multiplication by tau, which for the tautological class is a Bethe
root.  The large-hbar rescaling of the same series gives the vertex of the
compact Grassmannian.
"""
import numpy as np

from qkflags import (
    BetheProblem,
    Insertion,
    ParameterFrame,
    QuiverSpec,
    compact_vertex_series,
    eigenvalue_ratio,
    enumerate_fixed_points,
    solve_all,
    vertex_series,
)

spec = QuiverSpec.grassmannian(1, 2)
frame = ParameterFrame.from_q(0.4 + 0.2j, 1.7 - 0.6j, [1.0, 2.3 + 0.5j], [0.0])
points = enumerate_fixed_points(spec)

print("vertex coefficients, tau = 1")
for p in points:
    ser = vertex_series(p, Insertion.one(), frame, 4)
    row = "  ".join(f"{ser[(d,)]:.6f}" for d in range(5))
    print(f"  p = {{a_{p.label()}}}: {row}")

# compact limit: rescale by (-hbar^{1/2})^{v' d} and send hbar -> oo
big = ParameterFrame(frame.q_sqrt, 1e5, frame.a, [0.0])
print("\ncompact vertex vs rescaled vertex at hbar = 1e10")
for p in points:
    C = compact_vertex_series(p, Insertion.one(), big, 3)
    V = vertex_series(p, Insertion.one(), big, 3)
    for d in range(1, 4):
        resc = V[(d,)] / (-big.h) ** (2 * d)
        print(f"  p={p.label()} d={d}: compact {C[(d,)]:.8f}  rescaled {resc:.8f}")

# q -> 1: the eigenvalue ratio against the Bethe roots
q, z = 1 - 1e-3, 1e-2
fr = ParameterFrame.from_q(q, 1.1 + 0.1j, [1.0, 2.0], [z])
sols = solve_all(BetheProblem(spec, fr))
print(f"\nq = {q}, z = {z}: V^(V_1)/V^(1) against the Bethe root")
for p, s in zip(points, sols):
    r = eigenvalue_ratio(p, Insertion.tautological(1), fr, 6, [z])
    print(f"  p={p.label()}: ratio {r:.6f}  root {s.roots[0][0]:.6f}  |diff| {abs(r - s.roots[0][0]):.1e}")
