"""Five-vertex Bethe equations and the q-Toda chain.

Coordinates of the Toda chain are frak-z_i (positions) and frak-p_i
(momenta); for complete flags the five-vertex twists are the ratios
z#_i = frak-z_i / frak-z_{i+1}.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .bethe import BetheProblem, BetheSolution, momenta, residual
from .core import Poly, QuiverSpec, elementary_symmetric_all, ratios_from_zeta, zeta_from_ratios
from .trs import TrsPoint, hamiltonian


def five_vertex_residual(problem: BetheProblem, roots) -> np.ndarray:
    """Pole-cleared residuals of the compact Bethe equations in the z# frame."""
    if problem.convention != "compact":
        raise ValueError("five_vertex_residual needs a compact BetheProblem")
    return residual(problem, roots)


def baxter_form_twist(spec: QuiverSpec, a, roots) -> np.ndarray:
    """z#_i implied at each root by the Baxter form of the compact equations.

    At u = s_{i,k}:
        Q_{i+1}(u)/Q_{i-1}(u) * prod s_i / prod s_{i+1}
            = z#_i (-1)^{v_{i-1}+v_i-1} u^{v_i - v_{i-1}},
    with Q_0 = 1 and Q_n = M.
    """
    a = np.asarray(a, dtype=complex)
    levels = [np.asarray(r, dtype=complex) for r in roots]
    Q = [Poly.one()] + [Poly.from_roots(r) for r in levels] + [Poly.from_roots(a)]
    prods = [1.0 + 0j] + [complex(np.prod(r)) for r in levels] + [complex(np.prod(a))]
    v = spec.extended
    out = []
    for i in range(1, spec.n):
        for s in levels[i - 1]:
            lhs = Q[i + 1](s) / Q[i - 1](s) * prods[i] / prods[i + 1]
            out.append(lhs / ((-1) ** (v[i - 1] + v[i] - 1) * s ** (v[i] - v[i - 1])))
    return np.array(out, dtype=complex)


def baxter_form_residual(spec: QuiverSpec, a, zsharp, roots) -> np.ndarray:
    """Pole-cleared Baxter form: Q_{i+1} prod s_i - z# (-1)^{..} u^{..} Q_{i-1} prod s_{i+1}."""
    a = np.asarray(a, dtype=complex)
    zsharp = np.asarray(zsharp, dtype=complex)
    levels = [np.asarray(r, dtype=complex) for r in roots]
    Q = [Poly.one()] + [Poly.from_roots(r) for r in levels] + [Poly.from_roots(a)]
    prods = [1.0 + 0j] + [complex(np.prod(r)) for r in levels] + [complex(np.prod(a))]
    v = spec.extended
    out = []
    for i in range(1, spec.n):
        sign = (-1) ** (v[i - 1] + v[i] - 1)
        for s in levels[i - 1]:
            out.append(
                Q[i + 1](s) * prods[i] - zsharp[i - 1] * sign * s ** (v[i] - v[i - 1]) * Q[i - 1](s) * prods[i + 1]
            )
    return np.array(out, dtype=complex)


# ---------------------------------------------------------------------------
# q-Toda chain


@dataclass(frozen=True)
class TodaPoint:
    tz: np.ndarray
    tp: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "tz", np.asarray(self.tz, dtype=complex))
        object.__setattr__(self, "tp", np.asarray(self.tp, dtype=complex))
        if self.tz.shape != self.tp.shape:
            raise ValueError("tz and tp must have equal length")
        if np.any(self.tz == 0):
            raise ZeroDivisionError("Toda positions must be nonzero")

    @property
    def n(self) -> int:
        return len(self.tz)

    def ratios(self) -> np.ndarray:
        """frak-z_i / frak-z_{i+1}, i = 1..n-1."""
        return self.tz[:-1] / self.tz[1:]


def toda_lax(pt: TodaPoint, u: complex) -> np.ndarray:
    """Tridiagonal A(u): A_{i+1,i} = 1, A_{ii} = u - p_i, A_{i,i+1} = -u (z_i/z_{i+1}) p_{i+1}."""
    n = pt.n
    A = np.zeros((n, n), dtype=complex)
    r = pt.ratios()
    for i in range(n):
        A[i, i] = u - pt.tp[i]
        if i + 1 < n:
            A[i + 1, i] = 1.0
            A[i, i + 1] = -u * r[i] * pt.tp[i + 1]
    return A


def toda_det(pt: TodaPoint) -> Poly:
    """det A(u) via D_k = (u - p_k) D_{k-1} + u (z_{k-1}/z_k) p_k D_{k-2}."""
    r = pt.ratios()
    prev, cur = Poly.one(), Poly([-pt.tp[0], 1.0])
    for k in range(1, pt.n):
        nxt = Poly([-pt.tp[k], 1.0]) * cur + Poly([0.0, r[k - 1] * pt.tp[k]]) * prev
        prev, cur = cur, nxt
    return cur


def toda_hamiltonian(pt: TodaPoint, r: int) -> complex:
    """H_r = sum_{i_1<..<i_r} prod_l (1 - z_{i_l - 1}/z_{i_l})^{[gap > 1]} prod p_{i_l}.

    The gap factor of i_1 = 1 is 1 (i_0 = 0 and only first neighbours couple).
    """
    n = pt.n
    if not 0 <= r <= n:
        raise ValueError(f"r={r} out of range")
    total = 0j
    for I in combinations(range(1, n + 1), r):
        t = 1.0 + 0j
        prev = 0
        for i in I:
            if i - prev > 1:
                t *= 1.0 - pt.tz[i - 2] / pt.tz[i - 1]
            t *= pt.tp[i - 1]
            prev = i
        total += t
    return complex(total)


def toda_hamiltonians(pt: TodaPoint) -> np.ndarray:
    return np.array([toda_hamiltonian(pt, r) for r in range(pt.n + 1)])


def toda_point(sol: BetheSolution) -> TodaPoint:
    """Toda coordinates of a five-vertex solution: ratios z# and momenta -Q_i(0)/Q_{i-1}(0)."""
    if sol.convention != "compact":
        raise ValueError("toda_point needs a five-vertex solution")
    if not sol.spec.is_complete_flag:
        raise ValueError("the q-Toda chain needs a complete flag")
    return TodaPoint(zeta_from_ratios(sol.frame.zsharp(sol.spec)), momenta(sol))


@dataclass
class TodaReport:
    hamiltonian_vs_e: list
    det_vs_M: float

    @property
    def max_residual(self) -> float:
        return max([self.det_vs_M] + list(self.hamiltonian_vs_e))

    def to_json(self) -> dict:
        return {
            "hamiltonian_vs_e": list(self.hamiltonian_vs_e),
            "det_vs_M": self.det_vs_M,
            "max_residual": self.max_residual,
        }


def verify_toda(sol: BetheSolution) -> TodaReport:
    """|H_r - e_r(a)| and the det A(u) - M(u) coefficient residual."""
    pt = toda_point(sol)
    a = sol.frame.a
    e = elementary_symmetric_all(a)
    H = toda_hamiltonians(pt)
    return TodaReport(
        hamiltonian_vs_e=[float(abs(H[r] - e[r])) for r in range(1, pt.n + 1)],
        det_vs_M=toda_det(pt).max_coef_diff(Poly.from_roots(a)),
    )


# ---------------------------------------------------------------------------
# hbar -> oo limit of tRS


def rescaled_trs_point(pt: TodaPoint, h: complex) -> TrsPoint:
    """tRS point with zeta_i = hbar^i z_i and p_i = hbar^{i-1/2} p_i (hbar = h^2)."""
    i = np.arange(1, pt.n + 1)
    h = complex(h)
    return TrsPoint(pt.tz * h ** (2 * i), pt.tp * h ** (2 * i - 1), h)


EXACT_FLOOR = 1e-12


@dataclass
class LimitReport:
    """Differences |H_r^{tRS}(rescaled) - H_r^{qToda}| per r along the hbar ladder.

    A difference at or below ``EXACT_FLOOR`` counts as converged: for
    r = n the two sides agree identically and only roundoff remains, so
    literal strict decrease is not meaningful there.
    """

    hbars: list
    differences: dict  # r -> list over hbar

    def strictly_decreasing(self, r: int) -> bool:
        d = self.differences[r]
        if all(x <= EXACT_FLOOR for x in d):
            return True
        return all(y < x for x, y in zip(d, d[1:]))

    @property
    def all_decreasing(self) -> bool:
        return all(self.strictly_decreasing(r) for r in self.differences)

    def to_json(self) -> dict:
        return {
            "hbars": [[complex(x).real, complex(x).imag] for x in self.hbars],
            "differences": {str(r): v for r, v in self.differences.items()},
            "strictly_decreasing": {str(r): self.strictly_decreasing(r) for r in self.differences},
            "exact_floor": EXACT_FLOOR,
        }


def limit_check(pt: TodaPoint, hbars=(1e2, 1e3, 1e4)) -> LimitReport:
    """|hbar^{-rn/2} H_r^{tRS}(rescaled) - H_r^{qToda}| along growing hbar."""
    n = pt.n
    Ht = toda_hamiltonians(pt)
    diffs = {r: [] for r in range(1, n + 1)}
    for hb in hbars:
        h = np.sqrt(complex(hb))
        tp = rescaled_trs_point(pt, h)
        for r in range(1, n + 1):
            val = hamiltonian(tp, r) * h ** (-r * n)
            diffs[r].append(float(abs(val - Ht[r])))
    return LimitReport(list(hbars), diffs)


def toda_twists(pt: TodaPoint) -> np.ndarray:
    """z#_i implied by the Toda positions."""
    return ratios_from_zeta(pt.tz)
