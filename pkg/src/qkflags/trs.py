"""Trigonometric Ruijsenaars-Schneider Lax matrices built from Bethe data."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .bethe import BetheSolution, baxter_Q, momenta
from .core import Poly, char_poly, elementary_symmetric_all

SEPARATION_WARN = 1e-6


@dataclass(frozen=True)
class TrsPoint:
    """Phase-space point (zeta, p) of the n-body model at coupling hbar = h^2."""

    zeta: np.ndarray
    p: np.ndarray
    h: complex

    def __post_init__(self):
        object.__setattr__(self, "zeta", np.asarray(self.zeta, dtype=complex))
        object.__setattr__(self, "p", np.asarray(self.p, dtype=complex))
        object.__setattr__(self, "h", complex(self.h))
        if self.zeta.shape != self.p.shape:
            raise ValueError("zeta and p must have equal length")

    @property
    def n(self) -> int:
        return len(self.zeta)

    def separation(self) -> float:
        """min |zeta_i - zeta_j| / max |zeta|."""
        return _separation(self.zeta)


def _separation(x) -> float:
    if len(x) < 2:
        return np.inf
    d = np.abs(x[:, None] - x[None, :])
    np.fill_diagonal(d, np.inf)
    return float(np.min(d) / np.max(np.abs(x)))


def _lax(x, p, h) -> np.ndarray:
    """L_ij = prod_{k != j}(x_i/h - h x_k) / prod_{k != i}(x_i - x_k) * p_j."""
    n = len(x)
    if n > 1 and _separation(x) == 0:
        raise ZeroDivisionError("coincident coordinates in the Lax matrix")
    num = x[:, None] / h - h * x[None, :]  # num[i, k]
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    den = np.prod(diff, axis=1)
    L = np.empty((n, n), dtype=complex)
    for j in range(n):
        mask = np.arange(n) != j
        L[:, j] = np.prod(num[:, mask], axis=1) / den * p[j]
    return L


def lax(pt: TrsPoint) -> np.ndarray:
    """tRS Lax matrix."""
    return _lax(pt.zeta, pt.p, pt.h)


def hamiltonian_terms(pt: TrsPoint, r: int) -> np.ndarray:
    """Summands of H_r, one per r-subset I, in lexicographic order of I."""
    n = pt.n
    if not 0 <= r <= n:
        raise ValueError(f"r={r} out of range")
    z, h = pt.zeta, pt.h
    terms = []
    for I in combinations(range(n), r):
        rest = [j for j in range(n) if j not in I]
        t = complex(np.prod(pt.p[list(I)])) if I else 1.0 + 0j
        for i in I:
            for j in rest:
                t *= (z[i] / h - z[j] * h) / (z[i] - z[j])
        terms.append(t)
    return np.array(terms, dtype=complex)


def hamiltonian(pt: TrsPoint, r: int) -> complex:
    """H_r = sum_{|I|=r} prod_{i in I, j not in I} (zeta_i/h - h zeta_j)/(zeta_i - zeta_j) prod_{k in I} p_k."""
    return complex(np.sum(hamiltonian_terms(pt, r)))


def hamiltonians(pt: TrsPoint) -> np.ndarray:
    return np.array([hamiltonian(pt, r) for r in range(pt.n + 1)])


def signed_charpoly_hamiltonians(pt: TrsPoint) -> np.ndarray:
    """(-1)^r times the u^{n-r} coefficient of det(u - L)."""
    c = char_poly(lax(pt)).coef
    n = pt.n
    return np.array([(-1) ** r * c[n - r] for r in range(n + 1)])


def trs_point(sol: BetheSolution) -> TrsPoint:
    return TrsPoint(sol.frame.zeta(), momenta(sol), sol.frame.h)


@dataclass
class SpectrumReport:
    """Residuals of the spectral identity det(u - L) = P(u).

    ``charpoly_vs_P`` is the max coefficient difference, ``hamiltonian_vs_e``
    lists |H_r - e_r(alpha)| for r = 1..n and ``charpoly_vs_minors`` compares
    the characteristic polynomial with the minor-sum Hamiltonians.
    """

    charpoly_vs_P: float
    hamiltonian_vs_e: list
    charpoly_vs_minors: float
    separation: float
    warnings: list = field(default_factory=list)

    @property
    def max_residual(self) -> float:
        return max([self.charpoly_vs_P, self.charpoly_vs_minors] + list(self.hamiltonian_vs_e))

    def to_json(self) -> dict:
        return {
            "charpoly_vs_P": self.charpoly_vs_P,
            "hamiltonian_vs_e": list(self.hamiltonian_vs_e),
            "charpoly_vs_minors": self.charpoly_vs_minors,
            "separation": self.separation,
            "max_residual": self.max_residual,
            "warnings": list(self.warnings),
        }


def _spectrum_report(pt: TrsPoint, target_roots) -> SpectrumReport:
    n = pt.n
    notes = []
    sep = pt.separation()
    if sep < SEPARATION_WARN:
        notes.append(f"zeta nearly coincide (relative separation {sep:.3g}); bounds not guaranteed")
        warnings.warn(notes[-1], RuntimeWarning, stacklevel=3)
    P = Poly.from_roots(target_roots)
    cp = char_poly(lax(pt))
    H = hamiltonians(pt)
    e = elementary_symmetric_all(target_roots)
    signed = np.array([(-1) ** r * cp.coef[n - r] for r in range(n + 1)])
    return SpectrumReport(
        charpoly_vs_P=cp.max_coef_diff(P),
        hamiltonian_vs_e=[float(abs(H[r] - e[r])) for r in range(1, n + 1)],
        charpoly_vs_minors=float(np.max(np.abs(signed - H))),
        separation=sep,
        warnings=notes,
    )


def verify_spectrum(sol: BetheSolution) -> SpectrumReport:
    """Check that the tRS Lax matrix at a Bethe solution has spectrum alpha."""
    if not sol.spec.is_complete_flag:
        raise ValueError("the tRS construction needs a complete flag")
    return _spectrum_report(trs_point(sol), sol.frame.alpha(sol.spec.n))


def verify_point(pt: TrsPoint, alpha) -> SpectrumReport:
    """Same report for an arbitrary phase-space point and target spectrum."""
    return _spectrum_report(pt, np.asarray(alpha, dtype=complex))


# ---------------------------------------------------------------------------
# bispectral dual


def dual_momenta(sol: BetheSolution) -> np.ndarray:
    """p^!_j = hbar^{(n-1)/2} zeta_n Q^{(1)}_{n-1}(alpha_j) / Q^{(-1)}_{n-1}(alpha_j).

    Q_{n-1} is the sigma-frame Baxter polynomial.  The prefactor
    hbar^{(n-1)/2} is the one for which Tr L^! = sum zeta holds at Bethe
    solutions; with hbar^{n-1} the identity fails already for n = 2.
    """
    n = sol.spec.n
    fr = sol.frame
    alpha = fr.alpha(n)
    zeta = fr.zeta()
    Q = baxter_Q(sol)[n - 1]
    num = Q.shift(1, fr.h)(alpha)
    den = Q.shift(-1, fr.h)(alpha)
    if np.any(den == 0):
        raise ZeroDivisionError("Q^{(-1)}_{n-1} vanishes at an equivariant parameter")
    return fr.h ** (n - 1) * zeta[-1] * num / den


def dual_lax(sol: BetheSolution):
    """(L^!, p^!): the dual Lax matrix in the alphas with hbar -> 1/hbar."""
    pd = dual_momenta(sol)
    alpha = sol.frame.alpha(sol.spec.n)
    return _lax(alpha, pd, 1.0 / sol.frame.h), pd


@dataclass
class DualReport:
    trace_residual: float
    trace: complex
    zeta_sum: complex

    def to_json(self) -> dict:
        return {
            "trace_residual": self.trace_residual,
            "trace": [self.trace.real, self.trace.imag],
            "zeta_sum": [self.zeta_sum.real, self.zeta_sum.imag],
        }


def verify_dual(sol: BetheSolution) -> DualReport:
    """|Tr L^! - sum zeta_i| at a Bethe solution."""
    L, _ = dual_lax(sol)
    tr = complex(np.trace(L))
    zs = complex(np.sum(sol.frame.zeta()))
    return DualReport(abs(tr - zs), tr, zs)
