"""Bare vertex functions of T*(partial flag) varieties by localization.

A torus fixed point is a chain of subsets V_1 c ... c V_{n-1} c {a_1..a_w};
its contribution at quasimap degree d_{i,j} is a product of brackets
{x}_d over the three kinds of line bundles W* x V_{n-1}, V_{i+1}* x V_i and
V_i* x V_i.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable, Sequence

import numpy as np

from .core import ParameterFrame, PoleError, QuiverSpec, elementary_symmetric
from .qseries import bracket, compact_bracket


@dataclass(frozen=True)
class FixedPoint:
    """Chain of index sets (0-based indices into ``frame.a``), one per level."""

    spec: QuiverSpec
    chain: tuple

    def __post_init__(self):
        chain = tuple(tuple(sorted(level)) for level in self.chain)
        object.__setattr__(self, "chain", chain)
        if len(chain) != self.spec.n - 1:
            raise ValueError("chain length must be n-1")
        for i, level in enumerate(chain):
            if len(level) != self.spec.dims[i]:
                raise ValueError(f"level {i + 1} has size {len(level)}, expected {self.spec.dims[i]}")
            if i + 1 < len(chain) and not set(level) <= set(chain[i + 1]):
                raise ValueError("chain is not nested")
        if chain and not set(chain[-1]) <= set(range(self.spec.framing)):
            raise ValueError("indices exceed framing")

    def coordinates(self, a) -> list:
        """x_{i,j}: the a-values attached to each level."""
        a = np.asarray(a, dtype=complex)
        return [a[list(level)] if level else np.zeros(0, complex) for level in self.chain]

    def label(self) -> str:
        return "|".join(",".join(str(k + 1) for k in level) for level in self.chain)


def enumerate_fixed_points(spec: QuiverSpec) -> list:
    """All torus fixed points, ordered lexicographically from the top level down."""
    out = []

    def build(level, upper, acc):
        if level < 0:
            out.append(FixedPoint(spec, tuple(reversed(acc))))
            return
        for sub in combinations(upper, spec.dims[level]):
            build(level - 1, sub, acc + [sub])

    build(spec.n - 2, tuple(range(spec.framing)), [])
    return out


# ---------------------------------------------------------------------------
# degrees


def admissible(d: Sequence[Sequence[int]]) -> bool:
    """Stability condition on a degree array d[i][j].

    For each level there must be an injection k -> phi(k) into the next
    level with d_{i,k} >= d_{i+1,phi(k)}.  With both levels sorted ascending
    this holds iff the i-th smallest entry of level i dominates the i-th
    smallest entry of level i+1.
    """
    if any(x < 0 for level in d for x in level):
        return False
    for lower, upper in zip(d, d[1:]):
        if len(lower) > len(upper):
            return False
        lo, up = sorted(lower), sorted(upper)
        if any(x < y for x, y in zip(lo, up)):
            return False
    return True


def _compositions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _arrays_with_level_totals(dims, totals):
    if not dims:
        yield ()
        return
    for head in _compositions(totals[0], dims[0]):
        for tail in _arrays_with_level_totals(dims[1:], totals[1:]):
            yield (head,) + tail


def degree_vectors(spec: QuiverSpec, cutoff: int) -> list:
    """All (d_1..d_{n-1}) with nonnegative entries and sum <= cutoff, graded-lex order."""
    m = spec.n - 1
    vecs = []

    def rec(prefix, left):
        if len(prefix) == m:
            vecs.append(tuple(prefix))
            return
        for x in range(left + 1):
            rec(prefix + [x], left - x)

    rec([], cutoff)
    # levels of dimension zero only carry degree zero
    vecs = [v for v in vecs if all(spec.dims[i] > 0 or v[i] == 0 for i in range(m))]
    vecs.sort(key=lambda v: (sum(v), tuple(-x for x in v)))
    return vecs


def enumerate_degrees(spec: QuiverSpec, cutoff: int) -> list:
    """Admissible degree arrays with total degree <= cutoff, in canonical order.

    Order: by total degree, then by the level-degree vector, then
    lexicographically (descending) on the flattened array.
    """
    if cutoff < 0:
        raise ValueError("cutoff must be nonnegative")
    out = []
    for vec in degree_vectors(spec, cutoff):
        arrays = [d for d in _arrays_with_level_totals(spec.dims, vec) if admissible(d)]
        arrays.sort(key=lambda d: tuple(-x for lvl in d for x in lvl))
        out.extend(arrays)
    return out


# ---------------------------------------------------------------------------
# insertions


@dataclass(frozen=True)
class Insertion:
    """Symmetric function tau of the level variables x_{i,j}.

    ``func`` receives a list of arrays, one per level, and returns a number.
    """

    func: Callable
    name: str = "tau"

    def __call__(self, levels) -> complex:
        return complex(self.func(levels))

    @classmethod
    def one(cls) -> "Insertion":
        return cls(lambda levels: 1.0, "1")

    @classmethod
    def exterior(cls, i: int, k: int) -> "Insertion":
        """Lambda^k V_i (level ``i`` is 1-based)."""
        return cls(lambda levels: elementary_symmetric(levels[i - 1], k), f"Lambda^{k} V_{i}")

    @classmethod
    def tautological(cls, i: int) -> "Insertion":
        return cls.exterior(i, 1)

    @classmethod
    def from_monomials(cls, terms: dict, name="monomials") -> "Insertion":
        """Finite sum of Laurent monomials.

        ``terms`` maps exponent tuples (one tuple of integer exponents per
        level) to coefficients.  Symmetry is the caller's responsibility;
        :func:`check_symmetric` tests it.
        """
        items = [(tuple(tuple(e) for e in key), complex(c)) for key, c in terms.items()]

        def f(levels):
            total = 0j
            for exps, c in items:
                t = c
                for x, e in zip(levels, exps):
                    t *= np.prod(np.asarray(x, dtype=complex) ** np.asarray(e))
                total += t
            return total

        return cls(f, name)


def check_symmetric(tau: Insertion, spec: QuiverSpec, trials=5, seed=0, rtol=1e-12) -> bool:
    """Sampled test that ``tau`` is invariant under permutations within levels."""
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        levels = [rng.normal(size=v) + 1j * rng.normal(size=v) for v in spec.dims]
        base = tau(levels)
        perm = [x[rng.permutation(len(x))] for x in levels]
        if abs(tau(perm) - base) > rtol * max(1.0, abs(base)):
            return False
    return True


# ---------------------------------------------------------------------------
# series


@dataclass
class SeriesZ:
    """Truncated power series in z_1..z_{n-1}: degree vector -> coefficient."""

    coeffs: dict
    cutoff: int
    variable: str = "z"
    terms: dict = field(default_factory=dict)

    def __getitem__(self, dvec) -> complex:
        return self.coeffs.get(tuple(dvec), 0j)

    def degrees(self) -> list:
        return list(self.coeffs)

    def __call__(self, z) -> complex:
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        total = 0j
        for dvec, c in self.coeffs.items():
            total += c * np.prod(z ** np.asarray(dvec))
        return complex(total)


def _coefficient(point, d, tau, frame, br, extra_name):
    spec = point.spec
    x = point.coordinates(frame.a)
    a = frame.a
    n1 = spec.n - 1
    dvec = [sum(level) for level in d]
    N = sum(vp * di for vp, di in zip(spec.vprime, dvec))
    val = frame.q_sqrt ** N

    def term(ratio, deg, kind, idx):
        try:
            return br(ratio, deg, frame)
        except PoleError as exc:
            raise PoleError(f"{kind} factor {idx}: {{{ratio}}}_{deg} ({extra_name}): {exc}") from None

    for i in range(n1):
        xi, di = x[i], d[i]
        for j in range(len(xi)):
            for k in range(len(xi)):
                if j == k:
                    continue
                b = term(xi[j] / xi[k], di[j] - di[k], "E", (i + 1, j + 1, k + 1))
                if b == 0:
                    raise PoleError(f"E factor {(i + 1, j + 1, k + 1)} vanishes; the inverse is a pole")
                val /= b
    for i in range(n1 - 1):
        xi, xn, di, dn = x[i], x[i + 1], d[i], d[i + 1]
        for j in range(len(xi)):
            for k in range(len(xn)):
                val *= term(xi[j] / xn[k], di[j] - dn[k], "H", (i + 1, j + 1, k + 1))
                if val == 0:
                    return 0j
    xt, dt = x[n1 - 1], d[n1 - 1]
    for j in range(len(xt)):
        for k in range(len(a)):
            val *= term(xt[j] / a[k], dt[j], "G", (j + 1, k + 1))
    q = frame.q
    shifted = [xi * q ** (-np.asarray(di, dtype=float)) for xi, di in zip(x, d)]
    return val * tau(shifted)


def vertex_coefficient(point: FixedPoint, d, tau: Insertion, frame: ParameterFrame) -> complex:
    """Contribution of a single degree array to V^{(tau)}_p."""
    return _coefficient(point, d, tau, frame, bracket, "vertex")


def compact_vertex_coefficient(point: FixedPoint, d, tau: Insertion, frame: ParameterFrame) -> complex:
    """hbar -> oo limit of a rescaled contribution (coefficient of z#^d)."""
    return _coefficient(point, d, tau, frame, compact_bracket, "compact vertex")


def _series(point, tau, frame, cutoff, coeff_fn, variable, degrees=None):
    spec = point.spec
    degrees = enumerate_degrees(spec, cutoff) if degrees is None else degrees
    coeffs = {v: 0j for v in degree_vectors(spec, cutoff)}
    terms = {}
    # fixed summation order: canonical degree order
    for d in degrees:
        c = coeff_fn(point, d, tau, frame)
        vec = tuple(sum(level) for level in d)
        coeffs[vec] += c
        terms[d] = c
    return SeriesZ(coeffs, cutoff, variable, terms)


def vertex_series(point: FixedPoint, tau: Insertion, frame: ParameterFrame, cutoff: int) -> SeriesZ:
    """Bare vertex V^{(tau)}_p(z) truncated at total degree ``cutoff``."""
    return _series(point, tau, frame, cutoff, vertex_coefficient, "z")


def compact_vertex_series(point: FixedPoint, tau: Insertion, frame: ParameterFrame, cutoff: int) -> SeriesZ:
    """Vertex of the compact flag variety, as a series in z#.

    Only ``frame.q_sqrt``, ``frame.a`` are used; hbar has been sent to
    infinity.
    """
    return _series(point, tau, frame, cutoff, compact_vertex_coefficient, "zsharp")


def eigenvalue_ratio(point: FixedPoint, tau: Insertion, frame: ParameterFrame, cutoff: int, z_eval) -> complex:
    """V^{(tau)}_p(z)/V^{(1)}_p(z) from truncated series.

    Approximates the eigenvalue of quantum multiplication by tau when q is
    close to 1 and the truncation tail is negligible at ``z_eval``.
    """
    degrees = enumerate_degrees(point.spec, cutoff)
    num = _series(point, tau, frame, cutoff, vertex_coefficient, "z", degrees)(z_eval)
    den = _series(point, Insertion.one(), frame, cutoff, vertex_coefficient, "z", degrees)(z_eval)
    if abs(den) < 1e-13:
        raise ZeroDivisionError("V^(1) evaluates to ~0")
    return num / den
