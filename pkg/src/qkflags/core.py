"""Quiver data, parameter frames, dense polynomials and small linear algebra.

Every other module builds on the objects defined here.  Parameters are kept
in a single :class:`ParameterFrame`; the various coordinate systems used for
Bethe roots, tRS and q-Toda variables are computed from it on demand.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Sequence

import numpy as np


class QKError(Exception):
    """Base class for errors raised by this package."""


class PoleError(QKError, ArithmeticError):
    """A denominator factor vanished (non-generic parameters)."""


class ContinuationError(QKError):
    """Path tracking broke down.  ``last_z`` holds the last good twist."""

    def __init__(self, msg, last_z=None, last_t=None):
        super().__init__(msg)
        self.last_z = last_z
        self.last_t = last_t


class CollisionError(QKError):
    """Two Bethe roots on the same level merged."""


class SingularSystemError(QKError, np.linalg.LinAlgError):
    """A linear system needed by a construction is rank deficient."""


# ---------------------------------------------------------------------------
# quiver data


@dataclass(frozen=True)
class QuiverSpec:
    """A_{n-1} quiver with dimension vector ``dims`` and framing at the last node.

    ``dims`` holds v_1..v_{n-1} and ``framing`` is w_{n-1}.
    """

    n: int
    dims: tuple
    framing: int

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(v) for v in self.dims))
        if self.n < 2:
            raise ValueError("need n >= 2")
        if len(self.dims) != self.n - 1:
            raise ValueError(f"expected {self.n - 1} dimensions, got {len(self.dims)}")
        chain = (0,) + self.dims + (self.framing,)
        if any(v < 0 for v in chain) or any(b < a for a, b in zip(chain, chain[1:])):
            raise ValueError(f"dimensions must satisfy 0 <= v_1 <= ... <= w, got {chain[1:]}")
        if self.framing < 1:
            raise ValueError("framing must be positive")

    @classmethod
    def complete_flag(cls, n: int) -> "QuiverSpec":
        return cls(n, tuple(range(1, n)), n)

    @classmethod
    def grassmannian(cls, k: int, w: int) -> "QuiverSpec":
        """T*Gr(k, w): a single gauge node."""
        return cls(2, (k,), w)

    @cached_property
    def extended(self) -> tuple:
        """(v_0, v_1, ..., v_{n-1}, v_n) with v_0 = 0 and v_n = w."""
        return (0,) + self.dims + (self.framing,)

    def v(self, i: int) -> int:
        return self.extended[i]

    @cached_property
    def vprime(self) -> tuple:
        """v'_i = v_{i+1} - v_{i-1} for i = 1..n-1."""
        e = self.extended
        return tuple(e[i + 1] - e[i - 1] for i in range(1, self.n))

    @cached_property
    def delta(self) -> tuple:
        """delta_i = v_{i-1} + v_i + v_{i+1} - 1."""
        e = self.extended
        return tuple(e[i - 1] + e[i] + e[i + 1] - 1 for i in range(1, self.n))

    @cached_property
    def Delta(self) -> tuple:
        """Delta_i = v_{i+1} + v_{i-1} - 2 v_i."""
        e = self.extended
        return tuple(e[i + 1] + e[i - 1] - 2 * e[i] for i in range(1, self.n))

    @property
    def is_complete_flag(self) -> bool:
        return self.dims == tuple(range(1, self.n)) and self.framing == self.n

    @property
    def num_roots(self) -> int:
        return sum(self.dims)

    def to_json(self) -> dict:
        return {"n": self.n, "dims": list(self.dims), "framing": self.framing}


# ---------------------------------------------------------------------------
# parameters


def _as_complex_array(x) -> np.ndarray:
    return np.atleast_1d(np.asarray(x, dtype=complex))


@dataclass(frozen=True)
class ParameterFrame:
    """Scalar parameters of the model.

    The square roots ``q_sqrt`` = q^{1/2} and ``h`` = hbar^{1/2} are the stored
    quantities; q and hbar are derived from them so that half-integer powers
    are never ambiguous.  ``a`` are the equivariant parameters a_1..a_w and
    ``z`` the Kähler (twist) parameters z_1..z_{n-1}.
    """

    q_sqrt: complex
    h: complex
    a: np.ndarray
    z: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))

    def __post_init__(self):
        object.__setattr__(self, "q_sqrt", complex(self.q_sqrt))
        object.__setattr__(self, "h", complex(self.h))
        object.__setattr__(self, "a", _as_complex_array(self.a))
        object.__setattr__(self, "z", _as_complex_array(self.z) if np.size(self.z) else np.zeros(0, complex))
        if self.h == 0 or self.q_sqrt == 0:
            raise ValueError("q and hbar must be nonzero")
        if self.hbar == 1:
            raise ValueError("hbar = 1 is degenerate")
        if self.q == 1:
            raise ValueError("q = 1 is degenerate")
        a = self.a
        if len(a) > 1 and np.min(np.abs(a[:, None] - a[None, :]) + np.eye(len(a))) == 0:
            raise ValueError("equivariant parameters must be pairwise distinct")

    @classmethod
    def from_q(cls, q, hbar, a, z=()) -> "ParameterFrame":
        """Build a frame from q and hbar using principal square roots."""
        return cls(np.sqrt(complex(q)), np.sqrt(complex(hbar)), a, z)

    @property
    def q(self) -> complex:
        return self.q_sqrt ** 2

    @property
    def hbar(self) -> complex:
        return self.h ** 2

    def replace(self, **kw) -> "ParameterFrame":
        d = dict(q_sqrt=self.q_sqrt, h=self.h, a=self.a, z=self.z)
        d.update(kw)
        return ParameterFrame(**d)

    # -- Kähler frames -----------------------------------------------------

    def zsharp(self, spec: QuiverSpec) -> np.ndarray:
        """z#_i = z_i (-hbar^{1/2})^{v'_i}."""
        return self.z * (-self.h) ** np.array(spec.vprime)

    @classmethod
    def from_zsharp(cls, spec: QuiverSpec, q_sqrt, h, a, zsharp) -> "ParameterFrame":
        zsharp = _as_complex_array(zsharp)
        return cls(q_sqrt, h, a, zsharp * (-complex(h)) ** (-np.array(spec.vprime)))

    def zeta(self) -> np.ndarray:
        """zeta_1..zeta_n with z_i = zeta_i/zeta_{i+1}, gauge zeta_n = 1."""
        return zeta_from_ratios(self.z)

    def alpha(self, n: int) -> np.ndarray:
        """alpha_k = hbar^{n/2} a_k."""
        return self.h ** n * self.a

    def sigma(self, roots: Sequence[np.ndarray]) -> list:
        """sigma_{i,k} = hbar^{i/2} s_{i,k}; ``roots[i-1]`` holds level i."""
        return [self.h ** (i + 1) * np.asarray(r, dtype=complex) for i, r in enumerate(roots)]

    def roots_from_sigma(self, sigma: Sequence[np.ndarray]) -> list:
        return [np.asarray(s, dtype=complex) / self.h ** (i + 1) for i, s in enumerate(sigma)]

    def toda_z(self) -> np.ndarray:
        """Toda coordinates frak-z_i = hbar^{-i} zeta_i."""
        zeta = self.zeta()
        i = np.arange(1, len(zeta) + 1)
        return zeta * self.hbar ** (-i)


def zeta_from_ratios(ratios) -> np.ndarray:
    """Lift ratios r_i = zeta_i/zeta_{i+1} to zeta with zeta_n = 1."""
    ratios = _as_complex_array(ratios) if np.size(ratios) else np.zeros(0, complex)
    out = np.ones(len(ratios) + 1, dtype=complex)
    for i in range(len(ratios) - 1, -1, -1):
        out[i] = ratios[i] * out[i + 1]
    return out


def ratios_from_zeta(zeta) -> np.ndarray:
    zeta = _as_complex_array(zeta)
    return zeta[:-1] / zeta[1:]


FRAME_TARGETS = ("raw-z", "sharp-z", "zeta", "sigma-alpha", "toda")


@dataclass(frozen=True)
class FrameView:
    target: str
    values: dict


def frame_convert(frame: ParameterFrame, spec: QuiverSpec, target: str) -> FrameView:
    """Express the frame's parameters in one of the named coordinate systems.

    ``sigma-alpha`` returns the rescaled equivariant parameters; Bethe roots
    are converted with :meth:`ParameterFrame.sigma`.
    """
    if target == "raw-z":
        vals = {"z": frame.z.copy(), "a": frame.a.copy()}
    elif target == "sharp-z":
        vals = {"zsharp": frame.zsharp(spec), "a": frame.a.copy()}
    elif target == "zeta":
        vals = {"zeta": frame.zeta(), "a": frame.a.copy()}
    elif target == "sigma-alpha":
        vals = {"zeta": frame.zeta(), "alpha": frame.alpha(spec.n)}
    elif target == "toda":
        vals = {"toda_z": frame.toda_z(), "toda_a": frame.a.copy()}
    else:
        raise ValueError(f"unknown frame target {target!r}; expected one of {FRAME_TARGETS}")
    return FrameView(target, vals)


# ---------------------------------------------------------------------------
# polynomials


class Poly:
    """Dense univariate polynomial with complex coefficients, lowest degree first."""

    __slots__ = ("coef",)

    def __init__(self, coef):
        c = np.atleast_1d(np.asarray(coef, dtype=complex)).copy()
        if c.size == 0:
            c = np.zeros(1, dtype=complex)
        self.coef = c

    @classmethod
    def from_roots(cls, roots) -> "Poly":
        """Monic polynomial prod (u - r)."""
        c = np.ones(1, dtype=complex)
        for r in np.atleast_1d(np.asarray(roots, dtype=complex)):
            c = np.convolve(c, [-r, 1.0])
        return cls(c)

    @classmethod
    def one(cls) -> "Poly":
        return cls([1.0])

    @classmethod
    def x(cls) -> "Poly":
        return cls([0.0, 1.0])

    @property
    def degree(self) -> int:
        nz = np.nonzero(self.coef)[0]
        return int(nz[-1]) if nz.size else 0

    def trim(self, tol=0.0) -> "Poly":
        c = self.coef
        scale = np.max(np.abs(c)) if c.size else 0.0
        k = len(c)
        while k > 1 and abs(c[k - 1]) <= tol * scale:
            k -= 1
        return Poly(c[:k])

    def padded(self, length: int) -> np.ndarray:
        out = np.zeros(max(length, len(self.coef)), dtype=complex)
        out[: len(self.coef)] = self.coef
        return out

    def leading(self) -> complex:
        return self.coef[self.degree]

    def monic(self) -> "Poly":
        lead = self.leading()
        if lead == 0:
            raise ZeroDivisionError("zero polynomial has no monic form")
        return Poly(self.coef[: self.degree + 1] / lead)

    def shift(self, m: int, h: complex) -> "Poly":
        """u -> p(h^{-m} u)."""
        k = np.arange(len(self.coef))
        return Poly(self.coef * complex(h) ** (-m * k))

    def __call__(self, u):
        # Horner
        u = np.asarray(u, dtype=complex)
        out = np.zeros_like(u)
        for c in self.coef[::-1]:
            out = out * u + c
        return out[()] if out.ndim == 0 else out

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self.coef), len(other.coef))
        return Poly(self.padded(n) + other.padded(n))

    __radd__ = __add__

    def __neg__(self):
        return Poly(-self.coef)

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        if isinstance(other, Poly):
            return Poly(np.convolve(self.coef, other.coef))
        return Poly(self.coef * complex(other))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return Poly(self.coef / complex(scalar))

    def __pow__(self, k: int):
        out = Poly.one()
        for _ in range(k):
            out = out * self
        return out

    def roots(self) -> np.ndarray:
        p = self.trim()
        return np.polynomial.polynomial.polyroots(p.coef) if p.degree > 0 else np.zeros(0, complex)

    def max_coef_diff(self, other) -> float:
        other = _as_poly(other)
        n = max(len(self.coef), len(other.coef))
        return float(np.max(np.abs(self.padded(n) - other.padded(n))))

    def __repr__(self):
        return f"Poly({np.array2string(self.coef, precision=6)})"


def _as_poly(x) -> Poly:
    return x if isinstance(x, Poly) else Poly([x])


def poly_shift(p: Poly, m: int, frame: ParameterFrame) -> Poly:
    """Shifted polynomial p^{(m)}(u) = p(hbar^{-m/2} u)."""
    return p.shift(m, frame.h)


# ---------------------------------------------------------------------------
# symmetric functions and characteristic polynomials


def elementary_symmetric(values, r: int) -> complex:
    """e_r(values), with e_0 = 1."""
    values = np.atleast_1d(np.asarray(values, dtype=complex))
    if not 0 <= r <= len(values):
        raise ValueError(f"r={r} out of range for {len(values)} values")
    return complex(elementary_symmetric_all(values)[r])


def elementary_symmetric_all(values) -> np.ndarray:
    """All of e_0..e_m as an array (coefficients of prod (1 + x t))."""
    values = np.atleast_1d(np.asarray(values, dtype=complex))
    e = np.zeros(len(values) + 1, dtype=complex)
    e[0] = 1.0
    for k, x in enumerate(values, start=1):
        e[1 : k + 1] = e[1 : k + 1] + x * e[0:k]
    return e


DIRECT_CHARPOLY_MAX = 6


def char_poly(m) -> Poly:
    """det(u - m) as a monic Poly.

    Up to size 6 the coefficients are sums of principal minors; larger
    matrices use the Faddeev-LeVerrier trace recursion.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("char_poly needs a square matrix")
    n = m.shape[0]
    c = np.zeros(n + 1, dtype=complex)
    c[n] = 1.0
    if n <= DIRECT_CHARPOLY_MAX:
        for r in range(1, n + 1):
            s = 0j
            for idx in combinations(range(n), r):
                s += np.linalg.det(m[np.ix_(idx, idx)])
            c[n - r] = (-1) ** r * s
    else:
        a = np.eye(n, dtype=complex)
        for k in range(1, n + 1):
            mk = m @ a
            ck = -np.trace(mk) / k
            c[n - k] = ck
            a = mk + ck * np.eye(n)
    return Poly(c)


def det_poly_matrix(entries) -> Poly:
    """Determinant of a square matrix of Poly entries by Laplace expansion.

    Expansion runs along rows with memoisation on the set of used columns,
    so the cost is O(n 2^n) polynomial products.
    """
    n = len(entries)
    memo = {}

    def minor(row, cols):
        if row == n:
            return Poly.one()
        key = (row, cols)
        if key in memo:
            return memo[key]
        acc = Poly([0.0])
        for c in range(n):
            if cols & (1 << c):
                continue
            # sign from the number of free columns to the left of c
            left = bin(~cols & ((1 << c) - 1)).count("1")
            sign = -1 if left % 2 else 1
            acc = acc + sign * (entries[row][c] * minor(row + 1, cols | (1 << c)))
        memo[key] = acc
        return acc

    return minor(0, 0)
