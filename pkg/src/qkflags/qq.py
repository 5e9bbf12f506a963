"""QQ-relations, auxiliary Q-polynomials and their determinant solutions."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bethe import BetheSolution, baxter_Q, momenta
from .core import ParameterFrame, Poly, QuiverSpec, SingularSystemError, det_poly_matrix, zeta_from_ratios

RANK_RTOL = 1e-12


def zeta_tilde(spec: QuiverSpec, zeta, h) -> np.ndarray:
    """zeta~_i = zeta_i hbar^{-sum_{j<i} Delta_j / 2}; equals zeta for complete flags."""
    zeta = np.asarray(zeta, dtype=complex)
    D = np.concatenate([[0], np.cumsum(spec.Delta)])  # D[i-1] = sum_{j<i} Delta_j
    return zeta * complex(h) ** (-D[: len(zeta)].astype(float))


@dataclass
class QQSystem:
    """Baxter polynomials Q_0..Q_n, auxiliary Q~_1..Q~_{n-1} and the twists used."""

    Q: list
    Qtilde: list
    zeta: np.ndarray
    frame: ParameterFrame
    spec: QuiverSpec

    @property
    def n(self) -> int:
        return len(self.Q) - 1

    def aux_degree(self, i: int) -> int:
        v = self.spec.extended
        return v[i - 1] - v[i] + v[i + 1]


def _qq_parts(Q, i, zeta, h):
    """(A, B, C) with residual = zeta_{i+1} A(Qt^{(-1)}) - zeta_i B(Qt^{(1)}) - C."""
    Qi = Q[i]
    up, dn = Qi.shift(1, h), Qi.shift(-1, h)
    C = (zeta[i] - zeta[i - 1]) * (Q[i - 1] * Q[i + 1])
    return up, dn, C


def qq_residual(sys: QQSystem, i: int) -> Poly:
    """zeta_{i+1} Q_i^{(1)} Q~_i^{(-1)} - zeta_i Q_i^{(-1)} Q~_i^{(1)} - (zeta_{i+1} - zeta_i) Q_{i-1} Q_{i+1}."""
    if not 1 <= i <= sys.n - 1:
        raise ValueError(f"level {i} out of range 1..{sys.n - 1}")
    h = sys.frame.h
    up, dn, C = _qq_parts(sys.Q, i, sys.zeta, h)
    Qt = sys.Qtilde[i - 1]
    return sys.zeta[i] * (up * Qt.shift(-1, h)) - sys.zeta[i - 1] * (dn * Qt.shift(1, h)) - C


def aux_leading(spec: QuiverSpec, zeta, h, i: int) -> complex:
    """Leading coefficient forced on Q~_i by the top-degree terms of the relation.

    It equals 1 whenever Delta_i = 0, in particular for complete flags.
    """
    D = spec.Delta[i - 1]
    if D == 0:
        return 1.0 + 0j
    h = complex(h)
    den = zeta[i] * h ** D - zeta[i - 1] * h ** (-D)
    if den == 0:
        raise SingularSystemError(f"leading coefficient of Q~_{i} is undetermined")
    return (zeta[i] - zeta[i - 1]) / den


def _solve_one(Q, i, zeta, h, deg, lead):
    up, dn, C = _qq_parts(Q, i, zeta, h)
    # residual is affine in the coefficients of Q~ = lead u^deg + sum_{k<deg} c_k u^k;
    # u^k shifted by -1 is h^k u^k
    cols = []
    for k in range(deg + 1):
        mono = Poly(np.eye(deg + 1)[k])
        cols.append(zeta[i] * (up * mono.shift(-1, h)) - zeta[i - 1] * (dn * mono.shift(1, h)))
    length = max(len(c.coef) for c in cols + [C])
    A = np.column_stack([c.padded(length) for c in cols[:deg]]) if deg else np.zeros((length, 0), complex)
    b = C.padded(length) - lead * cols[deg].padded(length)
    if deg:
        sv = np.linalg.svd(A, compute_uv=False)
        if sv[-1] <= RANK_RTOL * sv[0]:
            raise SingularSystemError(f"auxiliary system at level {i} is rank deficient")
        c, *_ = np.linalg.lstsq(A, b, rcond=None)
    else:
        c = np.zeros(0, complex)
    res = float(np.max(np.abs(A @ c - b))) if length else 0.0
    return Poly(np.append(c, lead)), res


def solve_aux_Q(Q, zeta, h, spec: QuiverSpec | None = None, return_residuals=False):
    """Auxiliary Q~_1..Q~_{n-1} solving the QQ-relations in the least-squares sense.

    The relation is linear in the coefficients of Q~_i, so each level is an
    overdetermined linear system in the coefficient basis.  The leading
    coefficient is fixed by :func:`aux_leading` (Q~_i is monic for complete
    flags).  A large least-squares residual means ``Q`` did not come from a
    Bethe solution.
    """
    n = len(Q) - 1
    if spec is None:
        spec = QuiverSpec.complete_flag(n)
    zeta = np.asarray(zeta, dtype=complex)
    v = spec.extended
    out, res = [], []
    for i in range(1, n):
        deg = v[i - 1] - v[i] + v[i + 1]
        if deg < 0:
            raise ValueError(f"negative auxiliary degree at level {i}")
        p, r = _solve_one(Q, i, zeta, h, deg, aux_leading(spec, zeta, h, i))
        out.append(p)
        res.append(r)
    return (out, res) if return_residuals else out


def qq_zeta(sol: BetheSolution) -> np.ndarray:
    """zeta~ entering the QQ-relations of a Bethe solution.

    The relations are written for the symmetric (sigma) form of the Bethe
    equations, whose twist differs from the raw z_i by (-1)^{v_{i-1}+v_{i+1}};
    the sign is trivial for complete flags.
    """
    spec, fr = sol.spec, sol.frame
    v = spec.extended
    sign = np.array([(-1) ** (v[i - 1] + v[i + 1]) for i in range(1, spec.n)])
    return zeta_tilde(spec, zeta_from_ratios(fr.z * sign), fr.h)


def qq_system(sol: BetheSolution) -> QQSystem:
    """QQ data (sigma-frame Baxter polynomials) of a Bethe solution."""
    if sol.convention != "raw":
        raise ValueError("QQ-relations are stated for XXZ solutions")
    fr = sol.frame
    zt = qq_zeta(sol)
    Q = baxter_Q(sol)
    Qt = solve_aux_Q(Q, zt, fr.h, sol.spec)
    return QQSystem(Q, Qt, zt, fr, sol.spec)


# ---------------------------------------------------------------------------
# determinant solution (complete flags)


def _index_set(index_set, n=None):
    idx = [int(i) for i in index_set]
    if len(set(idx)) != len(idx) or any(i < 1 for i in idx) or (n is not None and any(i > n for i in idx)):
        raise ValueError(f"bad index set {index_set}")
    return idx


def _vandermonde(zeta, idx):
    j = len(idx)
    zs = np.asarray(zeta, dtype=complex)[[i - 1 for i in idx]]
    V = zs[:, None] ** np.arange(j)[None, :]
    det = complex(np.prod([zs[b] - zs[a] for a in range(j) for b in range(a + 1, j)]))
    scale = max(1.0, float(np.max(np.abs(zs)))) ** (j * (j - 1) / 2)
    if abs(det) <= 1e-14 * scale:
        raise SingularSystemError("Vandermonde matrix is singular (coincident zeta)")
    return V, det


def q_matrix(p, zeta, h, index_set) -> list:
    """Polynomial matrix M_{ab} = zeta_{i_a}^{b-1} q_{i_a}^{(j+1-2b)}(u), q_i = u - p_i."""
    idx = _index_set(index_set, len(p))
    j = len(idx)
    p = np.asarray(p, dtype=complex)
    zeta = np.asarray(zeta, dtype=complex)
    rows = []
    for i in idx:
        qi = Poly([-p[i - 1], 1.0])
        rows.append([zeta[i - 1] ** (b - 1) * qi.shift(j + 1 - 2 * b, h) for b in range(1, j + 1)])
    return rows


def q_matrix_at(p, zeta, h, index_set, u) -> np.ndarray:
    """Numerical value of :func:`q_matrix` at ``u``."""
    return np.array([[complex(e(u)) for e in row] for row in q_matrix(p, zeta, h, index_set)])


def q_determinant(p, zeta, h, index_set) -> Poly:
    """det M_I / det V_I, a monic polynomial of degree |I|."""
    idx = _index_set(index_set, len(p))
    _, vdet = _vandermonde(zeta, idx)
    return det_poly_matrix(q_matrix(p, zeta, h, idx)) / vdet


def aux_index_set(j: int) -> list:
    """{1..j-1, j+1}, the index set producing Q~_j."""
    return list(range(1, j)) + [j + 1]


@dataclass
class QQReport:
    qq_residuals: list  # per level, max |coefficient|
    aux_lstsq: list
    Q_vs_det: list  # per j = 1..n
    Qtilde_vs_det: list  # per j = 1..n-1

    @property
    def max_residual(self) -> float:
        vals = self.qq_residuals + self.Q_vs_det + self.Qtilde_vs_det
        return max(vals) if vals else 0.0

    def to_json(self) -> dict:
        return {
            "qq_residuals": self.qq_residuals,
            "aux_lstsq": self.aux_lstsq,
            "Q_vs_det": self.Q_vs_det,
            "Qtilde_vs_det": self.Qtilde_vs_det,
            "max_residual": self.max_residual,
        }


def verify_qq(sol: BetheSolution) -> QQReport:
    """QQ residuals and determinant reconstruction of Q_j and Q~_j."""
    if not sol.spec.is_complete_flag:
        raise ValueError("the determinant solution is only available for complete flags")
    fr = sol.frame
    n = sol.spec.n
    zeta = fr.zeta()
    Q = baxter_Q(sol)
    Qt, lsq = solve_aux_Q(Q, zeta, fr.h, sol.spec, return_residuals=True)
    sys = QQSystem(Q, Qt, zeta, fr, sol.spec)
    p = momenta(sol)
    return QQReport(
        qq_residuals=[float(np.max(np.abs(qq_residual(sys, i).coef))) for i in range(1, n)],
        aux_lstsq=lsq,
        Q_vs_det=[q_determinant(p, zeta, fr.h, range(1, j + 1)).max_coef_diff(Q[j]) for j in range(1, n + 1)],
        Qtilde_vs_det=[q_determinant(p, zeta, fr.h, aux_index_set(j)).max_coef_diff(Qt[j - 1]) for j in range(1, n)],
    )


# ---------------------------------------------------------------------------
# Desnanot-Jacobi


def _delete(m, rows, cols):
    r = [i for i in range(m.shape[0]) if i not in rows]
    c = [j for j in range(m.shape[1]) if j not in cols]
    return m[np.ix_(r, c)]


def _det(m):
    return complex(np.linalg.det(m)) if m.size else 1.0 + 0j


def desnanot_jacobi_residual(m) -> complex:
    """det M^1_{k-1} det M^k_k - det M^1_k det M^k_{k-1} - det M^{1,k}_{k-1,k} det M.

    M^a_b is M without row a and column b (1-based) and k = dim - 1.  The
    residual vanishes identically; this is the condensation identity for
    rows {1, k} and columns {k-1, k}.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 3:
        raise ValueError("need a square matrix of size >= 3")
    k = m.shape[0] - 1
    r1, rk, ck1, ck = 0, k - 1, k - 2, k - 1  # 0-based
    return (
        _det(_delete(m, [r1], [ck1])) * _det(_delete(m, [rk], [ck]))
        - _det(_delete(m, [r1], [ck])) * _det(_delete(m, [rk], [ck1]))
        - _det(_delete(m, [r1, rk], [ck1, ck])) * _det(m)
    )
