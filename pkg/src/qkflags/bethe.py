"""Bethe equations of the gl(n) XXZ chain and their five-vertex limit.

Each Bethe equation is cleared of denominators, giving a polynomial of the
form ``U_e(x) + kappa_i * W_e(x)`` where ``U_e`` and ``W_e`` are products of
linear forms in the unknown roots and ``kappa_i`` is the twist of the level
the equation belongs to.  Solutions are obtained by parameter continuation
in the twist, starting from kappa = 0 where the roots are the coordinates of
a torus fixed point.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .core import (
    CollisionError,
    ContinuationError,
    ParameterFrame,
    Poly,
    QuiverSpec,
    SingularSystemError,
)
from .vertex import FixedPoint, enumerate_fixed_points

log = logging.getLogger(__name__)

CONVENTIONS = ("raw", "sigma", "compact")


# ---------------------------------------------------------------------------
# products of linear forms


class _Term:
    """coef * prod_m (sum_k c_{m,k} x_{i_{m,k}} + c0_m).

    Factors are stored as arrays: ``idx`` (m, 2) with -1 for an absent
    variable, ``cf`` (m, 2) and ``const`` (m,).
    """

    __slots__ = ("coef", "idx", "cf", "const")

    def __init__(self, coef, factors):
        self.coef = complex(coef)
        m = len(factors)
        self.idx = np.full((m, 2), -1, dtype=int)
        self.cf = np.zeros((m, 2), dtype=complex)
        self.const = np.zeros(m, dtype=complex)
        for r, f in enumerate(factors):
            lin, c0 = f
            for slot, (i, c) in enumerate(lin):
                self.idx[r, slot] = i
                self.cf[r, slot] = c
            self.const[r] = c0

    def factor_values(self, x):
        xe = np.append(x, 0.0)  # index -1 reads the trailing zero
        return (self.cf * xe[self.idx]).sum(axis=1) + self.const

    def value(self, x):
        return self.coef * np.prod(self.factor_values(x))

    def value_grad(self, x, nvar):
        f = self.factor_values(x)
        m = len(f)
        grad = np.zeros(nvar, dtype=complex)
        if m == 0:
            return self.coef, grad
        pre = np.ones(m + 1, dtype=complex)
        suf = np.ones(m + 1, dtype=complex)
        for k in range(m):
            pre[k + 1] = pre[k] * f[k]
            suf[m - 1 - k] = suf[m - k] * f[m - 1 - k]
        for k in range(m):
            others = pre[k] * suf[k + 1]
            for slot in range(2):
                i = self.idx[k, slot]
                if i >= 0:
                    grad[i] += self.cf[k, slot] * others
        return self.coef * pre[m], self.coef * grad


def _lin(*pairs, const=0.0):
    """Linear form sum c x_i + const; ``pairs`` are (index, coefficient)."""
    return ([(i, c) for i, c in pairs], const)


class FactorSystem:
    """Square polynomial system F_e(x) = U_e(x) + kappa[level_e] * W_e(x)."""

    def __init__(self, nvar, untwisted, twisted, levels):
        self.nvar = nvar
        self.untwisted = untwisted  # list (per equation) of lists of _Term
        self.twisted = twisted
        self.levels = np.asarray(levels, dtype=int)

    def _parts(self, x, grad):
        ne = len(self.untwisted)
        U = np.zeros(ne, dtype=complex)
        W = np.zeros(ne, dtype=complex)
        JU = np.zeros((ne, self.nvar), dtype=complex) if grad else None
        JW = np.zeros((ne, self.nvar), dtype=complex) if grad else None
        for e in range(ne):
            for terms, V, J in ((self.untwisted[e], U, JU), (self.twisted[e], W, JW)):
                for t in terms:
                    if grad:
                        v, g = t.value_grad(x, self.nvar)
                        V[e] += v
                        J[e] += g
                    else:
                        V[e] += t.value(x)
        return U, W, JU, JW

    def residual(self, x, kappa):
        U, W, _, _ = self._parts(np.asarray(x, dtype=complex), False)
        return U + np.asarray(kappa)[self.levels] * W

    def jacobian(self, x, kappa):
        _, _, JU, JW = self._parts(np.asarray(x, dtype=complex), True)
        return JU + np.asarray(kappa)[self.levels][:, None] * JW

    def residual_and_jacobian(self, x, kappa):
        U, W, JU, JW = self._parts(np.asarray(x, dtype=complex), True)
        k = np.asarray(kappa)[self.levels]
        return U + k * W, JU + k[:, None] * JW, W

    def term_scale(self, x, kappa):
        """Sum of |term| per equation, the natural scale for the residual."""
        x = np.asarray(x, dtype=complex)
        k = np.asarray(kappa)[self.levels]
        out = np.zeros(len(self.untwisted))
        for e in range(len(out)):
            out[e] = sum(abs(t.value(x)) for t in self.untwisted[e])
            out[e] += abs(k[e]) * sum(abs(t.value(x)) for t in self.twisted[e])
        return out

    def implied_twist(self, x):
        """kappa making each equation hold at ``x`` (one value per equation)."""
        U, W, _, _ = self._parts(np.asarray(x, dtype=complex), False)
        return -U / W


# ---------------------------------------------------------------------------
# problems


class _Layout:
    def __init__(self, dims):
        self.dims = tuple(dims)
        self.offsets = np.concatenate([[0], np.cumsum(self.dims)]).astype(int)

    def index(self, i, k):
        """Flat index of root k (0-based) on level i (1-based)."""
        return int(self.offsets[i - 1] + k)

    def split(self, x):
        return [np.array(x[self.offsets[i] : self.offsets[i + 1]], dtype=complex) for i in range(len(self.dims))]

    def flatten(self, levels):
        return np.concatenate([np.asarray(l, dtype=complex) for l in levels]) if levels else np.zeros(0, complex)


@dataclass
class BetheProblem:
    """Bethe equations for ``spec`` at the parameters of ``frame``.

    ``convention`` selects the system:

    * ``"raw"``: roots s_{i,k}, twists z_i (-hbar^{1/2})^{-v'_i};
    * ``"sigma"``: roots sigma_{i,k} = hbar^{i/2} s_{i,k}, twists zeta_i/zeta_{i+1};
    * ``"compact"``: the hbar -> oo limit in roots s_{i,k} and twists z#_i.
    """

    spec: QuiverSpec
    frame: ParameterFrame
    convention: str = "raw"
    system: FactorSystem = field(init=False, repr=False)

    def __post_init__(self):
        if self.convention not in CONVENTIONS:
            raise ValueError(f"convention must be one of {CONVENTIONS}")
        if len(self.frame.z) != self.spec.n - 1:
            raise ValueError(f"need {self.spec.n - 1} twist parameters, got {len(self.frame.z)}")
        if len(self.frame.a) != self.spec.framing:
            raise ValueError(f"need {self.spec.framing} equivariant parameters, got {len(self.frame.a)}")
        self.layout = _Layout(self.spec.dims)
        build = {"raw": _build_raw, "sigma": _build_sigma, "compact": _build_compact}[self.convention]
        self.system = build(self.spec, self.frame, self.layout)

    @property
    def kappa(self) -> np.ndarray:
        """Twist multiplying the W-part of each level's equations."""
        return self.frame.z * self._kappa_factor(np.arange(self.spec.n - 1))

    def _kappa_factor(self, levels) -> np.ndarray:
        """kappa_i / z_i for each entry of ``levels`` (0-based)."""
        mh = -self.frame.h
        vp = self.spec.vprime
        if self.convention == "raw":
            return np.array([mh ** (-vp[i]) for i in levels], dtype=complex)
        if self.convention == "sigma":
            return np.ones(len(levels), dtype=complex)  # zeta_i / zeta_{i+1} = z_i
        return np.array([mh ** vp[i] for i in levels], dtype=complex)

    def twist_from_kappa(self, kappa, levels=None) -> np.ndarray:
        """Map kappa values (per level, or per equation given ``levels``) back to z."""
        kappa = np.asarray(kappa, dtype=complex)
        levels = np.arange(self.spec.n - 1) if levels is None else levels
        return kappa / self._kappa_factor(levels)

    def unknowns(self, roots) -> np.ndarray:
        """Flatten raw roots s_{i,k} into this convention's unknowns."""
        if self.convention == "sigma":
            roots = self.frame.sigma(roots)
        return self.layout.flatten(roots)

    def roots(self, x) -> list:
        levels = self.layout.split(x)
        if self.convention == "sigma":
            levels = self.frame.roots_from_sigma(levels)
        return levels


def _build_raw(spec, frame, lay):
    hb = frame.hbar
    a = frame.a
    ext = spec.extended
    U, W, levels = [], [], []
    for i in range(1, spec.n):
        for k in range(ext[i]):
            s = lay.index(i, k)
            lhs_num, lhs_den, rhs_num, rhs_den = [], [], [], []
            for j in range(ext[i + 1]):
                if i + 1 < spec.n:
                    t = lay.index(i + 1, j)
                    lhs_num.append(_lin((s, 1), (t, -1)))
                    lhs_den.append(_lin((s, 1), (t, -hb)))
                else:
                    lhs_num.append(_lin((s, 1), const=-a[j]))
                    lhs_den.append(_lin((s, 1), const=-hb * a[j]))
            for j in range(ext[i - 1]):
                t = lay.index(i - 1, j)
                lhs_num.append(_lin((t, 1), (s, -hb)))
                lhs_den.append(_lin((t, 1), (s, -1)))
            for j in range(ext[i]):
                if j == k:
                    continue
                t = lay.index(i, j)
                rhs_num.append(_lin((t, 1), (s, -hb)))
                rhs_den.append(_lin((t, hb), (s, -1)))
            U.append([_Term(1.0, lhs_num + rhs_den)])
            W.append([_Term(-1.0, rhs_num + lhs_den)])
            levels.append(i - 1)
    return FactorSystem(spec.num_roots, U, W, levels)


def _build_sigma(spec, frame, lay):
    h, hb = frame.h, frame.hbar
    alpha = frame.alpha(spec.n)
    ext = spec.extended
    U, W, levels = [], [], []
    for i in range(1, spec.n):
        sign = (-1) ** spec.delta[i - 1]
        for k in range(ext[i]):
            s = lay.index(i, k)
            num, den = [], []
            for b in range(ext[i - 1]):
                t = lay.index(i - 1, b)
                num.append(_lin((s, 1), (t, -h)))
                den.append(_lin((t, 1), (s, -h)))
            for b in range(ext[i]):
                if b == k:
                    continue
                t = lay.index(i, b)
                num.append(_lin((s, hb), (t, -1)))
                den.append(_lin((t, hb), (s, -1)))
            for b in range(ext[i + 1]):
                if i + 1 < spec.n:
                    t = lay.index(i + 1, b)
                    num.append(_lin((s, 1), (t, -h)))
                    den.append(_lin((t, 1), (s, -h)))
                else:
                    num.append(_lin((s, 1), const=-h * alpha[b]))
                    den.append(_lin((s, -h), const=alpha[b]))
            U.append([_Term(-sign, den)])
            W.append([_Term(1.0, num)])
            levels.append(i - 1)
    return FactorSystem(spec.num_roots, U, W, levels)


def _build_compact(spec, frame, lay):
    a = frame.a
    ext = spec.extended
    U, W, levels = [], [], []
    for i in range(1, spec.n):
        for k in range(ext[i]):
            s = lay.index(i, k)
            lhs_num, lhs_den, rhs_num, rhs_den = [], [], [], []
            for j in range(ext[i + 1]):
                if i + 1 < spec.n:
                    t = lay.index(i + 1, j)
                    lhs_num.append(_lin((s, 1), (t, -1)))
                    lhs_den.append(_lin((t, 1)))
                else:
                    lhs_num.append(_lin((s, 1), const=-a[j]))
                    lhs_den.append(_lin(const=a[j]))
            for j in range(ext[i - 1]):
                t = lay.index(i - 1, j)
                lhs_num.append(_lin((s, 1)))
                lhs_den.append(_lin((t, 1), (s, -1)))
            for j in range(ext[i]):
                if j == k:
                    continue
                t = lay.index(i, j)
                rhs_num.append(_lin((s, -1)))
                rhs_den.append(_lin((t, 1)))
            U.append([_Term(1.0, lhs_num + rhs_den)])
            W.append([_Term(-1.0, rhs_num + lhs_den)])
            levels.append(i - 1)
    return FactorSystem(spec.num_roots, U, W, levels)


def relative_residual(problem: BetheProblem, roots) -> float:
    """Scale-free residual: max_e |F_e| / (|U_e| + |kappa W_e|)."""
    return _residual_norms(problem.system, problem.unknowns(roots), problem.kappa)[1]


def residual(problem: BetheProblem, roots) -> np.ndarray:
    """Pole-cleared Bethe residuals, one per root (i, k); ``roots`` are raw s."""
    return problem.system.residual(problem.unknowns(roots), problem.kappa)


def jacobian(problem: BetheProblem, roots) -> np.ndarray:
    """Analytic Jacobian of :func:`residual` with respect to the unknowns."""
    return problem.system.jacobian(problem.unknowns(roots), problem.kappa)


def implied_twist(problem: BetheProblem, roots) -> np.ndarray:
    """The z_i (in the frame's raw-z normalisation) that each equation needs at ``roots``."""
    kap = problem.system.implied_twist(problem.unknowns(roots))
    return problem.twist_from_kappa(kap, problem.system.levels)


# ---------------------------------------------------------------------------
# solutions


@dataclass
class BetheSolution:
    """Roots s_{i,k} (raw frame), one array per level.

    ``residual_norm`` is the largest residual of a pole-cleared equation
    divided by the sum of the moduli of its two terms, a scale-free
    backward error; ``residual_abs`` is the unscaled maximum.
    """

    roots: list
    origin: FixedPoint | None
    residual_norm: float
    frame: ParameterFrame
    spec: QuiverSpec
    convention: str = "raw"
    steps: int = 0
    residual_abs: float = 0.0

    def sigma(self) -> list:
        return self.frame.sigma(self.roots)

    def flat(self) -> np.ndarray:
        return np.concatenate(self.roots) if self.roots else np.zeros(0, complex)


@dataclass
class TrackerOptions:
    """Step control for the predictor-corrector path tracker."""

    dt_initial: float = 1e-3
    dt_max: float = 0.05
    dt_min: float = 1e-9
    grow: float = 1.6
    newton_iters: int = 6
    corrector_tol: float = 1e-10
    newton_tol: float = 1e-13
    detour: float = 0.35
    collision_tol: float = 1e-10


def _phi(t, g):
    return t * np.exp(1j * g * t * (1.0 - t))


def _dphi(t, g):
    return np.exp(1j * g * t * (1.0 - t)) * (1.0 + 1j * g * t * (1.0 - 2.0 * t))


def _newton(system, x, kappa, iters, tol):
    """Plain Newton; returns (x, converged, n_iter, first_contraction)."""
    prev = None
    ratio = 0.0
    for it in range(iters):
        F, J = system.residual_and_jacobian(x, kappa)[:2]
        try:
            dx = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            return x, False, it, np.inf
        x = x + dx
        nd = np.linalg.norm(dx)
        if prev is not None and it == 1:
            ratio = nd / max(prev, 1e-300)
        prev = nd
        if nd <= tol * (1.0 + np.linalg.norm(x)):
            return x, True, it + 1, ratio
    return x, False, iters, ratio


def track(system: FactorSystem, x0, kappa_target, opts: TrackerOptions | None = None):
    """Follow a root of ``system`` from kappa = 0 (at ``x0``) to ``kappa_target``.

    The twist moves along kappa(t) = kappa_target * t * exp(i g t (1 - t)),
    a straight ray bent by a fixed detour angle so that real discriminant
    points are avoided.  Returns ``(x, steps)``.
    """
    opts = opts or TrackerOptions()
    kt = np.asarray(kappa_target, dtype=complex)
    g = opts.detour
    x = np.asarray(x0, dtype=complex).copy()
    t, dt, steps = 0.0, opts.dt_initial, 0
    while t < 1.0:
        t1 = min(1.0, t + dt)
        F, J, W = system.residual_and_jacobian(x, kt * _phi(t, g))
        dFdt = (kt[system.levels] * W) * _dphi(t, g)
        try:
            v = np.linalg.solve(J, -dFdt)
        except np.linalg.LinAlgError:
            raise ContinuationError("singular Jacobian on the path", kt * _phi(t, g), t) from None
        pred = x + (t1 - t) * v
        xc, ok, its, ratio = _newton(system, pred, kt * _phi(t1, g), opts.newton_iters, opts.corrector_tol)
        scale = 1.0 + np.linalg.norm(x)
        jump = np.linalg.norm(xc - pred) > 0.05 * scale
        if ok and ratio < 0.5 and not jump:
            x, t = xc, t1
            steps += 1
            if its <= 3:
                dt = min(opts.dt_max, dt * opts.grow)
        else:
            dt *= 0.5
            if dt < opts.dt_min:
                raise ContinuationError(f"step size underflow at t={t:.6g}", kt * _phi(t, g), t)
    # polish at the target
    x, ok, _, _ = _newton(system, x, kt, 12, opts.newton_tol)
    return x, steps


def _check_collisions(levels, tol):
    for i, r in enumerate(levels):
        if len(r) < 2:
            continue
        d = np.abs(r[:, None] - r[None, :])
        np.fill_diagonal(d, np.inf)
        scale = max(1.0, float(np.max(np.abs(r))))
        if np.min(d) < tol * scale:
            raise CollisionError(f"roots on level {i + 1} collided (distance {np.min(d):.3g})")


def solve_from_fixed_point(problem: BetheProblem, point: FixedPoint, opts: TrackerOptions | None = None) -> BetheSolution:
    """Track the solution that starts at ``point`` when the twists vanish."""
    opts = opts or TrackerOptions()
    start = point.coordinates(problem.frame.a)
    x0 = problem.unknowns(start)
    kappa = problem.kappa
    if np.all(kappa == 0):
        x, steps = x0, 0
    else:
        x, steps = track(problem.system, x0, kappa, opts)
    roots = problem.roots(x)
    _check_collisions(roots, opts.collision_tol)
    res_abs, res_rel = _residual_norms(problem.system, x, kappa)
    # at zero twist the start point is exact; only roundoff in the sigma
    # rescaling remains, which the relative measure cannot see as small
    if res_rel > ACCEPT_RESIDUAL and steps:
        raise ContinuationError(f"polished residual {res_rel:.3g} from {point.label()} is too large", kappa, 1.0)
    return BetheSolution(
        roots=roots,
        origin=point,
        residual_norm=res_rel,
        frame=problem.frame,
        spec=problem.spec,
        convention="compact" if problem.convention == "compact" else "raw",
        steps=steps,
        residual_abs=res_abs,
    )


ACCEPT_RESIDUAL = 1e-8


def _residual_norms(system, x, kappa):
    """(max |F_e|, max |F_e| / sum of |terms| of F_e)."""
    res = system.residual(x, kappa)
    if not res.size:
        return 0.0, 0.0
    scale = system.term_scale(x, kappa)
    return float(np.max(np.abs(res))), float(np.max(np.abs(res) / np.maximum(scale, 1e-300)))


def _min_separation(sols):
    flats = [s.flat() for s in sols]
    best = np.inf
    for i in range(len(flats)):
        for j in range(i):
            best = min(best, np.linalg.norm(flats[i] - flats[j]))
    return best


def solve_all(problem: BetheProblem, opts: TrackerOptions | None = None, retries: int = 3) -> list:
    """One solution per torus fixed point, in fixed-point enumeration order.

    If two tracks land on the same solution (path jumping) the whole set is
    retracked with a smaller maximal step and a different detour angle.
    """
    opts = opts or TrackerOptions()
    points = enumerate_fixed_points(problem.spec)
    for attempt in range(retries + 1):
        sols = [solve_from_fixed_point(problem, p, opts) for p in points]
        if len(sols) < 2 or _min_separation(sols) > 1e-8:
            return sols
        log.warning("tracks merged (attempt %d); retracking with smaller steps", attempt)
        opts = TrackerOptions(**{**opts.__dict__, "dt_max": opts.dt_max / 2, "detour": -opts.detour * 1.3})
    raise CollisionError("distinct fixed points produced coincident solutions")


def solve_compact(spec: QuiverSpec, a, zsharp, q_sqrt=0.5, h=2.0, opts=None) -> list:
    """Convenience: all five-vertex solutions at twists ``zsharp``.

    ``q_sqrt`` and ``h`` only fill the frame; the compact equations do not
    depend on them.
    """
    frame = ParameterFrame.from_zsharp(spec, q_sqrt, h, a, zsharp)
    return solve_all(BetheProblem(spec, frame, "compact"), opts)


# ---------------------------------------------------------------------------
# Baxter data


def baxter_Q(sol: BetheSolution) -> list:
    """[Q_0 = 1, Q_1, ..., Q_{n-1}, Q_n = P] with Q_i(u) = prod (u - sigma_{i,k}).

    For a five-vertex (compact) solution the polynomials use the raw roots
    and Q_n = M(u) = prod (u - a_k).
    """
    if sol.convention == "compact":
        levels = sol.roots
        top = sol.frame.a
    else:
        levels = sol.sigma()
        top = sol.frame.alpha(sol.spec.n)
    return [Poly.one()] + [Poly.from_roots(r) for r in levels] + [Poly.from_roots(top)]


def momenta(sol: BetheSolution) -> np.ndarray:
    """p_j = -Q_j(0)/Q_{j-1}(0), j = 1..n."""
    Q = baxter_Q(sol)
    vals = np.array([complex(P(0.0)) for P in Q])
    if np.any(vals[:-1] == 0):
        raise ZeroDivisionError("a Bethe root is zero; momenta undefined")
    return -vals[1:] / vals[:-1]
