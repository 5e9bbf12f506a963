"""Acceptance checks at desk scale.

Each ``check_*`` function returns a :class:`CheckResult`.  They are shared by
the ``self-test`` CLI subcommand and the test suite.
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

import numpy as np

from . import bethe, qq, toda, trs, vertex
from .core import ParameterFrame, QuiverSpec


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float
    tol: float
    seconds: float = 0.0
    detail: dict = field(default_factory=dict)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.name}: {self.value:.3e} (tol {self.tol:.1e}, {self.seconds:.2f} s)"

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "value": self.value,
            "tol": self.tol,
            "seconds": self.seconds,
            "detail": self.detail,
        }


def _timed(fn):
    def wrapper(*args, **kw):
        t0 = time.perf_counter()
        res = fn(*args, **kw)
        res.seconds = time.perf_counter() - t0
        return res

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _cnormal(rng, size, scale=1.0):
    return scale * (rng.normal(size=size) + 1j * rng.normal(size=size))


def _hbar(rng):
    # modulus in [0.5, 2], away from 1, random phase
    r = rng.uniform(1.3, 2.0) ** rng.choice([-1, 1])
    return r * np.exp(1j * rng.uniform(-np.pi, np.pi))


LAX_COND_MAX = 1e5


def well_conditioned_trs_point(rng, n, cond_max=LAX_COND_MAX):
    """Random TrsPoint whose Lax matrix has 2-norm condition number <= cond_max.

    Rounding L to double precision already perturbs its minors by about
    eps * cond(L) relative, so draws beyond ``cond_max`` cannot certify an
    identity at 1e-10 and are redrawn.
    """
    while True:
        pt = trs.TrsPoint(_cnormal(rng, n), _cnormal(rng, n), np.sqrt(_hbar(rng)))
        if pt.separation() > 0 and np.linalg.cond(trs.lax(pt)) <= cond_max:
            return pt


def random_frame(rng, spec: QuiverSpec, q=0.3 + 0.1j) -> ParameterFrame:
    return ParameterFrame.from_q(q, _hbar(rng), _cnormal(rng, spec.framing), _cnormal(rng, spec.n - 1, 0.5))


# ---------------------------------------------------------------------------


@_timed
def check_charpoly_identity(seed=0, draws=1000, tol=1e-10) -> CheckResult:
    """char_poly(L) coefficients versus signed minor-sum Hamiltonians.

    Draws are restricted to well-conditioned Lax matrices, see
    :func:`well_conditioned_trs_point`.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for k in range(draws):
        n = 2 + k % 5
        pt = well_conditioned_trs_point(rng, n)
        S = trs.signed_charpoly_hamiltonians(pt)
        H = trs.hamiltonians(pt)
        worst = max(worst, float(np.max(np.abs(S - H)[1:] / np.abs(H[1:]))))
    return CheckResult("1 char-poly vs minor-sum Hamiltonians", worst < tol, worst, tol, detail={"draws": draws})


def complete_flag_solutions(seed=0, ns=(2, 3, 4), draws=3, opts=None):
    """[(n, frame, solutions)] for random generic parameters."""
    rng = np.random.default_rng(seed)
    out = []
    for n in ns:
        spec = QuiverSpec.complete_flag(n)
        for _ in range(draws):
            fr = random_frame(rng, spec)
            out.append((n, fr, bethe.solve_all(bethe.BetheProblem(spec, fr), opts)))
    return out


@_timed
def check_trs_spectrum(solsets, tol=1e-8) -> CheckResult:
    """H_r = e_r(alpha) and det(u - L) = P(u) at every complete-flag solution."""
    worst, count, expected = 0.0, 0, 0
    for n, _, sols in solsets:
        expected += int(np.prod(range(1, n + 1)))
        for s in sols:
            r = trs.verify_spectrum(s)
            worst = max(worst, r.charpoly_vs_P, *r.hamiltonian_vs_e)
            count += 1
    ok = worst < tol and count == expected
    return CheckResult("2 XXZ/tRS spectral identity", ok, worst, tol, detail={"solutions": count, "expected": expected})


@_timed
def check_dual(solsets, tol=1e-8) -> CheckResult:
    worst = 0.0
    for _, _, sols in solsets:
        for s in sols:
            worst = max(worst, trs.verify_dual(s).trace_residual)
    return CheckResult("3 dual tRS trace", worst < tol, worst, tol)


@_timed
def check_qq(solsets, tol_qq=1e-9, tol_det=1e-8) -> CheckResult:
    wqq, wdet = 0.0, 0.0
    for _, _, sols in solsets:
        for s in sols:
            r = qq.verify_qq(s)
            wqq = max(wqq, *r.qq_residuals)
            wdet = max(wdet, *r.Q_vs_det)
    ok = wqq < tol_qq and wdet < tol_det
    return CheckResult(
        "4 QQ-relations and determinant Q_j",
        ok,
        max(wqq / tol_qq, wdet / tol_det) * tol_det,
        tol_det,
        detail={"qq_residual": wqq, "det_vs_Q": wdet},
    )


@_timed
def check_desnanot_jacobi(seed=0, draws=1000, tol=1e-10) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for k in range(draws):
        d = 3 + k % 5
        m = _cnormal(rng, (d, d))
        worst = max(worst, abs(qq.desnanot_jacobi_residual(m)) / abs(np.linalg.det(m)))
    return CheckResult("5 Desnanot-Jacobi identity", worst < tol, worst, tol)


@_timed
def check_toda(seed=0, ns=(2, 3), draws=2, tol=1e-8) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst, count = 0.0, 0
    for n in ns:
        spec = QuiverSpec.complete_flag(n)
        for _ in range(draws):
            sols = bethe.solve_compact(spec, _cnormal(rng, n), _cnormal(rng, n - 1, 0.5))
            for s in sols:
                worst = max(worst, toda.verify_toda(s).max_residual)
                count += 1
    return CheckResult("6 q-Toda Lax and Hamiltonians", worst < tol, worst, tol, detail={"solutions": count})


@_timed
def check_limit(seed=0, ns=(2, 3, 4), draws=3, hbars=(1e2, 1e3, 1e4), tol_exact=1e-10) -> CheckResult:
    rng = np.random.default_rng(seed)
    ok, worst_exact, worst_ratio = True, 0.0, 0.0
    for n in ns:
        for _ in range(draws):
            pt = toda.TodaPoint(_cnormal(rng, n), _cnormal(rng, n))
            rep = toda.limit_check(pt, hbars)
            for r in range(1, n):
                d = rep.differences[r]
                ok &= all(y < x for x, y in zip(d, d[1:]))
                worst_ratio = max(worst_ratio, max(y / x for x, y in zip(d, d[1:])))
            worst_exact = max(worst_exact, max(rep.differences[n]))
    ok &= worst_exact < tol_exact
    return CheckResult(
        "7 tRS -> q-Toda limit",
        ok,
        worst_exact,
        tol_exact,
        detail={"largest_successive_ratio": worst_ratio},
    )


# ---------------------------------------------------------------------------
# vertex oracle: brute force over all nonnegative arrays with mpmath


def brute_force_vertex(spec: QuiverSpec, point, frame: ParameterFrame, cutoff: int, tau_levels=None) -> dict:
    """Degree vector -> coefficient, summing over every nonnegative array.

    Brackets come from infinite q-products phi(x) = prod (1 - q^i x) via
    mpmath, so |q| < 1 is required.  Arrays violating the stability
    condition are not filtered: their terms vanish through the factor
    phi(q^{d+1}) with d + 1 <= 0 inside {1}_d.
    """
    import mpmath as mp

    q = mp.mpc(frame.q)
    hb = mp.mpc(frame.hbar)
    qs, h = mp.mpc(frame.q_sqrt), mp.mpc(frame.h)

    def phi(x):
        return mp.qp(x, q)

    def br(x, d):
        x = mp.mpc(x)
        return phi(hb / x) * phi(q ** (d + 1) / x) / (phi(q ** d * hb / x) * phi(q / x)) * (-qs / h) ** d

    x = point.coordinates(frame.a)
    sizes = list(spec.dims)
    out = {}
    ranges = [range(cutoff + 1)] * sum(sizes)
    for flat in itertools.product(*ranges):
        if sum(flat) > cutoff:
            continue
        d, pos = [], 0
        for s in sizes:
            d.append(flat[pos : pos + s])
            pos += s
        val = qs ** sum(vp * sum(di) for vp, di in zip(spec.vprime, d))
        for i in range(spec.n - 1):
            for j in range(sizes[i]):
                for k in range(sizes[i]):
                    if j != k:
                        val /= br(x[i][j] / x[i][k], d[i][j] - d[i][k])
        for i in range(spec.n - 2):
            for j in range(sizes[i]):
                for k in range(sizes[i + 1]):
                    val *= br(x[i][j] / x[i + 1][k], d[i][j] - d[i + 1][k])
        for j in range(sizes[-1]):
            for k in range(spec.framing):
                val *= br(x[-1][j] / frame.a[k], d[-1][j])
        if tau_levels is not None:
            shifted = [[xi[j] * q ** (-d[i][j]) for j in range(len(xi))] for i, xi in enumerate(x)]
            val *= tau_levels(shifted)
        vec = tuple(sum(di) for di in d)
        out[vec] = out.get(vec, 0) + complex(val)
    return out


VERTEX_CASES = ((QuiverSpec.grassmannian(1, 2), 4), (QuiverSpec.grassmannian(1, 3), 4), (QuiverSpec.complete_flag(3), 2))


def _vertex_frame(spec, q=0.4 + 0.2j, hbar=1.7 - 0.6j, h=None):
    a = np.array([1.0, 2.3 + 0.5j, -0.7 + 1.1j, 0.4 - 1.9j])[: spec.framing]
    if h is not None:
        return ParameterFrame(np.sqrt(complex(q)), h, a, np.zeros(spec.n - 1))
    return ParameterFrame.from_q(q, hbar, a, np.zeros(spec.n - 1))


@_timed
def check_vertex_oracle(tol=1e-12) -> CheckResult:
    worst = 0.0
    for spec, D in VERTEX_CASES:
        fr = _vertex_frame(spec)
        for p in vertex.enumerate_fixed_points(spec):
            for tau, levels_fn in (
                (vertex.Insertion.one(), None),
                (vertex.Insertion.tautological(1), lambda lv: sum(lv[0])),
            ):
                ser = vertex.vertex_series(p, tau, fr, D)
                ref = brute_force_vertex(spec, p, fr, D, levels_fn)
                for dv, c in ref.items():
                    worst = max(worst, abs(ser[dv] - c) / max(1.0, abs(c)))
    return CheckResult("8 vertex coefficients vs brute force", worst < tol, worst, tol)


@_timed
def check_compact_limit(hbar=1e10, tol=1e-5) -> CheckResult:
    worst = 0.0
    for spec, D in VERTEX_CASES:
        fr = _vertex_frame(spec, hbar=hbar)
        vp = np.array(spec.vprime)
        for p in vertex.enumerate_fixed_points(spec):
            for tau in (vertex.Insertion.one(), vertex.Insertion.tautological(1)):
                V = vertex.vertex_series(p, tau, fr, D)
                C = vertex.compact_vertex_series(p, tau, fr, D)
                for dv in C.degrees():
                    resc = V[dv] / np.prod((-fr.h) ** (vp * np.array(dv)))
                    worst = max(worst, abs(resc - C[dv]) / max(1.0, abs(C[dv])))
    return CheckResult("9 compact vertex vs large-hbar vertex", worst < tol, worst, tol)


@_timed
def check_eigenvalue(tol=1e-2, q=1 - 1e-3, zabs=1e-2, cutoff=6) -> CheckResult:
    """Soft check; parameters chosen so the degree-6 tail is small."""
    spec = QuiverSpec.grassmannian(1, 2)
    worst = 0.0
    for a, hb, phase in (((1.0, 2.0), 1.1 + 0.1j, 1.0), ((1.0, -1.0), 1.1 + 0.1j, 1j), ((1.0, 3.0), 0.9 + 0.1j, -1.0)):
        z = zabs * phase
        fr = ParameterFrame.from_q(q, hb, a, [z])
        sols = bethe.solve_all(bethe.BetheProblem(spec, fr))
        for p, s in zip(vertex.enumerate_fixed_points(spec), sols):
            r = vertex.eigenvalue_ratio(p, vertex.Insertion.tautological(1), fr, cutoff, z)
            worst = max(worst, abs(r - s.roots[0][0]))
    return CheckResult("10 eigenvalue asymptotics (soft)", worst < tol, worst, tol)


def _fd_jacobian(problem, x, step=1e-6):
    sysm, kap = problem.system, problem.kappa
    J = np.zeros((len(x), len(x)), dtype=complex)
    for k in range(len(x)):
        e = np.zeros(len(x))
        e[k] = step
        J[:, k] = (sysm.residual(x + e, kap) - sysm.residual(x - e, kap)) / (2 * step)
    return J


@_timed
def check_solver(seed=0, tol_fd=1e-5, tol_res=1e-12, solsets=None) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst_fd = 0.0
    specs = [QuiverSpec.complete_flag(3), QuiverSpec.complete_flag(4), QuiverSpec(3, (1, 3), 4), QuiverSpec.grassmannian(2, 4)]
    for spec in specs:
        fr = random_frame(rng, spec)
        for conv in bethe.CONVENTIONS:
            pb = bethe.BetheProblem(spec, fr, conv)
            for _ in range(3):
                x = _cnormal(rng, spec.num_roots)
                J = pb.system.jacobian(x, pb.kappa)
                Jfd = _fd_jacobian(pb, x)
                worst_fd = max(worst_fd, float(np.linalg.norm(J - Jfd) / np.linalg.norm(J)))
    worst_res = 0.0
    if solsets is None:
        solsets = complete_flag_solutions(seed, ns=(2, 3), draws=1)
    for _, _, sols in solsets:
        worst_res = max(worst_res, *(s.residual_norm for s in sols))
    for spec in specs[2:]:
        for s in bethe.solve_all(bethe.BetheProblem(spec, random_frame(rng, spec))):
            worst_res = max(worst_res, s.residual_norm)
    ok = worst_fd < tol_fd and worst_res < tol_res
    return CheckResult(
        "11 Jacobian vs finite differences, solution residuals",
        ok,
        worst_res,
        tol_res,
        detail={"jacobian_rel_error": worst_fd, "max_residual": worst_res},
    )


def run_all(seed=0) -> list:
    """All acceptance checks in order."""
    results = [check_charpoly_identity(seed)]
    t0 = time.perf_counter()
    solsets = complete_flag_solutions(seed)
    solve_time = time.perf_counter() - t0
    r2 = check_trs_spectrum(solsets)
    r2.seconds += solve_time
    results += [r2, check_dual(solsets), check_qq(solsets), check_desnanot_jacobi(seed), check_toda(seed)]
    results += [check_limit(seed), check_vertex_oracle(), check_compact_limit(), check_eigenvalue()]
    results.append(check_solver(seed, solsets=solsets))
    return results
