import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qkflags import bethe
from qkflags.bethe import BetheProblem, baxter_Q, implied_twist, momenta, residual, solve_all, solve_from_fixed_point
from qkflags.core import ParameterFrame, Poly, QuiverSpec
from qkflags.selftest import _fd_jacobian
from qkflags.vertex import enumerate_fixed_points

from conftest import cnormal


def gen_frame(spec, rng, q=0.3 + 0.1j, hbar=1.6 + 0.4j, zscale=0.5):
    return ParameterFrame.from_q(q, hbar, cnormal(rng, spec.framing), cnormal(rng, spec.n - 1, zscale))


def test_n2_residual_by_hand(rng):
    spec = QuiverSpec.grassmannian(1, 2)
    fr = gen_frame(spec, rng)
    a1, a2 = fr.a
    hb, z = fr.hbar, fr.z[0]
    s = 0.37 - 1.2j
    expected = (s - a1) * (s - a2) - (z / hb) * (s - hb * a1) * (s - hb * a2)
    assert residual(BetheProblem(spec, fr), [np.array([s])])[0] == pytest.approx(expected, rel=1e-14)


def test_zero_twist_fixed_points():
    rng = np.random.default_rng(5)
    spec = QuiverSpec.complete_flag(3)
    fr = gen_frame(spec, rng).replace(z=np.zeros(2))
    for conv in ("raw", "sigma", "compact"):
        prob = BetheProblem(spec, fr, conv)
        for p in enumerate_fixed_points(spec):
            sol = solve_from_fixed_point(prob, p)
            assert np.max(np.abs(residual(prob, sol.roots))) <= (0 if conv != "sigma" else 1e-12)
            assert all(np.allclose(r, c, rtol=1e-15) for r, c in zip(sol.roots, p.coordinates(fr.a)))


def test_conventions_agree_on_implied_twist(rng):
    # the twist each equation needs at given roots is convention independent
    for spec in (QuiverSpec.complete_flag(3), QuiverSpec(3, (1, 2), 4)):
        fr = gen_frame(spec, rng)
        roots = [cnormal(rng, v) for v in spec.dims]
        raw = implied_twist(BetheProblem(spec, fr, "raw"), roots)
        sig = implied_twist(BetheProblem(spec, fr, "sigma"), roots)
        v = spec.extended
        signs = np.concatenate([[(-1) ** (v[i - 1] + v[i + 1])] * v[i] for i in range(1, spec.n)])
        assert np.allclose(raw, sig * signs, rtol=1e-12, atol=0)


def test_n2_solutions_are_quadratic_branches(rng):
    spec = QuiverSpec.grassmannian(1, 2)
    fr = gen_frame(spec, rng)
    a1, a2 = fr.a
    hb, k = fr.hbar, fr.z[0] / fr.hbar
    roots = np.roots([1 - k, -(a1 + a2) + k * hb * (a1 + a2), a1 * a2 - k * hb ** 2 * a1 * a2])
    sols = solve_all(BetheProblem(spec, fr))
    got = sorted([s.roots[0][0] for s in sols], key=lambda c: (c.real, c.imag))
    ref = sorted(roots, key=lambda c: (c.real, c.imag))
    assert np.allclose(got, ref, rtol=1e-12)


@pytest.mark.parametrize("spec", [QuiverSpec.complete_flag(3), QuiverSpec.grassmannian(2, 4), QuiverSpec(3, (1, 3), 4)])
def test_solve_all_distinct_and_accurate(spec, rng):
    fr = gen_frame(spec, rng)
    sols = solve_all(BetheProblem(spec, fr))
    assert len(sols) == len(enumerate_fixed_points(spec))
    flats = [s.flat() for s in sols]
    for i in range(len(flats)):
        assert sols[i].residual_norm < 1e-12
        for j in range(i):
            assert np.linalg.norm(flats[i] - flats[j]) > 1e-6


def test_jacobian_matches_finite_differences(rng):
    for conv in ("raw", "sigma", "compact"):
        spec = QuiverSpec.complete_flag(3)
        prob = BetheProblem(spec, gen_frame(spec, rng), conv)
        x = cnormal(rng, spec.num_roots)
        J = prob.system.jacobian(x, prob.kappa)
        Jfd = _fd_jacobian(prob, x)
        assert np.max(np.abs(J - Jfd)) / np.max(np.abs(J)) < 1e-5


def test_baxter_and_momenta(rng):
    spec = QuiverSpec.complete_flag(3)
    fr = gen_frame(spec, rng)
    sols = solve_all(BetheProblem(spec, fr))
    for s in sols:
        Q = baxter_Q(s)
        sig = s.sigma()
        assert np.allclose(Q[1].coef, [-sig[0][0], 1])
        assert Q[3].max_coef_diff(Poly.from_roots(fr.alpha(3))) == 0
        p = momenta(s)
        assert p[0] == pytest.approx(sig[0][0])
        assert np.prod(p) == pytest.approx(np.prod(fr.alpha(3)), rel=1e-10)


def test_top_baxter_simple():
    spec = QuiverSpec.grassmannian(1, 2)
    fr = ParameterFrame(0.5, 2.0, np.array([1.0, 2.0]) / 4.0, [0.1])  # alpha = hbar a = (1, 2)
    sol = solve_all(BetheProblem(spec, fr))[0]
    assert np.allclose(baxter_Q(sol)[2].coef, [2, -3, 1])
    p = momenta(sol)
    assert p[1] == pytest.approx(2.0 / sol.sigma()[0][0])


def test_shifted_baxter_by_evaluation(rng):
    fr = gen_frame(QuiverSpec.complete_flag(3), rng)
    sig = cnormal(rng, 2)
    Q = Poly.from_roots(sig)
    for m in (-2, -1, 1, 2):
        S = Q.shift(m, fr.h)
        for u in cnormal(rng, 3):
            # p(h^{-m} u) = h^{-2m} prod (u - h^m sigma)
            assert S(u) == pytest.approx(fr.h ** (-2 * m) * np.prod(u - fr.h ** m * sig), rel=1e-12)


def test_relative_residual_flags_non_solutions(rng):
    spec = QuiverSpec.complete_flag(3)
    prob = BetheProblem(spec, gen_frame(spec, rng))
    sol = solve_all(prob)[0]
    bad = [r + 1e-3 for r in sol.roots]
    assert bethe.relative_residual(prob, bad) > 1e-6


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2 ** 31 - 1))
def test_pair_permutation_symmetry(seed):
    # permuting roots within a level permutes the equations
    rng = np.random.default_rng(seed)
    spec = QuiverSpec(3, (2, 3), 4)
    prob = BetheProblem(spec, gen_frame(spec, rng))
    roots = [cnormal(rng, v) for v in spec.dims]
    perm = [np.random.default_rng(seed + 1).permutation(v) for v in spec.dims]
    r0 = residual(prob, roots)
    r1 = residual(prob, [r[p] for r, p in zip(roots, perm)])
    r0 = np.split(r0, [2])
    r1 = np.split(r1, [2])
    for lvl in range(2):
        assert np.allclose(r1[lvl], r0[lvl][perm[lvl]], rtol=1e-12)


def test_compact_convenience(rng):
    spec = QuiverSpec.complete_flag(3)
    sols = bethe.solve_compact(spec, cnormal(rng, 3), cnormal(rng, 2, 0.5))
    assert len(sols) == 6 and all(s.convention == "compact" for s in sols)
    assert max(s.residual_norm for s in sols) < 1e-12
