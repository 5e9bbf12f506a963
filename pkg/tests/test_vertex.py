import numpy as np
import pytest

from qkflags import bethe
from qkflags.core import ParameterFrame, QuiverSpec
from qkflags.selftest import brute_force_vertex
from qkflags.vertex import (
    FixedPoint,
    Insertion,
    admissible,
    check_symmetric,
    compact_vertex_series,
    eigenvalue_ratio,
    enumerate_degrees,
    enumerate_fixed_points,
    vertex_coefficient,
    vertex_series,
)

A4 = np.array([1.0, 2.3 + 0.5j, -0.7 + 1.1j, 0.4 - 1.9j])


def vframe(spec, q=0.4 + 0.2j, hbar=1.7 - 0.6j, h=None):
    a = A4[: spec.framing]
    if h is not None:
        return ParameterFrame(np.sqrt(q), h, a, np.zeros(spec.n - 1))
    return ParameterFrame.from_q(q, hbar, a, np.zeros(spec.n - 1))


@pytest.mark.parametrize("spec,count", [
    (QuiverSpec.grassmannian(1, 2), 2),
    (QuiverSpec.complete_flag(3), 6),
    (QuiverSpec.grassmannian(2, 4), 6),
    (QuiverSpec(3, (1, 3), 4), 12),
])
def test_fixed_point_counts(spec, count):
    pts = enumerate_fixed_points(spec)
    assert len(pts) == count
    assert len({p.chain for p in pts}) == count


def test_fixed_point_validation():
    spec = QuiverSpec.complete_flag(3)
    with pytest.raises(ValueError):
        FixedPoint(spec, ((0,), (1, 2)))  # not nested


def test_admissible_examples():
    assert admissible(((0,), (1, 0)))
    assert not admissible(((0,), (1, 1)))
    assert admissible(((2,), (1, 3)))
    assert not admissible(((-1,), (0, 0)))


def test_enumerate_degrees_examples():
    assert enumerate_degrees(QuiverSpec.grassmannian(1, 2), 3) == [((0,),), ((1,),), ((2,),), ((3,),)]
    spec = QuiverSpec.complete_flag(3)
    deg1 = [d for d in enumerate_degrees(spec, 1) if sum(map(sum, d)) == 1]
    assert sorted(deg1) == sorted([((1,), (0, 0)), ((0,), (1, 0)), ((0,), (0, 1))])
    for s in (spec, QuiverSpec.grassmannian(2, 4)):
        assert enumerate_degrees(s, 0) == [tuple((0,) * v for v in s.dims)]


def test_enumerate_degrees_against_filter():
    # every admissible array of bounded total is listed exactly once
    import itertools

    spec = QuiverSpec.complete_flag(3)
    every = []
    for flat in itertools.product(range(4), repeat=3):
        if sum(flat) <= 3:
            d = ((flat[0],), (flat[1], flat[2]))
            if admissible(d):
                every.append(d)
    got = enumerate_degrees(spec, 3)
    assert len(got) == len(set(got)) and sorted(got) == sorted(every)


def test_degree_zero_coefficient_is_one():
    for spec in (QuiverSpec.grassmannian(1, 3), QuiverSpec.complete_flag(3)):
        fr = vframe(spec)
        for p in enumerate_fixed_points(spec):
            assert vertex_coefficient(p, tuple((0,) * v for v in spec.dims), Insertion.one(), fr) == 1
            assert compact_vertex_series(p, Insertion.one(), fr, 0)[(0,) * (spec.n - 1)] == 1


def test_gr12_degree_one_by_hand():
    spec = QuiverSpec.grassmannian(1, 2)
    fr = vframe(spec)
    from qkflags.qseries import bracket

    a = fr.a
    p = enumerate_fixed_points(spec)[0]
    expected = fr.q_sqrt ** 2 * bracket(a[0] / a[0], 1, fr) * bracket(a[0] / a[1], 1, fr)
    assert vertex_series(p, Insertion.one(), fr, 1)[(1,)] == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("spec,D", [(QuiverSpec.grassmannian(1, 2), 3), (QuiverSpec.grassmannian(1, 3), 3), (QuiverSpec.complete_flag(3), 2)])
def test_vertex_matches_brute_force(spec, D):
    fr = vframe(spec)
    for p in enumerate_fixed_points(spec):
        ser = vertex_series(p, Insertion.tautological(1), fr, D)
        ref = brute_force_vertex(spec, p, fr, D, lambda lv: sum(lv[0]))
        for dv, c in ref.items():
            assert abs(ser[dv] - c) <= 1e-12 * max(1.0, abs(c))


def test_grassmannian_2_4_against_brute_force():
    spec = QuiverSpec.grassmannian(2, 4)
    fr = vframe(spec)
    p = enumerate_fixed_points(spec)[2]
    ser = vertex_series(p, Insertion.one(), fr, 2)
    ref = brute_force_vertex(spec, p, fr, 2)
    for dv, c in ref.items():
        assert abs(ser[dv] - c) <= 1e-12 * max(1.0, abs(c))


@pytest.mark.parametrize("spec,D", [(QuiverSpec.grassmannian(1, 2), 2), (QuiverSpec.complete_flag(3), 1)])
def test_compact_series_is_large_hbar_limit(spec, D):
    fr = vframe(spec, h=1e5)
    vp = np.array(spec.vprime)
    for p in enumerate_fixed_points(spec):
        V = vertex_series(p, Insertion.one(), fr, D)
        C = compact_vertex_series(p, Insertion.one(), fr, D)
        for dv in C.degrees():
            resc = V[dv] / np.prod((-fr.h) ** (vp * np.array(dv)))
            assert abs(resc - C[dv]) <= 1e-5 * max(1.0, abs(C[dv]))


def test_eigenvalue_ratio_at_zero_is_classical():
    spec = QuiverSpec.complete_flag(3)
    fr = vframe(spec)
    tau = Insertion.exterior(2, 2)
    for p in enumerate_fixed_points(spec):
        x = p.coordinates(fr.a)
        assert eigenvalue_ratio(p, tau, fr, 2, [0, 0]) == pytest.approx(np.prod(x[1]))


def test_eigenvalue_ratio_gr12_quadratic_oracle():
    # n = 2 Bethe equation (s - a1)(s - a2) = (z/hbar)(s - hbar a1)(s - hbar a2)
    a1, a2 = 1.0, 2.0
    hb, z, q = 1.1 + 0.1j, 1e-2, 1 - 1e-3
    spec = QuiverSpec.grassmannian(1, 2)
    fr = ParameterFrame.from_q(q, hb, [a1, a2], [z])
    k = z / hb
    coeffs = [1 - k, -(a1 + a2) + k * hb * (a1 + a2), a1 * a2 - k * hb ** 2 * a1 * a2]
    roots = np.roots(coeffs)
    for p in enumerate_fixed_points(spec):
        r = eigenvalue_ratio(p, Insertion.tautological(1), fr, 6, [z])
        start = p.coordinates(fr.a)[0][0]
        s = roots[np.argmin(np.abs(roots - start))]
        assert abs(r - s) < 1e-2


def test_eigenvalue_ratio_flag3_solver_oracle():
    spec = QuiverSpec.complete_flag(3)
    a = [1.0, 2.0, 3.5]
    z = [1e-2, 1e-2j]
    fr = ParameterFrame.from_q(1 - 1e-3, 1.1 + 0.1j, a, z)
    sols = bethe.solve_all(bethe.BetheProblem(spec, fr))
    for p, s in zip(enumerate_fixed_points(spec), sols):
        r = eigenvalue_ratio(p, Insertion.exterior(1, 1), fr, 3, z)
        assert abs(r - s.roots[0][0]) < 1e-2


def test_symmetry_check():
    spec = QuiverSpec.grassmannian(2, 4)
    sym = Insertion.from_monomials({((1, 0),): 1.0, ((0, 1),): 1.0})
    asym = Insertion.from_monomials({((2, 0),): 1.0, ((0, 1),): 1.0})
    assert check_symmetric(sym, spec)
    assert not check_symmetric(asym, spec)
