"""The eleven acceptance criteria at their stated tolerances.

Run with ``pytest -s tests/test_acceptance.py`` to see the pass/fail table.
"""
import pytest

from qkflags import selftest


@pytest.fixture(scope="module")
def solsets():
    return selftest.complete_flag_solutions(0)


def report(result):
    print(result.line())
    assert result.passed, result.line()


def test_01_charpoly_identity():
    report(selftest.check_charpoly_identity(0))


def test_02_xxz_trs_spectrum(solsets):
    report(selftest.check_trs_spectrum(solsets))


def test_03_dual_trs(solsets):
    report(selftest.check_dual(solsets))


def test_04_qq_system(solsets):
    report(selftest.check_qq(solsets))


def test_05_desnanot_jacobi():
    report(selftest.check_desnanot_jacobi(0))


def test_06_q_toda():
    report(selftest.check_toda(0))


def test_07_trs_to_toda_limit():
    report(selftest.check_limit(0))


def test_08_vertex_oracle():
    report(selftest.check_vertex_oracle())


def test_09_compact_limit():
    report(selftest.check_compact_limit())


def test_10_eigenvalue_asymptotics():
    report(selftest.check_eigenvalue())


def test_11_solver_self_consistency(solsets):
    report(selftest.check_solver(0, solsets=solsets))
