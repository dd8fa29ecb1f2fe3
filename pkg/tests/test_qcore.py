import math

import pytest

from qweinstein import (
    PoleError,
    QDomainError,
    QParams,
    TruncationPolicy,
    qbracket,
    qfactorial,
    qgamma,
    qshifted,
)
from qweinstein.qcore import aligned_q, lattice_alignment

INF = math.inf

# frozen oracle: direct product at 60 digits (tests/oracles.py)
QQ_INF_05 = 0.2887880950866024212789


def test_params_validation():
    with pytest.raises(QDomainError):
        QParams(q=1.0, alpha=0.0)
    with pytest.raises(QDomainError):
        QParams(q=0.0, alpha=0.0)
    with pytest.raises(QDomainError):
        QParams(q=0.5, alpha=-0.6)
    QParams(q=0.5, alpha=-0.5)


def test_qshifted_n0_is_one():
    p = QParams(q=0.5, alpha=0.0)
    for x in (0.0, 1.0, -2.5, 3 + 4j):
        assert qshifted(x, 0, p) == 1


def test_qshifted_zero_inf_is_one():
    p = QParams(q=0.5, alpha=0.0)
    assert qshifted(0.0, INF, p) == 1.0


def test_qshifted_inf_oracle():
    p = QParams(q=0.5, alpha=0.0)
    v = qshifted(0.5, INF, p)
    assert abs(v - QQ_INF_05) < 1e-15


def test_qshifted_recurrence_exact():
    p = QParams(q=0.7, alpha=0.0)
    for x in (0.3, -1.2, 0.9 + 0.1j):
        for n in range(0, 12):
            lhs = qshifted(x, n + 1, p)
            rhs = qshifted(x, n, p) * (1 - x * p.q**n)
            assert lhs == rhs


def test_qshifted_policy_stability():
    p = QParams(q=0.5, alpha=0.0)
    a = qshifted(0.5, INF, p, TruncationPolicy(product_tol=1e-15))
    b = qshifted(0.5, INF, p, TruncationPolicy(product_tol=1e-18))
    assert abs(a / b - 1) < 1e-12


def test_qbracket_one():
    for q in (0.3, 0.5, 0.9):
        assert qbracket(1.0, QParams(q=q, alpha=0.0)) == 1.0


def test_qbracket_classical_limit():
    p = QParams(q=1 - 1e-6, alpha=0.0)
    assert abs(qbracket(3.0, p) - 3.0) < 1e-5


def test_qfactorial_vs_qshifted():
    p = QParams(q=0.5, alpha=0.0)
    for n in range(21):
        ref = qshifted(p.q, n, p) / (1 - p.q) ** n
        assert abs(qfactorial(n, p) / ref - 1) < 1e-14


def test_qgamma_at_one_and_two():
    for q in (0.5, 0.7, 0.9):
        p = QParams(q=q, alpha=0.0)
        assert abs(qgamma(1.0, p) - 1.0) < 1e-14
        assert abs(qgamma(2.0, p) - 1.0) < 1e-14


@pytest.mark.parametrize("x", [0.5, 1.5, 2.5])
def test_qgamma_functional_equation(x):
    p = QParams(q=0.5, alpha=0.0)
    ratio = qgamma(x + 1, p) / (qbracket(x, p) * qgamma(x, p))
    assert abs(ratio - 1) < 1e-12


def test_qgamma_pole():
    p = QParams(q=0.5, alpha=0.0)
    for x in (0.0, -1.0, -2.0):
        with pytest.raises(PoleError):
            qgamma(x, p)


def test_lattice_alignment_binary_exact_half():
    eps, j = lattice_alignment(0.5)
    assert eps == 0.0 and j == 1


def test_aligned_q_roots():
    for j in (2, 3, 4, 22):
        q = aligned_q(j)
        assert abs((1 - q) - q**j) < 5e-16
        eps, jj = lattice_alignment(q)
        assert jj == j and eps < 5e-16


def test_alignment_generic_q_is_far():
    eps, _ = lattice_alignment(0.7)
    assert eps > 1e-3
