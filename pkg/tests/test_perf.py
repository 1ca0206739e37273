import pytest

from tauplus.perf import (CSV_HEADER, DelayExpression, NoTurningPoint, clog2, comparison_csv,
                          comparison_table, equalized_q_prime, tau_delay, tau_plus_delay,
                          turning_point)
from tauplus.moduli import make_tau, make_tau_plus

# (q, q', tau+ delay, tau delay, turning k), from the published comparison table
TABLE = [
    (4, 7, "8k+61", "9k+30", 31),
    (8, 12, "10k+73", "11k+34", 39),
    (16, 23, "12k+93", "13k+38", 55),
    (32, 44, "14k+129", "15k+42", 87),
]


def test_clog2():
    assert [clog2(n) for n in (1, 2, 3, 4, 5, 8, 9)] == [0, 1, 2, 2, 3, 3, 4]
    with pytest.raises(ValueError):
        clog2(0)


@pytest.mark.parametrize("q,qp,plus,tau,k", TABLE)
def test_table_rows(q, qp, plus, tau, k):
    assert equalized_q_prime(q) == qp
    assert str(tau_plus_delay(q)) == plus
    assert str(tau_delay(qp)) == tau
    assert turning_point(q) == k


def test_single_examples():
    assert str(tau_delay(7)) == "9k+30"
    assert str(tau_delay(12)) == "11k+34"
    assert str(tau_delay(44)) == "15k+42"


@pytest.mark.parametrize("q", range(3, 65))
def test_equalized_q_prime_is_minimal(q):
    qp = equalized_q_prime(q)
    target = make_tau_plus(q).dr
    assert make_tau(qp).dr >= target
    assert qp == 3 or make_tau(qp - 1).dr < target


@pytest.mark.parametrize("q,_qp,_p,_t,k", TABLE)
def test_turning_point_convention(q, _qp, _p, _t, k):
    plus = tau_plus_delay(q)
    base = tau_delay(equalized_q_prime(q))
    assert plus.at(k) <= base.at(k)
    assert plus.at(k - 1) > base.at(k - 1)


def test_delays_tie_at_turning_point():
    assert tau_plus_delay(4).at(31) == tau_delay(7).at(31) == 309


def test_no_turning_point(monkeypatch):
    from tauplus import perf

    # a baseline that grows more slowly than tau+ is never overtaken
    monkeypatch.setattr(perf, "tau_delay", lambda qp: DelayExpression(0, 1))
    with pytest.raises(NoTurningPoint):
        perf.turning_point(4)


def test_csv():
    text = comparison_csv(comparison_table([4, 8, 16, 32]))
    lines = text.strip().splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert lines[1:] == ["4,7,61,8,30,9,31", "8,12,73,10,34,11,39",
                         "16,23,93,12,38,13,55", "32,44,129,14,42,15,87"]
