"""Gate-delay model for forward conversion + k additions + reverse conversion.

Delays are affine in the number of additions k, in units of one gate delay.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from .moduli import dynamic_range_closed_form, make_tau, make_tau_plus


def clog2(n: int) -> int:
    if n < 1:
        raise ValueError(f"log of {n}")
    return (n - 1).bit_length()


@dataclass(frozen=True)
class DelayExpression:
    intercept: int
    slope: int

    def at(self, k: int) -> int:
        return self.intercept + self.slope * k

    def __str__(self) -> str:
        return f"{self.slope}k+{self.intercept}"


def tau_delay(qp: int) -> DelayExpression:
    if qp < 2:
        raise ValueError(f"q' must be >= 2, got {qp}")
    lg = clog2(qp)
    return DelayExpression(18 + 4 * lg, 3 + 2 * lg)


def tau_plus_delay(q: int) -> DelayExpression:
    make_tau_plus(q)
    lg = clog2(q)
    return DelayExpression(2 * q + 45 + 4 * lg, 4 + 2 * lg)


def equalized_q_prime(q: int) -> int:
    """Smallest q' whose {2^q', 2^q' +- 1} range covers the tau+ range at q."""
    target = dynamic_range_closed_form(make_tau_plus(q).q)
    qp = 3
    while make_tau(qp).dr < target:
        qp += 1
    return qp


class NoTurningPoint(ValueError):
    pass


def turning_point(q: int) -> int:
    """Least k >= 0 at which the tau+ pipeline is no slower than tau's.

    Ties count: at the published k values the two delays are equal.
    """
    plus = tau_plus_delay(q)
    base = tau_delay(equalized_q_prime(q))
    if plus.intercept <= base.intercept:
        return 0
    if plus.slope >= base.slope:
        raise NoTurningPoint(
            f"q={q}: tau+ slope {plus.slope} >= tau slope {base.slope}, never catches up"
        )
    gap = plus.intercept - base.intercept
    step = base.slope - plus.slope
    return -(-gap // step)


@dataclass(frozen=True)
class ComparisonRow:
    q: int
    qp: int
    tau_plus_delay: DelayExpression
    tau_delay: DelayExpression
    turning_k: int


def comparison_table(q_list) -> list[ComparisonRow]:
    rows = []
    for q in q_list:
        qp = equalized_q_prime(q)
        rows.append(ComparisonRow(q, qp, tau_plus_delay(q), tau_delay(qp), turning_point(q)))
    return rows


CSV_HEADER = ("q", "qprime", "tauplus_intercept", "tauplus_slope", "tau_intercept", "tau_slope", "turning_k")


def comparison_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([r.q, r.qp, r.tau_plus_delay.intercept, r.tau_plus_delay.slope,
                    r.tau_delay.intercept, r.tau_delay.slope, r.turning_k])
    return buf.getvalue()
