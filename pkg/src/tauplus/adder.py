"""Value-level modular adders and channel-wise RNS addition."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .moduli import TauPlusSet, make_tau_plus


@dataclass(frozen=True)
class ResidueVector:
    """One residue per channel: x1 mod 2^(2q+1), x2 mod m2, x3 mod m3."""

    q: int
    x1: int
    x2: int
    x3: int

    def __post_init__(self):
        s = make_tau_plus(self.q)
        for name, v, m in (("x1", self.x1, s.m1), ("x2", self.x2, s.m2), ("x3", self.x3, s.m3)):
            if not 0 <= v < m:
                raise ValueError(f"{name}={v} out of range [0, {m}) for q={self.q}")

    def astuple(self) -> tuple[int, int, int]:
        return (self.x1, self.x2, self.x3)

    def to_record(self) -> dict:
        return {"q": self.q, "x1": self.x1, "x2": self.x2, "x3": self.x3}

    @classmethod
    def from_record(cls, rec: dict) -> "ResidueVector":
        return cls(int(rec["q"]), int(rec["x1"]), int(rec["x2"]), int(rec["x3"]))


def mod_add(a: int, b: int, m: int) -> int:
    if not (0 <= a < m and 0 <= b < m):
        raise ValueError(f"operands ({a}, {b}) must lie in [0, {m})")
    s = a + b
    return s - m if s >= m else s


def mod_multi_add(terms: Iterable[int], m: int) -> int:
    """Sum ``terms`` modulo ``m``, folding one operand at a time."""
    terms = list(terms)
    if not terms:
        raise ValueError("no terms to add")
    if not 0 <= terms[0] < m:
        raise ValueError(f"term {terms[0]} must lie in [0, {m})")
    acc = terms[0]
    for t in terms[1:]:
        acc = mod_add(acc, t, m)
    return acc


def rns_add(u: ResidueVector, v: ResidueVector, s: TauPlusSet) -> ResidueVector:
    if u.q != s.q or v.q != s.q:
        raise ValueError(f"channel parameter mismatch: {u.q}, {v.q} vs set q={s.q}")
    return ResidueVector(
        s.q,
        mod_add(u.x1, v.x1, s.m1),
        mod_add(u.x2, v.x2, s.m2),
        mod_add(u.x3, v.x3, s.m3),
    )
