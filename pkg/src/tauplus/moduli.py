"""Moduli sets and their derived constants.

``TauPlusSet`` holds {2^(2q+1), 2^q+2^(q-1)-1, 2^q+2^(q-1)+1} together with
the two inverses the reverse converter relies on.  ``TauSet`` is the
classical {2^q', 2^q'-1, 2^q'+1} set used as the comparison baseline.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd

MIN_Q = 3


@dataclass(frozen=True)
class TauPlusSet:
    q: int
    m1: int
    m2: int
    m3: int
    pair_modulus: int
    dr: int
    mu2: int
    mu1: int

    @property
    def moduli(self) -> tuple[int, int, int]:
        return (self.m1, self.m2, self.m3)


@dataclass(frozen=True)
class TauSet:
    qp: int
    moduli: tuple[int, int, int]
    dr: int


@lru_cache(maxsize=None)
def make_tau_plus(q: int) -> TauPlusSet:
    """Build the set for channel parameter ``q`` (q >= 3)."""
    if not isinstance(q, int) or q < MIN_Q:
        raise ValueError(f"q must be an integer >= {MIN_Q}, got {q!r}")
    m1 = 1 << (2 * q + 1)
    m2 = (1 << q) + (1 << (q - 1)) - 1
    m3 = m2 + 2
    pair = m2 * m3
    return TauPlusSet(
        q=q,
        m1=m1,
        m2=m2,
        m3=m3,
        pair_modulus=pair,
        dr=m1 * pair,
        mu2=3 << (q - 2),
        mu1=9 * (1 << (2 * q - 5)) + 1,
    )


@lru_cache(maxsize=None)
def make_tau(qp: int) -> TauSet:
    if not isinstance(qp, int) or qp < MIN_Q:
        raise ValueError(f"q' must be an integer >= {MIN_Q}, got {qp!r}")
    p = 1 << qp
    moduli = (p, p - 1, p + 1)
    return TauSet(qp=qp, moduli=moduli, dr=(1 << (3 * qp)) - p)


def dynamic_range(s: TauPlusSet) -> int:
    return s.m1 * s.m2 * s.m3


def dynamic_range_closed_form(q: int) -> int:
    return (1 << (4 * q + 2)) + (1 << (4 * q - 1)) - (1 << (2 * q + 1))


@dataclass
class IdentityReport:
    """Outcome of :func:`verify_appendix_identities`.

    ``failures`` maps an identity letter to a witness string; ``skipped``
    maps a letter to the reason it was not checked.
    """

    q: int
    checked: list[str] = field(default_factory=list)
    failures: dict[str, str] = field(default_factory=dict)
    skipped: dict[str, str] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    def __str__(self) -> str:
        lines = [f"q={self.q}: {'PASS' if self.ok else 'FAIL'}"]
        for letter in self.checked:
            status = "FAIL " + self.failures[letter] if letter in self.failures else "ok"
            lines.append(f"  ({letter}) {status}")
        for letter, why in self.skipped.items():
            lines.append(f"  ({letter}) skipped: {why}")
        return "\n".join(lines)


def verify_appendix_identities(q: int, samples: int = 1000, seed: int = 0) -> IdentityReport:
    """Check the auxiliary identities (a)..(h) behind the reverse converter.

    (a) is universally quantified, so it is sampled with ``samples`` random
    triples m, m' < 2^16.  (h) involves 2^(q-4) and is skipped at q=3.
    """
    s = make_tau_plus(q)
    rep = IdentityReport(q=q)
    rng = random.Random(seed)

    def check(letter: str, cond: bool, witness: str) -> None:
        rep.checked.append(letter)
        if not cond:
            rep.failures[letter] = witness

    bad = None
    for _ in range(samples):
        m = rng.randrange(1, 1 << 16)
        mp = rng.randrange(1, 1 << 16)
        z = rng.randrange(0, 4 * m * mp)
        if m * (z % mp) != (m * z) % (m * mp):
            bad = (m, mp, z)
            break
    check("a", bad is None, f"m,m',Z={bad}")

    v = (s.mu2 * s.m3) % s.m2
    check("b", v == 1, f"|mu2*m3|_m2={v}")
    check("c", 2 * s.mu2 == s.m2 + 1, f"2*mu2={2 * s.mu2}, m2+1={s.m2 + 1}")

    for letter, m in (("d", s.m2), ("e", s.m3)):
        bad = None
        for x in [0, m - 1] + [rng.randrange(m) for _ in range(samples)]:
            hi, lo = x >> 4, x & 15
            # the high slice covers bits q..4 only
            if 16 * hi + lo != x or hi >= 1 << (q - 3):
                bad = x
                break
        check(letter, bad is None, f"x={bad} mod {m}")

    v = (s.mu1 * s.m1) % s.pair_modulus
    check("f", v == 1, f"|mu1*m1|_m2m3={v}")
    v = (8 * s.mu1) % s.pair_modulus
    check("g", v == 9, f"|8*mu1|_m2m3={v}")

    if q >= 4:
        rhs = 3 * (1 << (q - 4)) * (s.m2 + 1) + 1
        check("h", s.mu1 == rhs, f"mu1={s.mu1}, 3*2^(q-4)*(m2+1)+1={rhs}")
    else:
        rep.skipped["h"] = "2^(q-4) is fractional for q=3"
    return rep


def pairwise_coprime(moduli) -> bool:
    ms = list(moduli)
    return all(gcd(a, b) == 1 for i, a in enumerate(ms) for b in ms[i + 1:])
