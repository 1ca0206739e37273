"""Reference converters, kept deliberately simple.

Everything here is independent of the tau+ specific machinery so it can
serve as ground truth for the forward and reverse converters.
"""

from __future__ import annotations

from math import prod
from typing import Sequence

from .moduli import TauSet, pairwise_coprime


class ModulusList(tuple):
    """An ordered tuple of pairwise coprime moduli, each >= 2."""

    def __new__(cls, moduli: Sequence[int]):
        ms = tuple(int(m) for m in moduli)
        if not ms:
            raise ValueError("empty modulus list")
        if any(m < 2 for m in ms):
            raise ValueError(f"moduli must be >= 2: {ms}")
        if not pairwise_coprime(ms):
            raise ValueError(f"moduli are not pairwise coprime: {ms}")
        return super().__new__(cls, ms)

    @property
    def product(self) -> int:
        return prod(self)


def _as_moduli(ms) -> ModulusList:
    return ms if isinstance(ms, ModulusList) else ModulusList(ms)


def egcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with s*a + t*b == g == gcd(a, b)."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        k, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - k * s1
        t0, t1 = t1, t0 - k * t1
    return a, s0, t0


def inverse_mod(a: int, m: int) -> int:
    g, s, _ = egcd(a % m, m)
    if g != 1:
        raise ValueError(f"{a} has no inverse modulo {m}")
    return s % m


def _check_residues(rs, ms) -> None:
    if len(rs) != len(ms):
        raise ValueError(f"{len(rs)} residues for {len(ms)} moduli")
    for r, m in zip(rs, ms):
        if not 0 <= r < m:
            raise ValueError(f"residue {r} out of range for modulus {m}")


def residues_of(x: int, ms) -> tuple[int, ...]:
    ms = _as_moduli(ms)
    if not 0 <= x < ms.product:
        raise ValueError(f"{x} outside [0, {ms.product})")
    return tuple(x % m for m in ms)


def crt_reconstruct(rs: Sequence[int], ms) -> int:
    """Garner's mixed-radix reconstruction."""
    ms = _as_moduli(ms)
    _check_residues(rs, ms)
    digits: list[int] = []
    for i, (r, m) in enumerate(zip(rs, ms)):
        # evaluate the mixed-radix number built so far, modulo m
        acc, radix = 0, 1
        for d, mj in zip(digits, ms[:i]):
            acc = (acc + d * radix) % m
            radix = (radix * mj) % m
        digits.append(((r - acc) * inverse_mod(radix, m)) % m)
    x, radix = 0, 1
    for d, m in zip(digits, ms):
        x += d * radix
        radix *= m
    return x


def new_crt_coefficients(ms) -> tuple[int, ...]:
    """mu_i = (m_2 * ... * m_i) * inverse(m_1 * ... * m_i) mod (m_{i+1} * ... * m_k)."""
    ms = _as_moduli(ms)
    out = []
    for i in range(1, len(ms)):
        head = prod(ms[:i])
        out.append((head // ms[0]) * inverse_mod(head, prod(ms[i:])))
    return tuple(out)


def new_crt_general(rs: Sequence[int], ms) -> int:
    """Nested ("New") CRT: X = x1 + m1*|sum mu_i (x_{i+1} - x_i)|_{M/m1}."""
    ms = _as_moduli(ms)
    _check_residues(rs, ms)
    acc = 0
    for i, mu in enumerate(new_crt_coefficients(ms), start=1):
        acc += mu * (rs[i] - rs[i - 1])
    return rs[0] + ms[0] * (acc % (ms.product // ms[0]))


def reverse_tau(rs: Sequence[int], s: TauSet) -> int:
    """Reverse conversion for {2^q', 2^q'-1, 2^q'+1} via the nested CRT."""
    return new_crt_general(rs, s.moduli)


def tau_mu_closed_form(qp: int) -> tuple[int, int]:
    """Closed-form coefficients of the two-term formula for the tau set.

    The second coefficient is (2^q' - 1) * (2^(q'-1) + 1); only the
    bracketed factor appears in the commonly quoted form.
    """
    return 1 << qp, ((1 << qp) - 1) * ((1 << (qp - 1)) + 1)
