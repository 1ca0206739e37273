"""Binary to residue conversion.

The m1 channel is just the low 2q+1 bits.  The m2/m3 channels split the
(4q+3)-bit operand into four slices and push the upper three through a
single 2^(q+1)-entry table F(Z) = |2^(q+1) Z|_m, applied once, twice or
three times, before a four-operand modular sum.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .adder import ResidueVector, mod_multi_add
from .moduli import TauPlusSet


@dataclass(frozen=True)
class OperandSlices:
    x3: int
    x2: int
    x1: int
    x0: int

    def recompose(self, q: int) -> int:
        return (self.x3 << (3 * q + 3)) | (self.x2 << (2 * q + 2)) | (self.x1 << (q + 1)) | self.x0


# Tables with more than 2^MAX_TABLE_BITS entries are not stored; lookups
# are then computed on demand with the same result.
MAX_TABLE_BITS = 20


@dataclass(frozen=True)
class ChannelLut:
    channel: int
    modulus: int
    shift: int
    entries: tuple[int, ...] | None

    @property
    def size(self) -> int:
        return 1 << self.shift

    def __call__(self, z: int) -> int:
        if not 0 <= z < self.size:
            raise IndexError(f"table index {z} out of range [0, {self.size})")
        if self.entries is not None:
            return self.entries[z]
        return (z << self.shift) % self.modulus

    def power(self, z: int, k: int) -> int:
        for _ in range(k):
            z = self(z)
        return z


def _check_range(x: int, s: TauPlusSet) -> None:
    if not 0 <= x < s.dr:
        raise ValueError(f"{x} outside the dynamic range [0, {s.dr}) for q={s.q}")


def split_operand(x: int, s: TauPlusSet) -> OperandSlices:
    _check_range(x, s)
    q = s.q
    mask = (1 << (q + 1)) - 1
    return OperandSlices(
        x3=x >> (3 * q + 3),
        x2=(x >> (2 * q + 2)) & mask,
        x1=(x >> (q + 1)) & mask,
        x0=x & mask,
    )


@lru_cache(maxsize=64)
def build_lut(s: TauPlusSet, channel: int) -> ChannelLut:
    if channel not in (2, 3):
        raise ValueError(f"channel must be 2 or 3, got {channel}")
    m = s.m2 if channel == 2 else s.m3
    shift = s.q + 1
    entries = None
    if shift <= MAX_TABLE_BITS:
        entries = tuple((z << shift) % m for z in range(1 << shift))
    return ChannelLut(channel, m, shift, entries)


def residue_m1(x: int, s: TauPlusSet) -> int:
    _check_range(x, s)
    return x & (s.m1 - 1)


def staged_terms(x: int, s: TauPlusSet, channel: int) -> tuple[int, int, int, int]:
    """The four addends F^3(X3), F^2(X2), F(X1), X0 for one channel."""
    sl = split_operand(x, s)
    f = build_lut(s, channel)
    return (f(f(f(sl.x3))), f(f(sl.x2)), f(sl.x1), sl.x0)


def residue_mi_staged(x: int, s: TauPlusSet, channel: int) -> int:
    m = s.m2 if channel == 2 else s.m3
    t3, t2, t1, t0 = staged_terms(x, s, channel)
    # X0 has q+1 bits and may exceed m once
    if t0 >= m:
        t0 -= m
    return mod_multi_add((t3, t2, t1, t0), m)


def forward(x: int, s: TauPlusSet) -> ResidueVector:
    return ResidueVector(
        s.q,
        residue_m1(x, s),
        residue_mi_staged(x, s, 2),
        residue_mi_staged(x, s, 3),
    )


def make_fast_forward(s: TauPlusSet):
    """Return ``f(x) -> (x1, x2, x3)`` with no validation, for sweeps.

    Same table chain and reductions as :func:`forward`, minus the
    per-call object construction.
    """
    q = s.q
    mask = (1 << (q + 1)) - 1
    m1mask = s.m1 - 1
    sh1, sh2, sh3 = q + 1, 2 * q + 2, 3 * q + 3
    m2, m3 = s.m2, s.m3
    if q + 1 > MAX_TABLE_BITS:
        # F^k(z) = z * 2^(k(q+1)) mod m
        c2 = [pow(2, k * sh1, m2) for k in range(4)]
        c3 = [pow(2, k * sh1, m3) for k in range(4)]

        def g(x: int) -> tuple[int, int, int]:
            a3 = x >> sh3
            a2 = (x >> sh2) & mask
            a1 = (x >> sh1) & mask
            a0 = x & mask
            r2 = (a3 * c2[3] + a2 * c2[2] + a1 * c2[1] + a0) % m2
            r3 = (a3 * c3[3] + a2 * c3[2] + a1 * c3[1] + a0) % m3
            return x & m1mask, r2, r3

        return g
    # precompose F^2, F^3 once; tests pin these to the chained lookups
    e2 = build_lut(s, 2).entries
    e3 = build_lut(s, 3).entries
    e2_2 = [e2[z] for z in e2]
    e2_3 = [e2[z] for z in e2_2]
    e3_2 = [e3[z] for z in e3]
    e3_3 = [e3[z] for z in e3_2]

    def f(x: int) -> tuple[int, int, int]:
        a3 = x >> sh3
        a2 = (x >> sh2) & mask
        a1 = (x >> sh1) & mask
        a0 = x & mask
        r2 = (e2_3[a3] + e2_2[a2] + e2[a1] + a0) % m2
        r3 = (e3_3[a3] + e3_2[a2] + e3[a1] + a0) % m3
        return x & m1mask, r2, r3

    return f
