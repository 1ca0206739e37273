"""Residue to binary conversion.

Three independent routes to X' (with X = x1 + 2^(2q+1) X'):

* :func:`x_prime` composes the nested CRT on {m2, m3} and then on
  {m1, m2*m3}.  Valid for every q >= 3.
* :func:`x_prime_eq9` evaluates the thirteen-term closed form that uses
  only bit slices, complements and constants.  q >= 9.
* :func:`eval_bit_matrix` sums the thirteen weighted bit rows of
  :func:`build_bit_matrix` modulo 9*2^(2q-2)-1.  q >= 9.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Union

from .adder import ResidueVector
from .moduli import TauPlusSet, make_tau_plus

STRUCTURAL_MIN_Q = 9
N_ROWS = 13
N_REENTRANT = 7


def _check(rv: ResidueVector, s: TauPlusSet) -> None:
    if rv.q != s.q:
        raise ValueError(f"residue vector has q={rv.q}, set has q={s.q}")


def _require_structural(q: int) -> None:
    if q < STRUCTURAL_MIN_Q:
        raise ValueError(f"structural reverse paths need q >= {STRUCTURAL_MIN_Q}, got q={q}")


@dataclass(frozen=True)
class ResidueSplit:
    x1p: int
    x1pp: int
    x2p: int
    x2pp: int
    x3p: int
    x3pp: int


def split_residues(rv: ResidueVector) -> ResidueSplit:
    """x1 = 8*x1' + x1'', x2 = 16*x2' + x2'', x3 = 16*x3' + x3''."""
    return ResidueSplit(
        rv.x1 >> 3, rv.x1 & 7,
        rv.x2 >> 4, rv.x2 & 15,
        rv.x3 >> 4, rv.x3 & 15,
    )


def crt_pair_x23(x2: int, x3: int, s: TauPlusSet) -> int:
    if not (0 <= x2 < s.m2 and 0 <= x3 < s.m3):
        raise ValueError(f"residues ({x2}, {x3}) out of range for ({s.m2}, {s.m3})")
    return x3 + s.m3 * ((s.mu2 * (x2 - x3)) % s.m2)


def x_prime(rv: ResidueVector, s: TauPlusSet) -> int:
    _check(rv, s)
    x23 = crt_pair_x23(rv.x2, rv.x3, s)
    return (s.mu1 * (x23 - rv.x1)) % s.pair_modulus


def reverse_functional(rv: ResidueVector, s: TauPlusSet) -> int:
    return rv.x1 + (x_prime(rv, s) << (2 * s.q + 1))


def x23_double_prime(rv: ResidueVector, s: TauPlusSet) -> int:
    """|mu1 * X'23|_{m2 m3} with X'23 = |mu2 m3 (x2 - x3)|_{m2 m3}."""
    _check(rv, s)
    x23p = (s.mu2 * s.m3 * (rv.x2 - rv.x3)) % s.pair_modulus
    return ((3 * (1 << (s.q - 4)) + 1) * x23p) % s.pair_modulus


def x23_double_prime_closed(rv: ResidueVector, s: TauPlusSet) -> int:
    """9 m3 (x2' - x3') + (3*2^(q-5) + mu2) m3 (x2'' - x3''), mod m2 m3."""
    _check(rv, s)
    sp = split_residues(rv)
    c_lo = 3 * (1 << (s.q - 5)) + s.mu2
    v = 9 * s.m3 * (sp.x2p - sp.x3p) + c_lo * s.m3 * (sp.x2pp - sp.x3pp)
    return v % s.pair_modulus


def _cat(x: int, hi: int, lo: int) -> int:
    """Bits hi..lo of x read as one binary number."""
    return (x >> lo) & ((1 << (hi - lo + 1)) - 1)


def x_prime_eq9(rv: ResidueVector, s: TauPlusSet) -> int:
    """X' from bit slices only; negative terms replaced by complements.

    Juxtaposed bits such as x2[2] x2[1] x2[0] denote the 3-bit number they
    spell, not a product.
    """
    _check(rv, s)
    q = s.q
    _require_structural(q)
    x1, x2, x3 = rv.x1, rv.x2, rv.x3
    sp = split_residues(rv)
    n1p = ((1 << (2 * q - 2)) - 1) - sp.x1p
    n1pp = 7 - sp.x1pp
    n3p = ((1 << (q - 3)) - 1) - sp.x3p
    n3pp = 15 - sp.x3pp
    x2_3 = (x2 >> 3) & 1
    P = lambda e: 1 << e  # noqa: E731

    terms = (
        (P(q + 3) + P(q + 2) + P(q) + P(q - 1)) * (sp.x2p + n3p),
        sp.x3pp,
        9 * (n1p + sp.x2p + sp.x3p),
        P(2 * q - 2) * _cat(x2, 2, 0),
        (P(2 * q - 2) + P(2 * q - 5) + 1) * n1pp,
        P(2 * q - 6) * (sp.x2pp + sp.x3pp),
        P(2 * q - 2) * ((7 - _cat(x2, 3, 1)) + _cat(x3, 3, 1)),
        P(2 * q - 2) * (1 - x2_3) + x2_3,
        (P(q - 1) + P(q - 2) + P(q - 4) + P(q - 5)) * (sp.x2pp + n3pp),
        (7 - _cat(x3, 3, 1)),
        P(2 * q) * ((x2 & 1) + 1 - (x3 & 1)),
        _cat(x2, 3, 1),
        P(2 * q - 4) + P(2 * q - 5) + P(q - 1) + P(q - 2) + P(q - 4) + P(q - 5) - 9,
    )
    return sum(terms) % s.pair_modulus


# --- bit matrix -----------------------------------------------------------

@dataclass(frozen=True)
class BitRef:
    src: int  # 1, 2 or 3
    index: int
    inverted: bool = False

    def __str__(self) -> str:
        return f"{'~' if self.inverted else ''}x{self.src}[{self.index}]"


Cell = Union[int, BitRef]


@dataclass(frozen=True)
class BitMatrix:
    """Thirteen rows of 2q+1 cells; ``rows[r][c]`` has weight 2^c.

    ``folded_constant`` is added once after the rows are summed.
    """

    q: int
    rows: tuple[tuple[Cell, ...], ...]
    folded_constant: int

    @property
    def width(self) -> int:
        return 2 * self.q + 1

    def column_depths(self) -> list[int]:
        return [sum(1 for r in self.rows if r[c] != 0) for c in range(self.width)]

    def dump(self) -> str:
        return "\n".join(" ".join(str(c) for c in reversed(r)) for r in self.rows)


def _row_specs(q: int):
    """Each row as a list of ``(src, inverted, lo_col, hi_col, shift)``
    segments (bit index = column + shift) or bare ints for constant-1 cells.
    """
    Q = 2 * q
    return [
        [(1, True, 0, Q - 3, 3)],
        [(1, True, 3, Q, 0)],
        [(2, False, Q - 2, Q, 2 - Q), (2, False, Q - 3, Q - 3, 3 - q), Q - 4,
         (2, True, Q - 5, Q - 5, 5 - q), (2, False, q - 1, Q - 6, 5 - q), (2, False, 0, q - 4, 4)],
        [(2, True, Q - 2, Q, 3 - Q), (2, False, q, Q - 5, 4 - q), (2, False, 3, q - 1, 1),
         (1, True, 0, 2, 0)],
        [(2, False, Q, Q, -Q), (2, False, q + 2, Q - 2, 2 - q), q - 1, q - 2, (3, False, 0, q - 4, 4)],
        [(2, False, q + 3, Q - 1, 1 - q), (3, False, 3, q - 1, 1), (2, False, 0, 2, 1)],
        [(2, True, Q - 2, Q - 2, 5 - Q), (3, True, q - 1, Q - 5, 5 - q), (2, False, q - 5, q - 2, 5 - q),
         (3, False, 0, 3, 0)],
        [(3, False, Q - 2, Q, 3 - Q), (3, True, q, Q - 4, 4 - q), (2, False, q - 4, q - 1, 4 - q),
         (3, True, 0, 2, 1)],
        [(3, True, Q, Q, -Q), (3, True, q + 2, Q - 2, 2 - q), (2, False, q - 2, q + 1, 2 - q), q - 4,
         (2, False, 0, 0, 3)],
        [(3, True, q + 3, Q - 1, 1 - q), (2, False, q - 1, q + 2, 1 - q), (3, True, q - 5, q - 2, 5 - q),
         *range(4, q - 5), 2, 1],
        [(3, False, Q - 6, Q - 3, 6 - Q), (3, True, q - 4, q - 1, 4 - q)],
        [(1, True, Q - 2, Q, 2 - Q), (1, True, Q - 5, Q - 3, 5 - Q), (3, True, q - 2, q + 1, 2 - q)],
        [Q - 1, (2, False, Q - 6, Q - 3, 6 - Q), (3, True, q - 1, q + 2, 1 - q)],
    ]


@lru_cache(maxsize=None)
def build_bit_matrix(s: TauPlusSet) -> BitMatrix:
    q = s.q
    _require_structural(q)
    widths = {1: 2 * q + 1, 2: q + 1, 3: q + 1}
    rows = []
    for spec in _row_specs(q):
        row: list[Cell] = [0] * (2 * q + 1)
        for seg in spec:
            if isinstance(seg, int):
                cells = [(seg, 1)]
            else:
                src, inv, lo, hi, shift = seg
                cells = [(c, BitRef(src, c + shift, inv)) for c in range(lo, hi + 1)]
            for c, cell in cells:
                if row[c] != 0:
                    raise AssertionError(f"q={q}: column {c} assigned twice")
                if isinstance(cell, BitRef) and not 0 <= cell.index < widths[cell.src]:
                    raise AssertionError(f"q={q}: bad bit index {cell}")
                row[c] = cell
        rows.append(tuple(row))
    # The constant cells already carry the -2^(2q-2) of each of the seven
    # reentrant carries; summing the rows directly must add them back.
    folded = (N_REENTRANT << (2 * q - 2)) % s.pair_modulus
    return BitMatrix(q, tuple(rows), folded)


def bind_cell(cell: Cell, x: tuple[int, int, int]) -> int:
    if isinstance(cell, BitRef):
        return ((x[cell.src - 1] >> cell.index) & 1) ^ cell.inverted
    return cell


def bind_matrix(matrix: BitMatrix, rv: ResidueVector) -> list[list[int]]:
    """Per-column lists of bound bit values (column 0 first)."""
    x = rv.astuple()
    return [[bind_cell(r[c], x) for r in matrix.rows if r[c] != 0] for c in range(matrix.width)]


def eval_bit_matrix(matrix: BitMatrix, rv: ResidueVector) -> int:
    if rv.q != matrix.q:
        raise ValueError(f"matrix has q={matrix.q}, residues have q={rv.q}")
    _require_structural(rv.q)
    x = rv.astuple()
    total = matrix.folded_constant
    for row in matrix.rows:
        for c, cell in enumerate(row):
            if cell != 0 and bind_cell(cell, x):
                total += 1 << c
    return total % make_tau_plus(matrix.q).pair_modulus


def reentrant_fold(c: int, s: TauPlusSet) -> int:
    """Signed value standing in for a carry c out of column 2q.

    Decomposed as -2^(2q-2) + 2^(2q-2)*(1-c) + c; congruent to
    2^(2q+1)*c modulo 2^(2q+1) + 2^(2q-2) - 1.
    """
    if c not in (0, 1):
        raise ValueError(f"carry must be 0 or 1, got {c}")
    w = 1 << (2 * s.q - 2)
    return -w + w * (1 - c) + c


def make_fast_reverse(s: TauPlusSet):
    """Return ``f(x1, x2, x3) -> X`` (functional route, no validation)."""
    m2, m3, mu2, mu1 = s.m2, s.m3, s.mu2, s.mu1
    pm = s.pair_modulus
    sh = 2 * s.q + 1

    def f(x1: int, x2: int, x3: int) -> int:
        x23 = x3 + m3 * ((mu2 * (x2 - x3)) % m2)
        return x1 + (((mu1 * (x23 - x1)) % pm) << sh)

    return f
