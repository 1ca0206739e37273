import random

import pytest
from hypothesis import given, strategies as st

from tauplus.adder import ResidueVector
from tauplus.forward import forward
from tauplus.moduli import make_tau_plus
from tauplus.oracle import crt_reconstruct
from tauplus.reverse import (N_ROWS, BitRef, build_bit_matrix, crt_pair_x23, eval_bit_matrix,
                             make_fast_reverse, reentrant_fold, reverse_functional, split_residues,
                             x23_double_prime, x23_double_prime_closed, x_prime, x_prime_eq9)

S4 = make_tau_plus(4)


def endpoints(s):
    return [ResidueVector(s.q, 0, 0, 0), ResidueVector(s.q, s.m1 - 1, s.m2 - 1, s.m3 - 1)]


def random_rv(s, rng):
    return ResidueVector(s.q, rng.randrange(s.m1), rng.randrange(s.m2), rng.randrange(s.m3))


def test_pair_examples():
    assert crt_pair_x23(19, 0, S4) == 525 == 25 * 21
    assert crt_pair_x23(0, 0, S4) == 0
    assert crt_pair_x23(22, 24, S4) == 574
    with pytest.raises(ValueError):
        crt_pair_x23(23, 0, S4)


def test_functional_examples():
    assert x_prime(ResidueVector(4, 160, 19, 0), S4) == 195 == (73 * (525 - 160)) % 575
    assert x_prime(ResidueVector(4, 0, 0, 0), S4) == 0
    assert x_prime(ResidueVector(4, 511, 22, 24), S4) == 574
    assert reverse_functional(ResidueVector(4, 160, 19, 0), S4) == 100000
    assert reverse_functional(ResidueVector(4, 0, 0, 0), S4) == 0
    assert reverse_functional(ResidueVector(4, 511, 22, 24), S4) == 294399


def test_q_mismatch():
    with pytest.raises(ValueError):
        x_prime(ResidueVector(5, 0, 0, 0), S4)


@given(st.integers(min_value=3, max_value=64), st.data())
def test_functional_matches_garner(q, data):
    s = make_tau_plus(q)
    rv = ResidueVector(q, *(data.draw(st.integers(min_value=0, max_value=m - 1)) for m in s.moduli))
    x = crt_reconstruct(rv.astuple(), s.moduli)
    assert reverse_functional(rv, s) == x
    assert make_fast_reverse(s)(*rv.astuple()) == x


@given(st.integers(min_value=3, max_value=48), st.data())
def test_round_trip(q, data):
    s = make_tau_plus(q)
    x = data.draw(st.integers(min_value=0, max_value=s.dr - 1))
    assert reverse_functional(forward(x, s), s) == x


@pytest.mark.parametrize("q", [5, 6, 9, 12, 20])
def test_intermediate_closed_form(q):
    s = make_tau_plus(q)
    rng = random.Random(q)
    for rv in endpoints(s) + [random_rv(s, rng) for _ in range(500)]:
        assert x23_double_prime(rv, s) == x23_double_prime_closed(rv, s)
        # definition: mu1 * X'23 with X'23 = |mu2 m3 (x2 - x3)|_{m2 m3}
        x23p = (s.mu2 * s.m3 * (rv.x2 - rv.x3)) % s.pair_modulus
        assert x23_double_prime(rv, s) == (s.mu1 * x23p) % s.pair_modulus


def test_split_residues():
    sp = split_residues(ResidueVector(9, 1023, 700, 701))
    assert (8 * sp.x1p + sp.x1pp, 16 * sp.x2p + sp.x2pp, 16 * sp.x3p + sp.x3pp) == (1023, 700, 701)


@pytest.mark.parametrize("q", [9, 10, 11, 12, 16, 24, 32, 40])
def test_eq9_and_matrix_match_functional(q):
    s = make_tau_plus(q)
    m = build_bit_matrix(s)
    rng = random.Random(1000 + q)
    for rv in endpoints(s) + [random_rv(s, rng) for _ in range(300)]:
        ref = x_prime(rv, s)
        assert x_prime_eq9(rv, s) == ref
        assert eval_bit_matrix(m, rv) == ref


def test_eq9_endpoints():
    s = make_tau_plus(9)
    lo, hi = endpoints(s)
    assert x_prime_eq9(lo, s) == 0
    assert x_prime_eq9(hi, s) == s.pair_modulus - 1


@pytest.mark.parametrize("q", [3, 8])
def test_structural_paths_need_q9(q):
    s = make_tau_plus(q)
    with pytest.raises(ValueError):
        x_prime_eq9(ResidueVector(q, 0, 0, 0), s)
    with pytest.raises(ValueError):
        build_bit_matrix(s)


def test_matrix_shape_q9():
    s = make_tau_plus(9)
    m = build_bit_matrix(s)
    assert len(m.rows) == N_ROWS == 13
    assert all(len(r) == 19 for r in m.rows)
    # row 1, column 2q-3 holds the complement of x1[2q]
    assert m.rows[0][15] == BitRef(1, 18, True)
    assert str(m.rows[0][15]) == "~x1[18]"
    assert eval_bit_matrix(m, ResidueVector(9, 0, 0, 0)) == 0
    assert len(m.dump().splitlines()) == 13


@pytest.mark.parametrize("q", [9, 12, 16, 32])
def test_initial_depth_profile(q):
    # level-I depths of the reference reduction table, keyed by column
    expect = {2 * q - i: d for i, d in enumerate([7, 8, 10, 10, 11, 13, 12, 10])}
    expect[q] = 10
    expect.update({q - i: d for i, d in enumerate([13, 11, 8, 11, 8, 7], start=1)})
    if q >= 12:  # the low columns are disjoint from the block above
        expect.update({5: 7, 4: 7, 3: 7, 2: 8, 1: 8, 0: 8})
    d = build_bit_matrix(make_tau_plus(q)).column_depths()
    assert {c: d[c] for c in expect} == expect


def test_reentrant_fold():
    for q in range(4, 33):
        s = make_tau_plus(q)
        assert reentrant_fold(0, s) == 0
        assert reentrant_fold(1, s) == 1 - (1 << (2 * q - 2))
        for c in (0, 1):
            assert (reentrant_fold(c, s) - (c << (2 * q + 1))) % s.pair_modulus == 0
    with pytest.raises(ValueError):
        reentrant_fold(2, S4)
