import random

import pytest

from heckelab.ringcore import (
    EQUAL_CHAR,
    MIXED_CHAR,
    ChainRing,
    InsufficientWindow,
    LaurentMatrix,
    LaurentSeries,
    NotAUnit,
    NotInGroup,
    RingElem,
    UnsupportedRing,
    invert_elem,
    invert_matrix,
    make_ring,
    parse_ring_spec,
)

SMALL_RINGS = [
    ChainRing(EQUAL_CHAR, 2, 1),
    ChainRing(EQUAL_CHAR, 2, 3),
    ChainRing(EQUAL_CHAR, 3, 2),
    ChainRing(EQUAL_CHAR, 5, 2),
    ChainRing(MIXED_CHAR, 2, 3),
    ChainRing(MIXED_CHAR, 3, 2),
    ChainRing(MIXED_CHAR, 5, 2),
]


def test_make_ring_examples():
    r = make_ring(EQUAL_CHAR, 5, 2)
    assert r.size == 25
    r2 = make_ring(MIXED_CHAR, 5, 2)
    assert r2.size == 25
    with pytest.raises(UnsupportedRing):
        make_ring(EQUAL_CHAR, 4, 1)
    with pytest.raises(UnsupportedRing):
        make_ring(MIXED_CHAR, 5, 0)


def test_ring_spec_roundtrip():
    for s in ("Fp[x]/x^N:p=5,N=2", "Z/p^N:p=5,N=2"):
        assert parse_ring_spec(s).spec_string() == s
    with pytest.raises(UnsupportedRing):
        parse_ring_spec("Q[x]:p=5,N=1")


def test_pi_nilpotency():
    for R in SMALL_RINGS:
        assert R.pow(R.pi, R.N) == 0
        assert R.pow(R.pi, R.N - 1) != 0 or R.N == 1


@pytest.mark.parametrize("R", SMALL_RINGS, ids=lambda r: r.spec_string())
def test_ring_axioms_exhaustive(R):
    # |R| <= 625 here, so run full associativity/distributivity checks
    els = list(R.elements())
    if R.size <= 27:
        triples = [(a, b, c) for a in els for b in els for c in els]
    else:
        rng = random.Random(7)
        triples = [tuple(rng.choice(els) for _ in range(3)) for _ in range(4000)]
    for a, b, c in triples:
        assert R.add(R.add(a, b), c) == R.add(a, R.add(b, c))
        assert R.mul(R.mul(a, b), c) == R.mul(a, R.mul(b, c))
        assert R.mul(a, R.add(b, c)) == R.add(R.mul(a, b), R.mul(a, c))
        assert R.mul(a, b) == R.mul(b, a)
    for a in els:
        assert R.add(a, R.neg(a)) == 0
        assert R.mul(a, R.one) == a


@pytest.mark.parametrize("R", SMALL_RINGS, ids=lambda r: r.spec_string())
def test_unit_iff_nonzero_residue(R):
    for a in R.elements():
        if R.is_unit(a):
            assert R.mul(a, R.inv(a)) == R.one
        else:
            assert R.residue(a) == 0
            with pytest.raises(NotAUnit):
                R.inv(a)


def test_invert_elem_examples():
    Re = ChainRing(EQUAL_CHAR, 5, 2)
    one_plus_x = RingElem(Re, 1 + 5)  # 1 + x
    inv = invert_elem(one_plus_x)
    assert inv.data == Re.sub(1, 5)  # 1 - x
    Rm = ChainRing(MIXED_CHAR, 5, 2)
    assert invert_elem(RingElem(Rm, 7)).data == 18
    with pytest.raises(NotAUnit):
        invert_elem(RingElem(Re, 5))  # x is nilpotent


def test_reduce_and_shift():
    for R in SMALL_RINGS:
        if R.N < 2:
            continue
        Rlow = R.reduce_ring(R.N - 1)
        for a in R.elements():
            ra = R.reduce_data(a, R.N - 1)
            assert 0 <= ra < Rlow.size
        # reduction is a ring map
        for a in list(R.elements())[:20]:
            for b in list(R.elements())[:20]:
                assert R.reduce_data(R.mul(a, b), R.N - 1) == Rlow.mul(
                    R.reduce_data(a, R.N - 1), R.reduce_data(b, R.N - 1)
                )
        for a in R.elements():
            assert R.shift(a, 1) == R.mul(R.pi, a)


def _random_series(R, rng, vmin=-2, width=6, exact=True):
    coeffs = [rng.randrange(R.size) for _ in range(width)]
    return LaurentSeries(R, vmin, coeffs, None if exact else vmin + width)


def test_laurent_mul_matches_schoolbook():
    rng = random.Random(11)
    R = ChainRing(EQUAL_CHAR, 5, 2)
    for _ in range(50):
        a = _random_series(R, rng)
        b = _random_series(R, rng)
        c = a * b
        for v in range(-6, 10):
            direct = 0
            for i in range(-6, 10):
                direct = R.add(direct, R.mul(a.get(i), b.get(v - i)))
            assert c.get(v) == direct


def test_series_inverse_exact_window():
    rng = random.Random(13)
    for R in (ChainRing(EQUAL_CHAR, 5, 2), ChainRing(MIXED_CHAR, 5, 3)):
        for _ in range(40):
            s = _random_series(R, rng, vmin=rng.randrange(-2, 2), width=5)
            if s.residue_valuation() is None:
                continue
            inv = s.inverse(6 + 2 * abs(s.vmin))
            prod = s * inv
            hi = 6 if prod.prec is None else min(6, prod.prec)
            assert hi > 0  # the constant term is always certified
            for v in range(prod.vmin, hi):
                assert prod.get(v) == (R.one if v == 0 else 0)


def test_series_inverse_nilpotent_leading_term():
    # x + t over F_5[x]/(x^2): inverse exists in R((t))
    R = ChainRing(EQUAL_CHAR, 5, 2)
    s = LaurentSeries(R, 0, [5, 1])  # x + t
    inv = s.inverse(4)
    prod = s * inv
    for v in range(prod.vmin, 4):
        assert prod.get(v) == (1 if v == 0 else 0)


def test_series_not_invertible():
    R = ChainRing(EQUAL_CHAR, 5, 2)
    s = LaurentSeries(R, 0, [5, 10])  # x + 2x t: residue zero
    with pytest.raises(NotInGroup):
        s.inverse(3)


def test_matrix_inverse_triangular_example():
    R = ChainRing(EQUAL_CHAR, 5, 1)
    t = LaurentSeries.t_power(R, 1)
    one = LaurentSeries.const(R, 1)
    zero = LaurentSeries.zero(R)
    g = LaurentMatrix(R, [[t, one], [zero, one]])
    gi = invert_matrix(g, 3)
    assert gi.entries[0][0].get(-1) == 1
    assert gi.entries[0][1].get(-1) == R.neg(1)
    assert gi.entries[1][1].get(0) == 1
    prod = g * gi
    ident = LaurentMatrix.identity(R, 2)
    for i in range(2):
        for j in range(2):
            d = prod.entries[i][j] - ident.entries[i][j]
            hi = 3 if d.prec is None else min(3, d.prec)
            for v in range(d.vmin, hi):
                assert d.get(v) == 0


def test_matrix_identity_inverse():
    R = ChainRing(MIXED_CHAR, 5, 2)
    ident = LaurentMatrix.identity(R, 3)
    gi = invert_matrix(ident, 4)
    assert (gi * ident).entries[2][2].get(0) == 1


def test_matrix_not_in_group():
    R = ChainRing(EQUAL_CHAR, 5, 2)
    t = LaurentSeries.t_power(R, 1)
    x = LaurentSeries.const(R, 5)
    zero = LaurentSeries.zero(R)
    g = LaurentMatrix(R, [[t, zero], [zero, x]])
    with pytest.raises(NotInGroup):
        invert_matrix(g, 2)


def test_random_matrix_inverse_window():
    rng = random.Random(17)
    for R in (ChainRing(EQUAL_CHAR, 5, 2), ChainRing(MIXED_CHAR, 5, 2)):
        done = 0
        while done < 15:
            ents = [[_random_series(R, rng, vmin=rng.randrange(-1, 2), width=3) for _ in range(2)] for _ in range(2)]
            g = LaurentMatrix(R, ents)
            try:
                gi = invert_matrix(g, 4)
            except NotInGroup:
                continue
            prod = g * gi
            ident = LaurentMatrix.identity(R, 2)
            guaranteed = prod.prec()
            hi = 4 if guaranteed is None else min(4, guaranteed)
            for i in range(2):
                for j in range(2):
                    d = prod.entries[i][j] - ident.entries[i][j]
                    top = hi if d.prec is None else min(hi, d.prec)
                    for v in range(d.vmin, top):
                        assert d.get(v) == 0
            done += 1
