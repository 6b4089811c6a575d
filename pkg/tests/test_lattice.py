import itertools
import random

import pytest

from heckelab.ringcore import ChainRing, EQUAL_CHAR, MIXED_CHAR, NotInGroup
from heckelab.lattice import (
    DominantCoweight,
    LatticeRep,
    TooLarge,
    canonicalize,
    dominance_leq,
    dominants_below,
    enumerate_schubert,
    gr_membership,
    howell_form,
    howell_member,
    lattice_from_text,
    lift_fiber,
    lift_fiber_count,
    mat_mul,
    poly_trim,
    smith_invariants,
    stratum_tag,
)

R5 = ChainRing(EQUAL_CHAR, 5, 1)
R52 = ChainRing(EQUAL_CHAR, 5, 2)
Z25 = ChainRing(MIXED_CHAR, 5, 2)


def diag_lattice(ring, exps):
    n = len(exps)
    cols = tuple(
        tuple(((0,) * exps[j] + (1,)) if i == j else () for i in range(n))
        for j in range(n)
    )
    return canonicalize(ring, n, cols)


# -- Howell form ------------------------------------------------------------


def _span_brute(R, rows, width):
    """All R-combinations of rows (exponentially small cases only)."""
    out = set()
    for coeffs in itertools.product(range(R.size), repeat=len(rows)):
        v = tuple(0 for _ in range(width))
        for c, r in zip(coeffs, rows):
            v = tuple(R.add(x, R.mul(c, y)) for x, y in zip(v, r))
        out.add(v)
    return out


@pytest.mark.parametrize("R", [ChainRing(EQUAL_CHAR, 2, 2), ChainRing(MIXED_CHAR, 2, 2), ChainRing(MIXED_CHAR, 3, 2)])
def test_howell_canonical_per_module(R):
    rng = random.Random(5)
    width = 3
    seen = {}
    for _ in range(150):
        rows = [tuple(rng.randrange(R.size) for _ in range(width)) for _ in range(2)]
        H = howell_form(R, width, rows)
        span = frozenset(_span_brute(R, rows, width))
        if span in seen:
            assert seen[span] == H
        else:
            seen[span] = H
        # Howell rows generate the same span
        span2 = frozenset(_span_brute(R, list(H), width))
        assert span2 == span
        # membership agrees with the brute span
        for v in list(span)[:10]:
            assert howell_member(R, H, v)
        for _ in range(5):
            v = tuple(rng.randrange(R.size) for _ in range(width))
            assert howell_member(R, H, v) == (v in span)


# -- canonical forms --------------------------------------------------------


def random_unimodular(ring, n, w, rng):
    """Random element of GL_n(R[t]/(t^big)) as exact polynomial columns."""
    while True:
        cols = tuple(
            tuple(poly_trim([rng.randrange(ring.size) for _ in range(w)]) for _ in range(n))
            for _ in range(n)
        )
        from heckelab.lattice import det_poly

        d = det_poly(ring, cols)
        if d and ring.is_unit(d[0]):
            return cols


def test_canonicalize_gauge_invariance():
    rng = random.Random(23)
    for ring in (R52, Z25, R5):
        for _ in range(30):
            exps = sorted([rng.randrange(3) for _ in range(2)], reverse=True)
            base = diag_lattice(ring, exps)
            U = random_unimodular(ring, 2, 3, rng)
            cols2 = mat_mul(ring, [[base.mat[k][i] for k in range(2)] for i in range(2)], U)
            # span(M U) = span(M)
            L2 = canonicalize(ring, 2, cols2, base.shift)
            assert L2 == base
            assert L2.howell == base.howell


def test_canonicalize_idempotent_and_shift():
    rng = random.Random(29)
    for ring in (R52, Z25):
        for _ in range(20):
            cols = random_unimodular(ring, 2, 3, rng)
            # multiply a column by t^2: lattice changes; canonical form stable
            cols = (tuple((0, 0) + e for e in cols[0]), cols[1])
            L = canonicalize(ring, 2, cols)
            L2 = canonicalize(ring, 2, L.mat, L.shift)
            assert L == L2
            assert L.mat == L2.mat


def test_nilpotent_lattice_distinct_from_diagonal():
    # span{(t+x) e1} vs span{t e1} in GL_1 over F_5[x]/(x^2)
    ring = R52
    a = canonicalize(ring, 1, ((poly_trim([5, 1]),),))
    b = canonicalize(ring, 1, (((0, 1),),))
    assert a != b
    assert a.w == 2  # t^2 Lambda_0 inside, t Lambda_0 not
    assert b.shift == 1 and b.w == 0


def test_not_a_lattice():
    with pytest.raises(NotInGroup):
        canonicalize(R52, 2, (((1,), ()), ((5,), (5,))))


def test_to_text_roundtrip():
    rng = random.Random(31)
    for ring in (R52, Z25):
        for _ in range(10):
            cols = random_unimodular(ring, 2, 3, rng)
            L = canonicalize(ring, 2, cols, shift=-1)
            assert lattice_from_text(L.to_text()) == L


# -- membership -------------------------------------------------------------


def test_membership_base_cases():
    lam0 = DominantCoweight((0, 0))
    lam10 = DominantCoweight((1, 0))
    base = diag_lattice(R5, (0, 0))
    assert gr_membership(base, lam0)
    assert not gr_membership(base, lam10)
    p10 = diag_lattice(R5, (1, 0))
    assert gr_membership(p10, lam10)
    p11 = diag_lattice(R5, (1, 1))
    assert not gr_membership(p11, lam10)
    assert gr_membership(p11, DominantCoweight((1, 1)))
    assert gr_membership(p11, DominantCoweight((2, 0)))  # (1,1) <= (2,0)


def test_membership_negative_coweight():
    lam = DominantCoweight((0, -1))
    L = diag_lattice(R5, (0, 0))
    cols = ((((1,)), ()), ((), (1,)))
    Lm = canonicalize(R5, 2, (((1,), ()), ((), (1,))), shift=0)
    assert not gr_membership(Lm, lam)
    inv = canonicalize(R5, 2, (((1,), ()), ((), (1,))), shift=-1)
    # t^{-1} Lambda_0 has type (-1,-1)
    assert not gr_membership(inv, lam)
    half = canonicalize(R5, 2, (((0, 1), ()), ((), (1,))), shift=-1)
    # diag(1, t^{-1}): type (0,-1)
    assert gr_membership(half, lam)


def test_membership_residue_compatibility():
    lam = DominantCoweight((2, 0))
    S = enumerate_schubert(R52, 2, lam)
    for L in S.points[:50]:
        assert gr_membership(L.residue_point(), lam)


# -- Smith oracle -----------------------------------------------------------


def test_smith_diagonal():
    assert smith_invariants(diag_lattice(R5, (2, 0))) == (2, 0)
    assert smith_invariants(diag_lattice(R5, (1, 1))) == (1, 1)
    assert smith_invariants(diag_lattice(R5, (3, 1))) == (3, 1)


def test_smith_invariance_under_left_translation():
    rng = random.Random(37)
    lam = DominantCoweight((2, 0))
    base = diag_lattice(R5, (2, 0))
    for _ in range(20):
        g = random_unimodular(R5, 2, 3, rng)
        cols = mat_mul(R5, [[g[k][i] for k in range(2)] for i in range(2)], base.mat)
        L = canonicalize(R5, 2, cols)
        assert smith_invariants(L) == (2, 0)
        assert gr_membership(L, lam)


def test_smith_dominance_matches_membership():
    # over a field: mu <= lam in dominance iff member of the closure
    pts = enumerate_schubert(R5, 2, DominantCoweight((2, 0))).points
    for L in pts:
        mu = smith_invariants(L)
        assert dominance_leq(mu, (2, 0))
    assert sorted(set(dominants_below(DominantCoweight((2, 0))))) == [(1, 1), (2, 0)]


# -- enumeration ------------------------------------------------------------


def _p1_count_oracle(ring):
    """|P^1(R)| by brute force over unimodular pairs mod units."""
    seen = set()
    units = [u for u in ring.elements() if ring.is_unit(u)]
    for a in ring.elements():
        for b in ring.elements():
            if not (ring.is_unit(a) or ring.is_unit(b)):
                continue
            orbit = min((ring.mul(u, a), ring.mul(u, b)) for u in units)
            seen.add(orbit)
    return len(seen)


def test_enumerate_p1_field():
    S = enumerate_schubert(R5, 2, DominantCoweight((1, 0)))
    assert len(S) == 6
    assert _p1_count_oracle(R5) == 6


@pytest.mark.parametrize("ring", [R52, Z25])
def test_enumerate_p1_level2(ring):
    S = enumerate_schubert(ring, 2, DominantCoweight((1, 0)))
    # oracle: P^1(R) has q^(N-1) (q+1) points
    assert _p1_count_oracle(ring) == 30
    assert len(S) == 30


def _tstable_subspace_oracle_20():
    """|Gr_{<=(2,0)}(F_5)| as t-stable 2-dim subspaces of F_5^4 = (F_5[t]/t^2)^2."""
    p = 5
    # vectors are (a0, a1, b0, b1) for (a0 + a1 t, b0 + b1 t); t acts by shift
    def tact(v):
        return (0, v[0], 0, v[2])

    count = 0
    # enumerate 2-dim subspaces via row-echelon forms
    from itertools import product

    seen = 0
    # echelon forms with pivot columns (i, j), i < j
    for i in range(4):
        for j in range(i + 1, 4):
            free1 = [c for c in range(4) if c > i and c != j]
            free2 = [c for c in range(4) if c > j]
            for vals1 in product(range(p), repeat=len(free1)):
                for vals2 in product(range(p), repeat=len(free2)):
                    v1 = [0] * 4
                    v1[i] = 1
                    for c, x in zip(free1, vals1):
                        v1[c] = x
                    v2 = [0] * 4
                    v2[j] = 1
                    for c, x in zip(free2, vals2):
                        v2[c] = x
                    # t-stability: t v1, t v2 in span(v1, v2)
                    ok = True
                    for w in (tact(v1), tact(v2)):
                        # reduce w against v1, v2
                        ww = list(w)
                        if ww[i]:
                            f = ww[i]
                            ww = [(x - f * y) % p for x, y in zip(ww, v1)]
                        if ww[j]:
                            f = ww[j]
                            ww = [(x - f * y) % p for x, y in zip(ww, v2)]
                        if any(ww):
                            ok = False
                            break
                    if ok:
                        seen += 1
    return seen


def test_enumerate_20_field_matches_subspace_oracle():
    S = enumerate_schubert(R5, 2, DominantCoweight((2, 0)))
    oracle = _tstable_subspace_oracle_20()
    assert len(S) == oracle == 31
    # strata: 30 points of type (2,0), 1 point of type (1,1)
    from collections import Counter

    c = Counter(S.strata)
    assert c[(2, 0)] == 30
    assert c[(1, 1)] == 1


def test_enumerate_guard():
    import os

    with pytest.raises(TooLarge):
        enumerate_schubert(ChainRing(EQUAL_CHAR, 5, 6), 2, DominantCoweight((3, 0)), guard=1000)


def test_negative_coweight_enumeration():
    S = enumerate_schubert(R5, 2, DominantCoweight((0, -1)))
    assert len(S) == 6
    for L in S.points:
        assert gr_membership(L, DominantCoweight((0, -1)))
        assert L.shift == -1 or (L.shift == 0 and False)


# -- lifting ----------------------------------------------------------------


def test_lift_fiber_base_point():
    lam = DominantCoweight((0, 0))
    base = diag_lattice(R5, (0, 0))
    fib = lift_fiber(base, lam, 1)
    assert len(fib) == 1
    assert fib[0].ring.N == 2


@pytest.mark.parametrize("flavor", [EQUAL_CHAR, MIXED_CHAR])
def test_lift_fiber_smooth_counts(flavor):
    ring1 = ChainRing(flavor, 5, 1)
    lam = DominantCoweight((1, 0))
    S = enumerate_schubert(ring1, 2, lam)
    for L in S.points:
        fib = lift_fiber(L, lam, 1)
        # every point of P^1(F_5) has exactly q^{j d_lambda} = 5 lifts
        assert len(fib) == 5
        assert len(set(fib)) == len(fib)
        for Lp in fib:
            assert Lp.reduce_level(1) == L
    assert sum(lift_fiber_count(L, lam, 1) for L in S.points) == 30


def test_lift_fiber_smooth_counts_match_dimension():
    # fiber count over smooth points is q^{j * d_lambda}
    lam = DominantCoweight((1, 0))
    d = lam.pairing_2rho()
    assert d == 1
    S = enumerate_schubert(R5, 2, lam)
    for L in S.points[:3]:
        assert lift_fiber_count(L, lam, 2) == 5 ** (2 * d)


def test_lift_fiber_singular_point():
    lam = DominantCoweight((2, 0))
    sing = diag_lattice(R5, (1, 1))
    assert gr_membership(sing, lam)
    fib = lift_fiber(sing, lam, 1)
    # tangent space at the cone point is 3-dimensional: 125 lifts, not q^2 = 25
    assert len(fib) == 125
    assert len(set(fib)) == 125
    smooth = diag_lattice(R5, (2, 0))
    assert len(lift_fiber(smooth, lam, 1)) == 25


def test_lift_then_reduce_is_identity():
    lam = DominantCoweight((2, 0))
    S = enumerate_schubert(R5, 2, lam)
    for L in S.points[:6]:
        for Lp in lift_fiber(L, lam, 1):
            assert Lp.reduce_level(1) == L
            assert gr_membership(Lp, lam)


def test_level2_schubert_20_count():
    for ring in (R52, Z25):
        S = enumerate_schubert(ring, 2, DominantCoweight((2, 0)))
        # 30 smooth residue points x 25 + 125 over the cone point
        assert len(S) == 30 * 25 + 125 == 875
