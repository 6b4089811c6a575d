"""Root-system combinatorics and Chevalley-basis Lie algebras mod p.

Roots are integer coordinate vectors in the simple-root basis, generated from
the Cartan matrix by root strings.  Structure constants N_{a,b} = +-(p+1) are
fixed by the extraspecial-pair convention (positive roots ordered by height,
then lexicographically): the extraspecial pair of each non-simple positive
root gets the positive sign and every other special pair is derived from one
Jacobi identity against the extraspecial pair; mixed-sign brackets reduce via
the cyclic identity N_{x,y}/(z,z) = N_{y,z}/(x,x) for x + y + z = 0.  The
construction self-audits: Jacobi over Z on all basis triples, bracket
magnitudes against root-string lengths, and [X_a, X_-a] = H_a.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

Vec = Tuple[int, ...]


class CharTooSmall(ValueError):
    """p does not satisfy the characteristic hypothesis p > max(a_g, 4(h-1))."""


class DecompositionFailure(RuntimeError):
    """ad(h0)-eigenspaces do not assemble into the expected irreducibles."""


class ChevalleyAuditError(RuntimeError):
    """Internal consistency audit of the structure constants failed."""


SUPPORTED = {
    ("A", 1), ("A", 2), ("A", 3), ("A", 4),
    ("B", 2), ("B", 3),
    ("C", 3),
    ("D", 4),
    ("G", 2),
}


def cartan_matrix(family: str, rank: int) -> List[List[int]]:
    """C[i][j] = <alpha_j, alpha_i^vee>."""
    C = [[2 if i == j else 0 for j in range(rank)] for i in range(rank)]

    def link(i, j, cij=-1, cji=-1):
        C[i][j] = cij
        C[j][i] = cji

    if family == "A":
        for i in range(rank - 1):
            link(i, i + 1)
    elif family == "B":
        # last simple root short: <alpha_{r-1}, alpha_r^vee> = -2
        for i in range(rank - 2):
            link(i, i + 1)
        link(rank - 2, rank - 1, -1, -2)
    elif family == "C":
        # last simple root long
        for i in range(rank - 2):
            link(i, i + 1)
        link(rank - 2, rank - 1, -2, -1)
    elif family == "D":
        if rank < 3:
            raise ValueError("D needs rank >= 3")
        for i in range(rank - 2):
            link(i, i + 1)
        link(rank - 3, rank - 1)
    elif family == "G":
        if rank != 2:
            raise ValueError("G has rank 2")
        link(0, 1, -1, -3)
    else:
        raise ValueError(f"unknown family {family}")
    return C


@dataclass(frozen=True)
class RootSystemData:
    family: str
    rank: int
    cartan: Tuple[Tuple[int, ...], ...]
    pos_roots: Tuple[Vec, ...]           # height then lex, coordinates in simple basis
    lengths2: Tuple[int, ...]            # (beta, beta) per positive root
    simple_lengths2: Tuple[int, ...]     # (alpha_i, alpha_i) = 2 d_i
    coroot_coords: Tuple[Vec, ...]       # beta^vee in the simple-coroot basis
    coxeter: int
    exponents: Tuple[int, ...]           # ascending, with multiplicity
    marks_a: Tuple[int, ...]             # 2 rho^vee = sum a_i alpha_i^vee
    a_max: int
    char_bound: int

    @property
    def dim(self) -> int:
        return self.rank + 2 * len(self.pos_roots)

    def height(self, beta: Vec) -> int:
        return sum(beta)

    def pairing_with_simple_coroot(self, beta: Vec, i: int) -> int:
        return sum(self.cartan[i][j] * beta[j] for j in range(self.rank))


def build_root_system(family: str, rank: int) -> RootSystemData:
    if (family, rank) not in SUPPORTED:
        raise ValueError(f"type {family}_{rank} is outside the v1 table")
    C = cartan_matrix(family, rank)
    # symmetrizer: d_i C_ij = d_j C_ji, minimal positive integers
    d = _symmetrizer(C, rank)

    def pairing(beta: Vec, i: int) -> int:
        return sum(C[i][j] * beta[j] for j in range(rank))

    simples = [tuple(1 if j == i else 0 for j in range(rank)) for i in range(rank)]
    roots = set(simples)
    frontier = list(simples)
    while frontier:
        new = []
        for beta in frontier:
            for i in range(rank):
                # down-string length p, then beta + alpha_i is a root iff
                # p - <beta, alpha_i^vee> > 0
                p_down = 0
                cur = list(beta)
                while True:
                    cur[i] -= 1
                    t = tuple(cur)
                    if all(x == 0 for x in t):
                        p_down += 1
                        break
                    if t in roots or tuple(-x for x in t) in roots:
                        p_down += 1
                    else:
                        break
                if p_down - pairing(beta, i) > 0:
                    up = list(beta)
                    up[i] += 1
                    t = tuple(up)
                    if t not in roots:
                        roots.add(t)
                        new.append(t)
        frontier = new
    pos = sorted(roots, key=lambda b: (sum(b), b))

    def len2(beta: Vec) -> int:
        s = Fraction(0)
        for i in range(rank):
            for j in range(rank):
                s += beta[i] * beta[j] * d[i] * C[i][j]
        assert s.denominator == 1
        return int(s)

    lengths2 = tuple(len2(b) for b in pos)
    coroots = []
    for b, l2 in zip(pos, lengths2):
        cc = []
        for i in range(rank):
            val = Fraction(2 * d[i] * b[i], l2)
            assert val.denominator == 1
            cc.append(int(val))
        coroots.append(tuple(cc))
    marks = tuple(sum(c[i] for c in coroots) for i in range(rank))
    heights = [sum(b) for b in pos]
    h = max(heights) + 1
    if 2 * len(pos) != rank * h:
        raise ChevalleyAuditError("|R+| != rank * h / 2")
    # exponents: conjugate of the height-count partition
    mult = [0] * (h + 1)
    for ht in heights:
        mult[ht] += 1
    exps = sorted(
        e
        for j in range(1, rank + 1)
        for e in [sum(1 for ht in range(1, h + 1) if mult[ht] >= j)]
        if e > 0
    )
    if len(exps) != rank or sum(2 * e + 1 for e in exps) != rank + 2 * len(pos):
        raise ChevalleyAuditError("exponent extraction failed")
    a_max = max(marks)
    return RootSystemData(
        family,
        rank,
        tuple(tuple(row) for row in C),
        tuple(pos),
        lengths2,
        tuple(2 * di for di in d),
        tuple(coroots),
        h,
        tuple(exps),
        marks,
        a_max,
        max(a_max, 4 * (h - 1)),
    )


def _symmetrizer(C, rank) -> List[int]:
    d = [Fraction(0)] * rank
    d[0] = Fraction(1)
    changed = True
    while changed:
        changed = False
        for i in range(rank):
            for j in range(rank):
                if C[i][j] and d[i] and not d[j]:
                    d[j] = d[i] * Fraction(C[i][j], C[j][i])
                    changed = True
    lcm = 1
    for x in d:
        if x == 0:
            raise ValueError("Cartan matrix is not connected")
        lcm = lcm * x.denominator // _gcd(lcm, x.denominator)
    out = [int(x * lcm) for x in d]
    g = 0
    for x in out:
        g = _gcd(g, x)
    return [x // g for x in out]


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


# ---------------------------------------------------------------------------
# Structure constants.
# ---------------------------------------------------------------------------


class ChevalleyBasis:
    """Integer structure constants for the basis {H_i} u {X_beta}."""

    def __init__(self, rsd: RootSystemData):
        self.rsd = rsd
        self._root_set = set(rsd.pos_roots) | {tuple(-x for x in b) for b in rsd.pos_roots}
        self._pos_index = {b: k for k, b in enumerate(rsd.pos_roots)}
        self._len2 = {b: l for b, l in zip(rsd.pos_roots, rsd.lengths2)}
        for b, l in list(self._len2.items()):
            self._len2[tuple(-x for x in b)] = l
        self._N: Dict[Tuple[Vec, Vec], int] = {}
        self._build_special_table()
        self._audit()

    # -- root helpers --------------------------------------------------------

    def is_root(self, b: Vec) -> bool:
        return b in self._root_set

    def string_down(self, a: Vec, b: Vec) -> int:
        """max k with b - k a a root."""
        k = 0
        cur = b
        while True:
            cur = tuple(x - y for x, y in zip(cur, a))
            if cur in self._root_set:
                k += 1
            else:
                return k

    def _special_pairs(self, g: Vec) -> List[Tuple[Vec, Vec]]:
        out = []
        for a in self.rsd.pos_roots:
            b = tuple(x - y for x, y in zip(g, a))
            if b in self._pos_index and self._order(a) < self._order(b):
                out.append((a, b))
        return out

    def _order(self, b: Vec) -> Tuple[int, Vec]:
        return (sum(b), b)

    def _build_special_table(self):
        for g in self.rsd.pos_roots:
            if sum(g) < 2:
                continue
            pairs = sorted(self._special_pairs(g), key=lambda ab: self._order(ab[0]))
            if not pairs:
                raise ChevalleyAuditError(f"no special pair for {g}")
            a0, b0 = pairs[0]  # extraspecial
            self._N[(a0, b0)] = self.string_down(a0, b0) + 1
            for (xi, eta) in pairs[1:]:
                self._N[(xi, eta)] = self._derive_special(g, a0, b0, xi, eta)

    def _derive_special(self, g: Vec, a0: Vec, b0: Vec, xi: Vec, eta: Vec) -> int:
        """Jacobi for (X_{-a0}, X_xi, X_eta); all other brackets are known."""
        neg_a0 = tuple(-x for x in a0)
        lhs_coef = Fraction(self._n_general(neg_a0, g))
        # [[X_{-a0}, X_xi], X_eta]
        term1 = Fraction(0)
        s1 = tuple(x - y for x, y in zip(xi, a0))
        if s1 in self._root_set:
            term1 = Fraction(self._n_general(neg_a0, xi)) * self._n_general(s1, eta)
        # [X_xi, [X_{-a0}, X_eta]]
        term2 = Fraction(0)
        s2 = tuple(x - y for x, y in zip(eta, a0))
        if s2 in self._root_set:
            term2 = Fraction(self._n_general(neg_a0, eta)) * self._n_general(xi, s2)
        # special case: xi - a0 = 0 or eta - a0 = 0 cannot happen (a0 minimal)
        if all(x == 0 for x in s1) or all(x == 0 for x in s2):
            raise ChevalleyAuditError("extraspecial pair collided with a special pair")
        val = (term1 + term2) / lhs_coef
        if val.denominator != 1:
            raise ChevalleyAuditError(f"non-integral constant for pair ({xi}, {eta})")
        n = int(val)
        if abs(n) != self.string_down(xi, eta) + 1:
            raise ChevalleyAuditError(
                f"|N| != p+1 for pair ({xi}, {eta}): {n}"
            )
        return n

    def _n_general(self, u: Vec, v: Vec) -> int:
        """N_{u,v} for arbitrary-sign roots with u + v a root."""
        s = tuple(x + y for x, y in zip(u, v))
        if s not in self._root_set:
            raise ChevalleyAuditError("bracket of non-adjacent roots requested")
        key = (u, v)
        if key in self._N:
            return self._N[key]
        upos = u in self._pos_index
        vpos = v in self._pos_index
        if upos and vpos:
            if self._order(u) < self._order(v):
                n = self._N.get((u, v))
                if n is None:
                    raise ChevalleyAuditError("special table incomplete")
            else:
                n = -self._n_general(v, u)
        elif not upos and not vpos:
            n = -self._n_general(tuple(-x for x in u), tuple(-x for x in v))
        else:
            # cyclic identity on (u, v, z) with z = -u-v:
            # N_{u,v} / (z,z) = N_{v,z} / (u,u)
            z = tuple(-x for x in s)
            val = Fraction(self._len2[z], self._len2[u]) * self._n_general(v, z)
            if val.denominator != 1:
                raise ChevalleyAuditError("cyclic reduction produced a fraction")
            n = int(val)
        self._N[key] = n
        return n

    # -- public bracket on basis indices -------------------------------------

    # basis layout: 0..r-1 -> H_i; then X_beta for beta in pos order; then X_{-beta}

    def basis_size(self) -> int:
        return self.rsd.rank + 2 * len(self.rsd.pos_roots)

    def index_of_root(self, b: Vec) -> int:
        r = self.rsd.rank
        if b in self._pos_index:
            return r + self._pos_index[b]
        return r + len(self.rsd.pos_roots) + self._pos_index[tuple(-x for x in b)]

    def root_of_index(self, k: int) -> Optional[Vec]:
        r = self.rsd.rank
        np = len(self.rsd.pos_roots)
        if k < r:
            return None
        if k < r + np:
            return self.rsd.pos_roots[k - r]
        return tuple(-x for x in self.rsd.pos_roots[k - r - np])

    def coroot_coords(self, b: Vec) -> Vec:
        if b in self._pos_index:
            return self.rsd.coroot_coords[self._pos_index[b]]
        neg = tuple(-x for x in b)
        return tuple(-c for c in self.rsd.coroot_coords[self._pos_index[neg]])

    def bracket_basis(self, i: int, j: int) -> Dict[int, int]:
        """[basis_i, basis_j] as a sparse integer coordinate map."""
        r = self.rsd.rank
        bi = self.root_of_index(i)
        bj = self.root_of_index(j)
        if bi is None and bj is None:
            return {}
        if bi is None:
            val = self.rsd.pairing_with_simple_coroot(bj, i)
            return {j: val} if val else {}
        if bj is None:
            val = -self.rsd.pairing_with_simple_coroot(bi, j)
            return {i: val} if val else {}
        s = tuple(x + y for x, y in zip(bi, bj))
        if all(x == 0 for x in s):
            cc = self.coroot_coords(bi)
            return {k: c for k, c in enumerate(cc) if c}
        if s in self._root_set:
            n = self._n_general(bi, bj)
            return {self.index_of_root(s): n} if n else {}
        return {}

    def bracket_table(self) -> List[List[Dict[int, int]]]:
        m = self.basis_size()
        return [[self.bracket_basis(i, j) for j in range(m)] for i in range(m)]

    # -- audits ---------------------------------------------------------------

    def _audit(self):
        m = self.basis_size()
        table = self.bracket_table()

        def brk(u: Dict[int, int], v: Dict[int, int]) -> Dict[int, int]:
            out: Dict[int, int] = {}
            for a, ca in u.items():
                for b, cb in v.items():
                    for k, c in table[a][b].items():
                        out[k] = out.get(k, 0) + ca * cb * c
            return {k: c for k, c in out.items() if c}

        # antisymmetry and Jacobi over Z, exhaustively on basis triples
        for i in range(m):
            for j in range(m):
                lhs = table[i][j]
                rhs = {k: -c for k, c in table[j][i].items()}
                if lhs != rhs:
                    raise ChevalleyAuditError("antisymmetry failed")
        for i in range(m):
            ei = {i: 1}
            for j in range(i + 1, m):
                ej = {j: 1}
                for k in range(j + 1, m):
                    ek = {k: 1}
                    acc: Dict[int, int] = {}
                    for u, v, w in ((ei, ej, ek), (ej, ek, ei), (ek, ei, ej)):
                        for key, c in brk(brk(u, v), w).items():
                            acc[key] = acc.get(key, 0) + c
                    if any(acc.values()):
                        raise ChevalleyAuditError(f"Jacobi failed on basis triple {(i, j, k)}")
        # [X_b, X_-b] = H_b for every positive root
        for b in self.rsd.pos_roots:
            got = table[self.index_of_root(b)][self.index_of_root(tuple(-x for x in b))]
            want = {k: c for k, c in enumerate(self.coroot_coords(b)) if c}
            if got != want:
                raise ChevalleyAuditError(f"[X, X^-] != H for root {b}")


def chevalley_structure_constants(rsd: RootSystemData) -> ChevalleyBasis:
    return ChevalleyBasis(rsd)


# ---------------------------------------------------------------------------
# Lie algebra mod p and the principal triple.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LieElement:
    coords: Tuple[int, ...]   # over F_p in the Chevalley basis

    def is_zero(self):
        return not any(self.coords)


class LieAlgebraModP:
    def __init__(self, basis: ChevalleyBasis, p: int):
        self.basis = basis
        self.p = p
        self.dim = basis.basis_size()
        self._table = basis.bracket_table()

    def element(self, sparse: Dict[int, int]) -> LieElement:
        v = [0] * self.dim
        for k, c in sparse.items():
            v[k] = c % self.p
        return LieElement(tuple(v))

    def bracket(self, x: LieElement, y: LieElement) -> LieElement:
        p = self.p
        out = [0] * self.dim
        for a, ca in enumerate(x.coords):
            if ca == 0:
                continue
            row = self._table[a]
            for b, cb in enumerate(y.coords):
                if cb == 0:
                    continue
                for k, c in row[b].items():
                    out[k] = (out[k] + ca * cb * c) % p
        return LieElement(tuple(out))

    def ad_matrix(self, x: LieElement) -> List[List[int]]:
        cols = []
        for j in range(self.dim):
            img = self.bracket(x, LieElement(tuple(1 if k == j else 0 for k in range(self.dim))))
            cols.append(list(img.coords))
        return [[cols[j][i] for j in range(self.dim)] for i in range(self.dim)]

    def scale(self, c: int, x: LieElement) -> LieElement:
        return LieElement(tuple((c * v) % self.p for v in x.coords))

    def sub(self, x: LieElement, y: LieElement) -> LieElement:
        return LieElement(tuple((a - b) % self.p for a, b in zip(x.coords, y.coords)))


def _rank_mod_p(M: List[List[int]], p: int) -> int:
    M = [row[:] for row in M]
    rows = len(M)
    cols = len(M[0]) if rows else 0
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if M[i][c] % p), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = pow(M[r][c], -1, p)
        M[r] = [(x * inv) % p for x in M[r]]
        for i in range(rows):
            if i != r and M[i][c] % p:
                f = M[i][c]
                M[i] = [(x - f * y) % p for x, y in zip(M[i], M[r])]
        r += 1
        if r == rows:
            break
    return r


def principal_triple(rsd: RootSystemData, p: int, basis: Optional[ChevalleyBasis] = None):
    """(e, h0, f) with h0 = sum a_i H_i, e = sum X_{alpha_i}, f = sum a_i X_{-alpha_i}."""
    if p <= rsd.char_bound:
        raise CharTooSmall(f"p = {p} <= bound {rsd.char_bound} for {rsd.family}_{rsd.rank}")
    basis = basis or chevalley_structure_constants(rsd)
    alg = LieAlgebraModP(basis, p)
    r = rsd.rank
    simples = [tuple(1 if j == i else 0 for j in range(r)) for i in range(r)]
    e = alg.element({basis.index_of_root(s): 1 for s in simples})
    h0 = alg.element({i: rsd.marks_a[i] for i in range(r)})
    f = alg.element(
        {basis.index_of_root(tuple(-x for x in s)): rsd.marks_a[i] for i, s in enumerate(simples)}
    )
    # sl2 relations
    if alg.sub(alg.bracket(h0, e), alg.scale(2, e)).coords != (0,) * alg.dim:
        raise DecompositionFailure("[h0, e] != 2e")
    if alg.sub(alg.bracket(h0, f), alg.scale(-2 % p, f)).coords != (0,) * alg.dim:
        raise DecompositionFailure("[h0, f] != -2f")
    if alg.sub(alg.bracket(e, f), h0).coords != (0,) * alg.dim:
        raise DecompositionFailure("[e, f] != h0")
    return alg, e, h0, f


def centralizer_dimension(alg: LieAlgebraModP, elems: Sequence[LieElement]) -> int:
    rows = []
    for x in elems:
        rows.extend(alg.ad_matrix(x))
    return alg.dim - _rank_mod_p(rows, alg.p)


def regularity_check(alg: LieAlgebraModP, e: LieElement, h0: LieElement, rank: int) -> bool:
    return (
        centralizer_dimension(alg, [e]) == rank
        and centralizer_dimension(alg, [h0]) == rank
    )


def sl2_decomposition(rsd: RootSystemData, alg: LieAlgebraModP, h0: LieElement) -> Tuple[int, ...]:
    """Multiset of highest weights of the ad-representation: expect {2 d_i}."""
    p = alg.p
    M = alg.ad_matrix(h0)
    top = 2 * (rsd.coxeter - 1)
    dims = {}
    for k in range(0, top + 1, 2):
        Mk = [row[:] for row in M]
        for i in range(alg.dim):
            Mk[i][i] = (Mk[i][i] - k) % p
        dims[k] = alg.dim - _rank_mod_p(Mk, p)
    weights = []
    for k in range(2, top + 1, 2):
        mult = dims[k] - dims.get(k + 2, 0)
        if mult < 0:
            raise DecompositionFailure("eigenspace dimensions are not unimodal")
        weights.extend([k] * mult)
    expected = sorted(2 * d for d in rsd.exponents)
    if sorted(weights) != expected:
        raise DecompositionFailure(
            f"highest weights {sorted(weights)} != 2 * exponents {expected}"
        )
    # dimension audit: sum of irreducible dimensions fills the algebra
    if sum(w + 1 for w in weights) != alg.dim:
        raise DecompositionFailure("irreducible dimensions do not fill dim g")
    return tuple(sorted(weights))


def centralizer_of_triple(alg: LieAlgebraModP, e, h0, f) -> int:
    return centralizer_dimension(alg, [e, h0, f])


def nice_level_bound(rsd: RootSystemData) -> int:
    """Symmetric-power vanishing depth required of the SL_2-bundle."""
    if rsd.family == "D" and rsd.rank % 2 == 0:
        return 4 * (2 * rsd.rank - 3)
    exps = sorted(rsd.exponents)
    if rsd.rank == 1:
        # rank-1 fallback: single exponent
        return 2 * exps[-1]
    return 2 * exps[-1] + 2 * exps[-2]


def sl2_certificate(family: str, rank: int, p: int) -> dict:
    """Full check suite as a JSON-ready certificate."""
    rsd = build_root_system(family, rank)
    out = {
        "type": f"{family}{rank}",
        "p": p,
        "rank": rsd.rank,
        "coxeter": rsd.coxeter,
        "exponents": list(rsd.exponents),
        "marks_a": list(rsd.marks_a),
        "a_max": rsd.a_max,
        "char_bound": rsd.char_bound,
        "nice_level_bound": nice_level_bound(rsd),
    }
    basis = chevalley_structure_constants(rsd)
    alg, e, h0, f = principal_triple(rsd, p, basis)
    out["sl2_relations"] = True
    out["regular"] = regularity_check(alg, e, h0, rsd.rank)
    out["highest_weights"] = list(sl2_decomposition(rsd, alg, h0))
    out["triple_centralizer_dim"] = centralizer_of_triple(alg, e, h0, f)
    out["pass"] = bool(
        out["regular"]
        and out["triple_centralizer_dim"] == 0
        and out["highest_weights"] == sorted(2 * d for d in rsd.exponents)
    )
    return out
