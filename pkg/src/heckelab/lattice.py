"""Points of the affine Grassmannian over a chain ring as lattice normal forms.

A point of Gr(R) = GL_n(R((t)))/GL_n(R[[t]]) is an R[[t]]-lattice
L = t^shift * span(columns of M) with M group-valid.  The canonical form of a
point is computed in three steps:

  1. extract the maximal central power of t (the shift);
  2. reduce the remaining module L mod t^w*Lambda_0 (w minimal) to its Howell
     normal form over R, viewing R[t]/(t^w)-columns as vectors in R^(n*w) --
     the Howell form is the unique canonical generating matrix of a submodule
     of a free module over a finite chain ring, so lattice equality is
     equality of (shift, w, Howell rows);
  3. rebuild a free n-column generator matrix from the Howell rows (greedy
     Nakayama selection, completed by t^w-basis columns where needed).

Schubert closures Gr_{<=lambda}(R) are cut by exact determinantal conditions:
every k x k minor lies in t^(lambda_{n-k+1}+...+lambda_n) R[[t]] and the
determinant ideal equals t^|lambda| R[[t]] exactly.  Reduction fibers between
levels N and N+1 are affine spaces over F_q and are enumerated by exact linear
algebra, never by rejection sampling.
"""
from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .ringcore import (
    ChainRing,
    InsufficientWindow,
    LaurentSeries,
    NotInGroup,
    parse_ring_spec,
)

Entry = Tuple[int, ...]          # exact polynomial, index = t-degree, data ints
Col = Tuple[Entry, ...]
PolyMat = Tuple[Col, ...]        # tuple of columns

DEFAULT_GUARD = 10_000_000


class TooLarge(ValueError):
    """An enumeration would exceed the configured guard."""


def points_guard() -> int:
    return int(os.environ.get("HECKE_GUARD_POINTS", DEFAULT_GUARD))


def truncation_level(window: int) -> int:
    """Level M through which K must act so that the action on a window
    factors exactly (the precision calculus bound)."""
    return 2 * window + 1


def convolution_window(w1: int, w2: int) -> int:
    return w1 + w2


# ---------------------------------------------------------------------------
# Exact polynomial helpers (entries of generator matrices).
# ---------------------------------------------------------------------------


def poly_trim(a: Sequence[int]) -> Entry:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return tuple(a)


def poly_add(R: ChainRing, a: Sequence[int], b: Sequence[int]) -> Entry:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] = R.add(out[i], c)
    return poly_trim(out)


def poly_mul(R: ChainRing, a: Sequence[int], b: Sequence[int], trunc: Optional[int] = None) -> Entry:
    if not a or not b:
        return ()
    top = len(a) + len(b) - 1
    if trunc is not None:
        top = min(top, trunc)
    out = [0] * top
    for i, ca in enumerate(a):
        if ca == 0 or i >= top:
            continue
        for j, cb in enumerate(b):
            k = i + j
            if k >= top:
                break
            if cb:
                out[k] = R.add(out[k], R.mul(ca, cb))
    return poly_trim(out)


def poly_neg(R: ChainRing, a: Sequence[int]) -> Entry:
    return tuple(R.neg(c) for c in a)


def poly_val(a: Sequence[int]) -> Optional[int]:
    for i, c in enumerate(a):
        if c:
            return i
    return None


def poly_scale(R: ChainRing, a: Sequence[int], s: int) -> Entry:
    return poly_trim([R.mul(c, s) for c in a])


def mat_mul(R: ChainRing, op: Sequence[Sequence[Entry]], cols: PolyMat, trunc: Optional[int] = None) -> PolyMat:
    """(op . M) where op is row-major and M is column-major."""
    n = len(op)
    out = []
    for col in cols:
        new_col = []
        for i in range(n):
            acc: Entry = ()
            row = op[i]
            for k in range(n):
                if row[k] and col[k]:
                    acc = poly_add(R, acc, poly_mul(R, row[k], col[k], trunc))
            new_col.append(acc)
        out.append(tuple(new_col))
    return tuple(out)


def cols_as_operator(cols: PolyMat) -> Tuple[Tuple[Entry, ...], ...]:
    n = len(cols)
    return tuple(tuple(cols[k][i] for k in range(n)) for i in range(n))


def _minor(R: ChainRing, cols: PolyMat, rows_idx, cols_idx) -> Entry:
    k = len(rows_idx)
    if k == 1:
        return cols[cols_idx[0]][rows_idx[0]]
    acc: Entry = ()
    for pos, r in enumerate(rows_idx):
        sub = _minor(R, cols, rows_idx[:pos] + rows_idx[pos + 1:], cols_idx[1:])
        term = poly_mul(R, cols[cols_idx[0]][r], sub)
        acc = poly_add(R, acc, term if pos % 2 == 0 else poly_neg(R, term))
    return acc


def det_poly(R: ChainRing, cols: PolyMat) -> Entry:
    n = len(cols)
    return _minor(R, cols, tuple(range(n)), tuple(range(n)))


def k_minors(R: ChainRing, cols: PolyMat, k: int) -> List[Entry]:
    n = len(cols)
    out = []
    for rows_idx in itertools.combinations(range(n), k):
        for cols_idx in itertools.combinations(range(n), k):
            out.append(_minor(R, cols, rows_idx, cols_idx))
    return out


# ---------------------------------------------------------------------------
# Howell normal form over a chain ring.
# ---------------------------------------------------------------------------


def howell_form(R: ChainRing, width: int, rows: Sequence[Sequence[int]]) -> Tuple[Tuple[int, ...], ...]:
    """Unique canonical generating matrix of the R-span of `rows` in R^width.

    Pivot entries are pi^v; entries of earlier rows in later pivot columns are
    reduced to the canonical residues mod pi^v; annihilator rows pi^(N-v)*row
    are folded back in so that the row set is span-saturated (the Howell
    property, needed for membership testing by greedy reduction).
    """
    p, N = R.p, R.N
    work = [tuple(r) for r in rows if any(r)]
    out: List[Tuple[int, ...]] = []
    for col in range(width):
        cand = [r for r in work if r[col] != 0]
        rest = [r for r in work if r[col] == 0]
        if not cand:
            work = rest
            continue
        vmin = min(R.val(r[col]) for r in cand)
        pv = p ** vmin
        norm = []
        for r in cand:
            if R.val(r[col]) == vmin:
                u_inv = R.inv(r[col] // pv)
                norm.append(tuple(R.mul(u_inv, c) for c in r))
        pivot = min(norm)
        for r in cand:
            q = r[col] // pv
            rr = tuple(R.sub(c, R.mul(q, pc)) for c, pc in zip(r, pivot))
            if any(rr):
                rest.append(rr)
        # pivot itself reappears in `rest` as zero and is dropped
        if vmin > 0:
            ann_mult = p ** (N - vmin)
            ann = tuple(R.mul(ann_mult, c) for c in pivot)
            if any(ann):
                rest.append(ann)
        out.append(pivot)
        work = rest
    # back-reduction: entries of earlier rows at later pivots
    for i in range(len(out)):
        r = out[i]
        for j in range(i + 1, len(out)):
            pj = next(c for c in range(width) if out[j][c])
            vj = R.val(out[j][pj])
            pvj = R.p ** vj
            e = r[pj]
            rem = e % pvj
            q = (e - rem) // pvj
            if q:
                r = tuple(R.sub(c, R.mul(q, pc)) for c, pc in zip(r, out[j]))
        out[i] = r
    return tuple(out)


def howell_member(R: ChainRing, H: Sequence[Sequence[int]], v: Sequence[int]) -> bool:
    """Membership of v in the module with Howell basis H (greedy reduction)."""
    v = list(v)
    width = len(v)
    for row in H:
        c = next(i for i in range(width) if row[i])
        if v[c] == 0:
            continue
        vc = R.val(row[c])
        if R.val(v[c]) < vc:
            return False
        q = v[c] // (R.p ** vc)
        for i in range(c, width):
            if row[i]:
                v[i] = R.sub(v[i], R.mul(q, row[i]))
    return not any(v)


# ---------------------------------------------------------------------------
# Dominant coweights.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DominantCoweight:
    parts: Tuple[int, ...]

    def __post_init__(self):
        parts = tuple(int(x) for x in self.parts)
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise ValueError(f"{parts} is not weakly decreasing")
        object.__setattr__(self, "parts", parts)

    @property
    def n(self) -> int:
        return len(self.parts)

    def total(self) -> int:
        return sum(self.parts)

    def is_minuscule(self) -> bool:
        return self.parts[0] - self.parts[-1] <= 1

    def twisted(self, c: int) -> "DominantCoweight":
        return DominantCoweight(tuple(x - c for x in self.parts))

    def pairing_2rho(self) -> int:
        """<lambda, 2 rho> = sum lambda_i (n + 1 - 2i); the dimension of the
        stratum Gr_lambda for GL_n."""
        n = self.n
        return sum(self.parts[i] * (n - 1 - 2 * i) for i in range(n))

    def __iter__(self):
        return iter(self.parts)

    def __getitem__(self, i):
        return self.parts[i]


def dominance_leq(mu: Sequence[int], lam: Sequence[int]) -> bool:
    if len(mu) != len(lam) or sum(mu) != sum(lam):
        return False
    acc_m = acc_l = 0
    for a, b in zip(mu, lam):
        acc_m += a
        acc_l += b
        if acc_m > acc_l:
            return False
    return True


def dominants_below(lam: DominantCoweight) -> List[Tuple[int, ...]]:
    """All dominant mu <= lam (same total, partial sums bounded by lam's)."""
    n, tot = lam.n, lam.total()
    lo_bound = lam.parts[-1] - (lam.parts[0] - lam.parts[-1]) * n
    out = []

    def rec(prefix, remaining):
        k = len(prefix)
        if k == n:
            if remaining == 0 and dominance_leq(tuple(prefix), lam.parts):
                out.append(tuple(prefix))
            return
        hi = prefix[-1] if prefix else lam.parts[0]
        slots = n - k
        for x in range(hi, lo_bound - 1, -1):
            if x * slots < remaining:
                break
            rec(prefix + [x], remaining - x)

    rec([], tot)
    return sorted(set(out), reverse=True)


# ---------------------------------------------------------------------------
# Lattice representatives.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LatticeRep:
    """Canonical form of a point of Gr(R): L = t^shift * span(mat columns)."""

    ring: ChainRing
    n: int
    shift: int
    w: int
    howell: Tuple[Tuple[int, ...], ...]
    mat: PolyMat = field(compare=False, hash=False, repr=False)

    def key(self) -> Tuple[int, int, Tuple[Tuple[int, ...], ...]]:
        return (self.shift, self.w, self.howell)

    def __hash__(self):
        return hash((self.ring, self.n, self.shift, self.w, self.howell))

    def __eq__(self, other):
        if not isinstance(other, LatticeRep):
            return NotImplemented
        return (
            self.ring == other.ring
            and self.n == other.n
            and self.key() == other.key()
        )

    def __lt__(self, other: "LatticeRep"):
        return self.key() < other.key()

    def to_text(self) -> str:
        rows = []
        for i in range(self.n):
            rows.append("|".join(",".join(str(c) for c in self.mat[j][i]) or "0" for j in range(self.n)))
        m = ";".join(rows)
        return f"{self.ring.spec_string()}#n={self.n}#shift={self.shift}#M={m}"

    def residue_point(self) -> "LatticeRep":
        return self.reduce_level(1)

    def reduce_level(self, target_N: int) -> "LatticeRep":
        Rlow = self.ring.reduce_ring(target_N)
        cols = tuple(
            tuple(poly_trim([self.ring.reduce_data(c, target_N) for c in e]) for e in col)
            for col in self.mat
        )
        return canonicalize(Rlow, self.n, cols, self.shift)


def lattice_from_text(text: str) -> LatticeRep:
    head, nf, sf, mf = text.split("#")
    ring = parse_ring_spec(head)
    n = int(nf.split("=")[1])
    shift = int(sf.split("=")[1])
    body = mf.split("=", 1)[1]
    rows = body.split(";")
    cols: List[List[Entry]] = [[() for _ in range(n)] for _ in range(n)]
    for i, row in enumerate(rows):
        cells = row.split("|")
        for j, cell in enumerate(cells):
            coeffs = tuple(int(x) for x in cell.split(",")) if cell != "0" else ()
            cols[j][i] = poly_trim(coeffs)
    return canonicalize(ring, n, tuple(tuple(c) for c in cols), shift)


def _flatten(col: Col, w: int) -> Tuple[int, ...]:
    out = []
    for e in col:
        out.extend(list(e[:w]) + [0] * (w - min(w, len(e))))
    return tuple(out)


def _module_rows_impl(cols: PolyMat, w: int) -> List[Tuple[int, ...]]:
    """R-module generators of span(cols) mod t^w Lambda_0, as R^(n*w) rows."""
    rows = []
    n = len(cols)
    for col in cols:
        for d in range(w):
            vec = []
            for i in range(n):
                e = col[i]
                cell = [0] * w
                for deg, c in enumerate(e):
                    nd = deg + d
                    if nd < w:
                        cell[nd] = c
                vec.extend(cell)
            rows.append(tuple(vec))
    return rows


def canonicalize(ring: ChainRing, n: int, cols: PolyMat, shift: int = 0) -> LatticeRep:
    """Canonical LatticeRep of t^shift * span(cols); raises NotInGroup if the
    columns do not span a free rank-n lattice."""
    cols = tuple(tuple(poly_trim(e) for e in col) for col in cols)
    det = det_poly(ring, cols)
    if all(c % ring.p == 0 for c in det):
        raise NotInGroup("residue determinant vanishes; not a lattice basis")
    # maximal central extraction
    v0 = min(v for v in (poly_val(e) for col in cols for e in col) if v is not None)
    if v0 > 0:
        cols = tuple(tuple(e[v0:] if e else () for e in col) for col in cols)
        shift += v0
        det = det_poly(ring, cols)
    # safe window: t^W Lambda_0 <= L as soon as t^W det^{-1} is regular
    dser = LaurentSeries(ring, 0, det)
    dinv = dser.inverse(1)
    W = max(0, -dinv.vmin)
    if W == 0:
        ident = tuple(
            tuple((1,) if i == j else () for i in range(n)) for j in range(n)
        )
        return LatticeRep(ring, n, shift, 0, (), ident)
    rows = _module_rows_impl(cols, W)
    H = howell_form(ring, n * W, rows)
    # tighten the window to the minimal w with t^w Lambda_0 <= L
    w = W
    for cand in range(W):
        ok = True
        for i in range(n):
            vec = [0] * (n * W)
            vec[i * W + cand] = 1
            if not howell_member(ring, H, vec):
                ok = False
                break
        if ok:
            w = cand
            break
    if w == 0:
        ident = tuple(tuple((1,) if i == j else () for i in range(n)) for j in range(n))
        return LatticeRep(ring, n, shift, 0, (), ident)
    if w != W:
        rows = _module_rows_impl(cols, w)
        H = howell_form(ring, n * w, rows)
    mat = _canonical_matrix(ring, n, w, H)
    return LatticeRep(ring, n, shift, w, H, mat)


def _tshift_row(row: Sequence[int], n: int, w: int, d: int) -> Tuple[int, ...]:
    vec = [0] * (n * w)
    for i in range(n):
        for deg in range(w):
            c = row[i * w + deg]
            if c and deg + d < w:
                vec[i * w + deg + d] = c
    return tuple(vec)


def _span_howell(ring: ChainRing, n: int, w: int, vecs: Sequence[Sequence[int]]):
    """Howell form of the R[t]/(t^w)-span of the given flat vectors."""
    gen_rows = []
    for v in vecs:
        for d in range(w):
            gen_rows.append(_tshift_row(v, n, w, d))
    return howell_form(ring, n * w, gen_rows)


def _canonical_matrix(ring: ChainRing, n: int, w: int, H: Sequence[Sequence[int]]) -> PolyMat:
    """Free generator columns recovered from the Howell rows.

    Greedy selection over the canonical row order by S-span membership,
    pruned to an irredundant (hence minimal, by Nakayama) generating set;
    missing directions are completed by t^w * e_i columns, validated by
    comparing Howell forms so the span is unchanged."""
    rows = [tuple(r) for r in H]
    chosen: List[Tuple[int, ...]] = []
    cur = ()
    for r in rows:
        if chosen and howell_member(ring, cur, r):
            continue
        chosen.append(r)
        cur = _span_howell(ring, n, w, chosen)
    changed = True
    while changed and len(chosen) > 1:
        changed = False
        for i in range(len(chosen)):
            rest = chosen[:i] + chosen[i + 1:]
            if howell_member(ring, _span_howell(ring, n, w, rest), chosen[i]):
                chosen.pop(i)
                changed = True
                break
    cols: List[Col] = [
        tuple(poly_trim(r[i * w: (i + 1) * w]) for i in range(n)) for r in chosen
    ]
    if len(cols) > n:
        raise NotInGroup("module needs more than n generators; not a lattice")
    # colength of L from the Howell pivot valuations: |S^n| / |L-bar| = q^(N D)
    defect = sum(ring.N - ring.val(next(c for c in r if c)) for r in H)
    if defect % ring.N:
        raise NotInGroup("module size is not a lattice colength")
    D_target = n * w - defect // ring.N

    def _resval_det(cand: PolyMat) -> Optional[int]:
        det = det_poly(ring, cand)
        return next((i for i, c in enumerate(det) if c % ring.p), None)

    if len(cols) == n:
        if _resval_det(tuple(cols)) != D_target:
            raise NotInGroup("recovered generators do not span the lattice")
        return tuple(cols)
    # complete with t^w e_i columns; the candidate spans a sublattice of L,
    # so equality holds iff the determinant colengths agree
    for subset in itertools.combinations(range(n), n - len(cols)):
        cand = tuple(
            list(cols)
            + [
                tuple(((0,) * w + (1,)) if j == i else () for j in range(n))
                for i in subset
            ]
        )
        if _resval_det(cand) == D_target:
            return cand
    raise NotInGroup("could not recover a free rank-n basis")


# ---------------------------------------------------------------------------
# Membership, Smith oracle.
# ---------------------------------------------------------------------------


def gr_membership(L: LatticeRep, lam: DominantCoweight) -> bool:
    """Exact determinantal-closure membership L in Gr_{<=lambda}(R)."""
    if lam.n != L.n:
        raise ValueError("rank mismatch")
    R = L.ring
    n = L.n
    mu = [x - L.shift for x in lam.parts]
    det = det_poly(R, L.mat)
    D = sum(mu)
    if D < 0:
        return False
    dv = poly_val(det)
    if dv is None or dv != D or not R.is_unit(det[D]):
        return False
    if any(c for c in det[:D]):
        return False
    for k in range(1, n):
        ck = sum(mu[n - k:])
        if ck <= 0:
            continue
        for m in k_minors(R, L.mat, k):
            if any(m[:min(ck, len(m))]):
                return False
    return True


def smith_invariants(L: LatticeRep) -> Tuple[int, ...]:
    """Invariant-factor coweight of a point over the residue field (N = 1)."""
    if L.ring.N != 1:
        raise ValueError("smith_invariants requires a residue-field point (N = 1)")
    return stratum_tag(L)


def stratum_tag(L: LatticeRep) -> Tuple[int, ...]:
    """Smith exponents of the residue of L, as a dominant coweight."""
    R = L.ring
    p = R.p
    n = L.n
    det = det_poly(R, L.mat)
    dv = next(i for i, c in enumerate(det) if c % p)
    B = dv + 1
    # residue matrix mod t^B over F_p; classical SNF over the DVR F_p[[t]]
    A = [[None] * n for _ in range(n)]
    for j in range(n):
        for i in range(n):
            e = L.mat[j][i]
            A[i][j] = [(e[d] % p) if d < len(e) else 0 for d in range(B)]

    def val(c):
        return next((i for i, x in enumerate(c) if x), B)

    exps = []
    size = n
    while size > 0:
        best = None
        for i in range(size):
            for j in range(size):
                v = val(A[i][j])
                if best is None or v < best[0]:
                    best = (v, i, j)
        v, bi, bj = best
        if v >= B:
            raise NotInGroup("residue matrix is singular")
        A[0], A[bi] = A[bi], A[0]
        for r in range(size):
            A[r][0], A[r][bj] = A[r][bj], A[r][0]
        pivot = A[0][0]
        uinv = _series_inv_fp(pivot[v:] + [0] * v, B, p)
        for i in range(1, size):
            c = A[i][0]
            if val(c) >= B:
                continue
            q = _series_mul_fp(c[v:] + [0] * v, uinv, B, p)  # c / pivot
            for j in range(size):
                prod = _series_mul_fp(q, A[0][j], B, p)
                A[i][j] = [(x - y) % p for x, y in zip(A[i][j], prod)]
        for j in range(1, size):
            c = A[0][j]
            if val(c) >= B:
                continue
            q = _series_mul_fp(c[v:] + [0] * v, uinv, B, p)
            for i in range(size):
                prod = _series_mul_fp(q, A[i][0], B, p)
                A[i][j] = [(x - y) % p for x, y in zip(A[i][j], prod)]
        exps.append(v)
        A = [row[1:] for row in A[1:]]
        size -= 1
    exps.sort(reverse=True)
    return tuple(e + L.shift for e in exps)


def _series_mul_fp(a, b, B, p):
    out = [0] * B
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if i + j >= B:
                    break
                out[i + j] = (out[i + j] + x * y) % p
    return out


def _series_inv_fp(u, B, p):
    b0 = pow(u[0], -1, p)
    out = [b0] + [0] * (B - 1)
    for k in range(1, B):
        s = 0
        for j in range(1, k + 1):
            if j < len(u) and u[j]:
                s = (s + u[j] * out[k - j]) % p
        out[k] = (-b0 * s) % p
    return out


# ---------------------------------------------------------------------------
# Schubert enumeration and reduction fibers.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SchubertSet:
    lam: DominantCoweight
    ring: ChainRing
    points: Tuple[LatticeRep, ...]
    strata: Tuple[Tuple[int, ...], ...]

    def __len__(self):
        return len(self.points)


def enumerate_schubert(ring: ChainRing, n: int, lam: DominantCoweight, guard: Optional[int] = None) -> SchubertSet:
    if n > 3:
        raise TooLarge("only n <= 3 is supported")
    if lam.n != n:
        raise ValueError("coweight rank mismatch")
    guard = guard if guard is not None else points_guard()
    c = min(lam.parts[-1], 0)
    lam_pos = lam.twisted(c)
    w = max(lam_pos.parts[0], 1)
    ambient = ring.p ** (ring.N * n * w)
    if ambient > guard:
        raise TooLarge(f"ambient module size {ambient} exceeds guard {guard}")
    base_ring = ring.reduce_ring(1)
    pts: List[LatticeRep] = []
    for cols in _hnf_candidates(base_ring, n, lam_pos):
        L = canonicalize(base_ring, n, cols, c)
        if gr_membership(L, lam):
            pts.append(L)
    seen = {L.key() for L in pts}
    if len(seen) != len(pts):
        raise AssertionError("HNF enumeration produced duplicates")
    level = 1
    while level < ring.N:
        nxt: List[LatticeRep] = []
        for L in pts:
            nxt.extend(lift_fiber(L, lam, 1))
        pts = nxt
        level += 1
        if len(pts) > guard:
            raise TooLarge(f"{len(pts)} points at level {level} exceed guard")
    pts.sort()
    strata = tuple(stratum_tag(L.residue_point()) for L in pts)
    return SchubertSet(lam, ring, tuple(pts), strata)


def _hnf_candidates(Rk: ChainRing, n: int, lam_pos: DominantCoweight) -> Iterator[PolyMat]:
    """Column Hermite forms over F_q[[t]] covering Gr_{<=lambda}(F_q):
    lower-triangular, pivot t^(e_j), below-pivot entries of degree < e_i."""
    tot = lam_pos.total()
    emax = lam_pos.parts[0]
    p = Rk.p
    for evec in itertools.product(range(emax + 1), repeat=n):
        if sum(evec) != tot:
            continue
        free_pairs = [(i, j) for j in range(n) for i in range(j + 1, n)]
        ranges = [range(p ** evec[i]) for (i, j) in free_pairs]
        for combo in itertools.product(*ranges):
            cols: List[List[Entry]] = [[() for _ in range(n)] for _ in range(n)]
            for j in range(n):
                cols[j][j] = ((0,) * evec[j]) + (1,)
            for (pair, code) in zip(free_pairs, combo):
                i, j = pair
                coeffs = []
                x = code
                for _ in range(evec[i]):
                    coeffs.append(x % p)
                    x //= p
                cols[j][i] = poly_trim(coeffs)
            yield tuple(tuple(col) for col in cols)


# -- reduction fibers -------------------------------------------------------


def _closure_exponents(n: int, mu: Sequence[int]) -> List[Tuple[int, int]]:
    """(k, c_k) pairs for the exact vanishing conditions of Gr_{<=mu}."""
    out = []
    for k in range(1, n):
        ck = sum(mu[n - k:])
        if ck > 0:
            out.append((k, ck))
    out.append((n, sum(mu)))
    return out


def _defect_vector(R: ChainRing, cols: PolyMat, n: int, conds) -> List[int]:
    out = []
    for k, ck in conds:
        for rows_idx in itertools.combinations(range(n), k):
            for cols_idx in itertools.combinations(range(n), k):
                m = _minor(R, cols, rows_idx, cols_idx)
                for d in range(ck):
                    out.append(m[d] if d < len(m) else 0)
    return out


def _solve_affine_mod_p(p: int, A_cols: List[List[int]], rhs: List[int]) -> Optional[Tuple[List[int], List[List[int]]]]:
    """Solve sum_j x_j A_cols[j] = rhs over F_p; returns (particular, kernel basis)."""
    nrows = len(rhs)
    ncols = len(A_cols)
    M = [[A_cols[j][i] % p for j in range(ncols)] + [rhs[i] % p] for i in range(nrows)]
    piv_cols = []
    r = 0
    for c in range(ncols):
        sel = next((i for i in range(r, nrows) if M[i][c]), None)
        if sel is None:
            continue
        M[r], M[sel] = M[sel], M[r]
        inv = pow(M[r][c], -1, p)
        M[r] = [(x * inv) % p for x in M[r]]
        for i in range(nrows):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [(x - f * y) % p for x, y in zip(M[i], M[r])]
        piv_cols.append(c)
        r += 1
        if r == nrows:
            break
    for i in range(r, nrows):
        if M[i][ncols]:
            return None
    part = [0] * ncols
    for i, c in enumerate(piv_cols):
        part[c] = M[i][ncols]
    kernel = []
    free_cols = [c for c in range(ncols) if c not in piv_cols]
    for fc in free_cols:
        vec = [0] * ncols
        vec[fc] = 1
        for i, c in enumerate(piv_cols):
            vec[c] = (-M[i][fc]) % p
        kernel.append(vec)
    return part, kernel


def _complement_basis(p: int, sub: List[List[int]], space: List[List[int]]) -> List[List[int]]:
    """Vectors of `space` extending span(sub) to span(space), greedily."""
    dim = len(space[0]) if space else 0
    rows = []
    pivots = []

    def reduce_vec(v):
        v = list(v)
        for piv, row in zip(pivots, rows):
            if v[piv]:
                f = (v[piv] * pow(row[piv], -1, p)) % p
                v = [(x - f * y) % p for x, y in zip(v, row)]
        return v

    def insert(v):
        v = reduce_vec(v)
        piv = next((i for i, x in enumerate(v) if x), None)
        if piv is None:
            return False
        pivots.append(piv)
        rows.append(v)
        return True

    for v in sub:
        insert(v)
    comp = []
    for v in space:
        if insert(v):
            comp.append(v)
    return comp


def _lift_once_raw(ring: ChainRing, cols: PolyMat, mu: Sequence[int], n: int):
    """One-level lifts of span(cols) within Gr_{<=mu}, as raw column matrices
    over the ring one level up, one representative per fiber point.

    Writes candidates as M + pi^N E with E over F_q[t]/(t^w); the closure
    conditions are affine-linear in E (the linear part of each minor is a
    cofactor derivative over the residue field) and the right-multiplication
    gauge is the F_q-span of t^d-shifted residue columns, so the fiber is an
    explicit coset space.
    """
    R1 = ring.lift_ring(1)
    p, N = ring.p, ring.N
    w = max(max(mu), 1) if mu else 1
    piN = p ** N
    lift_cols = tuple(tuple(tuple(e) for e in col) for col in cols)  # data ints embed
    conds = _closure_exponents(n, mu)
    base_defect = _defect_vector(R1, lift_cols, n, conds)
    rhs = [(-(d // piN)) % p for d in base_defect]
    if any(d % piN for d in base_defect):
        raise AssertionError("base point defect not divisible by pi^N")
    res_cols = tuple(tuple(tuple(c % p for c in e) for e in col) for col in cols)
    Rk = ring.reduce_ring(1)
    # derivative of the defect w.r.t. entry (row i, col j): signed
    # complementary minors of the residue matrix, one polynomial per condition
    deriv: List[List[List[Entry]]] = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            per_cond: List[Tuple[int, Entry]] = []
            for k, ck in conds:
                for rows_idx in itertools.combinations(range(n), k):
                    for cols_idx in itertools.combinations(range(n), k):
                        if i in rows_idx and j in cols_idx:
                            ri = rows_idx.index(i)
                            cj = cols_idx.index(j)
                            sub_r = rows_idx[:ri] + rows_idx[ri + 1:]
                            sub_c = cols_idx[:cj] + cols_idx[cj + 1:]
                            m = (
                                _minor(Rk, res_cols, sub_r, sub_c)
                                if k > 1
                                else (1,)
                            )
                            if (ri + cj) % 2:
                                m = poly_neg(Rk, m)
                        else:
                            m = ()
                        per_cond.append((ck, m))
            deriv[i][j] = per_cond
    basis_cells = [(j, i, d) for j in range(n) for i in range(n) for d in range(w)]
    A_cols: List[List[int]] = []
    for (j, i, d) in basis_cells:
        vec = []
        for ck, m in deriv[i][j]:
            for deg in range(ck):
                src = deg - d
                vec.append(m[src] if 0 <= src < len(m) else 0)
        A_cols.append(vec)
    sol = _solve_affine_mod_p(p, A_cols, rhs)
    if sol is None:
        return w, None, None, None
    part, kernel = sol
    # gauge subspace: cell (j, i, d) -> t^d * (residue column i) in block j
    gauge = []
    for (j, i, d) in basis_cells:
        vec = [0] * (n * n * w)
        col_i = res_cols[i]
        for ii in range(n):
            e = col_i[ii]
            for deg, c in enumerate(e):
                nd = deg + d
                if nd < w and c:
                    vec[(j * n + ii) * w + nd] = c
        gauge.append(vec)
    comp = _complement_basis(p, gauge, kernel)
    return w, part, comp, basis_cells


def _materialize_lift(ring: ChainRing, cols: PolyMat, w: int, part, comp, basis_cells, coeffs):
    R1 = ring.lift_ring(1)
    p, N = ring.p, ring.N
    piN = p ** N
    evec = list(part)
    for c, v in zip(coeffs, comp):
        if c:
            evec = [(x + c * y) % p for x, y in zip(evec, v)]
    pert = [[list(e) for e in col] for col in cols]
    for val, (j, i, d) in zip(evec, basis_cells):
        if val:
            e = pert[j][i]
            while len(e) <= d:
                e.append(0)
            e[d] = R1.add(e[d], piN * val)
    return tuple(tuple(poly_trim(e) for e in col) for col in pert)


def _base_presentation(L: LatticeRep, lam: DominantCoweight):
    """Exact polynomial columns of t^(-lambda_n) L, inside Lambda_0.

    The central twist by t^(lambda_n) identifies Gr_{<=lambda} with the
    normalized Gr_{<=lambda - lambda_n} compatibly with reduction and
    lifting, so fibers are computed in the normalized presentation (the
    extraction shift itself is not stable under lifting)."""
    c = lam.parts[-1]
    k = L.shift - c
    if k < 0:
        raise ValueError("point does not lie in the closure (shift below lambda_n)")
    nu = [x - c for x in lam.parts]
    cols0 = tuple(
        tuple(((0,) * k + tuple(e)) if e else () for e in col) for col in L.mat
    )
    return cols0, nu, c


def lift_fiber(L: LatticeRep, lam: DominantCoweight, j: int) -> List[LatticeRep]:
    """All points of Gr_{<=lambda}(O/m^(N+j)) reducing to L."""
    if j == 0:
        return [L]
    ring = L.ring
    cols0, nu, c = _base_presentation(L, lam)
    w, part, comp, cells = _lift_once_raw(ring, cols0, nu, L.n)
    if part is None:
        return []
    out = []
    R1 = ring.lift_ring(1)
    for coeffs in itertools.product(range(ring.p), repeat=len(comp)):
        cols = _materialize_lift(ring, cols0, w, part, comp, cells, coeffs)
        child = canonicalize(R1, L.n, cols, c)
        out.extend(lift_fiber(child, lam, j - 1))
    return out


def lift_fiber_count(L: LatticeRep, lam: DominantCoweight, j: int) -> int:
    """|lift_fiber(L, lam, j)| computed without materializing the last level."""
    if j == 0:
        return 1
    ring = L.ring
    cols0, nu, _ = _base_presentation(L, lam)
    return _count_raw(ring, cols0, nu, L.n, j)


def _count_raw(ring: ChainRing, cols: PolyMat, mu, n, depth) -> int:
    w, part, comp, cells = _lift_once_raw(ring, cols, mu, n)
    if part is None:
        return 0
    if depth == 1:
        return ring.p ** len(comp)
    R1 = ring.lift_ring(1)
    total = 0
    for coeffs in itertools.product(range(ring.p), repeat=len(comp)):
        child_cols = _materialize_lift(ring, cols, w, part, comp, cells, coeffs)
        total += _count_raw(R1, child_cols, mu, n, depth - 1)
    return total
