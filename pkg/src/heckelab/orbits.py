"""K-orbit decomposition of finite sets of Gr(R)-points, K = GL_n(R[[t]]).

K acts through its image in GL_n(R[t]/(t^M)); for points inside a window w
the action factors through M = 2 w + 1 (truncation bound), so orbits are
computed by BFS over an explicit finite generating set of the truncated
group: elementary matrices e_ij(pi^k t^s), diagonal unit scalings, and
permutation matrices.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .ringcore import ChainRing, NotAUnit
from .lattice import (
    Entry,
    LatticeRep,
    PolyMat,
    canonicalize,
    mat_mul,
    poly_trim,
    truncation_level,
)


class InsufficientTruncation(ValueError):
    """K was truncated below the level required by the precision calculus."""


class NotAnAutomorphism(ValueError):
    """Coordinate substitution t -> sigma(t) with non-unit leading coefficient."""


OpMat = Tuple[Tuple[Entry, ...], ...]  # row-major polynomial matrix


def k_generators(ring: ChainRing, n: int, M: int) -> List[OpMat]:
    """Generators of the image of GL_n(R[[t]]) in GL_n(R[t]/(t^M))."""
    if M < 1:
        raise ValueError("truncation level must be >= 1")
    gens: List[OpMat] = []

    def ident() -> List[List[Entry]]:
        return [[(1,) if i == j else () for j in range(n)] for i in range(n)]

    # elementary e_ij(pi^k t^s): additive generators of R[t]/(t^M)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            for k in range(ring.N):
                for s in range(M):
                    m = ident()
                    m[i][j] = poly_trim([0] * s + [ring.p ** k])
                    gens.append(tuple(tuple(r) for r in m))
    # diagonal unit scalings by generators of R^*
    for u in ring.unit_gens():
        if u == 1:
            continue
        for i in range(n):
            m = ident()
            m[i][i] = (u,)
            gens.append(tuple(tuple(r) for r in m))
    # permutations: adjacent transpositions and the long cycle
    perms = [tuple(range(n))]
    for i in range(n - 1):
        s = list(range(n))
        s[i], s[i + 1] = s[i + 1], s[i]
        perms.append(tuple(s))
    if n > 2:
        perms.append(tuple(list(range(1, n)) + [0]))
    for s in perms[1:]:
        m = [[(1,) if s[i] == j else () for j in range(n)] for i in range(n)]
        gens.append(tuple(tuple(r) for r in m))
    return gens


@dataclass(frozen=True)
class OrbitDecomposition:
    points: Tuple[LatticeRep, ...]
    orbit_ids: Tuple[int, ...]           # orbit id per point (aligned)
    reps: Tuple[LatticeRep, ...]         # lexicographically minimal member per orbit
    sizes: Tuple[int, ...]
    truncation: int

    @property
    def orbit_count(self) -> int:
        return len(self.reps)

    def orbit_of(self, L: LatticeRep) -> int:
        return self._index[L]

    def __post_init__(self):
        object.__setattr__(
            self, "_index", {L: oid for L, oid in zip(self.points, self.orbit_ids)}
        )


def _point_window(L: LatticeRep) -> int:
    return max(-L.shift, L.shift + L.w, 1)


def act(ring: ChainRing, g: OpMat, L: LatticeRep, trunc: Optional[int] = None) -> LatticeRep:
    """g . L for g in GL_n(R[t]/(t^M)) acting on the ambient R((t))^n."""
    cols = mat_mul(ring, g, L.mat, trunc)
    return canonicalize(ring, L.n, cols, L.shift)


def decompose(
    points: Sequence[LatticeRep],
    ring: ChainRing,
    n: int,
    M: Optional[int] = None,
    generators: Optional[List[OpMat]] = None,
) -> OrbitDecomposition:
    """Partition the point set into K-orbits by BFS over the generators."""
    points = sorted(points)
    window = max((_point_window(L) for L in points), default=1)
    needed = truncation_level(window)
    if M is None:
        M = needed
    if M < needed:
        raise InsufficientTruncation(f"truncation {M} below calculus bound {needed}")
    gens = generators if generators is not None else k_generators(ring, n, M)
    # generators with t-degree >= shifted window act trivially on every point;
    # dropping them only skips identity moves
    index = {L: i for i, L in enumerate(points)}
    assigned = [-1] * len(points)
    orbits: List[List[int]] = []
    for start in range(len(points)):
        if assigned[start] >= 0:
            continue
        oid = len(orbits)
        queue = [start]
        assigned[start] = oid
        members = [start]
        while queue:
            cur = queue.pop()
            Lc = points[cur]
            for g in gens:
                Lg = act(ring, g, Lc)
                j = index.get(Lg)
                if j is None:
                    raise ValueError(
                        "the point set is not K-stable: orbit leaves the set"
                    )
                if assigned[j] < 0:
                    assigned[j] = oid
                    queue.append(j)
                    members.append(j)
        orbits.append(sorted(members))
    reps = tuple(points[o[0]] for o in orbits)
    sizes = tuple(len(o) for o in orbits)
    return OrbitDecomposition(tuple(points), tuple(assigned), reps, sizes, M)


# ---------------------------------------------------------------------------
# Coordinate automorphisms t -> sigma(t).
# ---------------------------------------------------------------------------


def sigma_powers(ring: ChainRing, sigma: Sequence[int], top_deg: int, width: int) -> List[Entry]:
    """sigma(t)^d mod t^width for d = 0..top_deg; sigma = (a1, a2, ...) exact."""
    a1 = sigma[0] if sigma else 0
    if not ring.is_unit(a1):
        raise NotAnAutomorphism("leading coefficient of sigma must be a unit")
    s: Entry = poly_trim([0] + [c % ring.size for c in sigma])
    powers = [(1,)]
    cur: Entry = (1,)
    for _ in range(top_deg):
        cur = _poly_mul_trunc(ring, cur, s, width)
        powers.append(cur)
    return powers


def _poly_mul_trunc(ring: ChainRing, a: Entry, b: Entry, width: int) -> Entry:
    out = [0] * min(width, max(len(a) + len(b) - 1, 1))
    for i, ca in enumerate(a):
        if ca == 0 or i >= width:
            continue
        for j, cb in enumerate(b):
            k = i + j
            if k >= width:
                break
            if cb:
                out[k] = ring.add(out[k], ring.mul(ca, cb))
    return poly_trim(out)


def apply_coordinate_automorphism(sigma: Sequence[int], L: LatticeRep) -> LatticeRep:
    """Substitute t -> sigma(t) in the generator matrix and re-canonicalize.

    The substitution fixes the central t-power: sigma(t)^shift differs from
    t^shift by a unit power series, which does not change the lattice."""
    ring = L.ring
    width = max(L.w, 1) + 1
    top = max((len(e) - 1 for col in L.mat for e in col), default=0)
    powers = sigma_powers(ring, sigma, top, width)
    cols = []
    for col in L.mat:
        new_col = []
        for e in col:
            acc: Entry = ()
            for d, c in enumerate(e):
                if c:
                    acc = _poly_add(ring, acc, tuple(ring.mul(c, x) for x in powers[d]))
            new_col.append(acc)
        cols.append(tuple(new_col))
    return canonicalize(ring, L.n, tuple(cols), L.shift)


def _poly_add(ring: ChainRing, a: Entry, b: Entry) -> Entry:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] = ring.add(out[i], c)
    return poly_trim(out)


def transport_decomposition(sigma: Sequence[int], dec: OrbitDecomposition) -> OrbitDecomposition:
    """Image of an orbit decomposition under t -> sigma(t) (sigma normalizes K)."""
    inv_img: Dict[LatticeRep, int] = {}
    for L, oid in zip(dec.points, dec.orbit_ids):
        inv_img[apply_coordinate_automorphism(sigma, L)] = oid
    new_points = sorted(inv_img)
    groups: Dict[int, List[LatticeRep]] = {}
    for L in new_points:
        groups.setdefault(inv_img[L], []).append(L)
    reps = sorted(min(g) for g in groups.values())
    rep_id = {rep: i for i, rep in enumerate(reps)}
    final_ids = tuple(rep_id[min(groups[inv_img[L]])] for L in new_points)
    sizes = tuple(sum(1 for x in final_ids if x == i) for i in range(len(reps)))
    return OrbitDecomposition(tuple(new_points), final_ids, tuple(reps), sizes, dec.truncation)
