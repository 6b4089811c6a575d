"""The big local Hecke algebra: K-bi-invariant rational functions on Gr(R).

A Distribution is a finitely supported function on lattice points with exact
rational values, constant on K-orbits, convolved against counting measure
normalized by vol(K) = 1:

    (mu1 * mu2)(x K) = sum over y K in supp(mu1) of mu1(y) mu2(y^{-1} x).

The sum is computed in the equivalent pair form: for every pair of support
points (y, z), the product lattice y z Lambda_0 accumulates mu1(y) mu2(z).
Group lifts are the canonical generator matrices, which are exact polynomial
matrices times central t-powers, so no truncation ever happens.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .ringcore import ChainRing, Rational
from .lattice import (
    LatticeRep,
    PolyMat,
    canonicalize,
    cols_as_operator,
    mat_mul,
    points_guard,
)
from .orbits import OrbitDecomposition


class NotBiInvariant(ValueError):
    """Distribution is not certified constant on K-orbits."""


class SupportNotCovered(ValueError):
    """An orbit decomposition does not cover the support of the distribution."""


@dataclass(frozen=True)
class Distribution:
    """Finitely supported K-bi-invariant Q-valued function on Gr(R)."""

    ring: ChainRing
    n: int
    values: Tuple[Tuple[LatticeRep, Rational], ...]
    window: int
    invariant_certified: bool = False
    label: str = ""

    @staticmethod
    def from_map(
        ring: ChainRing,
        n: int,
        mapping: Dict[LatticeRep, Rational],
        certified: bool = False,
        label: str = "",
    ) -> "Distribution":
        items = tuple(sorted(((L, Fraction(v)) for L, v in mapping.items() if v != 0)))
        window = 0
        for L, _ in items:
            window = max(window, -L.shift, L.shift + L.w)
        return Distribution(ring, n, items, window, certified, label)

    @staticmethod
    def delta_basepoint(ring: ChainRing, n: int) -> "Distribution":
        ident = tuple(tuple((1,) if i == j else () for i in range(n)) for j in range(n))
        base = canonicalize(ring, n, ident)
        return Distribution.from_map(ring, n, {base: Fraction(1)}, certified=True, label="delta_e")

    @staticmethod
    def orbit_indicator(dec: OrbitDecomposition, orbit_id: int, ring: ChainRing, n: int) -> "Distribution":
        pts = {
            L: Fraction(1)
            for L, oid in zip(dec.points, dec.orbit_ids)
            if oid == orbit_id
        }
        return Distribution.from_map(ring, n, pts, certified=True, label=f"orbit{orbit_id}")

    def as_dict(self) -> Dict[LatticeRep, Rational]:
        return dict(self.values)

    def support(self) -> Tuple[LatticeRep, ...]:
        return tuple(L for L, _ in self.values)

    def is_zero(self) -> bool:
        return not self.values

    def total_mass(self) -> Rational:
        return sum((v for _, v in self.values), Fraction(0))

    def max_abs(self) -> Rational:
        return max((abs(v) for _, v in self.values), default=Fraction(0))

    def __add__(self, other: "Distribution") -> "Distribution":
        acc = dict(self.values)
        for L, v in other.values:
            acc[L] = acc.get(L, Fraction(0)) + v
        return Distribution.from_map(self.ring, self.n, acc, certified=False)

    def __sub__(self, other: "Distribution") -> "Distribution":
        acc = dict(self.values)
        for L, v in other.values:
            acc[L] = acc.get(L, Fraction(0)) - v
        return Distribution.from_map(self.ring, self.n, acc, certified=False)

    def scale(self, c: Rational) -> "Distribution":
        return Distribution.from_map(
            self.ring, self.n, {L: v * c for L, v in self.values}, self.invariant_certified, self.label
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, Distribution):
            return NotImplemented
        return self.ring == other.ring and self.n == other.n and self.values == other.values

    def __hash__(self):
        return hash((self.ring, self.n, self.values))

    def to_json_obj(self) -> dict:
        return {
            "ring": self.ring.spec_string(),
            "n": self.n,
            "entries": [
                {
                    "point": L.to_text(),
                    "value_num": v.numerator,
                    "value_den": v.denominator,
                }
                for L, v in self.values
            ],
        }


def _lift_cols(L: LatticeRep) -> PolyMat:
    """Exact polynomial columns of t^(-min(shift,0)) L; caller tracks shift."""
    return L.mat


def convolve(mu1: Distribution, mu2: Distribution, guard: Optional[int] = None) -> Distribution:
    """Exact convolution with vol(K) = 1.

    Accumulates mu1(y) mu2(z) at the product lattice y z Lambda_0 over all
    support pairs; this equals sum_{yK} mu1(y) mu2(y^{-1} x) at every x, with
    the canonical generator matrix of y as the group lift (values do not
    depend on the lift since mu2 is right-K-invariant).
    """
    if mu1.ring != mu2.ring or mu1.n != mu2.n:
        raise ValueError("distributions live on different groups")
    if not (mu1.invariant_certified and mu2.invariant_certified):
        raise NotBiInvariant(
            "convolution requires K-bi-invariant inputs; certify with check_biinvariance"
        )
    guard = guard if guard is not None else points_guard()
    if len(mu1.values) * len(mu2.values) > guard:
        raise SupportNotCovered(
            f"support pair count {len(mu1.values) * len(mu2.values)} exceeds guard"
        )
    ring, n = mu1.ring, mu1.n
    acc: Dict[LatticeRep, Fraction] = {}
    ops = [(cols_as_operator(Ly.mat), Ly.shift, vy) for Ly, vy in mu1.values]
    for Lz, vz in mu2.values:
        for op, sy, vy in ops:
            prod_cols = mat_mul(ring, op, Lz.mat)
            Lx = canonicalize(ring, n, prod_cols, sy + Lz.shift)
            acc[Lx] = acc.get(Lx, Fraction(0)) + vy * vz
    out = Distribution.from_map(ring, n, acc, certified=True)
    if out.window > mu1.window + mu2.window:
        raise AssertionError("convolution support left the declared window")
    return out


def commutator(mu1: Distribution, mu2: Distribution, guard: Optional[int] = None) -> Distribution:
    return convolve(mu1, mu2, guard) - convolve(mu2, mu1, guard)


def check_biinvariance(mu: Distribution, dec: OrbitDecomposition) -> bool:
    """True iff mu is constant on every orbit of the decomposition; the
    decomposition must cover the support."""
    covered = set(dec.points)
    orbit_val: Dict[int, Fraction] = {}
    for L, v in mu.values:
        if L not in covered:
            raise SupportNotCovered(f"orbit decomposition misses support point {L.to_text()}")
    values = dict(mu.values)
    for L, oid in zip(dec.points, dec.orbit_ids):
        v = values.get(L, Fraction(0))
        if oid in orbit_val:
            if orbit_val[oid] != v:
                return False
        else:
            orbit_val[oid] = v
    return True


def certify(mu: Distribution, dec: OrbitDecomposition) -> Distribution:
    if not check_biinvariance(mu, dec):
        raise NotBiInvariant("distribution is not constant on K-orbits")
    return Distribution(mu.ring, mu.n, mu.values, mu.window, True, mu.label)


def window_closure_points(ring: ChainRing, n: int, window: int) -> List[LatticeRep]:
    """Union of the Schubert closures with t^window Lambda_0 <= L <= t^(-window)
    Lambda_0 (all dominant coweights with entries in [-window, window])."""
    from .lattice import DominantCoweight, enumerate_schubert
    import itertools as _it

    pts = set()
    for parts in _it.product(range(window, -window - 1, -1), repeat=n):
        if any(parts[i] < parts[i + 1] for i in range(n - 1)):
            continue
        S = enumerate_schubert(ring, n, DominantCoweight(parts))
        pts.update(S.points)
    return sorted(pts)


def noncommuting_witness_search(
    ring: ChainRing,
    n: int,
    window: int = 1,
    pair_guard: int = 60_000,
) -> dict:
    """Search K-orbit indicator pairs inside the window for a noncommuting
    pair; smallest orbit pairs first.  A negative outcome is reported, never
    silently passed."""
    from .orbits import decompose

    pts = window_closure_points(ring, n, window)
    dec = decompose(pts, ring, n)
    inds = [
        Distribution.orbit_indicator(dec, i, ring, n) for i in range(dec.orbit_count)
    ]
    order = sorted(range(len(inds)), key=lambda i: (dec.sizes[i], dec.reps[i].key()))
    tried = 0
    skipped = 0
    for a_idx in range(len(order)):
        for b_idx in range(a_idx + 1, len(order)):
            i, j = order[a_idx], order[b_idx]
            a, b = inds[i], inds[j]
            if len(a.values) * len(b.values) > pair_guard:
                skipped += 1
                continue
            tried += 1
            c = commutator(a, b)
            if not c.is_zero():
                return {
                    "found": True,
                    "window": window,
                    "orbit_count": dec.orbit_count,
                    "pairs_tried": tried,
                    "orbit_sizes": [dec.sizes[i], dec.sizes[j]],
                    "reps": [dec.reps[i].to_text(), dec.reps[j].to_text()],
                    "commutator_max_abs": c.max_abs(),
                    "commutator_support": len(c.values),
                }
    return {
        "found": False,
        "window": window,
        "orbit_count": dec.orbit_count,
        "pairs_tried": tried,
        "pairs_skipped_by_guard": skipped,
    }
