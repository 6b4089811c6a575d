"""Small Hecke elements h^lambda_N as distributions, via exact volumes.

Three modes:

* exact (minuscule): Gr_lambda is smooth, so the fiber over a level-N point
  is a single residue ball of canonical measure q^(-N d), d = <lambda, 2 rho>.

* resolution (GL_2, lambda = (2,0)): the closure is the quadric cone over a
  conic; its minimal resolution is the two-step space of chains
  Lambda_0 >= L1 >= L of colength 1 each, an iterated P^1-bundle.  The cone
  point is a Du Val A_1 singularity, so the relative canonical divisor of the
  resolution is zero and the canonical measure pulls back to the plain Weil
  measure: the volume over a level-N point x is exactly
  #{(L1, L) at level N with L = x} / q^(2N).  Points with empty fiber carry
  volume 0 (they admit no O-lift at all).

* counting: normalized lift counts C_j(x)/q^(j d) with a certified geometric
  tail.  The deficits from the limit of a Gorenstein rational surface point
  satisfy an (eventually) period-two geometric law delta_{j+2} = rho delta_j
  with rho an exact power of 1/q; the certifier solves for (rho, limit)
  exactly and verifies every available pair, refusing to extrapolate
  otherwise.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .ringcore import ChainRing, Rational
from .lattice import (
    DominantCoweight,
    LatticeRep,
    SchubertSet,
    TooLarge,
    canonicalize,
    cols_as_operator,
    enumerate_schubert,
    lift_fiber,
    lift_fiber_count,
    mat_mul,
    points_guard,
)
from .orbits import OrbitDecomposition, apply_coordinate_automorphism, decompose
from .hecke import Distribution


class WrongMode(ValueError):
    """Requested volume mode does not apply to this coweight."""


class LadderNotGeometric(RuntimeError):
    """The counting tail could not be certified; no extrapolation is done."""


@dataclass(frozen=True)
class VolumeReport:
    point: LatticeRep
    mode: str                        # "exact" | "resolution" | "counting"
    value: Optional[Rational]        # certified volume, None if uncertified
    partials: Tuple[Rational, ...]   # C_j / q^(j d) for counting mode
    diagnostics: Tuple[Tuple[str, object], ...] = ()

    def diag(self) -> dict:
        return dict(self.diagnostics)


def h_minuscule(lam: DominantCoweight, ring: ChainRing, guard: Optional[int] = None) -> Distribution:
    """The constant q^(-N d) on the (smooth) minuscule stratum Gr_lambda(R)."""
    if not lam.is_minuscule():
        raise WrongMode(f"{lam.parts} is not minuscule")
    S = enumerate_schubert(ring, lam.n, lam, guard)
    d = lam.pairing_2rho()
    val = Fraction(1, ring.q ** (ring.N * d))
    return Distribution.from_map(
        ring, lam.n, {L: val for L in S.points}, certified=True, label=f"h{lam.parts}"
    )


# ---------------------------------------------------------------------------
# Resolution mode for GL_2, lambda = (2,0).
# ---------------------------------------------------------------------------


def _p1_forms(ring: ChainRing):
    """Canonical colength-1 forms: the two standard P^1(R) charts."""
    forms = []
    for a in range(ring.size):
        forms.append((((1,), (a,)), ((), (0, 1))))     # columns (1,a), (0,t)
    for b in range(ring.size):
        if b % ring.p == 0:
            forms.append((((0, 1), ()), ((b,), (1,))))  # columns (t,0), (b,1)
    return forms


def resolution_fiber_counts(ring: ChainRing) -> Dict[LatticeRep, int]:
    """#{(L1, L) : Lambda_0 > L1 > L colength 1 each} bucketed by L, level N."""
    forms = _p1_forms(ring)
    buckets: Dict[LatticeRep, int] = {}
    for f1 in forms:
        op = cols_as_operator(f1)
        for f2 in forms:
            cols = mat_mul(ring, op, f2)
            L = canonicalize(ring, 2, cols)
            buckets[L] = buckets.get(L, 0) + 1
    return buckets


def h_resolution_gl2_20(ring: ChainRing, guard: Optional[int] = None) -> Distribution:
    lam = DominantCoweight((2, 0))
    S = enumerate_schubert(ring, 2, lam, guard)
    buckets = resolution_fiber_counts(ring)
    unknown = set(buckets) - set(S.points)
    if unknown:
        raise AssertionError("resolution image left the Schubert closure")
    qN2 = ring.q ** (2 * ring.N)
    vals = {L: Fraction(buckets.get(L, 0), qN2) for L in S.points}
    return Distribution.from_map(ring, 2, vals, certified=True, label="h(2, 0)")


def resolution_volume_reports(ring: ChainRing) -> Dict[LatticeRep, VolumeReport]:
    lam = DominantCoweight((2, 0))
    S = enumerate_schubert(ring, 2, lam)
    buckets = resolution_fiber_counts(ring)
    qN2 = ring.q ** (2 * ring.N)
    return {
        L: VolumeReport(L, "resolution", Fraction(buckets.get(L, 0), qN2), ())
        for L in S.points
    }


def whole_space_mass_20(ring: ChainRing) -> Rational:
    """Total canonical volume of the resolved space: the iterated P^1-bundle
    has (q^(N-1)(q+1))^2 points at level N, all balls of measure q^(-2N)."""
    q = ring.q
    return Fraction((q + 1) * (q + 1), q * q)


# ---------------------------------------------------------------------------
# Counting mode with certified geometric tail.
# ---------------------------------------------------------------------------


def _q_power_exponent(rho: Fraction, q: int) -> Optional[int]:
    """c >= 1 with rho = q^(-c), else None."""
    if rho <= 0 or rho >= 1:
        return None
    if rho.numerator != 1:
        return None
    den = rho.denominator
    c = 0
    while den > 1:
        if den % q:
            return None
        den //= q
        c += 1
    return c if c >= 1 else None


def certify_geometric_tail(partials: Sequence[Fraction], q: int) -> Tuple[Fraction, dict]:
    """Certified limit of the normalized counting sequence.

    Accepts either exact stabilization (three equal trailing values) or the
    period-two geometric deficit model delta_{j+2} = rho * delta_j valid from
    j >= 1 with rho an exact power of 1/q; everything is checked on all
    available indices and the function refuses to extrapolate otherwise.
    """
    v = [Fraction(x) for x in partials]
    m = len(v) - 1
    if m < 2:
        raise LadderNotGeometric("need at least three partial values")
    if v[-1] == v[-2] == v[-3]:
        tail_start = next(i for i in range(len(v)) if all(x == v[-1] for x in v[i:]))
        return v[-1], {"mode": "stabilized", "rho": Fraction(0), "warmup": tail_start}
    if m < 4:
        raise LadderNotGeometric("need j_max >= 4 for an unstabilized tail")
    # candidate ratios from stride-2 difference quotients
    candidates = []
    for j1 in range(0, m - 1):
        for j2 in range(j1 + 1, m - 1):
            den = v[j2] - v[j1]
            if den != 0:
                candidates.append((v[j2 + 2] - v[j1 + 2]) / den)
    for rho in sorted(set(candidates)):
        c = _q_power_exponent(rho, q)
        if c is None:
            continue
        # v_inf (1 - rho) = v_{m} - rho v_{m-2}
        vinf = (v[m] - rho * v[m - 2]) / (1 - rho)
        ok = True
        for j in range(1, m - 1):
            if (vinf - v[j + 2]) != rho * (vinf - v[j]):
                ok = False
                break
        if ok and all(x >= 0 for x in v) and vinf >= 0:
            warm = 0 if (vinf - v[2]) == rho * (vinf - v[0]) else 1
            return vinf, {"mode": "period2", "rho": rho, "warmup": warm}
    raise LadderNotGeometric(
        "no exact q-power period-2 tail fits the partial counts"
    )


def counting_partials(L: LatticeRep, lam: DominantCoweight, j_max: int, guard: Optional[int] = None) -> Tuple[Fraction, ...]:
    """C_j(L)/q^(j d) for j = 0..j_max, d = <lambda, 2 rho>."""
    guard = guard if guard is not None else points_guard()
    q = L.ring.q
    d = lam.pairing_2rho()
    out = []
    for j in range(j_max + 1):
        c = lift_fiber_count(L, lam, j)
        if c > guard:
            raise TooLarge(f"lift count {c} at depth {j} exceeds guard")
        out.append(Fraction(c, q ** (j * d)))
    return tuple(out)


def h_counting(
    lam: DominantCoweight,
    ring: ChainRing,
    j_max: int,
    points: Optional[Sequence[LatticeRep]] = None,
    guard: Optional[int] = None,
    verify_transport: bool = True,
) -> Dict[LatticeRep, VolumeReport]:
    """Counting-mode volume reports, one per point.

    Lift counts are K-invariant (the K-action permutes reduction fibers), so
    the ladder runs once per K-orbit and is transported to the other members;
    with verify_transport a second member of each orbit is spot-checked.
    """
    n = lam.n
    if points is None:
        S = enumerate_schubert(ring, n, lam, guard)
        points = S.points
    dec = decompose(points, ring, n)
    d = lam.pairing_2rho()
    qNd = Fraction(1, ring.q ** (ring.N * d))
    reports: Dict[int, Tuple[Optional[Fraction], Tuple[Fraction, ...], dict]] = {}
    for oid, rep in enumerate(dec.reps):
        partials = counting_partials(rep, lam, j_max, guard)
        try:
            limit, diag = certify_geometric_tail(partials, ring.q)
            value = limit * qNd
            diag["certified"] = True
        except LadderNotGeometric as exc:
            limit, value = None, None
            diag = {"certified": False, "reason": str(exc)}
        reports[oid] = (value, partials, diag)
        if verify_transport and dec.sizes[oid] > 1:
            other = next(
                L
                for L, o in zip(dec.points, dec.orbit_ids)
                if o == oid and L != rep
            )
            if lift_fiber_count(other, lam, 1) != lift_fiber_count(rep, lam, 1):
                raise AssertionError("lift counts are not constant on a K-orbit")
    out: Dict[LatticeRep, VolumeReport] = {}
    for L, oid in zip(dec.points, dec.orbit_ids):
        value, partials, diag = reports[oid]
        out[L] = VolumeReport(L, "counting", value, partials, tuple(sorted(diag.items())))
    return out


# ---------------------------------------------------------------------------
# Generators of the small algebra.
# ---------------------------------------------------------------------------


def h_lambda(lam: DominantCoweight, ring: ChainRing, guard: Optional[int] = None) -> Distribution:
    if lam.is_minuscule():
        return h_minuscule(lam, ring, guard)
    if lam.n == 2 and lam.twisted(lam.parts[-1]).parts == (2, 0):
        c = lam.parts[-1]
        base = h_resolution_gl2_20(ring, guard)
        if c == 0:
            return base
        return _central_twist(base, c, label=f"h{lam.parts}")
    raise WrongMode(
        f"{lam.parts}: exact singular volumes are implemented only for GL_2 (2,0)-twists"
    )


def _central_twist(mu: Distribution, c: int, label: str) -> Distribution:
    ring = mu.ring
    out = {}
    for L, v in mu.values:
        out[LatticeRep(ring, L.n, L.shift + c, L.w, L.howell, L.mat)] = v
    return Distribution.from_map(ring, mu.n, out, certified=True, label=label)


def transport_distribution(sigma: Sequence[int], mu: Distribution) -> Distribution:
    mapped = {
        apply_coordinate_automorphism(sigma, L): v for L, v in mu.values
    }
    if len(mapped) != len(mu.values):
        raise AssertionError("coordinate substitution is not injective on support")
    return Distribution.from_map(
        mu.ring, mu.n, mapped, certified=True, label=mu.label + f"@sigma{tuple(sigma)}"
    )


def small_algebra_generators(
    ring: ChainRing,
    n: int,
    lams: Sequence[DominantCoweight],
    sigmas: Sequence[Sequence[int]] = ((1,),),
    guard: Optional[int] = None,
) -> List[Tuple[str, Distribution]]:
    """The h^lambda_N and their transports under each coordinate change."""
    out: List[Tuple[str, Distribution]] = []
    for lam in lams:
        if lam.n != n:
            raise ValueError("coweight rank mismatch")
        h = h_lambda(lam, ring, guard)
        for sigma in sigmas:
            sig = tuple(sigma)
            if sig == (1,):
                out.append((f"h{lam.parts}", h))
            else:
                out.append((f"h{lam.parts}@sigma{sig}", transport_distribution(sig, h)))
    return out
