"""Exact arithmetic over finite chain rings and truncated Laurent series/matrices.

The coefficient rings are R = F_p[x]/(x^N) (equal characteristic) and
R = Z/p^N (mixed characteristic).  Elements are encoded canonically as
integers in [0, p^N): base-p digits are the polynomial coefficients in the
equal-characteristic flavor and the plain residue in the mixed flavor.  With
this encoding several primitives (residue, valuation, division by pi^v,
canonical residues mod pi^v) share one integer formula across both flavors.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Sequence, Tuple

# All measures and Hecke values in this package are exact rationals.
Rational = Fraction

EQUAL_CHAR = "equal_char"
MIXED_CHAR = "mixed_char"
FLAVORS = (EQUAL_CHAR, MIXED_CHAR)

# Rings at most this size get cached multiplication tables.
_TABLE_LIMIT = 1500


class NotAUnit(ArithmeticError):
    """Inversion requested for an element with zero residue."""


class NotInGroup(ArithmeticError):
    """Matrix (or scalar series) is not invertible over R((t))."""


class InsufficientWindow(ValueError):
    """A truncation window is too small to certify the requested output."""


class UnsupportedRing(ValueError):
    """Ring parameters outside the supported surface."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


class ChainRing:
    """The finite chain ring O/m^N, flavor F_p[x]/(x^N) or Z/p^N.

    q = p in v1; `residue_poly` is the extension-field slot (q = p^r) and is
    not yet supported.
    """

    __slots__ = ("flavor", "p", "N", "q", "size", "pi", "_mul_table")

    def __init__(self, flavor: str, p: int, N: int, residue_poly=None):
        if flavor not in FLAVORS:
            raise UnsupportedRing(f"unknown flavor {flavor!r}")
        if not is_prime(p):
            raise UnsupportedRing(f"p = {p} is not prime")
        if N < 1:
            raise UnsupportedRing(f"N = {N} must be >= 1")
        if residue_poly is not None:
            raise UnsupportedRing("extension residue fields (q = p^r) are not supported in v1")
        self.flavor = flavor
        self.p = p
        self.N = N
        self.q = p
        self.size = p ** N
        self.pi = p % self.size  # x resp. p; 0 when N = 1
        self._mul_table: Optional[list] = None

    # -- presentation ------------------------------------------------------

    def spec_string(self) -> str:
        if self.flavor == EQUAL_CHAR:
            return f"Fp[x]/x^N:p={self.p},N={self.N}"
        return f"Z/p^N:p={self.p},N={self.N}"

    def __repr__(self) -> str:
        base = f"F_{self.p}[x]/(x^{self.N})" if self.flavor == EQUAL_CHAR else f"Z/{self.size}"
        return f"ChainRing({base})"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ChainRing)
            and (self.flavor, self.p, self.N) == (other.flavor, other.p, other.N)
        )

    def __hash__(self) -> int:
        return hash((self.flavor, self.p, self.N))

    # -- data-level arithmetic (elements as ints in [0, size)) -------------

    def add(self, a: int, b: int) -> int:
        if self.flavor == MIXED_CHAR:
            return (a + b) % self.size
        p = self.p
        out = 0
        mult = 1
        for _ in range(self.N):
            out += ((a + b) % p) * mult
            a //= p
            b //= p
            mult *= p
        return out

    def neg(self, a: int) -> int:
        if self.flavor == MIXED_CHAR:
            return (-a) % self.size
        p = self.p
        out = 0
        mult = 1
        for _ in range(self.N):
            out += ((-a) % p) * mult
            a //= p
            mult *= p
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.flavor == MIXED_CHAR:
            return (a * b) % self.size
        tab = self._mul_table
        if tab is None and self.size <= _TABLE_LIMIT:
            tab = self._build_table()
        if tab is not None:
            return tab[a * self.size + b]
        return self._mul_eq(a, b)

    def _mul_eq(self, a: int, b: int) -> int:
        p, N = self.p, self.N
        da = []
        while a:
            da.append(a % p)
            a //= p
        out = [0] * N
        i = 0
        for ai in da:
            if ai:
                bb = b
                j = i
                while bb and j < N:
                    out[j] += ai * (bb % p)
                    bb //= p
                    j += 1
            i += 1
        res = 0
        mult = 1
        for c in out:
            res += (c % p) * mult
            mult *= p
        return res

    def _build_table(self) -> list:
        n = self.size
        tab = [0] * (n * n)
        for a in range(n):
            base = a * n
            for b in range(a, n):
                v = self._mul_eq(a, b)
                tab[base + b] = v
                tab[b * n + a] = v
        self._mul_table = tab
        return tab

    def residue(self, a: int) -> int:
        return a % self.p

    def is_unit(self, a: int) -> bool:
        return a % self.p != 0

    def val(self, a: int) -> int:
        """pi-adic valuation; val(0) = N."""
        if a == 0:
            return self.N
        v = 0
        while a % self.p == 0:
            a //= self.p
            v += 1
        return v

    def unit_part(self, a: int, v: int) -> int:
        """u with a = pi^v * u, for val(a) >= v."""
        return a // self.p ** v

    def shift(self, a: int, v: int) -> int:
        """pi^v * a (digit shift; same formula in both flavors)."""
        if v >= self.N:
            return 0
        if self.flavor == MIXED_CHAR:
            return (a * self.p ** v) % self.size
        return (a % self.p ** (self.N - v)) * self.p ** v

    def inv(self, a: int) -> int:
        if a % self.p == 0:
            raise NotAUnit(f"{a} has zero residue in {self!r}")
        if self.flavor == MIXED_CHAR:
            return pow(a, -1, self.size)
        b = pow(a % self.p, -1, self.p)
        two = self.add(1, 1)
        # Newton lifting: b <- b(2 - a b); doubles correct digits each step
        while True:
            e = self.mul(a, b)
            if e == 1:
                return b
            b = self.mul(b, self.sub(two, e))

    @property
    def one(self) -> int:
        return 1 % self.size

    def elements(self) -> range:
        return range(self.size)

    def units(self) -> Iterator[int]:
        return (a for a in range(self.size) if a % self.p != 0)

    def maximal_ideal(self) -> Iterator[int]:
        return (a for a in range(self.size) if a % self.p == 0)

    def from_int(self, n: int) -> int:
        """Canonical ring map Z -> R."""
        if self.flavor == MIXED_CHAR:
            return n % self.size
        return n % self.p

    def pow(self, a: int, k: int) -> int:
        out = self.one
        while k:
            if k & 1:
                out = self.mul(out, a)
            a = self.mul(a, a)
            k >>= 1
        return out

    # -- level maps --------------------------------------------------------

    def reduce_ring(self, n: int) -> "ChainRing":
        """Same flavor at level n <= N."""
        if not 1 <= n <= self.N:
            raise ValueError(f"level {n} not in [1, {self.N}]")
        return get_ring(self.flavor, self.p, n)

    def lift_ring(self, j: int) -> "ChainRing":
        return get_ring(self.flavor, self.p, self.N + j)

    def reduce_data(self, a: int, n: int) -> int:
        """Reduction R -> O/m^n on canonical data (drop high digits)."""
        return a % self.p ** n

    def unit_gens(self) -> Tuple[int, ...]:
        """A generating set of R^* (data ints)."""
        # generator of F_p^* lifted, plus 1 + pi^k for the principal units
        g = None
        for c in range(2, self.p):
            seen = set()
            x = 1
            for _ in range(self.p - 1):
                x = (x * c) % self.p
                seen.add(x)
            if len(seen) == self.p - 1:
                g = c
                break
        gens = []
        if g is not None:
            gens.append(g % self.size)
        for k in range(1, self.N):
            gens.append(self.add(1, self.p ** k))
        return tuple(gens) if gens else (1 % self.size,)

    def additive_gens(self) -> Tuple[int, ...]:
        """pi^k for k < N: an additive generating set of R (over Z)."""
        return tuple(self.p ** k for k in range(self.N))


_RING_CACHE: dict = {}


def get_ring(flavor: str, p: int, N: int) -> ChainRing:
    """Interned ChainRing (shares lazily built multiplication tables)."""
    key = (flavor, p, N)
    ring = _RING_CACHE.get(key)
    if ring is None:
        ring = ChainRing(flavor, p, N)
        _RING_CACHE[key] = ring
    return ring


def parse_ring_spec(spec: str) -> ChainRing:
    """Parse "Fp[x]/x^N:p=5,N=2" or "Z/p^N:p=5,N=2"."""
    try:
        head, tail = spec.split(":", 1)
        kv = dict(part.split("=", 1) for part in tail.split(","))
        p = int(kv["p"])
        N = int(kv["N"])
    except (ValueError, KeyError) as exc:
        raise UnsupportedRing(f"cannot parse ring spec {spec!r}") from exc
    if head == "Fp[x]/x^N":
        return get_ring(EQUAL_CHAR, p, N)
    if head == "Z/p^N":
        return get_ring(MIXED_CHAR, p, N)
    raise UnsupportedRing(f"unknown ring family {head!r}")


def make_ring(flavor: str, p: int, N: int) -> ChainRing:
    return get_ring(flavor, p, N)


@dataclass(frozen=True)
class RingElem:
    """An element of a ChainRing in canonical coordinates."""

    ring: ChainRing
    data: int

    def __post_init__(self):
        if not 0 <= self.data < self.ring.size:
            object.__setattr__(self, "data", self.data % self.ring.size)

    def __add__(self, other: "RingElem") -> "RingElem":
        return RingElem(self.ring, self.ring.add(self.data, other.data))

    def __sub__(self, other: "RingElem") -> "RingElem":
        return RingElem(self.ring, self.ring.sub(self.data, other.data))

    def __neg__(self) -> "RingElem":
        return RingElem(self.ring, self.ring.neg(self.data))

    def __mul__(self, other: "RingElem") -> "RingElem":
        return RingElem(self.ring, self.ring.mul(self.data, other.data))

    def inverse(self) -> "RingElem":
        return RingElem(self.ring, self.ring.inv(self.data))

    def residue(self) -> int:
        return self.ring.residue(self.data)

    def is_unit(self) -> bool:
        return self.ring.is_unit(self.data)

    def valuation(self) -> int:
        return self.ring.val(self.data)


def invert_elem(a: RingElem) -> RingElem:
    return a.inverse()


# ---------------------------------------------------------------------------
# Truncated Laurent series over a chain ring.
# ---------------------------------------------------------------------------


class LaurentSeries:
    """Element of R((t)) known on a window.

    `prec = None` means the series is exactly the stored finite sum (a Laurent
    polynomial).  Otherwise the coefficients on [vmin, prec) are stored and
    exact; nothing is known at or beyond `prec`.
    """

    __slots__ = ("ring", "vmin", "coeffs", "prec")

    def __init__(self, ring: ChainRing, vmin: int, coeffs: Sequence[int], prec: Optional[int] = None):
        coeffs = list(coeffs)
        if prec is None:
            while coeffs and coeffs[-1] == 0:
                coeffs.pop()
            while coeffs and coeffs[0] == 0:
                coeffs.pop(0)
                vmin += 1
            if not coeffs:
                vmin = 0
        else:
            want = prec - vmin
            if want < 0:
                raise InsufficientWindow(f"empty window [{vmin}, {prec})")
            coeffs = coeffs[:want] + [0] * (want - len(coeffs))
        self.ring = ring
        self.vmin = vmin
        self.coeffs = tuple(coeffs)
        self.prec = prec

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(ring: ChainRing) -> "LaurentSeries":
        return LaurentSeries(ring, 0, ())

    @staticmethod
    def const(ring: ChainRing, a: int) -> "LaurentSeries":
        return LaurentSeries(ring, 0, (a,))

    @staticmethod
    def t_power(ring: ChainRing, k: int, a: int = 1) -> "LaurentSeries":
        return LaurentSeries(ring, k, (a,))

    # -- helpers -----------------------------------------------------------

    def get(self, v: int) -> int:
        if v < self.vmin:
            return 0
        i = v - self.vmin
        if i < len(self.coeffs):
            return self.coeffs[i]
        if self.prec is None:
            return 0
        raise InsufficientWindow(f"coefficient at t^{v} beyond precision {self.prec}")

    def known_upto(self) -> Optional[int]:
        return self.prec

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def support_max(self) -> Optional[int]:
        for i in range(len(self.coeffs) - 1, -1, -1):
            if self.coeffs[i]:
                return self.vmin + i
        return None

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        return (
            self.ring == other.ring
            and self.prec == other.prec
            and self.vmin == other.vmin
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.ring, self.vmin, self.coeffs, self.prec))

    def __repr__(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}*t^{self.vmin + i}")
        body = " + ".join(terms) if terms else "0"
        tail = "" if self.prec is None else f" + O(t^{self.prec})"
        return f"<{body}{tail}>"

    # -- arithmetic --------------------------------------------------------

    def _join_prec(self, other: "LaurentSeries") -> Optional[int]:
        if self.prec is None:
            return other.prec
        if other.prec is None:
            return self.prec
        return min(self.prec, other.prec)

    def __add__(self, other: "LaurentSeries") -> "LaurentSeries":
        prec = self._join_prec(other)
        vmin = min(self.vmin, other.vmin)
        if prec is None:
            vmax = max(
                (s for s in (self.support_max(), other.support_max()) if s is not None),
                default=vmin - 1,
            )
        else:
            vmax = prec - 1
        R = self.ring
        out = [R.add(self.get(v), other.get(v)) for v in range(vmin, vmax + 1)]
        return LaurentSeries(R, vmin, out, prec)

    def __neg__(self) -> "LaurentSeries":
        R = self.ring
        return LaurentSeries(R, self.vmin, [R.neg(c) for c in self.coeffs], self.prec)

    def __sub__(self, other: "LaurentSeries") -> "LaurentSeries":
        return self + (-other)

    def __mul__(self, other: "LaurentSeries") -> "LaurentSeries":
        R = self.ring
        # product coefficients are exact on [a.vmin+b.vmin, min(a.vmin+b.prec, b.vmin+a.prec))
        if self.prec is None and other.prec is None:
            prec = None
        elif self.prec is None:
            prec = self.vmin + other.prec
        elif other.prec is None:
            prec = other.vmin + self.prec
        else:
            prec = min(self.vmin + other.prec, other.vmin + self.prec)
        vmin = self.vmin + other.vmin
        if prec is None:
            top_a = self.support_max()
            top_b = other.support_max()
            if top_a is None or top_b is None:
                return LaurentSeries.zero(R)
            vmax = top_a + top_b
        else:
            vmax = prec - 1
        out = [0] * (vmax - vmin + 1)
        mul, add = R.mul, R.add
        for i, ca in enumerate(self.coeffs):
            if ca == 0:
                continue
            va = self.vmin + i
            for j, cb in enumerate(other.coeffs):
                if cb == 0:
                    continue
                v = va + other.vmin + j
                if v > vmax:
                    break
                k = v - vmin
                out[k] = add(out[k], mul(ca, cb))
        return LaurentSeries(R, vmin, out, prec)

    def truncate(self, prec: int) -> "LaurentSeries":
        if self.prec is not None and prec > self.prec:
            raise InsufficientWindow(f"cannot extend precision {self.prec} to {prec}")
        return LaurentSeries(self.ring, self.vmin, list(self.coeffs), prec)

    def shift_t(self, k: int) -> "LaurentSeries":
        return LaurentSeries(
            self.ring, self.vmin + k, self.coeffs, None if self.prec is None else self.prec + k
        )

    def residue_valuation(self) -> Optional[int]:
        """Smallest v with unit coefficient at t^v, None if not visible."""
        for i, c in enumerate(self.coeffs):
            if c % self.ring.p != 0:
                return self.vmin + i
        return None

    def inverse(self, out_prec: int) -> "LaurentSeries":
        """Multiplicative inverse, exact on [vmin', out_prec).

        Splits t^-d * self = u + n with u a power series with unit constant
        term and n supported in negative degrees with nilpotent coefficients;
        then (u + n)^-1 = sum_k (-u^-1 n)^k u^-1, a finite sum since n^N = 0.
        """
        R = self.ring
        d = self.residue_valuation()
        if d is None:
            if self.prec is None:
                raise NotInGroup("series has nilpotent residue; not invertible")
            raise InsufficientWindow("no unit coefficient within the stored window")
        a = self.shift_t(-d)
        neg_width = max(0, -a.vmin)
        work = out_prec + d + (R.N + 1) * (neg_width + 1) + 2
        # u = nonnegative part, n = negative part (nilpotent coefficients)
        u_top = work if a.prec is None else min(work, a.prec)
        if u_top < 1:
            raise InsufficientWindow("window ends before the unit coefficient")
        u = LaurentSeries(R, 0, [a.get(v) for v in range(0, u_top)], u_top)
        # the negative part is a finite sum known exactly (prec None)
        n_part = LaurentSeries(R, a.vmin, [a.get(v) for v in range(a.vmin, 0)]) if a.vmin < 0 else None
        u_inv = _power_series_inverse(u, u_top)
        if n_part is None or n_part.is_zero():
            acc = u_inv
        else:
            z = u_inv * n_part
            acc = u_inv
            pw = u_inv
            for _ in range(R.N - 1):
                pw = -(pw * z)
                acc = acc + pw
        res = acc.shift_t(-d)
        if res.prec is not None and res.prec < out_prec:
            raise InsufficientWindow(
                f"inverse certified only to precision {res.prec} < requested {out_prec}"
            )
        return LaurentSeries(R, res.vmin, [res.get(v) for v in range(res.vmin, out_prec)], out_prec)


def _power_series_inverse(u: LaurentSeries, prec: int) -> LaurentSeries:
    """Inverse of a power series with unit constant term, to given precision."""
    R = u.ring
    b0 = R.inv(u.get(0))
    out = [b0]
    for k in range(1, prec):
        s = 0
        for j in range(1, k + 1):
            uj = u.get(j)
            if uj:
                s = R.add(s, R.mul(uj, out[k - j]))
        out.append(R.neg(R.mul(b0, s)))
    return LaurentSeries(R, 0, out, prec)


# ---------------------------------------------------------------------------
# Truncated Laurent matrices.
# ---------------------------------------------------------------------------


class LaurentMatrix:
    """n x n matrix over R((t)) with per-entry windows."""

    __slots__ = ("ring", "n", "entries")

    def __init__(self, ring: ChainRing, entries: Sequence[Sequence[LaurentSeries]]):
        self.ring = ring
        self.n = len(entries)
        for row in entries:
            if len(row) != self.n:
                raise ValueError("matrix must be square")
        self.entries = tuple(tuple(row) for row in entries)

    @staticmethod
    def identity(ring: ChainRing, n: int) -> "LaurentMatrix":
        one = LaurentSeries.const(ring, 1)
        zero = LaurentSeries.zero(ring)
        return LaurentMatrix(ring, [[one if i == j else zero for j in range(n)] for i in range(n)])

    @staticmethod
    def from_poly_data(ring: ChainRing, rows: Sequence[Sequence[Sequence[int]]], vmin: int = 0) -> "LaurentMatrix":
        """rows[i][j] = coefficient data list for entry (i, j), starting at t^vmin."""
        ents = [
            [LaurentSeries(ring, vmin, list(cell)) for cell in row]
            for row in rows
        ]
        return LaurentMatrix(ring, ents)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentMatrix):
            return NotImplemented
        return self.ring == other.ring and self.entries == other.entries

    def __repr__(self) -> str:
        return f"LaurentMatrix({self.entries!r})"

    def prec(self) -> Optional[int]:
        precs = [e.prec for row in self.entries for e in row if e.prec is not None]
        return min(precs) if precs else None

    def __mul__(self, other: "LaurentMatrix") -> "LaurentMatrix":
        n = self.n
        R = self.ring
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = LaurentSeries.zero(R)
                for k in range(n):
                    acc = acc + self.entries[i][k] * other.entries[k][j]
                row.append(acc)
            out.append(row)
        return LaurentMatrix(R, out)

    def __sub__(self, other: "LaurentMatrix") -> "LaurentMatrix":
        return LaurentMatrix(
            self.ring,
            [
                [self.entries[i][j] - other.entries[i][j] for j in range(self.n)]
                for i in range(self.n)
            ],
        )

    def scale(self, s: LaurentSeries) -> "LaurentMatrix":
        return LaurentMatrix(self.ring, [[e * s for e in row] for row in self.entries])

    def det(self) -> LaurentSeries:
        n = self.n
        e = self.entries
        if n == 1:
            return e[0][0]
        if n == 2:
            return e[0][0] * e[1][1] - e[0][1] * e[1][0]
        if n == 3:
            return (
                e[0][0] * (e[1][1] * e[2][2] - e[1][2] * e[2][1])
                - e[0][1] * (e[1][0] * e[2][2] - e[1][2] * e[2][0])
                + e[0][2] * (e[1][0] * e[2][1] - e[1][1] * e[2][0])
            )
        raise UnsupportedRing("only n <= 3 matrices are supported")

    def adjugate(self) -> "LaurentMatrix":
        n = self.n
        e = self.entries
        R = self.ring
        if n == 1:
            return LaurentMatrix(R, [[LaurentSeries.const(R, 1)]])
        if n == 2:
            return LaurentMatrix(R, [[e[1][1], -e[0][1]], [-e[1][0], e[0][0]]])
        if n == 3:
            def cof(i, j):
                rows = [r for r in range(3) if r != i]
                cols = [c for c in range(3) if c != j]
                m = e[rows[0]][cols[0]] * e[rows[1]][cols[1]] - e[rows[0]][cols[1]] * e[rows[1]][cols[0]]
                return m if (i + j) % 2 == 0 else -m
            return LaurentMatrix(R, [[cof(j, i) for j in range(3)] for i in range(3)])
        raise UnsupportedRing("only n <= 3 matrices are supported")

    def is_group_valid(self) -> bool:
        """True iff the entrywise residue has unit determinant in F_q((t))."""
        d = self.det()
        rv = d.residue_valuation()
        if rv is not None:
            return True
        if d.prec is None:
            return False
        raise InsufficientWindow("determinant window shows no unit coefficient")

    def inverse(self, out_prec: int) -> "LaurentMatrix":
        d = self.det()
        rv = d.residue_valuation()
        if rv is None:
            if d.prec is None:
                raise NotInGroup("residue determinant vanishes")
            raise InsufficientWindow("determinant window shows no unit coefficient")
        adj = self.adjugate()
        adj_min = min(
            (s.vmin for row in adj.entries for s in row if not s.is_zero()), default=0
        )
        dinv = d.inverse(out_prec - min(adj_min, 0) + 1)
        out = adj.scale(dinv)
        got = out.prec()
        if got is not None and got < out_prec:
            raise InsufficientWindow(f"inverse exact only below t^{got}, requested {out_prec}")
        return out


def invert_matrix(g: LaurentMatrix, out_prec: int) -> LaurentMatrix:
    return g.inverse(out_prec)
