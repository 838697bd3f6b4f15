"""Exact arithmetic for finite abelian p-groups and their subgroup lattices.

A group A = (+) Z/p^{n_j} is a :class:`PGroup`; its elements are plain tuples
of residues.  A subgroup is stored as the integer lattice L with
P*Z^k <= L <= Z^k (P = diag(p^{n_j})), kept in a canonical row-style Hermite
normal form, so equal subgroups compare equal and hash equal.  Quotient
structure comes from Smith normal form.  Everything is plain Python integer
arithmetic; all values are immutable after construction.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import gcd, prod

ORDER_CAP = 2 ** 20        # hard bound on |A|
CYCLIC_SWEEP_CAP = 2 ** 16  # default bound for cyclic-subgroup enumeration
ALL_SUBGROUPS_CAP = 256    # exhaustive subgroup enumeration is a test-only tool


class BudgetExceeded(Exception):
    """An enumeration budget or group-order cap was exceeded."""


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with g = gcd(a, b) >= 0 and g == a*x + b*y."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q = a // b
        a, b = b, a - q * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


# ---------------------------------------------------------------------------
# Integer lattice normal forms (row convention: lattice = Z-span of the rows).

def hermite_normal_form(rows, width: int) -> list[list[int]]:
    """Canonical basis of the lattice spanned by ``rows`` inside Z^width.

    Row-style HNF: nonzero rows in echelon order, positive pivots, entries
    above each pivot reduced into [0, pivot).  Two generating sets of the
    same lattice produce identical output.
    """
    mat = [list(r) for r in rows if any(r)]
    h = 0
    for j in range(width):
        piv = None
        for i in range(h, len(mat)):
            if mat[i][j]:
                piv = i
                break
        if piv is None:
            continue
        mat[h], mat[piv] = mat[piv], mat[h]
        for i in range(h + 1, len(mat)):
            if not mat[i][j]:
                continue
            a, b = mat[h][j], mat[i][j]
            g, x, y = xgcd(a, b)
            u, v = a // g, b // g
            rh, ri = mat[h], mat[i]
            for c in range(width):
                rh[c], ri[c] = x * rh[c] + y * ri[c], u * ri[c] - v * rh[c]
        if mat[h][j] < 0:
            mat[h] = [-t for t in mat[h]]
        for i in range(h):
            q = mat[i][j] // mat[h][j]
            if q:
                for c in range(width):
                    mat[i][c] -= q * mat[h][c]
        h += 1
    return mat[:h]


def left_kernel(rows, width: int) -> list[list[int]]:
    """Basis of {w in Z^r : w @ rows == 0} for an r-row integer matrix."""
    r = len(rows)
    mat = [list(row) for row in rows]
    unim = [[int(i == j) for j in range(r)] for i in range(r)]
    h = 0
    for j in range(width):
        piv = None
        for i in range(h, r):
            if mat[i][j]:
                piv = i
                break
        if piv is None:
            continue
        mat[h], mat[piv] = mat[piv], mat[h]
        unim[h], unim[piv] = unim[piv], unim[h]
        for i in range(h + 1, r):
            if not mat[i][j]:
                continue
            a, b = mat[h][j], mat[i][j]
            g, x, y = xgcd(a, b)
            u, v = a // g, b // g
            rh, ri, uh, ui = mat[h], mat[i], unim[h], unim[i]
            for c in range(width):
                rh[c], ri[c] = x * rh[c] + y * ri[c], u * ri[c] - v * rh[c]
            for c in range(r):
                uh[c], ui[c] = x * uh[c] + y * ui[c], u * ui[c] - v * uh[c]
        h += 1
    return unim[h:]


def smith_invariants(mat) -> list[int]:
    """Nonzero diagonal d_1 | d_2 | ... of the Smith normal form of ``mat``."""
    m = [list(r) for r in mat]
    nr = len(m)
    nc = len(m[0]) if nr else 0
    t = 0
    while t < min(nr, nc):
        piv = next(
            ((i, j) for i in range(t, nr) for j in range(t, nc) if m[i][j]), None
        )
        if piv is None:
            break
        i, j = piv
        m[t], m[i] = m[i], m[t]
        for row in m:
            row[t], row[j] = row[j], row[t]
        while True:
            for i in range(t + 1, nr):
                if not m[i][t]:
                    continue
                rt, ri = m[t], m[i]
                if m[i][t] % m[t][t] == 0:
                    q = m[i][t] // m[t][t]
                    for c in range(t, nc):
                        ri[c] -= q * rt[c]
                    continue
                g, x, y = xgcd(m[t][t], m[i][t])
                u, v = m[t][t] // g, m[i][t] // g
                for c in range(t, nc):
                    rt[c], ri[c] = x * rt[c] + y * ri[c], u * ri[c] - v * rt[c]
            col_dirty = False
            for j in range(t + 1, nc):
                if not m[t][j]:
                    continue
                if m[t][j] % m[t][t] == 0:
                    # plain column subtraction never re-dirties column t
                    q = m[t][j] // m[t][t]
                    for row in m:
                        row[j] -= q * row[t]
                    continue
                g, x, y = xgcd(m[t][t], m[t][j])
                u, v = m[t][t] // g, m[t][j] // g
                for row in m:
                    row[t], row[j] = x * row[t] + y * row[j], u * row[j] - v * row[t]
                col_dirty = True
            if not col_dirty and all(m[i][t] == 0 for i in range(t + 1, nr)):
                break
        t += 1
    diags = [abs(m[i][i]) for i in range(t)]
    for i in range(len(diags)):
        for j in range(i + 1, len(diags)):
            a, b = diags[i], diags[j]
            g = gcd(a, b)
            diags[i], diags[j] = g, a * b // g
    return diags


# ---------------------------------------------------------------------------
# Groups and subgroups.

@dataclass(frozen=True)
class PGroup:
    """A finite abelian p-group (+)_j Z/p^{n_j}, exponents non-increasing."""

    p: int
    exponents: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "exponents", tuple(int(n) for n in self.exponents))
        if not _is_prime(self.p):
            raise ValueError(f"p = {self.p} is not prime")
        if not self.exponents:
            raise ValueError("need at least one cyclic factor")
        if any(n < 1 for n in self.exponents):
            raise ValueError("exponents must be >= 1")
        if any(a < b for a, b in zip(self.exponents, self.exponents[1:])):
            raise ValueError("exponents must be non-increasing")
        if self.order > ORDER_CAP:
            raise BudgetExceeded(f"|A| = {self.order} exceeds cap {ORDER_CAP}")

    @property
    def rank(self) -> int:
        return len(self.exponents)

    @property
    def moduli(self) -> tuple[int, ...]:
        return tuple(self.p ** n for n in self.exponents)

    @property
    def order(self) -> int:
        return self.p ** sum(self.exponents)

    def zero(self) -> tuple[int, ...]:
        return (0,) * self.rank

    def reduce(self, vec) -> tuple[int, ...]:
        return tuple(int(x) % m for x, m in zip(vec, self.moduli))

    def add(self, a, b) -> tuple[int, ...]:
        return tuple((x + y) % m for x, y, m in zip(a, b, self.moduli))

    def neg(self, a) -> tuple[int, ...]:
        return tuple((-x) % m for x, m in zip(a, self.moduli))

    def scale(self, c: int, a) -> tuple[int, ...]:
        return tuple((c * x) % m for x, m in zip(a, self.moduli))

    def element_order(self, a) -> int:
        n = 1
        for x, m in zip(a, self.moduli):
            n = max(n, m // gcd(x, m))
        return n

    def elements(self):
        """Iterate over all elements (tuples of residues)."""
        return itertools.product(*(range(m) for m in self.moduli))

    def contains(self, vec) -> bool:
        return len(vec) == self.rank and all(
            0 <= x < m for x, m in zip(vec, self.moduli)
        )

    def _p_rows(self) -> list[list[int]]:
        k = self.rank
        return [[self.moduli[i] if j == i else 0 for j in range(k)] for i in range(k)]


def _check_elements(ambient: PGroup, gens) -> list[tuple[int, ...]]:
    out = []
    for g in gens:
        g = tuple(int(x) for x in g)
        if not ambient.contains(g):
            raise ValueError(f"coordinate out of range in generator {g}")
        out.append(g)
    return out


@dataclass(frozen=True)
class Subgroup:
    """Subgroup of a PGroup as a canonical full-rank HNF lattice basis."""

    ambient: PGroup
    basis: tuple[tuple[int, ...], ...]

    @classmethod
    def span(cls, ambient: PGroup, gens) -> "Subgroup":
        return cls._span_rows(ambient, _check_elements(ambient, gens))

    @classmethod
    def _span_rows(cls, ambient: PGroup, rows) -> "Subgroup":
        """Span of arbitrary lattice vectors (no residue-range validation)."""
        hnf = hermite_normal_form(list(rows) + ambient._p_rows(), ambient.rank)
        return cls(ambient, tuple(tuple(r) for r in hnf))

    @classmethod
    def trivial(cls, ambient: PGroup) -> "Subgroup":
        return cls.span(ambient, [])

    @classmethod
    def full(cls, ambient: PGroup) -> "Subgroup":
        k = ambient.rank
        eye = [[int(i == j) for j in range(k)] for i in range(k)]
        return cls(ambient, tuple(tuple(r) for r in eye))

    @property
    def order(self) -> int:
        return self.ambient.order // prod(self.basis[i][i] for i in range(len(self.basis)))

    def _coords(self, vec):
        """u with u @ basis == vec over Z, or None."""
        k = self.ambient.rank
        res = list(vec)
        u = []
        for i in range(k):
            q, rem = divmod(res[i], self.basis[i][i])
            if rem:
                return None
            u.append(q)
            for c in range(i, k):
                res[c] -= q * self.basis[i][c]
        return u

    def contains(self, vec) -> bool:
        return self._coords(vec) is not None

    def issubset(self, other: "Subgroup") -> bool:
        return all(other._coords(row) is not None for row in self.basis)

    def basis_elements(self) -> list[tuple[int, ...]]:
        """Basis rows reduced into the ambient group (a generating set)."""
        return [self.ambient.reduce(row) for row in self.basis]

    def elements(self):
        """All elements, as reduced tuples (no duplicates)."""
        amb = self.ambient
        counts = [m // self.basis[i][i] for i, m in enumerate(amb.moduli)]
        for coeffs in itertools.product(*(range(c) for c in counts)):
            vec = [0] * amb.rank
            for c, row in zip(coeffs, self.basis):
                for j in range(amb.rank):
                    vec[j] += c * row[j]
            yield amb.reduce(vec)

    def invariants_mod(self, other: "Subgroup") -> list[int]:
        """Invariant factors (p-exponents) of self/other, other <= self."""
        if other.ambient != self.ambient:
            raise ValueError("ambient mismatch")
        rel = []
        for row in other.basis:
            u = self._coords(row)
            if u is None:
                raise ValueError("not a subgroup of the given group")
            rel.append(u)
        return _p_exponents(self.ambient.p, smith_invariants(rel))


def _p_exponents(p: int, diags) -> list[int]:
    out = []
    for d in diags:
        e = 0
        while d % p == 0:
            d //= p
            e += 1
        if d != 1:
            raise ValueError("quotient is not a p-group")
        if e:
            out.append(e)
    out.sort(reverse=True)
    return out


def subgroup_from_generators(ambient: PGroup, gens) -> Subgroup:
    """Canonical form of <gens>; idempotent under re-canonicalization."""
    return Subgroup.span(ambient, gens)


def join(h1: Subgroup, h2: Subgroup) -> Subgroup:
    """Smallest subgroup containing both."""
    if h1.ambient != h2.ambient:
        raise ValueError("ambient mismatch")
    return Subgroup._span_rows(h1.ambient, list(h1.basis) + list(h2.basis))


def intersect(h1: Subgroup, h2: Subgroup) -> Subgroup:
    """Largest subgroup contained in both."""
    if h1.ambient != h2.ambient:
        raise ValueError("ambient mismatch")
    k = h1.ambient.rank
    stacked = list(h1.basis) + list(h2.basis)
    gens = []
    for w in left_kernel(stacked, k):
        vec = [0] * k
        for c, row in zip(w[: len(h1.basis)], h1.basis):
            for j in range(k):
                vec[j] += c * row[j]
        gens.append(vec)
    return Subgroup._span_rows(h1.ambient, gens)


def quotient_invariants(ambient: PGroup, h: Subgroup) -> list[int]:
    """Non-increasing p-exponents [m_1, ...] with A/H = (+) Z/p^{m_t}."""
    if h.ambient != ambient:
        raise ValueError("ambient mismatch")
    return _p_exponents(ambient.p, smith_invariants(h.basis))


def image_is_cyclic(d: Subgroup, h: Subgroup) -> bool:
    """Whether DH/H is cyclic."""
    if d.ambient != h.ambient:
        raise ValueError("ambient mismatch")
    return len(join(d, h).invariants_mod(h)) <= 1


def cyclic_subgroups(ambient: PGroup, cap: int = CYCLIC_SWEEP_CAP) -> list[Subgroup]:
    """All cyclic subgroups <g>, deduplicated; includes the trivial one."""
    if ambient.order > cap:
        raise BudgetExceeded(
            f"cyclic-subgroup sweep over |A| = {ambient.order} exceeds cap {cap}"
        )
    seen = {}
    for g in ambient.elements():
        sub = Subgroup.span(ambient, [g])
        seen.setdefault(sub.basis, sub)
    return list(seen.values())


def all_subgroups(ambient: PGroup) -> list[Subgroup]:
    """Every subgroup of A.  Test-scale tool, capped at |A| <= 256."""
    if ambient.order > ALL_SUBGROUPS_CAP:
        raise BudgetExceeded(
            f"exhaustive subgroup enumeration capped at {ALL_SUBGROUPS_CAP}"
        )
    elems = list(ambient.elements())
    frontier = [Subgroup.trivial(ambient)]
    seen = {frontier[0].basis: frontier[0]}
    while frontier:
        nxt = []
        for sub in frontier:
            for g in elems:
                if sub.contains(g):
                    continue
                bigger = Subgroup._span_rows(ambient, list(sub.basis) + [g])
                if bigger.basis not in seen:
                    seen[bigger.basis] = bigger
                    nxt.append(bigger)
        frontier = nxt
    return list(seen.values())


def annihilator(ambient: PGroup, s: Subgroup) -> Subgroup:
    """{a : <a, x> = 0 for all x in S} under sum(a_j x_j) mod p^n.

    Requires a homocyclic ambient (all exponents equal); that is the only
    case the Kummer layer needs, and the pairing is perfect there.
    """
    if s.ambient != ambient:
        raise ValueError("ambient mismatch")
    if len(set(ambient.exponents)) != 1:
        raise ValueError("annihilator requires a homocyclic ambient group")
    k = ambient.rank
    q = ambient.moduli[0]
    # rows of the constraint system: x-coordinates then slack rows q*I
    transposed = [[s.basis[i][j] for i in range(k)] for j in range(k)]
    slack = [[q if c == i else 0 for c in range(k)] for i in range(k)]
    gens = [w[:k] for w in left_kernel(transposed + slack, k)]
    return Subgroup._span_rows(ambient, gens)


@dataclass(frozen=True)
class Character:
    """Surjective-capable character A -> Z/p^exponent, a = sum(coeffs*a) map."""

    ambient: PGroup
    exponent: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))
        if len(self.coeffs) != self.ambient.rank:
            raise ValueError("coefficient count must match ambient rank")
        if self.exponent < 1:
            raise ValueError("target exponent must be >= 1")
        p, eps = self.ambient.p, self.exponent
        for c, n in zip(self.coeffs, self.ambient.exponents):
            if (c * p ** n) % p ** eps:
                raise ValueError(
                    f"coefficient {c} does not define a map on Z/p^{n} into Z/p^{eps}"
                )

    @property
    def modulus(self) -> int:
        return self.ambient.p ** self.exponent

    def value(self, vec) -> int:
        return sum(c * x for c, x in zip(self.coeffs, vec)) % self.modulus

    def is_surjective(self) -> bool:
        return gcd(gcd_many(self.coeffs), self.ambient.p) == 1

    def kernel_at_level(self, f: int) -> Subgroup:
        """Kernel of the composite A -> Z/p^exponent -> Z/p^f."""
        if not 0 <= f <= self.exponent:
            raise ValueError(f"level {f} out of range [0, {self.exponent}]")
        return _kernel_at_level(self, f)

    def kernel(self) -> Subgroup:
        return self.kernel_at_level(self.exponent)


def gcd_many(values) -> int:
    g = 0
    for v in values:
        g = gcd(g, v)
    return g


@lru_cache(maxsize=None)
def _kernel_at_level(char: Character, f: int) -> Subgroup:
    amb = char.ambient
    if f == 0:
        return Subgroup.full(amb)
    k = amb.rank
    q = amb.p ** f
    rows = [[c] for c in char.coeffs] + [[q]]
    gens = [w[:k] for w in left_kernel(rows, 1)]
    return Subgroup._span_rows(amb, gens)
