"""Definitional brute-force computation of the obstruction groups.

Enumerates the whole ambient sum (+) Z/p^{e_i}, classifies every vector
against all candidate decomposition subgroups, and returns G and G_omega as
explicit subgroups together with their invariant factors modulo the diagonal.
This is the slow, trusted route; the closed-form route must match it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import prod

from .abelian import BudgetExceeded, PGroup, Subgroup
from .fields import NormalizedConfig
from .places import (
    Classification,
    LocalData,
    delta,
    dominates,
    fail_set,
    generic_place_candidates,
    i_n,
    omega_contains,
    sigma_contains,
    sigma_threshold,
)

__all__ = [
    "Classification",
    "InternalCheckError",
    "ShaReport",
    "aprime",
    "classify",
    "classify_fast",
    "compute_G_and_Gomega",
    "delta",
    "dominates",
    "enumerate_members",
    "i_n",
    "omega_contains",
    "oracle_report",
    "quotient_by_D",
    "sigma_contains",
    "subtorus_groups",
    "varpi_r",
]

DEFAULT_BUDGET = 2 ** 24
_SENTINEL = 10 ** 6  # stands for "dominated, condition vacuous"


class InternalCheckError(RuntimeError):
    """An enumeration-time invariant failed; the oracle itself is broken."""


@dataclass(frozen=True)
class ShaReport:
    """Invariant factors (p-exponents, non-increasing) of the two groups."""

    sha_invariants: tuple[int, ...]
    sha_omega_invariants: tuple[int, ...]
    quotient_invariants: tuple[int, ...] | None
    method: str
    agreement: bool | None = None
    quotient_annotation: tuple[int, ...] | None = None
    generators: tuple | None = None

    def __post_init__(self):
        for seq in (self.sha_invariants, self.sha_omega_invariants):
            if any(a < b for a, b in zip(seq, seq[1:])):
                raise ValueError("invariant factors must be non-increasing")
        small, big = self.sha_invariants, self.sha_omega_invariants
        # subgroup invariants divide group invariants factor by factor
        if len(small) > len(big) or any(s > b for s, b in zip(small, big)):
            raise ValueError("sha must embed in sha_omega factor by factor")


@lru_cache(maxsize=None)
def _delta_table(p: int, e1: int, e: int):
    """table[n][y] = delta(n, y), with a large sentinel when n dominates y."""
    q1, q = p ** e1, p ** e
    table = []
    for n in range(q1):
        row = []
        for y in range(q):
            if (n - y) % q == 0:
                row.append(_SENTINEL)
            else:
                row.append(delta(p, n, e1, y, e))
        table.append(row)
    return table


def _maximal_vectors(vecs):
    distinct = set(vecs)
    out = [
        s
        for s in distinct
        if not any(t != s and all(x >= y for x, y in zip(t, s)) for t in distinct)
    ]
    return sorted(out, reverse=True)


class _SweepContext:
    """Precomputed classification data for one (config, places, index set)."""

    def __init__(self, cfg: NormalizedConfig, localdata: LocalData, indices):
        self.cfg = cfg
        self.indices = tuple(indices)
        self.exps = tuple(cfg.e_i(i) for i in self.indices)
        if any(a < b for a, b in zip(self.exps, self.exps[1:])):
            raise InternalCheckError("index set must have non-increasing e_i")
        self.p = cfg.p
        self.e1 = self.exps[0]
        self.n_range = cfg.p ** self.e1
        self.tables = [_delta_table(cfg.p, self.e1, e) for e in self.exps]
        cyc = [
            tuple(sigma_threshold(cfg, sub, i) for i in self.indices)
            for sub in generic_place_candidates(cfg)
        ]
        exc = [
            tuple(sigma_threshold(cfg, pl.group, i) for i in self.indices)
            for pl in localdata.exceptional
        ]
        self.cyclic_tvecs = _maximal_vectors(cyc)
        self.exc_tvecs = _maximal_vectors(exc)

    def classify(self, a) -> Classification:
        cyc = set(self.cyclic_tvecs)
        exc = set(self.exc_tvecs)
        tables = self.tables
        width = len(self.exps)
        first = a[0]
        for n in itertools.chain((first,), range(self.n_range)):
            vals = tuple(tables[pos][n][a[pos]] for pos in range(width))
            if cyc:
                cyc = {s for s in cyc if any(v < t for v, t in zip(vals, s))}
            if exc:
                exc = {s for s in exc if any(v < t for v, t in zip(vals, s))}
            if not cyc and not exc:
                return Classification.IN_G
        if cyc:
            return Classification.OUTSIDE
        return Classification.IN_G_OMEGA_ONLY


def _context(cfg: NormalizedConfig, localdata: LocalData, indices=None) -> _SweepContext:
    if indices is None:
        indices = tuple(range(1, cfg.m + 1))
    indices = tuple(indices)
    cache = cfg.__dict__.setdefault("_sweep_cache", {})
    key = (localdata, indices)
    if key not in cache:
        cache[key] = _SweepContext(cfg, localdata, indices)
    return cache[key]


def classify_fast(cfg, localdata, a, indices=None) -> Classification:
    return _context(cfg, localdata, indices).classify(a)


def classify(cfg: NormalizedConfig, localdata: LocalData, a) -> Classification:
    return classify_fast(cfg, localdata, a)


def enumerate_members(cfg, localdata, indices=None, budget=DEFAULT_BUDGET):
    """All vectors of G and of G_omega over the given index set (default: all)."""
    ctx = _context(cfg, localdata, indices)
    total = prod(cfg.p ** e for e in ctx.exps)
    if total > budget:
        raise BudgetExceeded(
            f"oracle sweep over {total} candidate vectors exceeds budget {budget}"
        )
    g_members, gw_members = [], []
    for a in itertools.product(*(range(cfg.p ** e) for e in ctx.exps)):
        cls = ctx.classify(a)
        if cls is Classification.OUTSIDE:
            continue
        gw_members.append(a)
        if cls is Classification.IN_G:
            g_members.append(a)
    return g_members, gw_members


def _as_subgroup(ambient: PGroup, members) -> Subgroup:
    sub = Subgroup.span(ambient, members)
    if sub.order != len(members):
        raise InternalCheckError(
            "classified member set is not closed under addition"
        )
    return sub


def compute_G_and_Gomega(
    cfg: NormalizedConfig,
    localdata: LocalData,
    budget: int = DEFAULT_BUDGET,
) -> tuple[Subgroup, Subgroup]:
    """G and G_omega as canonical subgroups of (+) Z/p^{e_i}.

    Closure and the chain D <= G <= G_omega are verified, not assumed.
    """
    g_members, gw_members = enumerate_members(cfg, localdata, budget=budget)
    ambient = PGroup(cfg.p, cfg.eis)
    g_sub = _as_subgroup(ambient, g_members)
    gw_sub = _as_subgroup(ambient, gw_members)
    diag = Subgroup.span(ambient, [(1,) * cfg.m])
    if not diag.issubset(g_sub) or not g_sub.issubset(gw_sub):
        raise InternalCheckError("expected D <= G <= G_omega")
    return g_sub, gw_sub


def subtorus_groups(cfg, localdata, r: int, budget: int = DEFAULT_BUDGET):
    """G and G_omega of the block (K_0, K_{U_r}), as subgroups of (+)_{U_r}."""
    if r not in cfg.R:
        raise ValueError(f"no fields with e_0i = {r}")
    indices = cfg.U(r)
    g_members, gw_members = enumerate_members(cfg, localdata, indices, budget)
    ambient = PGroup(cfg.p, tuple(cfg.e_i(i) for i in indices))
    g_sub = _as_subgroup(ambient, g_members)
    gw_sub = _as_subgroup(ambient, gw_members)
    return g_sub, gw_sub


def quotient_by_D(group: Subgroup) -> list[int]:
    """Invariant factors (p-exponents) of group/D, D the diagonal subgroup."""
    ambient = group.ambient
    diag = Subgroup.span(ambient, [(1,) * ambient.rank])
    if not diag.issubset(group):
        raise InternalCheckError("diagonal subgroup not contained in the group")
    return group.invariants_mod(diag)


def varpi_r(cfg: NormalizedConfig, a, r: int) -> tuple[int, ...]:
    """Coordinate restriction of a to the block U_r."""
    if r not in cfg.R:
        raise ValueError(f"no fields with e_0i = {r}")
    return tuple(a[i - 1] for i in cfg.U(r))


def in_diagonal(cfg: NormalizedConfig, a) -> bool:
    p = cfg.p
    return all(
        (a[0] - a[i - 1]) % p ** cfg.e_i(i) == 0 for i in range(1, cfg.m + 1)
    )


def aprime(cfg: NormalizedConfig, localdata: LocalData, a) -> tuple[int, ...]:
    """The two-valued approximation a' of a with no larger failure set.

    Requires a in G_omega \\ D.  Asserts the defining properties: a' is not
    diagonal and every candidate place failing for a' already failed for a.
    """
    if in_diagonal(cfg, a):
        raise ValueError("a lies in the diagonal subgroup")
    if classify(cfg, localdata, a) is Classification.OUTSIDE:
        raise ValueError("a is not in G_omega")
    p = cfg.p
    e1 = cfg.e_i(1)
    a1 = a[0]
    inside = set(i_n(cfg, a, a1))
    outside = [i for i in range(1, cfg.m + 1) if i not in inside]
    dmin = min(delta(p, a1, e1, a[i - 1], cfg.e_i(i)) for i in outside)
    stratum = [
        i for i in outside if delta(p, a1, e1, a[i - 1], cfg.e_i(i)) == dmin
    ]
    j = stratum[0]
    out = []
    for i in range(1, cfg.m + 1):
        if i in stratum:
            out.append(a[j - 1] % p ** cfg.e_i(i))
        else:
            out.append(a1 % p ** cfg.e_i(i))
    res = tuple(out)
    if in_diagonal(cfg, res):
        raise InternalCheckError("a' landed in the diagonal subgroup")
    if not fail_set(cfg, localdata, res) <= fail_set(cfg, localdata, a):
        raise InternalCheckError("failure set of a' is not contained in that of a")
    return res


def oracle_report(cfg, localdata, budget: int = DEFAULT_BUDGET) -> ShaReport:
    g_sub, gw_sub = compute_G_and_Gomega(cfg, localdata, budget)
    return ShaReport(
        sha_invariants=tuple(quotient_by_D(g_sub)),
        sha_omega_invariants=tuple(quotient_by_D(gw_sub)),
        quotient_invariants=tuple(gw_sub.invariants_mod(g_sub)),
        method="oracle",
    )
