"""Deterministic Buchberger engine with budgets, caching, and self-checks.

Everything downstream (ranks, order comparisons, subalgebra membership, map
inversion) reduces to Groebner bases, so this module is built for
reproducibility: generators are canonically sorted, pair selection and
reduction are fully deterministic, and finished bases are cached per
(ideal, order).

Work is metered in reduction steps against a module-wide budget; blowing the
budget raises BudgetExceeded, which is a resource verdict, never a
mathematical "no".  Setting CHECK_SPOLYS makes every finished basis re-verify
that all its S-polynomials reduce to zero, with counters in STATS.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Optional, Sequence

from .errors import ArityMismatch, BudgetExceeded, DegreeCapExceeded, SpecMismatch
from .fields import FieldSpec
from .mpoly import (
    GREVLEX,
    Block,
    MonomialOrder,
    MultiPoly,
    degree_cap,
    mono_degree,
    mono_div,
    mono_divides,
    mono_lcm,
    mono_mul,
)

# -- configuration and instrumentation ----------------------------------------

_budget = 10**6

CHECK_SPOLYS = False

STATS = {"bases_computed": 0, "spoly_checks": 0, "spoly_failures": 0}


def get_budget() -> int:
    return _budget


def set_budget(budget: int) -> None:
    """Set the reduction-step budget.  Not part of the cache key: a basis
    finished under a small budget is just as valid under a large one."""
    global _budget
    if budget < 1:
        raise ValueError("budget must be positive")
    _budget = budget


def reset_stats() -> None:
    for k in STATS:
        STATS[k] = 0


class _Work:
    """Step counter for one computation."""

    __slots__ = ("steps", "budget")

    def __init__(self, budget: int):
        self.steps = 0
        self.budget = budget

    def step(self) -> None:
        self.steps += 1
        if self.steps > self.budget:
            raise BudgetExceeded(
                f"reduction budget of {self.budget} steps exceeded "
                "(raise it with set_budget or --budget; this is a resource "
                "limit, not a negative answer)"
            )


# -- ideals --------------------------------------------------------------------


def _poly_sort_key(f: MultiPoly):
    return (f.total_degree(), len(f.terms), sorted(f.terms.items()))


@dataclass(frozen=True)
class Ideal:
    """An ideal of K[x1..xn] given by generators, canonicalized so that equal
    generating sets compare and hash equal."""

    spec: FieldSpec
    nvars: int
    generators: tuple[MultiPoly, ...]

    @staticmethod
    def of(spec: FieldSpec, nvars: int, gens: Iterable[MultiPoly]) -> "Ideal":
        clean: list[MultiPoly] = []
        seen: set[MultiPoly] = set()
        for f in gens:
            if f.spec != spec:
                raise SpecMismatch("generator over a different field")
            if f.nvars != nvars:
                raise ArityMismatch(
                    f"generator arity {f.nvars} != ideal arity {nvars}"
                )
            if f.is_zero or f in seen:
                continue
            seen.add(f)
            clean.append(f)
        clean.sort(key=_poly_sort_key)
        return Ideal(spec, nvars, tuple(clean))

    @property
    def is_zero(self) -> bool:
        return not self.generators


@dataclass(frozen=True)
class GroebnerBasis:
    """A reduced Groebner basis: monic, interreduced, sorted ascending by
    leading monomial.  Unique for a given (ideal, order)."""

    ideal: Ideal
    order: MonomialOrder
    polys: tuple[MultiPoly, ...]

    @property
    def is_unit(self) -> bool:
        return len(self.polys) == 1 and self.polys[0].is_constant()

    def leading_monomials(self) -> tuple:
        return tuple(g.leading_monomial(self.order) for g in self.polys)

    def normal_form(self, f: MultiPoly) -> MultiPoly:
        return normal_form(f, self)

    def contains(self, f: MultiPoly) -> bool:
        return normal_form(f, self).is_zero


# -- core reduction ------------------------------------------------------------


def _make_monic(f: MultiPoly, order: MonomialOrder) -> MultiPoly:
    lc = f.leading_coefficient(order)
    one = f.spec.one_raw()
    if lc.raw == one:
        return f
    return f.scale(lc.inverse())


def _reduce(
    f: MultiPoly,
    basis: Sequence[MultiPoly],
    lms: Sequence[tuple],
    order: MonomialOrder,
    work: _Work,
) -> MultiPoly:
    """Full normal form of f against a list of monic polynomials.  The first
    basis element whose leading monomial divides the current lead is used, so
    the result is deterministic for a fixed basis order (and unique anyway
    once the basis is a Groebner basis)."""
    spec = f.spec
    cap = degree_cap()
    cur = dict(f.terms)
    out: dict = {}
    while cur:
        m = max(cur, key=order.key)
        c = cur.pop(m)
        hit = -1
        for k, lm in enumerate(lms):
            if mono_divides(lm, m):
                hit = k
                break
        if hit < 0:
            out[m] = c
            continue
        work.step()
        g = basis[hit]
        glm = lms[hit]
        shift = mono_div(m, glm)
        for gm, gc in g.terms.items():
            if gm == glm:
                continue
            mm = mono_mul(gm, shift)
            if sum(mm) > cap:
                raise DegreeCapExceeded(
                    f"reduction reached degree {sum(mm)} above cap {cap}"
                )
            d = spec.mul_raw(c, gc)
            prev = cur.get(mm)
            s = spec.neg_raw(d) if prev is None else spec.sub_raw(prev, d)
            if spec.is_zero_raw(s):
                cur.pop(mm, None)
            else:
                cur[mm] = s
    return MultiPoly(spec, f.nvars, out)


def _spoly(
    f: MultiPoly, flm: tuple, g: MultiPoly, glm: tuple
) -> MultiPoly:
    """S-polynomial of two *monic* polynomials."""
    spec = f.spec
    cap = degree_cap()
    lcm = mono_lcm(flm, glm)

    def shifted(h: MultiPoly, hlm: tuple):
        shift = mono_div(lcm, hlm)
        for m, c in h.terms.items():
            mm = mono_mul(m, shift)
            if sum(mm) > cap:
                raise DegreeCapExceeded(
                    f"S-polynomial reached degree {sum(mm)} above cap {cap}"
                )
            yield mm, c

    a = MultiPoly.from_terms(spec, f.nvars, shifted(f, flm))
    b = MultiPoly.from_terms(spec, g.nvars, shifted(g, glm))
    return a - b


# -- Buchberger ----------------------------------------------------------------

_GB_CACHE: dict = {}


def clear_caches() -> None:
    """Drop every memoized basis and membership result."""
    _GB_CACHE.clear()
    _subalgebra_member_cached.cache_clear()
    _invert_cached.cache_clear()


def groebner_basis(
    ideal: Ideal, order: MonomialOrder = GREVLEX, check: Optional[bool] = None
) -> GroebnerBasis:
    """Reduced Groebner basis of the ideal under the given order.  Results
    are cached by (ideal, order); the budget is deliberately not part of the
    key (see set_budget)."""
    key = (ideal, order)
    got = _GB_CACHE.get(key)
    if got is not None:
        return got

    work = _Work(_budget)
    polys = _buchberger(ideal, order, work)
    gb = GroebnerBasis(ideal, order, polys)
    STATS["bases_computed"] += 1

    do_check = CHECK_SPOLYS if check is None else check
    if do_check:
        _verify_spolys(gb)

    _GB_CACHE[key] = gb
    return gb


def _buchberger(ideal: Ideal, order: MonomialOrder, work: _Work) -> tuple:
    seed = sorted(
        (_make_monic(f, order) for f in ideal.generators),
        key=lambda f: (order.key(f.leading_monomial(order)), _poly_sort_key(f)),
    )
    G: list[MultiPoly] = list(seed)
    lms: list[tuple] = [g.leading_monomial(order) for g in G]
    pending: set[tuple[int, int]] = {
        (i, j) for i in range(len(G)) for j in range(i + 1, len(G))
    }

    def pair_key(ij):
        return (mono_degree(mono_lcm(lms[ij[0]], lms[ij[1]])), ij)

    while pending:
        i, j = min(pending, key=pair_key)
        pending.remove((i, j))
        lcm = mono_lcm(lms[i], lms[j])
        # Coprime leads: the S-polynomial reduces to zero for free.
        if lcm == mono_mul(lms[i], lms[j]):
            continue
        # Chain criterion: a third lead dividing the lcm, both of whose pairs
        # with i and j have already been handled, makes this pair redundant.
        redundant = False
        for k in range(len(G)):
            if k == i or k == j or not mono_divides(lms[k], lcm):
                continue
            a = (min(i, k), max(i, k))
            b = (min(j, k), max(j, k))
            if a not in pending and b not in pending:
                redundant = True
                break
        if redundant:
            continue
        r = _reduce(_spoly(G[i], lms[i], G[j], lms[j]), G, lms, order, work)
        if r.is_zero:
            continue
        r = _make_monic(r, order)
        G.append(r)
        lms.append(r.leading_monomial(order))
        t = len(G) - 1
        pending.update((k, t) for k in range(t))

    # Minimal: keep only leads not divisible by another kept lead.
    by_lm = sorted(range(len(G)), key=lambda idx: order.key(lms[idx]))
    kept: list[int] = []
    for idx in by_lm:
        if any(mono_divides(lms[kidx], lms[idx]) for kidx in kept):
            continue
        kept.append(idx)
    basis = [G[idx] for idx in kept]
    blms = [lms[idx] for idx in kept]

    # Reduced: tail-reduce each element against the others (lead survives
    # because kept leads are pairwise non-dividing).
    reduced = []
    for i, g in enumerate(basis):
        others = basis[:i] + basis[i + 1 :]
        olms = blms[:i] + blms[i + 1 :]
        reduced.append(_reduce(g, others, olms, order, work) if others else g)
    reduced.sort(key=lambda f: order.key(f.leading_monomial(order)))
    return tuple(reduced)


def _verify_spolys(gb: GroebnerBasis) -> None:
    """Postcondition check: every S-polynomial of the finished basis must
    reduce to zero against it."""
    polys = gb.polys
    lms = [g.leading_monomial(gb.order) for g in polys]
    work = _Work(_budget)
    for i in range(len(polys)):
        for j in range(i + 1, len(polys)):
            STATS["spoly_checks"] += 1
            s = _spoly(polys[i], lms[i], polys[j], lms[j])
            r = _reduce(s, polys, lms, gb.order, work)
            if not r.is_zero:
                STATS["spoly_failures"] += 1
                raise RuntimeError(
                    "finished basis failed its S-polynomial postcondition"
                )


def normal_form(f: MultiPoly, gb: GroebnerBasis) -> MultiPoly:
    """Unique remainder of f modulo the basis."""
    if f.spec != gb.ideal.spec:
        raise SpecMismatch("polynomial over a different field than the ideal")
    if f.nvars != gb.ideal.nvars:
        raise ArityMismatch("polynomial arity differs from the ideal's")
    if not gb.polys:
        return f
    lms = [g.leading_monomial(gb.order) for g in gb.polys]
    return _reduce(f, gb.polys, lms, gb.order, _Work(_budget))


# -- derived questions -----------------------------------------------------------


def ideal_contains(ideal: Ideal, f: MultiPoly) -> bool:
    return groebner_basis(ideal, GREVLEX).contains(f)


def ideal_dimension(ideal: Ideal) -> int:
    """Krull dimension of K[x]/I, computed combinatorially from the leading
    monomials: the largest variable subset S such that no leading monomial
    lives entirely inside S.  The unit ideal reports -1, the zero ideal n."""
    gb = groebner_basis(ideal, GREVLEX)
    if not gb.polys:
        return ideal.nvars
    if gb.is_unit:
        return -1
    sups = [
        frozenset(i for i, e in enumerate(lm) if e)
        for lm in gb.leading_monomials()
    ]
    n = ideal.nvars
    for size in range(n, 0, -1):
        for S in combinations(range(n), size):
            sset = frozenset(S)
            if all(not sup <= sset for sup in sups):
                return size
    return 0


def eliminate(ideal: Ideal, drop: Iterable[int]) -> Ideal:
    """Intersect with the subring that omits the dropped variables, and
    re-index the survivors onto x1..x(n-|drop|) keeping their relative
    order."""
    dropped = frozenset(drop)
    if not dropped:
        return ideal
    if not all(0 <= i < ideal.nvars for i in dropped):
        raise ArityMismatch("eliminated index out of range")
    keep = [i for i in range(ideal.nvars) if i not in dropped]
    if not keep:
        raise ArityMismatch("cannot eliminate every variable")
    gb = groebner_basis(ideal, Block(dropped))
    out = []
    for g in gb.polys:
        if g.variables_used() & dropped:
            continue
        out.append(
            MultiPoly(
                ideal.spec,
                len(keep),
                {tuple(m[i] for i in keep): c for m, c in g.terms.items()},
            )
        )
    return Ideal.of(ideal.spec, len(keep), out)


def subalgebra_member(
    f: MultiPoly, gens: Sequence[MultiPoly]
) -> Optional[MultiPoly]:
    """Decide f ∈ K[g1..gm] and return a witness polynomial w with
    w(g1..gm) = f, or None.  The witness is canonical: it is the normal form
    of f against the tag ideal (y_i - g_i) under an order that eliminates the
    original variables."""
    return _subalgebra_member_cached(f, tuple(gens))


@lru_cache(maxsize=None)
def _subalgebra_member_cached(
    f: MultiPoly, gens: tuple[MultiPoly, ...]
) -> Optional[MultiPoly]:
    if not gens:
        raise ArityMismatch("membership needs at least one generator")
    spec = f.spec
    n = f.nvars
    m = len(gens)
    for g in gens:
        if g.spec != spec:
            raise SpecMismatch("generator over a different field")
        if g.nvars != n:
            raise ArityMismatch("generator arity differs from the candidate's")

    def pad(h: MultiPoly) -> MultiPoly:
        return MultiPoly(
            spec, n + m, {mo + (0,) * m: c for mo, c in h.terms.items()}
        )

    tags = [
        MultiPoly.variable(spec, n + m, n + i) - pad(g)
        for i, g in enumerate(gens)
    ]
    gb = groebner_basis(Ideal.of(spec, n + m, tags), Block(range(n)))
    nf = normal_form(pad(f), gb)
    if any(any(mo[:n]) for mo in nf.terms):
        return None
    witness = MultiPoly(spec, m, {mo[n:]: c for mo, c in nf.terms.items()})
    if witness.substitute(gens) != f:
        raise RuntimeError("membership witness failed its substitution check")
    return witness


def invert_poly_map(
    images: Sequence[MultiPoly],
) -> Optional[tuple[MultiPoly, ...]]:
    """Exact inverse of the polynomial map x_k -> images[k], if the map is an
    algebra automorphism; None otherwise.  Both round trips are verified."""
    return _invert_cached(tuple(images))


@lru_cache(maxsize=None)
def _invert_cached(
    images: tuple[MultiPoly, ...]
) -> Optional[tuple[MultiPoly, ...]]:
    n = len(images)
    if n == 0:
        raise ArityMismatch("empty polynomial map")
    spec = images[0].spec
    for g in images:
        if g.nvars != n:
            raise ArityMismatch("inverse search needs as many images as variables")
        if g.spec != spec:
            raise SpecMismatch("images over different fields")
    xs = [MultiPoly.variable(spec, n, k) for k in range(n)]
    ws = []
    for k in range(n):
        w = subalgebra_member(xs[k], images)
        if w is None:
            return None
        ws.append(w)
    candidate = tuple(ws)
    for k in range(n):
        if images[k].substitute(candidate) != xs[k]:
            return None
    return candidate
