"""Right actions of symmetric groups on finite sets.

An action of ``S_m`` on ``{1..k}`` is presented by the carrier permutations
induced by the transposition ``(1 2)`` and the cycle ``(1 2 … m)``.  The
orientation is fixed throughout: ``apply(a, σ, apply(a, τ, x)) ==
apply(a, τ ∘ σ, x)``.
"""

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from math import factorial

import numpy as np

from .errors import CapExceeded, DegreeMismatch, InvalidAction, NotFaithful, OutOfRange
from .surjections import PERMUTATION_CAP, Permutation, compose_maps, identity_map, invert_map, permutation_maps
from .unionfind import UnionFind


def _check_bijection(values, k, name):
    if sorted(values) != list(range(1, k + 1)):
        raise InvalidAction(f"{name} is not a bijection of 1..{k}")


@dataclass(frozen=True)
class SymmetricAction:
    m: int
    carrier: int
    gen_swap: tuple
    gen_cycle: tuple

    def __post_init__(self):
        object.__setattr__(self, "gen_swap", tuple(int(v) for v in self.gen_swap))
        object.__setattr__(self, "gen_cycle", tuple(int(v) for v in self.gen_cycle))
        if self.m < 1:
            raise OutOfRange("degree must be positive")
        if len(self.gen_swap) != self.carrier or len(self.gen_cycle) != self.carrier:
            raise InvalidAction("generator tables must have one entry per carrier element")
        _check_bijection(self.gen_swap, self.carrier, "gen_swap")
        _check_bijection(self.gen_cycle, self.carrier, "gen_cycle")
        if self.m == 1 and (self.gen_swap != identity_map(self.carrier) or self.gen_cycle != identity_map(self.carrier)):
            raise InvalidAction("S_1 is trivial: both generators must be the identity")

    @cached_property
    def _cycle_inverse(self):
        return invert_map(self.gen_cycle)

    @cached_property
    def tables(self):
        """``tables[i]`` is the carrier map of the ``i``-th permutation (lex order)."""
        return tuple(action_permutation(self, p) for p in permutation_maps(self.m))

    def to_json(self):
        return {"m": self.m, "carrier": self.carrier, "gen_swap": list(self.gen_swap), "gen_cycle": list(self.gen_cycle)}

    @classmethod
    def from_json(cls, obj):
        return cls(int(obj["m"]), int(obj["carrier"]), tuple(obj["gen_swap"]), tuple(obj["gen_cycle"]))


def swap_perm(m):
    return (2, 1) + tuple(range(3, m + 1)) if m >= 2 else (1,)


def cycle_perm(m):
    return tuple(range(2, m + 1)) + (1,)


@lru_cache(maxsize=None)
def perm_index(m):
    return {p: i for i, p in enumerate(permutation_maps(m))}


@lru_cache(maxsize=None)
def generator_word(sigma):
    """Generators to apply, in order, to act by ``sigma``.

    ``sigma`` is bubble-sorted by adjacent transpositions on the right; each
    transposition ``(i i+1)`` is ``c^(i-1) ∘ s ∘ c^-(i-1)``.  Letters: ``s``
    swap, ``c`` cycle, ``C`` inverse cycle.
    """
    arr = list(sigma)
    swaps = []
    n = len(arr)
    changed = True
    while changed:
        changed = False
        for i in range(n - 1):
            if arr[i] > arr[i + 1]:
                arr[i], arr[i + 1] = arr[i + 1], arr[i]
                swaps.append(i + 1)
                changed = True
    word = []
    for i in reversed(swaps):
        word.extend("c" * (i - 1))
        word.append("s")
        word.extend("C" * (i - 1))
    return tuple(word)


def _gen_tables(a):
    return {"s": a.gen_swap, "c": a.gen_cycle, "C": a._cycle_inverse}


def _as_perm(a, sigma):
    image = sigma.image if isinstance(sigma, Permutation) else tuple(sigma)
    if len(image) != a.m:
        raise DegreeMismatch(f"permutation of degree {len(image)} acting through S_{a.m}")
    return image


def apply(a, sigma, x):
    """``a(σ, x)`` via the generator decomposition of ``σ``."""
    image = _as_perm(a, sigma)
    if not 1 <= x <= a.carrier:
        raise OutOfRange(f"element {x} outside 1..{a.carrier}")
    gens = _gen_tables(a)
    for g in generator_word(image):
        x = gens[g][x - 1]
    return x


def action_permutation(a, sigma):
    """The carrier map ``x ↦ a(σ, x)`` as a 1-based tuple."""
    image = _as_perm(a, sigma)
    gens = _gen_tables(a)
    cur = identity_map(a.carrier)
    for g in generator_word(image):
        cur = compose_maps(gens[g], cur)
    return cur


def tabulate_by_closure(a, cap=PERMUTATION_CAP):
    """Oracle tabulation of all of ``S_m`` by closing the generators.

    Returns ``(table, conflicts)`` where ``table`` maps permutation tuples to
    carrier maps and ``conflicts`` lists permutations reached along two paths
    with different carrier maps.
    """
    if a.m > cap:
        raise CapExceeded(f"S_{a.m} exceeds the cap {cap}")
    s, c = swap_perm(a.m), cycle_perm(a.m)
    ident = identity_map(a.m)
    table = {ident: identity_map(a.carrier)}
    conflicts = []
    queue = deque([ident])
    while queue:
        sigma = queue.popleft()
        for g, gmap in ((s, a.gen_swap), (c, a.gen_cycle)):
            tau = compose_maps(sigma, g)
            t = compose_maps(gmap, table[sigma])
            if tau not in table:
                table[tau] = t
                queue.append(tau)
            elif table[tau] != t:
                conflicts.append(tau)
    return table, conflicts


@dataclass
class ActionReport:
    m: int
    carrier: int
    checks: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(v is None for v in self.checks.values())

    def to_json(self):
        return {
            "verdict": "pass" if self.passed else "fail",
            "m": self.m,
            "carrier": self.carrier,
            "checks": {k: ("pass" if v is None else {"fail": v}) for k, v in self.checks.items()},
        }


def _power(perm, k, n):
    out = identity_map(n)
    for _ in range(k):
        out = compose_maps(perm, out)
    return out


def validate_action(a, cap=PERMUTATION_CAP):
    """Exhaustive check of both action axioms over the closure of the generators."""
    rep = ActionReport(a.m, a.carrier)
    k = a.carrier
    ident = identity_map(k)
    table, conflicts = tabulate_by_closure(a, cap)
    perms = permutation_maps(a.m)
    rep.checks["closure_size"] = None if len(table) == factorial(a.m) else {"reached": len(table)}
    rep.checks["well_defined"] = None if not conflicts else {"sigma": list(conflicts[0])}
    rep.checks["unit"] = None if table.get(identity_map(a.m)) == ident else {"sigma": list(identity_map(a.m))}

    comp = None
    if k and not conflicts:
        T = np.array([table[p] for p in perms], dtype=np.int64) - 1
        idx = perm_index(a.m)
        for ti, tau in enumerate(perms):
            # row σ: x ↦ a(σ, a(τ, x)); must equal a(τ∘σ, x)
            lhs = T[:, T[ti]]
            rhs = T[[idx[compose_maps(tau, sigma)] for sigma in perms]]
            bad = np.flatnonzero(np.any(lhs != rhs, axis=1))
            if bad.size:
                comp = {"sigma": list(perms[bad[0]]), "tau": list(tau)}
                break
    elif conflicts:
        comp = {"sigma": list(conflicts[0])}
    rep.checks["composition"] = comp

    if a.m >= 2:
        rel = {}
        if _power(a.gen_swap, 2, k) != ident:
            rel["swap_order"] = 2
        if _power(a.gen_cycle, a.m, k) != ident:
            rel["cycle_order"] = a.m
        # s ∘ c has order m - 1 in S_m; under a right action it acts as A_c ∘ A_s
        if _power(compose_maps(a.gen_cycle, a.gen_swap), a.m - 1, k) != ident:
            rel["swap_cycle_order"] = a.m - 1
        if a.m == 2 and a.gen_swap != a.gen_cycle:
            rel["swap_equals_cycle"] = True
        rep.checks["presentation"] = rel or None
    return rep


# -- orbits and stabilizers -------------------------------------------------

@dataclass(frozen=True)
class OrbitDecomposition:
    orbit_of: tuple
    orbit_count: int

    def orbits(self):
        out = [[] for _ in range(self.orbit_count)]
        for x, o in enumerate(self.orbit_of, 1):
            out[o - 1].append(x)
        return [tuple(o) for o in out]


def orbits(a):
    uf = UnionFind(a.carrier)
    for gen in (a.gen_swap, a.gen_cycle):
        for x, y in enumerate(gen):
            uf.union(x, y - 1)
    labels = tuple(uf.labels())
    return OrbitDecomposition(labels, max(labels, default=0))


def _check_degree(a, cap):
    if a.m > cap:
        raise CapExceeded(f"S_{a.m} exceeds the cap {cap}")


def stabilizer(a, x, cap=PERMUTATION_CAP):
    _check_degree(a, cap)
    return [Permutation(p) for p, t in zip(permutation_maps(a.m), a.tables) if t[x - 1] == x]


def fix_is_trivial(a, x, cap=PERMUTATION_CAP):
    _check_degree(a, cap)
    ident = identity_map(a.m)
    return all(t[x - 1] != x for p, t in zip(permutation_maps(a.m), a.tables) if p != ident)


def faithful_elements(a, cap=PERMUTATION_CAP):
    _check_degree(a, cap)
    if a.m == 1:
        return list(range(1, a.carrier + 1))
    tables = a.tables[1:]  # index 0 is the identity
    return [x for x in range(1, a.carrier + 1) if all(t[x - 1] != x for t in tables)]


def is_faithful(a, cap=PERMUTATION_CAP):
    return len(faithful_elements(a, cap)) == a.carrier


def is_transitive(a):
    return orbits(a).orbit_count == 1


# -- constructions ----------------------------------------------------------

def canonical_action(m, cap=PERMUTATION_CAP):
    """``S_m`` acting on itself by ``c(f, g) = g ∘ f``; carrier indexed lexicographically."""
    if m < 1:
        raise OutOfRange("degree must be positive")
    if m > cap:
        raise CapExceeded(f"S_{m} exceeds the cap {cap}")
    perms = permutation_maps(m)
    idx = perm_index(m)
    s, c = swap_perm(m), cycle_perm(m)
    swap = tuple(idx[compose_maps(g, s)] + 1 for g in perms)
    cyc = tuple(idx[compose_maps(g, c)] + 1 for g in perms)
    return SymmetricAction(m, len(perms), swap, cyc)


def trivial_action(m, k):
    return SymmetricAction(m, k, identity_map(k), identity_map(k))


def disjoint_union_actions(actions, m=None):
    if not actions:
        if m is None:
            raise OutOfRange("empty union needs an explicit degree")
        return SymmetricAction(m, 0, (), ())
    m = actions[0].m
    if any(b.m != m for b in actions):
        raise DegreeMismatch("all summands must act through the same S_m")
    swap, cyc, off = [], [], 0
    for b in actions:
        swap.extend(v + off for v in b.gen_swap)
        cyc.extend(v + off for v in b.gen_cycle)
        off += b.carrier
    return SymmetricAction(m, off, tuple(swap), tuple(cyc))


def restrict_action(a, elements):
    """Restriction to an invariant subset, relabeled ``1..`` in the given order."""
    pos = {x: i for i, x in enumerate(elements, 1)}
    try:
        swap = tuple(pos[a.gen_swap[x - 1]] for x in elements)
        cyc = tuple(pos[a.gen_cycle[x - 1]] for x in elements)
    except KeyError:
        raise InvalidAction("subset is not closed under the action") from None
    return SymmetricAction(a.m, len(elements), swap, cyc)


def relabel_action(a, rho):
    """Transport ``a`` along the bijection ``x ↦ rho[x - 1]``."""
    rho = tuple(rho)
    inv = invert_map(rho)
    swap = tuple(rho[a.gen_swap[inv[y - 1] - 1] - 1] for y in range(1, a.carrier + 1))
    cyc = tuple(rho[a.gen_cycle[inv[y - 1] - 1] - 1] for y in range(1, a.carrier + 1))
    return SymmetricAction(a.m, a.carrier, swap, cyc)


def faithful_part(a, cap=PERMUTATION_CAP):
    """Split into the fix-trivial sub-action and the rest."""
    good = faithful_elements(a, cap)
    gs = set(good)
    rest = [x for x in range(1, a.carrier + 1) if x not in gs]
    return restrict_action(a, good), restrict_action(a, rest)


@dataclass(frozen=True)
class OrbitIntertwiner:
    """Bijection from one orbit onto the canonical action.

    ``perm_of[x]`` is the lex index (1-based) of the ``σ`` with
    ``a(σ, base) = x``.
    """

    base: int
    elements: tuple
    perm_of: dict = field(hash=False)


def decompose_faithful(a, bases=None, cap=PERMUTATION_CAP):
    """One intertwiner to ``canonical_action(m)`` per orbit of a faithful action."""
    _check_degree(a, cap)
    if not is_faithful(a, cap):
        raise NotFaithful("decomposition requires a faithful action")
    out = []
    for i, orbit in enumerate(orbits(a).orbits()):
        base = bases[i] if bases else orbit[0]
        perm_of = {t[base - 1]: j + 1 for j, t in enumerate(a.tables)}
        if len(perm_of) != factorial(a.m) or set(perm_of) != set(orbit):
            raise NotFaithful(f"orbit of {base} does not have m! elements")
        out.append(OrbitIntertwiner(base, orbit, perm_of))
    return out
