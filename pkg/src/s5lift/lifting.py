"""Canonical liftings of symmetric-group actions to truncated presheaves.

The lifting of an action ``a`` of ``S_m`` on ``X`` has, at level ``n``, the
pairs ``(x, q: n↠m)`` modulo ``(x, q) ≈ (a(σ, x), σ⁻¹ ∘ q)``, and acts by
``L(p)[x, q] = [x, q ∘ p]``.  Classes are named by their lexicographically
least pair.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from math import factorial

import numpy as np

from .actions import perm_index, validate_action
from .errors import CapExceeded, LevelMismatch, NotEquivariant, OutOfRange, WitnessConflict
from .presheaves import (
    NatTransformation,
    TruncatedPresheaf,
    all_maps,
    functoriality_violation,
    is_natural,
    naturality_violation,
    require_functorial,
)
from .surjections import (
    PERMUTATION_CAP,
    Permutation,
    compose_maps,
    identity_map,
    invert_map,
    permutation_maps,
    surjection_maps,
)

SEARCH_BOUND = 10**6


def _codes(Q, m):
    """Mixed-radix code of each row of 1-based values in ``1..m``; lex order preserved."""
    n = Q.shape[1]
    weights = m ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return (Q.astype(np.int64) - 1) @ weights


def _decode(codes, m, n):
    digits = np.empty((len(codes), n), dtype=np.int64)
    c = codes.copy()
    for j in range(n - 1, -1, -1):
        digits[:, j] = c % m + 1
        c //= m
    return digits


def canonical_lifting(a, N, cap=PERMUTATION_CAP):
    """The canonical lifting of ``a`` truncated at level ``N``.

    ``unit`` on the result is ``η(x) = [x, 1]`` and ``labels`` holds each
    class's least pair ``(x, q)``.
    """
    if a.m > cap or N > cap:
        raise CapExceeded(f"degree {a.m} or level {N} exceeds the cap {cap}")
    if N < 1:
        raise OutOfRange("truncation level must be positive")
    m, k = a.m, a.carrier
    perms = permutation_maps(m)
    tables = np.array(a.tables, dtype=np.int64).reshape(len(perms), k)
    inverses = np.array([invert_map(p) for p in perms], dtype=np.int64)

    sizes, labels, levels = [], [], {}
    for n in range(1, N + 1):
        Q = np.array(surjection_maps(n, m), dtype=np.int64).reshape(-1, n)
        if not Q.size or not k:
            sizes.append(0)
            labels.append(())
            levels[n] = None
            continue
        base = m**n
        own = (np.arange(k, dtype=np.int64)[:, None] * base + _codes(Q, m)[None, :]).ravel()
        rep = None
        for i in range(len(perms)):
            moved = (tables[i] - 1)[:, None] * base + _codes(inverses[i][Q - 1], m)[None, :]
            rep = moved if rep is None else np.minimum(rep, moved)
        rep = rep.ravel()
        classes = np.unique(rep)
        order = np.argsort(own)
        pair_keys = own[order]
        pair_class = (np.searchsorted(classes, rep) + 1)[order]
        xs = classes // base
        qs = _decode(classes % base, m, n)
        levels[n] = (pair_keys, pair_class, xs, qs)
        sizes.append(len(classes))
        labels.append(tuple((int(x) + 1, tuple(int(v) for v in q)) for x, q in zip(xs, qs)))

    maps = {}
    for p in all_maps(N):
        n, j = len(p), max(p)
        src = levels[j]
        if src is None:
            maps[p] = np.zeros(0, dtype=np.int64)
            continue
        pair_keys, pair_class = levels[n][0], levels[n][1]
        _, _, xs, qs = src
        moved = qs[:, np.asarray(p) - 1]
        keys = xs * m**n + _codes(moved, m)
        maps[p] = pair_class[np.searchsorted(pair_keys, keys)]

    unit = ()
    if levels.get(m) is not None:
        pair_keys, pair_class = levels[m][0], levels[m][1]
        ident_code = int(_codes(np.array([identity_map(m)]), m)[0])
        keys = np.arange(k, dtype=np.int64) * m**m + ident_code
        unit = tuple(int(c) for c in pair_class[np.searchsorted(pair_keys, keys)])
    L = TruncatedPresheaf(N, tuple(sizes), maps, labels=tuple(labels), unit=unit)
    return require_functorial(L)


@lru_cache(maxsize=64)
def cached_lifting(a, N):
    return canonical_lifting(a, N)


# -- classes and the ≈ relation ---------------------------------------------

@dataclass(frozen=True, order=True)
class LiftClass:
    """``[x, q]`` stored as its least representative pair."""

    x: int
    q: tuple


def lift_class(a, x, q):
    q = tuple(q.image if hasattr(q, "image") else q)
    best = None
    for p, t in zip(permutation_maps(a.m), a.tables):
        cand = (t[x - 1], compose_maps(invert_map(p), q))
        if best is None or cand < best:
            best = cand
    return LiftClass(*best)


def equivalent_pairs(a, pair1, pair2):
    """The ``σ`` with ``a(σ, x₁) = x₂`` and ``σ ∘ q₂ = q₁``, or ``None``.

    ``σ`` is forced pointwise by ``σ(q₂(i)) = q₁(i)``; no search over ``S_m``.
    """
    (x1, q1), (x2, q2) = pair1, pair2
    q1 = tuple(q1.image if hasattr(q1, "image") else q1)
    q2 = tuple(q2.image if hasattr(q2, "image") else q2)
    if len(q1) != len(q2) or max(q1) != a.m or max(q2) != a.m:
        raise OutOfRange("pairs must use surjections n↠m of the action's degree")
    sigma = {}
    for u, v in zip(q2, q1):
        if sigma.setdefault(u, v) != v:
            return None
    image = tuple(sigma[i] for i in range(1, a.m + 1))
    if len(set(image)) != a.m:
        return None
    table = a.tables[perm_index(a.m)[image]]
    if table[x1 - 1] != x2:
        return None
    return Permutation(image)


# -- canonical lifting conditions, checked ---------------------------------

@dataclass
class LiftingReport:
    m: int
    N: int
    checks: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(v is None for v in self.checks.values())

    def to_json(self):
        return {
            "verdict": "pass" if self.passed else "fail",
            "m": self.m,
            "N": self.N,
            "truncation": f"levels 1..{self.N} only",
            "checks": {k: ("pass" if v is None else {"fail": v}) for k, v in self.checks.items()},
        }


def _pair_class(a, x, q):
    return {(t[x - 1], compose_maps(invert_map(p), q)) for p, t in zip(permutation_maps(a.m), a.tables)}


def verify_lifting_conditions(L, a, eta):
    """Check that ``L`` with ``η`` is a canonical lifting of ``a`` on levels ``1..N``.

    (i) ``η`` is a bijection onto ``L_m`` and equivariant; (ii) the maps
    ``L(q)`` for ``q: n↠m`` jointly cover ``L_n``; (iii) ``L(q₁)η(x₁) =
    L(q₂)η(x₂)`` exactly when the pairs are related by some ``σ``.
    """
    m, N = a.m, L.N
    rep = LiftingReport(m, N)
    eta = tuple(eta)
    act = validate_action(a)
    rep.checks["action"] = None if act.passed else act.to_json()["checks"]
    rep.checks["functorial"] = functoriality_violation(L)
    if m > N:
        rep.checks["eta_bijective"] = {"reason": f"level {m} lies beyond the truncation {N}"}
        return rep

    if len(eta) != a.carrier or sorted(eta) != list(range(1, L.size(m) + 1)):
        rep.checks["eta_bijective"] = {"eta": list(eta), "level_size": L.size(m)}
        return rep
    rep.checks["eta_bijective"] = None

    equiv = None
    for p, t in zip(permutation_maps(m), a.tables):
        tab = L.maps[p]
        for x in range(1, a.carrier + 1):
            if tab[eta[x - 1] - 1] != eta[t[x - 1] - 1]:
                equiv = {"sigma": list(p), "x": x}
                break
        if equiv:
            break
    rep.checks["eta_equivariant"] = equiv

    cover = collision = None
    for n in range(1, N + 1):
        buckets = {}
        for q in surjection_maps(n, m):
            tab = L.maps[q]
            for x in range(1, a.carrier + 1):
                z = int(tab[eta[x - 1] - 1])
                buckets.setdefault(z, set()).add((x, q))
        missing = sorted(set(range(1, L.size(n) + 1)) - set(buckets))
        if missing and cover is None:
            cover = {"level": n, "element": missing[0]}
        if collision is None:
            for z, pairs in sorted(buckets.items()):
                x, q = min(pairs)
                related = _pair_class(a, x, q)
                if related != pairs:
                    extra = sorted(pairs - related)
                    lost = sorted(related - pairs)
                    collision = {
                        "level": n,
                        "element": z,
                        "pair": [x, list(q)],
                        "same_value_unrelated": [[u, list(v)] for u, v in extra[:1]],
                        "related_different_value": [[u, list(v)] for u, v in lost[:1]],
                    }
                    break
    rep.checks["cover"] = cover
    rep.checks["collision"] = collision
    return rep


# -- the universal property ---------------------------------------------------

def induced_transformation(L, a, eta, Y, mu):
    """The unique ``ξ: L ⇒ Y`` with ``ξ_m ∘ η = μ``, by ``ξ_n(L(q)η(x)) = Y(q)μ(x)``."""
    if Y.N != L.N:
        raise LevelMismatch("both presheaves must share the truncation level")
    m, N = a.m, L.N
    eta, mu = tuple(eta), tuple(mu)
    if m > N:
        raise OutOfRange(f"level {m} lies beyond the truncation {N}")
    if len(mu) != a.carrier or any(not 1 <= v <= Y.size(m) for v in mu):
        raise OutOfRange("μ must send each action element into Y_m")
    for p, t in zip(permutation_maps(m), a.tables):
        ytab = Y.maps[p]
        for x in range(1, a.carrier + 1):
            if ytab[mu[x - 1] - 1] != mu[t[x - 1] - 1]:
                raise NotEquivariant(f"Y({list(p)})(μ({x})) != μ(a({list(p)}, {x}))")
    comps = []
    for n in range(1, N + 1):
        xi = [0] * L.size(n)
        for q in surjection_maps(n, m):
            ltab, ytab = L.maps[q], Y.maps[q]
            for x in range(1, a.carrier + 1):
                z = int(ltab[eta[x - 1] - 1])
                v = int(ytab[mu[x - 1] - 1])
                if xi[z - 1] and xi[z - 1] != v:
                    raise WitnessConflict(f"level {n} element {z} receives {xi[z - 1]} and {v}")
                xi[z - 1] = v
        if not all(xi):
            raise WitnessConflict(f"level {n} element {xi.index(0) + 1} is not of the form L(q)(η(x))")
        comps.append(tuple(xi))
    return NatTransformation(tuple(comps))


def generators(X):
    """Elements outside the image of every non-bijective transition map."""
    hit = [np.zeros(X.size(n), dtype=bool) for n in range(1, X.N + 1)]
    for q in all_maps(X.N):
        if len(q) != max(q):
            t = X.maps[q]
            if t.size:
                hit[len(q) - 1][t - 1] = True
    return [(n, int(e) + 1) for n in range(1, X.N + 1) for e in np.flatnonzero(~hit[n - 1])]


def enumerate_nat_transformations(X, Y, bound=SEARCH_BOUND):
    """All natural transformations ``X ⇒ Y`` in lexicographic order of components.

    Backtracks over generators of ``X``; each choice is propagated along every
    transition map out of the generator's level and the finished assignment
    is checked on every naturality square.
    """
    if X.N != Y.N:
        raise LevelMismatch("both presheaves must share the truncation level")
    N = X.N
    gens = generators(X)
    out_maps = {n: [q for q in all_maps(N) if max(q) == n] for n in range(1, N + 1)}

    # estimate: one free choice per generator orbit under the permutations
    seen, estimate = set(), 1
    for n, g in gens:
        if (n, g) in seen:
            continue
        for p in permutation_maps(n):
            seen.add((n, int(X.maps[p][g - 1])))
        estimate *= max(Y.size(n), 1)
        if estimate > bound:
            raise CapExceeded(f"search space exceeds {bound} candidate assignments")

    xi = [[0] * X.size(n) for n in range(1, N + 1)]
    results = []

    def assign(n, g, v, trail):
        for q in out_maps[n]:
            k = len(q)
            e = int(X.maps[q][g - 1])
            w = int(Y.maps[q][v - 1])
            cur = xi[k - 1][e - 1]
            if cur == 0:
                xi[k - 1][e - 1] = w
                trail.append((k, e))
            elif cur != w:
                return False
        return True

    def rec(i):
        while i < len(gens) and xi[gens[i][0] - 1][gens[i][1] - 1]:
            i += 1
        if i == len(gens):
            if all(all(c) for c in xi):
                cand = NatTransformation(tuple(tuple(c) for c in xi))
                if is_natural(cand, X, Y):
                    results.append(cand)
            return
        n, g = gens[i]
        for v in range(1, Y.size(n) + 1):
            trail = []
            if assign(n, g, v, trail):
                rec(i + 1)
            for k, e in trail:
                xi[k - 1][e - 1] = 0

    rec(0)
    results.sort(key=lambda t: t.components)
    return results


def kan_uniqueness_violation(L, a, eta, Y, mu, candidates=None):
    """A natural ``ξ' ≠ ξ`` with ``ξ'_m ∘ η = μ`` among the candidates, else ``None``."""
    xi = induced_transformation(L, a, eta, Y, mu)
    if naturality_violation(xi, L, Y):
        return {"reason": "induced transformation is not natural"}
    if candidates is None:
        candidates = enumerate_nat_transformations(L, Y)
    m = a.m
    matches = [c for c in candidates if all(c.components[m - 1][eta[x] - 1] == mu[x] for x in range(a.carrier))]
    if matches != [xi]:
        return {"matching": len(matches)}
    return None


# -- representability -------------------------------------------------------

def representability_iso(m, N):
    """``[g, q] ↦ g ∘ q`` from the lifting of the canonical action to ``Surj(-, m)``."""
    from .actions import canonical_action
    from .presheaves import representable

    L = cached_lifting(canonical_action(m), N)
    R = representable(m, N)
    perms = permutation_maps(m)
    comps = []
    for n in range(1, N + 1):
        index = {q: i + 1 for i, q in enumerate(surjection_maps(n, m))}
        comps.append(tuple(index[compose_maps(perms[x - 1], q)] for x, q in L.labels[n - 1]))
    return L, R, NatTransformation(tuple(comps))


def is_isomorphism(xi, X, Y):
    if not is_natural(xi, X, Y):
        return False
    return all(sorted(c) == list(range(1, Y.size(n) + 1)) for n, c in enumerate(xi.components, 1))


def fix_trivial_in_lifting(L, n, e):
    """``Fix(e) = {1}`` for ``e ∈ L_n``, read from the permutation tables."""
    return all(int(L.maps[p][e - 1]) != e for p in permutation_maps(n) if p != identity_map(n))


def counting_law(a, N):
    """``|X| / m! · #Surj(n, m)`` per level, for a faithful action."""
    from .surjections import count_surjections

    return tuple(a.carrier // factorial(a.m) * count_surjections(n, a.m) for n in range(1, N + 1))
