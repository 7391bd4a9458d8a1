"""Near-miss structures for exercising the theory checkers.

Every constructor returns a :class:`Mutant` carrying the structure and the
axioms it is built to break.  Quotients are taken by congruence closure, so
the result stays a presheaf unless the mutation is meant to break
functoriality.
"""

from dataclasses import dataclass

import numpy as np

from .errors import OutOfRange
from .presheaves import TruncatedPresheaf, all_maps, disjoint_union_presheaves, functoriality_violation
from .surjections import identity_map, maps_from
from .theory import faithful_masks
from .unionfind import UnionFind


@dataclass(frozen=True)
class Mutant:
    kind: str
    structure: TruncatedPresheaf
    expected_failures: tuple
    params: dict


def terminal_from(j, N):
    """One point on every level ``>= j``, nothing below."""
    sizes = tuple(1 if n >= j else 0 for n in range(1, N + 1))
    maps = {q: [1] * sizes[max(q) - 1] for q in all_maps(N)}
    return TruncatedPresheaf(N, sizes, maps)


def congruence_quotient(M, pairs):
    """Smallest presheaf congruence identifying each ``(level, x, y)`` in ``pairs``.

    Identifications propagate upward along every ``M(q)``.
    """
    N = M.N
    ufs = [UnionFind(M.size(n)) for n in range(1, N + 1)]
    queue = []
    for level, x, y in pairs:
        if ufs[level - 1].union(x - 1, y - 1):
            queue.append((level, x, y))
    while queue:
        k, x, y = queue.pop()
        for q in _maps_into(k, N):
            n = len(q)
            t = M.maps[q]
            if ufs[n - 1].union(int(t[x - 1]) - 1, int(t[y - 1]) - 1):
                queue.append((n, int(t[x - 1]), int(t[y - 1])))
    labels = [np.asarray(uf.labels(), dtype=np.int64) for uf in ufs]
    sizes = tuple(int(lab.max()) if lab.size else 0 for lab in labels)
    maps = {}
    for q in all_maps(N):
        n, k = len(q), max(q)
        t = np.asarray(M.maps[q], dtype=np.int64)
        lab_k = labels[k - 1]
        out = np.zeros(sizes[k - 1], dtype=np.int64)
        if t.size:
            out[lab_k - 1] = labels[n - 1][t - 1]
        maps[q] = out
    return TruncatedPresheaf(N, sizes, maps)


def _maps_into(k, N):
    return [q for n in range(k, N + 1) for q in maps_from(n) if max(q) == k]


def extra_fixed_point(M, j):
    if not 2 <= j <= M.N:
        raise OutOfRange("the extra point must start at a level between 2 and N")
    X = disjoint_union_presheaves([M, terminal_from(j, M.N)])
    return Mutant("extra_fixed_point", X, ("(2)", "(5)", "equalizers"), {"level": j})


def orbit_merge(M, m, x=None, swap=1):
    """Identify a fix-trivial ``x`` at level ``m`` with its image under the transposition ``(swap swap+1)``."""
    if not 2 <= m <= M.N or not 1 <= swap < m:
        raise OutOfRange("orbit merge needs a level m >= 2 and an adjacent transposition in S_m")
    ids = np.flatnonzero(faithful_masks(M)[m - 1]) + 1
    if not ids.size:
        raise OutOfRange(f"no fix-trivial element at level {m}")
    x = int(ids[0]) if x is None else x
    t = list(range(1, m + 1))
    t[swap - 1], t[swap] = t[swap], t[swap - 1]
    y = M.act(tuple(t), x)
    X = congruence_quotient(M, [(m, x, y)])
    return Mutant("orbit_merge", X, ("(2)", "(5)", "equalizers"), {"level": m, "x": x, "swap": swap})


def cross_level_glue(M, a, b, j):
    """Glue at level ``j`` an element coming from fix-trivial level ``a`` to one from level ``b``."""
    # with j equal to a or b the congruence collapses the glued summands
    if a == b or not (max(a, b) < j <= M.N) or min(a, b) < 1:
        raise OutOfRange("need distinct levels a, b below j <= N")
    masks = faithful_masks(M)
    ya, yb = np.flatnonzero(masks[a - 1]), np.flatnonzero(masks[b - 1])
    if not (ya.size and yb.size):
        raise OutOfRange("both levels need a fix-trivial element")
    fa = tuple(range(1, a + 1)) + (a,) * (j - a)
    fb = tuple(range(1, b + 1)) + (b,) * (j - b)
    e1, e2 = M.act(fa, int(ya[0]) + 1), M.act(fb, int(yb[0]) + 1)
    X = congruence_quotient(M, [(j, e1, e2)])
    return Mutant("cross_level_glue", X, ("(3)", "(5)", "pullbacks"), {"a": a, "b": b, "level": j})


def redirect(M, rng):
    """Change a single table entry so that functoriality breaks."""
    candidates = [q for q in all_maps(M.N)
                  if q != identity_map(len(q)) and M.size(max(q)) and M.size(len(q)) > 1]
    order = rng.permutation(len(candidates))
    for i in order:
        q = candidates[int(i)]
        t = np.array(M.maps[q], dtype=np.int64)
        e = int(rng.integers(len(t)))
        t[e] = t[e] % M.size(len(q)) + 1
        maps = dict(M.maps)
        maps[q] = t
        X = TruncatedPresheaf(M.N, M.sizes, maps)
        if functoriality_violation(X) is not None:
            return Mutant("redirect", X, ("(1)",), {"q": list(q), "element": e + 1})
    raise OutOfRange("no single redirect breaks functoriality")
