"""Truncated presheaves on finite sets and surjections.

A truncated presheaf records carriers ``X_1 .. X_N`` and, for every
surjection ``q: n↠k`` with ``n <= N``, the map ``X(q): X_k → X_n``.  Element
ids are 1-based per level.  Tables are kept as read-only numpy arrays.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import LevelMismatch, NotFunctorial, OutOfRange
from .surjections import compose_maps, identity_map, maps_from, surjection_maps


@lru_cache(maxsize=None)
def all_maps(N):
    """Every surjection with domain at most ``N``."""
    return tuple(q for n in range(1, N + 1) for q in maps_from(n))


@lru_cache(maxsize=None)
def generator_maps(a, N):
    """Generating surjections into level ``a``: adjacent transpositions and one merge."""
    gens = []
    for i in range(1, a):
        t = list(range(1, a + 1))
        t[i - 1], t[i] = t[i], t[i - 1]
        gens.append(tuple(t))
    if a + 1 <= N:
        gens.append(tuple(range(1, a + 1)) + (a,))
    return tuple(gens)


def _frozen(arr):
    arr = np.asarray(arr, dtype=np.int32)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TruncatedPresheaf:
    N: int
    sizes: tuple
    maps: dict
    tags: tuple = field(default=None)
    labels: tuple = field(default=None)
    unit: tuple = field(default=None)

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        if len(sizes) != self.N:
            raise LevelMismatch(f"need {self.N} carrier sizes, got {len(sizes)}")
        if any(s < 0 for s in sizes):
            raise OutOfRange("carrier sizes must be non-negative")
        maps = {}
        for q in all_maps(self.N):
            if q not in self.maps:
                raise OutOfRange(f"missing transition map for {list(q)}")
            t = _frozen(self.maps[q])
            n, k = len(q), max(q)
            if t.shape != (sizes[k - 1],):
                raise OutOfRange(f"table for {list(q)} must have {sizes[k - 1]} entries")
            if t.size and (t.min() < 1 or t.max() > sizes[n - 1]):
                raise OutOfRange(f"table for {list(q)} leaves level {n}")
            maps[q] = t
        if len(self.maps) != len(maps):
            raise OutOfRange("transition map keyed by a surjection beyond the truncation")
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "maps", maps)

    def __eq__(self, other):
        if not isinstance(other, TruncatedPresheaf):
            return NotImplemented
        return (
            self.N == other.N
            and self.sizes == other.sizes
            and all(np.array_equal(self.maps[q], other.maps[q]) for q in self.maps)
        )

    __hash__ = None

    def size(self, n):
        return self.sizes[n - 1]

    def act(self, q, e):
        """``X(q)(e)`` for ``q: n↠k`` and ``e ∈ X_k``."""
        return int(self.maps[tuple(q)][e - 1])

    def to_json(self):
        out = {
            "N": self.N,
            "carriers": list(self.sizes),
            "maps": [
                {"level_from": max(q), "level_to": len(q), "q": list(q), "table": self.maps[q].tolist()}
                for q in all_maps(self.N)
            ],
        }
        if self.tags is not None:
            out["tags"] = [list(t) for t in self.tags]
        return out

    @classmethod
    def from_json(cls, obj):
        N = int(obj["N"])
        maps = {}
        for entry in obj["maps"]:
            q = tuple(entry["q"])
            if entry.get("level_from", max(q)) != max(q) or entry.get("level_to", len(q)) != len(q):
                raise OutOfRange(f"levels recorded for {list(q)} do not match the map")
            if q in maps:
                raise OutOfRange(f"duplicate table for {list(q)}")
            maps[q] = entry["table"]
        tags = tuple(tuple(t) for t in obj["tags"]) if obj.get("tags") is not None else None
        return cls(N, tuple(obj["carriers"]), maps, tags=tags)


def functoriality_violation(X):
    """First failure of ``X(1) = 1`` or ``X(q ∘ s) = X(s) ∘ X(q)``, else ``None``.

    Checked for ``s`` ranging over generating surjections; every surjection
    is a composite of generators through levels no larger than its domain,
    so the generator squares imply all of them.
    """
    for n in range(1, X.N + 1):
        ident = identity_map(n)
        t = X.maps[ident]
        bad = np.flatnonzero(t != np.arange(1, X.size(n) + 1))
        if bad.size:
            return {"kind": "identity", "level": n, "element": int(bad[0]) + 1}
    for q, s, qs in generator_squares(X.N):
        tq, ts = X.maps[q], X.maps[s]
        if not tq.size:
            continue
        lhs = X.maps[qs]
        if not np.array_equal(lhs, ts[tq - 1]):
            bad = np.flatnonzero(lhs != ts[tq - 1])
            return {"kind": "composition", "g": list(q), "f": list(s), "element": int(bad[0]) + 1}
    return None


@lru_cache(maxsize=None)
def generator_squares(N):
    """Triples ``(q, s, q ∘ s)`` with ``s`` a generator into the domain of ``q``."""
    return tuple((q, s, compose_maps(q, s)) for q in all_maps(N) for s in generator_maps(len(q), N))


def is_functorial(X):
    return functoriality_violation(X) is None


def require_functorial(X):
    bad = functoriality_violation(X)
    if bad:
        raise NotFunctorial(f"not a presheaf: {bad}")
    return X


def empty_presheaf(N):
    return TruncatedPresheaf(N, (0,) * N, {q: () for q in all_maps(N)}, tags=((),) * N)


def disjoint_union_presheaves(presheaves, N=None):
    """Levelwise disjoint union; ``tags`` records the summand (1-based) of each element."""
    presheaves = list(presheaves)
    if not presheaves:
        if N is None:
            raise LevelMismatch("an empty union needs an explicit truncation level")
        return empty_presheaf(N)
    N = presheaves[0].N
    if any(X.N != N for X in presheaves):
        raise LevelMismatch("all summands must share the truncation level")
    offsets = np.zeros((len(presheaves) + 1, N), dtype=np.int64)
    for i, X in enumerate(presheaves):
        offsets[i + 1] = offsets[i] + np.asarray(X.sizes)
    maps = {}
    for q in all_maps(N):
        n = len(q)
        parts = [X.maps[q].astype(np.int64) + offsets[i, n - 1] for i, X in enumerate(presheaves)]
        maps[q] = np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)
    tags = tuple(
        tuple(i + 1 for i, X in enumerate(presheaves) for _ in range(X.size(n)))
        for n in range(1, N + 1)
    )
    labels = None
    if all(X.labels is not None for X in presheaves):
        labels = tuple(
            tuple((i + 1, lab) for i, X in enumerate(presheaves) for lab in X.labels[n - 1])
            for n in range(1, N + 1)
        )
    return TruncatedPresheaf(N, tuple(int(s) for s in offsets[-1]), maps, tags=tags, labels=labels)


def representable(m, N):
    """``n ↦ Surj(n, m)`` with ``X(p)(q) = q ∘ p``; elements in lexicographic order."""
    index = {n: {q: i + 1 for i, q in enumerate(surjection_maps(n, m))} for n in range(1, N + 1)}
    maps = {}
    for p in all_maps(N):
        n, k = len(p), max(p)
        maps[p] = [index[n][compose_maps(q, p)] for q in surjection_maps(k, m)]
    sizes = tuple(len(index[n]) for n in range(1, N + 1))
    labels = tuple(tuple(surjection_maps(n, m)) for n in range(1, N + 1))
    return TruncatedPresheaf(N, sizes, maps, labels=labels)


# -- natural transformations ------------------------------------------------

@dataclass(frozen=True, eq=False)
class NatTransformation:
    """Components ``ξ_n: X_n → Y_n`` for ``n = 1..N`` as 1-based tuples."""

    components: tuple

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(tuple(int(v) for v in c) for c in self.components))

    def __eq__(self, other):
        if not isinstance(other, NatTransformation):
            return NotImplemented
        return self.components == other.components

    def __hash__(self):
        return hash(self.components)

    @property
    def N(self):
        return len(self.components)

    def to_json(self):
        return {"N": self.N, "components": [list(c) for c in self.components]}


def naturality_violation(xi, X, Y):
    """First square ``ξ_k ∘ X(p) = Y(p) ∘ ξ_n`` that fails, else ``None``."""
    if xi.N != X.N or X.N != Y.N:
        raise LevelMismatch("transformation and presheaves must share the truncation level")
    comps = []
    for n, c in enumerate(xi.components, 1):
        arr = np.asarray(c, dtype=np.int64)
        if arr.shape != (X.size(n),) or (arr.size and (arr.min() < 1 or arr.max() > Y.size(n))):
            return {"kind": "shape", "level": n}
        comps.append(arr)
    for p in all_maps(X.N):
        k, n = len(p), max(p)
        xp, yp = X.maps[p], Y.maps[p]
        if not xp.size:
            continue
        lhs = comps[k - 1][xp - 1]
        rhs = yp[comps[n - 1] - 1]
        bad = np.flatnonzero(lhs != rhs)
        if bad.size:
            return {"kind": "square", "p": list(p), "element": int(bad[0]) + 1}
    return None


def is_natural(xi, X, Y):
    return naturality_violation(xi, X, Y) is None


def identity_transformation(X):
    return NatTransformation(tuple(identity_map(X.size(n)) for n in range(1, X.N + 1)))
