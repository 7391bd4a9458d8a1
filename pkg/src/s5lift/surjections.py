"""The category of finite sets ``{1..n}`` and surjections.

Maps are stored as 1-based image tuples: ``image[i - 1]`` is the value at
``i``.  Hot loops elsewhere in the package work on bare tuples through the
``*_maps`` helpers; :class:`Surjection` and :class:`Permutation` are the
validated public face.
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations
from math import comb, factorial

from .errors import CapExceeded, NotBijective, NotSurjective, OutOfRange, SortMismatch
from .unionfind import UnionFind

PERMUTATION_CAP = 6


@dataclass(frozen=True, eq=False)
class Surjection:
    image: tuple
    cod: int

    def __post_init__(self):
        image = tuple(int(v) for v in self.image)
        object.__setattr__(self, "image", image)
        if not image:
            raise OutOfRange("a surjection needs a non-empty domain")
        if self.cod < 1:
            raise OutOfRange(f"codomain must be positive, got {self.cod}")
        for v in image:
            if not 1 <= v <= self.cod:
                raise OutOfRange(f"value {v} outside 1..{self.cod}")
        missing = set(range(1, self.cod + 1)).difference(image)
        if missing:
            raise NotSurjective(f"values {sorted(missing)} never hit")

    def __eq__(self, other):
        if not isinstance(other, Surjection):
            return NotImplemented
        return self.image == other.image and self.cod == other.cod

    def __hash__(self):
        return hash((self.image, self.cod))

    @property
    def dom(self):
        return len(self.image)

    def __call__(self, i):
        return self.image[i - 1]

    def __len__(self):
        return len(self.image)

    @property
    def is_bijective(self):
        return self.dom == self.cod

    def __matmul__(self, other):
        return compose(self, other)

    def to_json(self):
        return {"dom": self.dom, "cod": self.cod, "map": list(self.image)}

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, list):
            # a bare map; the codomain is its largest value
            obj = {"map": obj, "cod": max(obj) if obj else 0}
        s = make_surjection(obj["map"], obj["cod"])
        if "dom" in obj and obj["dom"] != s.dom:
            raise OutOfRange(f"dom {obj['dom']} does not match map length {s.dom}")
        if s.is_bijective:
            return Permutation(s.image)
        return s

    def __repr__(self):
        return f"Surjection({list(self.image)}: {self.dom}->{self.cod})"


class Permutation(Surjection):
    """A bijection of ``{1..n}``."""

    def __init__(self, image):
        image = tuple(image)
        super().__init__(image, len(image))

    def __post_init__(self):
        try:
            super().__post_init__()
        except NotSurjective as exc:
            raise NotBijective(str(exc)) from None

    @property
    def size(self):
        return self.dom

    def inverse(self):
        return Permutation(invert_map(self.image))

    @classmethod
    def identity(cls, n):
        return cls(range(1, n + 1))

    def __repr__(self):
        return f"Permutation({list(self.image)})"


def make_surjection(values, cod):
    values = tuple(values)
    if not values:
        raise OutOfRange("values must be non-empty")
    s = Surjection(values, cod)
    return Permutation(s.image) if s.is_bijective else s


def make_permutation(values):
    return Permutation(values)


def compose_maps(q, p):
    """``q ∘ p`` on bare image tuples (``p`` applied first)."""
    return tuple(q[i - 1] for i in p)


def invert_map(p):
    inv = [0] * len(p)
    for i, v in enumerate(p, 1):
        inv[v - 1] = i
    return tuple(inv)


def identity_map(n):
    return tuple(range(1, n + 1))


def compose(q, p):
    """Return ``q ∘ p`` for ``p: k↠n`` and ``q: n↠m``."""
    if p.cod != q.dom:
        raise SortMismatch(f"cannot compose {q.dom}->{q.cod} after {p.dom}->{p.cod}")
    return make_surjection(compose_maps(q.image, p.image), q.cod)


def _surjection_tuples(n, m):
    out = []
    cur = [0] * n
    counts = [0] * (m + 1)

    def rec(pos, missing):
        if n - pos < missing:
            return
        if pos == n:
            out.append(tuple(cur))
            return
        for v in range(1, m + 1):
            cur[pos] = v
            counts[v] += 1
            rec(pos + 1, missing - (counts[v] == 1))
            counts[v] -= 1

    rec(0, m)
    return tuple(out)


@lru_cache(maxsize=None)
def surjection_maps(n, m):
    """All surjections ``n↠m`` as image tuples, lexicographically ordered."""
    if n < 1 or m < 1 or m > n:
        return ()
    return _surjection_tuples(n, m)


@lru_cache(maxsize=None)
def permutation_maps(n):
    return tuple(permutations(range(1, n + 1)))


@lru_cache(maxsize=None)
def maps_from(n):
    """Every surjection out of ``n`` (any codomain), by codomain then lex."""
    return tuple(q for m in range(1, n + 1) for q in surjection_maps(n, m))


def enumerate_surjections(n, m):
    if n < 1 or m < 1:
        raise OutOfRange("n and m must be positive")
    if n == m:
        return [Permutation(q) for q in surjection_maps(n, m)]
    return [Surjection(q, m) for q in surjection_maps(n, m)]


def enumerate_permutations(n, cap=PERMUTATION_CAP):
    if n < 1:
        raise OutOfRange("n must be positive")
    if n > cap:
        raise CapExceeded(f"S_{n} has {factorial(n)} elements; cap is n <= {cap}")
    return [Permutation(p) for p in permutation_maps(n)]


def count_surjections(n, m):
    """Inclusion–exclusion count of surjections ``n↠m``."""
    if m < 1 or n < 1:
        return 0
    return sum((-1) ** k * comb(m, k) * (m - k) ** n for k in range(m + 1))


def coequalizer_maps(f, g, n):
    uf = UnionFind(n)
    for a, b in zip(f, g):
        uf.union(a - 1, b - 1)
    return tuple(uf.labels())


def pushout_maps(f, g, n, m):
    uf = UnionFind(n + m)
    for a, b in zip(f, g):
        uf.union(a - 1, n + b - 1)
    labels = uf.labels()
    return tuple(labels[:n]), tuple(labels[n:])


def coequalizer_surj(f, g):
    """Coequalizer ``q: n↠r`` of parallel surjections ``f, g: k↠n``."""
    if f.dom != g.dom or f.cod != g.cod:
        raise SortMismatch("coequalizer needs parallel surjections")
    q = coequalizer_maps(f.image, g.image, f.cod)
    return make_surjection(q, max(q))


def pushout_surj(f, g):
    """Pushout legs ``(f', g')`` with ``f' ∘ f = g' ∘ g``."""
    if f.dom != g.dom:
        raise SortMismatch("pushout needs surjections with a common domain")
    a, b = pushout_maps(f.image, g.image, f.cod, g.cod)
    r = max(a)
    return make_surjection(a, r), make_surjection(b, r)


def factor_map(h, q):
    """The unique ``u`` with ``u ∘ q = h``, or ``None`` if none exists."""
    u = {}
    for a, b in zip(q, h):
        if u.setdefault(a, b) != b:
            return None
    return tuple(u[i] for i in range(1, len(u) + 1))


def factor(h, q):
    if h.dom != q.dom:
        raise SortMismatch("factor needs maps with a common domain")
    u = factor_map(h.image, q.image)
    return None if u is None else make_surjection(u, h.cod)
