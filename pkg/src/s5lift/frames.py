"""Finite S5 Kripke frames, p-morphisms and their finite colimits.

A frame is stored as its partition: ``blocks[w - 1]`` is the equivalence
class of world ``w``.  Block ids are always renumbered by first occurrence,
so two frames with the same partition compare equal.

The second half of the module is the finite-families presentation: a frame
is a family of clusters (one cluster size per block) and a p-morphism is an
index map plus one surjection per source cluster.
"""

from dataclasses import dataclass
from functools import cached_property
from itertools import product

from .errors import (
    NotIntoOneClass,
    NotOnto,
    NotParallel,
    OutOfRange,
    SortMismatch,
    SourceMismatch,
)
from .surjections import (
    Surjection,
    compose_maps,
    coequalizer_maps,
    identity_map,
    make_surjection,
    pushout_maps,
    surjection_maps,
)
from .unionfind import UnionFind


def canonical_labels(labels):
    """Renumber labels 1.. by first occurrence."""
    seen = {}
    return tuple(seen.setdefault(b, len(seen) + 1) for b in labels)


@dataclass(frozen=True)
class FiniteFrame:
    blocks: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "blocks", canonical_labels(self.blocks))

    @property
    def worlds(self):
        return len(self.blocks)

    @property
    def n_blocks(self):
        return max(self.blocks, default=0)

    @cached_property
    def classes(self):
        out = [[] for _ in range(self.n_blocks)]
        for w, b in enumerate(self.blocks, 1):
            out[b - 1].append(w)
        return tuple(tuple(c) for c in out)

    def block_of(self, w):
        return self.blocks[w - 1]

    def related(self, u, v):
        return self.blocks[u - 1] == self.blocks[v - 1]

    def relation(self):
        """The accessibility relation as a set of world pairs."""
        return {(u, v) for c in self.classes for u in c for v in c}

    def to_json(self):
        return {"worlds": self.worlds, "blocks": list(self.blocks)}

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, list):
            return cls(tuple(obj))
        blocks = obj.get("blocks", [])
        if obj.get("worlds", len(blocks)) != len(blocks):
            raise OutOfRange("worlds does not match the length of blocks")
        return cls(tuple(blocks))

    @classmethod
    def cluster(cls, n):
        return cls((1,) * n)

    @classmethod
    def discrete(cls, n):
        return cls(tuple(range(1, n + 1)))


EMPTY_FRAME = FiniteFrame(())


def validate_pmorphism(mapping, src, tgt):
    """Check that ``mapping`` sends every class of ``src`` onto a class of ``tgt``."""
    mapping = tuple(int(v) for v in mapping)
    if len(mapping) != src.worlds:
        raise OutOfRange(f"map has {len(mapping)} entries, source has {src.worlds} worlds")
    for v in mapping:
        if not 1 <= v <= tgt.worlds:
            raise OutOfRange(f"map value {v} outside 1..{tgt.worlds}")
    tclasses = tgt.classes
    for cls in src.classes:
        image = {mapping[w - 1] for w in cls}
        tblocks = {tgt.blocks[v - 1] for v in image}
        if len(tblocks) > 1:
            raise NotIntoOneClass(cls[0])
        (tb,) = tblocks
        if len(image) != len(tclasses[tb - 1]):
            raise NotOnto(cls[0])
    return mapping


def is_pmorphism(mapping, src, tgt):
    try:
        validate_pmorphism(mapping, src, tgt)
    except (NotOnto, NotIntoOneClass, OutOfRange):
        return False
    return True


@dataclass(frozen=True)
class PMorphism:
    source: FiniteFrame
    target: FiniteFrame
    map: tuple

    def __post_init__(self):
        object.__setattr__(self, "map", validate_pmorphism(self.map, self.source, self.target))

    def __call__(self, w):
        return self.map[w - 1]

    def then(self, other):
        """``other ∘ self``."""
        return compose_pmorphisms(other, self)

    def to_json(self):
        return {"map": list(self.map), "source": self.source.to_json(), "target": self.target.to_json()}

    @classmethod
    def from_json(cls, obj):
        return cls(FiniteFrame.from_json(obj["source"]), FiniteFrame.from_json(obj["target"]), tuple(obj["map"]))

    @classmethod
    def identity(cls, frame):
        return cls(frame, frame, identity_map(frame.worlds))


def compose_pmorphisms(g, f):
    """``g ∘ f``."""
    if f.target != g.source:
        raise SortMismatch("p-morphisms are not composable")
    return PMorphism(f.source, g.target, tuple(g.map[v - 1] for v in f.map))


def enumerate_frames(n):
    """All frames on ``n`` worlds, one per set partition (restricted growth strings)."""
    if n == 0:
        return [EMPTY_FRAME]
    out = []

    def rec(prefix, top):
        if len(prefix) == n:
            out.append(FiniteFrame(tuple(prefix)))
            return
        for b in range(1, top + 2):
            rec(prefix + [b], max(top, b))

    rec([1], 1)
    return out


def enumerate_pmorphisms(src, tgt):
    """Every p-morphism ``src → tgt``, in lexicographic order of the map."""
    tclasses = tgt.classes
    per_class = []
    for cls in src.classes:
        options = []
        for tc in tclasses:
            for s in surjection_maps(len(cls), len(tc)):
                options.append(tuple(tc[v - 1] for v in s))
        per_class.append(options)
    sclasses = src.classes
    out = []
    for choice in product(*per_class):
        mapping = [0] * src.worlds
        for cls, vals in zip(sclasses, choice):
            for w, v in zip(cls, vals):
                mapping[w - 1] = v
        out.append(tuple(mapping))
    out.sort()
    return [PMorphism(src, tgt, m) for m in out]


def cluster_signature(frame):
    return sorted(len(c) for c in frame.classes)


# -- colimits ---------------------------------------------------------------

def frame_coproduct(frames):
    """Disjoint union and its injections; ``[]`` gives the empty frame."""
    blocks = []
    offsets = []
    nb = 0
    for fr in frames:
        offsets.append(len(blocks))
        blocks.extend(b + nb for b in fr.blocks)
        nb += fr.n_blocks
    total = FiniteFrame(tuple(blocks))
    injections = [
        PMorphism(fr, total, tuple(range(off + 1, off + fr.worlds + 1)))
        for fr, off in zip(frames, offsets)
    ]
    return total, injections


def quotient_frame(frame, labels):
    """Quotient of ``frame`` by the world labelling ``labels``.

    The relation on classes relates ``[x]`` and ``[y]`` when some members
    are related in ``frame``; raises if that relation is not transitive.
    """
    k = max(labels, default=0)
    uf = UnionFind(k)
    edges = set()
    for cls in frame.classes:
        ls = sorted({labels[w - 1] for w in cls})
        for a in ls:
            for b in ls:
                edges.add((a, b))
        for a in ls[1:]:
            uf.union(ls[0] - 1, a - 1)
    blocks = uf.labels()
    closure = {(a, b) for a in range(1, k + 1) for b in range(1, k + 1) if blocks[a - 1] == blocks[b - 1]}
    if closure != edges:
        raise ValueError("quotient relation is not an equivalence")
    return FiniteFrame(tuple(blocks))


def frame_coequalizer(f, g):
    """Coequalizer of parallel p-morphisms; returns ``(quotient, projection)``."""
    if f.source != g.source or f.target != g.target:
        raise NotParallel("frame coequalizer needs parallel p-morphisms")
    labels = coequalizer_maps(f.map, g.map, f.target.worlds) if f.target.worlds else ()
    quotient = quotient_frame(f.target, labels)
    return quotient, PMorphism(f.target, quotient, labels)


def frame_pushout(f, g):
    """Pushout of ``B <-f- A -g-> C`` as a coequalizer over ``B ⊔ C``."""
    if f.source != g.source:
        raise SourceMismatch("pushout legs must share a source")
    total, (i1, i2) = frame_coproduct([f.target, g.target])
    qf, proj = frame_coequalizer(compose_pmorphisms(i1, f), compose_pmorphisms(i2, g))
    return qf, compose_pmorphisms(proj, i1), compose_pmorphisms(proj, i2)


def factor_through(h, q):
    """The unique p-morphism ``u`` with ``u ∘ q = h`` or ``None``."""
    u = {}
    for a, b in zip(q.map, h.map):
        if u.setdefault(a, b) != b:
            return None
    mapping = tuple(u[i] for i in range(1, q.target.worlds + 1))
    try:
        return PMorphism(q.target, h.target, mapping)
    except (NotOnto, NotIntoOneClass):
        return None


# -- finite families of clusters -------------------------------------------

@dataclass(frozen=True)
class ClusterFamily:
    sizes: tuple = ()

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        if any(s < 1 for s in sizes):
            raise OutOfRange("cluster sizes must be positive")
        object.__setattr__(self, "sizes", sizes)

    @property
    def index_size(self):
        return len(self.sizes)

    def to_json(self):
        return {"sizes": list(self.sizes)}

    @classmethod
    def from_json(cls, obj):
        return cls(tuple(obj["sizes"]))


@dataclass(frozen=True)
class FamilyMorphism:
    source: ClusterFamily
    target: ClusterFamily
    index_map: tuple
    components: tuple

    def __post_init__(self):
        index_map = tuple(int(j) for j in self.index_map)
        comps = tuple(
            c if isinstance(c, Surjection) else make_surjection(c, self.target.sizes[j - 1])
            for c, j in zip(self.components, index_map)
        )
        if len(index_map) != self.source.index_size or len(comps) != self.source.index_size:
            raise OutOfRange("index map and components must cover every source index")
        for i, (j, c) in enumerate(zip(index_map, comps)):
            if not 1 <= j <= self.target.index_size:
                raise OutOfRange(f"index {j} outside 1..{self.target.index_size}")
            if c.dom != self.source.sizes[i] or c.cod != self.target.sizes[j - 1]:
                raise SortMismatch(f"component {i + 1} has the wrong domain or codomain")
        object.__setattr__(self, "index_map", index_map)
        object.__setattr__(self, "components", comps)

    def to_json(self):
        return {
            "source": self.source.to_json(),
            "target": self.target.to_json(),
            "index_map": list(self.index_map),
            "components": [list(c.image) for c in self.components],
        }

    @classmethod
    def from_json(cls, obj):
        return cls(ClusterFamily.from_json(obj["source"]), ClusterFamily.from_json(obj["target"]),
                   tuple(obj["index_map"]), tuple(tuple(c) for c in obj["components"]))

    @classmethod
    def identity(cls, fam):
        return cls(fam, fam, tuple(range(1, fam.index_size + 1)),
                   tuple(make_surjection(identity_map(s), s) for s in fam.sizes))


def compose_family_morphisms(g, f):
    """``g ∘ f`` in the category of finite families."""
    if f.target != g.source:
        raise SortMismatch("family morphisms are not composable")
    index_map = tuple(g.index_map[j - 1] for j in f.index_map)
    comps = tuple(
        make_surjection(compose_maps(g.components[j - 1].image, c.image), g.components[j - 1].cod)
        for j, c in zip(f.index_map, f.components)
    )
    return FamilyMorphism(f.source, g.target, index_map, comps)


def to_cluster_family(frame):
    return ClusterFamily(tuple(len(c) for c in frame.classes))


def from_cluster_family(fam):
    return FiniteFrame(tuple(b for b, s in enumerate(fam.sizes, 1) for _ in range(s)))


def contiguous_relabeling(frame):
    """Isomorphism ``frame → from_cluster_family(to_cluster_family(frame))``."""
    mapping = [0] * frame.worlds
    pos = 1
    for cls in frame.classes:
        for w in cls:
            mapping[w - 1] = pos
            pos += 1
    return PMorphism(frame, from_cluster_family(to_cluster_family(frame)), tuple(mapping))


def pmorphism_to_family(f):
    src, tgt = f.source, f.target
    tclasses = tgt.classes
    position = {}
    for cls in tclasses:
        for i, v in enumerate(cls, 1):
            position[v] = i
    index_map, comps = [], []
    for cls in src.classes:
        j = tgt.blocks[f.map[cls[0] - 1] - 1]
        index_map.append(j)
        comps.append(make_surjection([position[f.map[w - 1]] for w in cls], len(tclasses[j - 1])))
    return FamilyMorphism(to_cluster_family(src), to_cluster_family(tgt), tuple(index_map), tuple(comps))


def family_to_pmorphism(m):
    src, tgt = from_cluster_family(m.source), from_cluster_family(m.target)
    offsets = [0]
    for s in m.target.sizes:
        offsets.append(offsets[-1] + s)
    mapping = []
    for j, c in zip(m.index_map, m.components):
        mapping.extend(offsets[j - 1] + v for v in c.image)
    return PMorphism(src, tgt, tuple(mapping))


def family_coequalizer(f, g):
    """Coequalizer in finite families of clusters, returns ``(family, projection)``.

    Phase 1 merges the two target indices of some ``i`` with ``f(i) != g(i)``
    by pushing out the component pair, until the index maps agree.  Phase 2
    coequalizes, inside each target cluster, all component pairs landing there.
    """
    if f.source != g.source or f.target != g.target:
        raise NotParallel("family coequalizer needs parallel morphisms")
    Y = f.target
    sizes = list(Y.sizes)
    fi, gi = list(f.index_map), list(g.index_map)
    phi = [c.image for c in f.components]
    gam = [c.image for c in g.components]
    proj_index = list(range(1, len(sizes) + 1))
    proj_comp = [identity_map(s) for s in sizes]

    while True:
        i = next((i for i in range(len(fi)) if fi[i] != gi[i]), None)
        if i is None:
            break
        j1, j2 = fi[i], gi[i]
        a, b = pushout_maps(phi[i], gam[i], sizes[j1 - 1], sizes[j2 - 1])
        lo, hi = min(j1, j2), max(j1, j2)
        legs = {j1: a, j2: b}

        def p(j):
            if j in legs:
                return lo
            return j - 1 if j > hi else j

        def push(j, comp):
            return compose_maps(legs[j], comp) if j in legs else comp

        phi = [push(j, c) for j, c in zip(fi, phi)]
        gam = [push(j, c) for j, c in zip(gi, gam)]
        fi = [p(j) for j in fi]
        gi = [p(j) for j in gi]
        proj_comp = [push(j, c) for j, c in zip(proj_index, proj_comp)]
        proj_index = [p(j) for j in proj_index]
        sizes[lo - 1] = max(a)
        del sizes[hi - 1]

    eta = [identity_map(s) for s in sizes]
    for i, j in enumerate(fi):
        e = eta[j - 1]
        q = coequalizer_maps(compose_maps(e, phi[i]), compose_maps(e, gam[i]), max(e))
        eta[j - 1] = compose_maps(q, e)
    Z = ClusterFamily(tuple(max(e) for e in eta))
    comps = tuple(compose_maps(eta[j - 1], c) for j, c in zip(proj_index, proj_comp))
    return Z, FamilyMorphism(Y, Z, tuple(proj_index), comps)


def coequalizer_intertwiner(f, g):
    """Compare ``frame_coequalizer`` with ``family_coequalizer`` on ``f, g``.

    Returns the frame isomorphism ``h`` between the two quotients with
    ``h ∘ q_frame = q_family ∘ relabel`` or ``None`` if they disagree.
    """
    quot, q = frame_coequalizer(f, g)
    Z, proj = family_coequalizer(pmorphism_to_family(f), pmorphism_to_family(g))
    if cluster_signature(quot) != sorted(Z.sizes):
        return None
    qfam = family_to_pmorphism(proj)
    relabel = contiguous_relabeling(f.target)
    other = compose_pmorphisms(qfam, relabel)
    h = {}
    for a, b in zip(q.map, other.map):
        if h.setdefault(a, b) != b:
            return None
    mapping = tuple(h[i] for i in range(1, quot.worlds + 1))
    if len(set(mapping)) != len(mapping):
        return None
    zf = from_cluster_family(Z)
    if not is_pmorphism(mapping, quot, zf):
        return None
    inv = [0] * len(mapping)
    for i, v in enumerate(mapping, 1):
        inv[v - 1] = i
    if not is_pmorphism(inv, zf, quot):
        return None
    return PMorphism(quot, zf, mapping)
