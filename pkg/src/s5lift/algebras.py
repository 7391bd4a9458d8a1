"""Finite S5-algebras as powerset algebras with a tabulated box operator.

Elements are bitmasks over atoms ``1..n`` (bit ``w - 1`` is world ``w``).
The box table is stored in full, which lets corrupted algebras exist as
values so that the axiom checker and the duality functors can reject them.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import AtomClash, CapExceeded, NoAtomCover, NotEquivalence, NotHomomorphism, NotS5, OutOfRange
from .frames import FiniteFrame, PMorphism

ATOM_CAP = 12


def _check_cap(n, cap):
    if n > cap:
        raise CapExceeded(f"{n} atoms gives 2^{n} elements; cap is {cap}")


@dataclass(frozen=True)
class S5Algebra:
    atoms: int
    box: tuple

    def __post_init__(self):
        box = tuple(int(b) for b in self.box)
        if self.atoms < 0:
            raise OutOfRange("atom count must be non-negative")
        size = 1 << self.atoms
        if len(box) != size:
            raise OutOfRange(f"box table needs {size} entries, got {len(box)}")
        if any(not 0 <= b < size for b in box):
            raise OutOfRange("box value outside the carrier")
        object.__setattr__(self, "box", box)

    @property
    def size(self):
        return 1 << self.atoms

    @property
    def top(self):
        return self.size - 1

    def neg(self, x):
        return self.top ^ x

    def dia(self, x):
        return self.top ^ self.box[self.top ^ x]

    def to_json(self):
        return {"atoms": self.atoms, "box": list(self.box)}

    @classmethod
    def from_json(cls, obj):
        return cls(int(obj["atoms"]), tuple(obj["box"]))


def subset_to_mask(worlds):
    m = 0
    for w in worlds:
        m |= 1 << (w - 1)
    return m


def mask_to_subset(mask):
    return {i + 1 for i in range(mask.bit_length()) if mask >> i & 1}


def frame_to_algebra(frame, cap=ATOM_CAP):
    """Powerset algebra of ``frame`` with ``□S = {w | every v related to w is in S}``."""
    n = frame.worlds
    _check_cap(n, cap)
    block_masks = [subset_to_mask(c) for c in frame.classes]
    box = []
    for s in range(1 << n):
        out = 0
        for bm in block_masks:
            if bm & s == bm:
                out |= bm
        box.append(out)
    return S5Algebra(n, tuple(box))


def discrete_algebra(n):
    return S5Algebra(n, tuple(range(1 << n)))


def simple_algebra(n):
    """``□S = ⊤`` if ``S = ⊤`` else ``⊥``: the dual of the ``n``-cluster."""
    top = (1 << n) - 1
    return S5Algebra(n, tuple(top if s == top else 0 for s in range(1 << n)))


@dataclass
class AxiomCheck:
    name: str
    holds: bool
    counterexample: dict = field(default_factory=dict)


@dataclass
class S5Report:
    checks: list

    @property
    def passed(self):
        return all(c.holds for c in self.checks)

    def to_json(self):
        return {
            "verdict": "pass" if self.passed else "fail",
            "axioms": [
                {"axiom": c.name, "verdict": "pass" if c.holds else "fail", "counterexample": c.counterexample or None}
                for c in self.checks
            ],
        }


def check_s5_axioms(alg):
    """Evaluate the four S5 identities exhaustively, first counterexample per axiom."""
    top = alg.top
    box = np.asarray(alg.box, dtype=np.int64)
    elems = np.arange(alg.size, dtype=np.int64)
    checks = [AxiomCheck("box_top", alg.box[top] == top, {} if alg.box[top] == top else {"x": top})]

    meet = AxiomCheck("box_meet", True)
    for x in range(alg.size):
        lhs = box[x & elems]
        rhs = box[x] & box
        bad = np.flatnonzero(lhs != rhs)
        if bad.size:
            meet = AxiomCheck("box_meet", False, {"x": x, "y": int(bad[0])})
            break
    checks.append(meet)

    bad = np.flatnonzero((box & ~elems) != 0)
    checks.append(AxiomCheck("box_deflationary", not bad.size, {"x": int(bad[0])} if bad.size else {}))

    dia = top ^ box[top ^ elems]
    box_dia = box[dia]
    bad = np.flatnonzero((elems & ~box_dia) != 0)
    checks.append(AxiomCheck("x_le_box_dia", not bad.size, {"x": int(bad[0])} if bad.size else {}))
    return S5Report(checks)


def algebra_to_frame(alg):
    """Atoms become worlds; ``a`` and ``b`` share a block iff ``b ≤ ◇{a}``."""
    report = check_s5_axioms(alg)
    if not report.passed:
        failed = [c.name for c in report.checks if not c.holds]
        raise NotS5(f"S5 axioms fail: {', '.join(failed)}")
    n = alg.atoms
    rel = [[bool(alg.dia(1 << a) >> b & 1) for b in range(n)] for a in range(n)]
    for a in range(n):
        for b in range(n):
            if rel[a][b] != rel[b][a] or not rel[a][a]:
                raise NotEquivalence(f"recovered relation fails at atoms {a + 1}, {b + 1}")
            for c in range(n):
                if rel[a][b] and rel[b][c] and not rel[a][c]:
                    raise NotEquivalence(f"recovered relation not transitive at {a + 1}, {b + 1}, {c + 1}")
    labels = []
    for a in range(n):
        labels.append(next(b for b in range(n) if rel[a][b]) + 1)
    return FiniteFrame(tuple(labels))


@dataclass(frozen=True)
class AlgebraHom:
    source: S5Algebra
    target: S5Algebra
    map: tuple

    def __post_init__(self):
        mapping = tuple(int(v) for v in self.map)
        if len(mapping) != self.source.size:
            raise OutOfRange("hom table must cover every source element")
        if any(not 0 <= v < self.target.size for v in mapping):
            raise OutOfRange("hom value outside the target carrier")
        object.__setattr__(self, "map", mapping)

    def __call__(self, x):
        return self.map[x]

    def to_json(self):
        return {"map": list(self.map), "source": self.source.to_json(), "target": self.target.to_json()}

    @classmethod
    def from_json(cls, obj):
        return cls(S5Algebra.from_json(obj["source"]), S5Algebra.from_json(obj["target"]), tuple(obj["map"]))


def hom_violations(h):
    """Names of the operations ``h`` fails to preserve (empty for a homomorphism)."""
    src, tgt = h.source, h.target
    m = np.asarray(h.map, dtype=np.int64)
    elems = np.arange(src.size, dtype=np.int64)
    bad = []
    if h.map[0] != 0:
        bad.append("bottom")
    if h.map[src.top] != tgt.top:
        bad.append("top")
    if np.any(m[src.top ^ elems] != (tgt.top ^ m)):
        bad.append("neg")
    tbox = np.asarray(tgt.box, dtype=np.int64)
    if np.any(m[np.asarray(src.box, dtype=np.int64)] != tbox[m]):
        bad.append("box")
    meet_ok = join_ok = True
    for x in range(src.size):
        if meet_ok and np.any(m[x & elems] != (m[x] & m)):
            meet_ok = False
        if join_ok and np.any(m[x | elems] != (m[x] | m)):
            join_ok = False
        if not (meet_ok or join_ok):
            break
    if not meet_ok:
        bad.append("meet")
    if not join_ok:
        bad.append("join")
    return bad


def pmorphism_to_hom(f, cap=ATOM_CAP):
    """Inverse image ``S ↦ f⁻¹(S)`` from the target's algebra to the source's."""
    src_alg = frame_to_algebra(f.target, cap)
    tgt_alg = frame_to_algebra(f.source, cap)
    bits = [1 << (v - 1) for v in f.map]
    table = []
    for s in range(src_alg.size):
        out = 0
        for w, b in enumerate(bits):
            if s & b:
                out |= 1 << w
        table.append(out)
    h = AlgebraHom(src_alg, tgt_alg, tuple(table))
    bad = hom_violations(h)
    if bad:
        raise NotHomomorphism(f"inverse image fails to preserve {bad}")
    return h


def hom_to_pmorphism(h):
    """Recover ``f(w)`` as the unique atom ``v`` of ``h.source`` with ``w ∈ h({v})``."""
    bad = hom_violations(h)
    if bad:
        raise NotHomomorphism(f"not a homomorphism: fails to preserve {bad}")
    src_frame = algebra_to_frame(h.target)
    tgt_frame = algebra_to_frame(h.source)
    owner = [0] * h.target.atoms
    for v in range(h.source.atoms):
        image = h.map[1 << v]
        for w in range(h.target.atoms):
            if image >> w & 1:
                if owner[w]:
                    raise AtomClash(f"world {w + 1} lies in the images of atoms {owner[w]} and {v + 1}")
                owner[w] = v + 1
    if not all(owner):
        raise NoAtomCover(f"world {owner.index(0) + 1} lies in no atom image")
    return PMorphism(src_frame, tgt_frame, tuple(owner))
