"""Model checking truncated presheaves against the theories T1, T2 and lex preservation.

A structure is a :class:`~s5lift.presheaves.TruncatedPresheaf`; the symbol for a
surjection ``f: k↠n`` is interpreted as ``M(f): M_n → M_k``.  Every quantifier
ranges over sorts ``1..N`` only.

When axiom (1) holds, (3) and (6) are evaluated through normal forms: a pair
``(g, y)`` is moved to ``(σ_g ∘ g, M(σ_g⁻¹)(y))`` where ``σ_g`` renumbers the
values of ``g`` by first occurrence.  Two pairs are related by some ``σ``
exactly when their normal forms coincide, so each axiom reduces to
injectivity of ``(h, y) ↦ M(h)(y)`` over first-occurrence ``h``.  Lex
preservation is checked on one diagram per orbit of simultaneous
re-indexing of the common domain.  Both reductions need (1); structures that
fail it are evaluated pairwise instead.
"""

from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from math import factorial

import numpy as np

from .errors import ClusterExceedsTruncation, NonIntegralOrbit, NotAModel
from .frames import FiniteFrame
from .lifting import cached_lifting
from .actions import canonical_action
from .presheaves import disjoint_union_presheaves, empty_presheaf, functoriality_violation
from .surjections import (
    PERMUTATION_CAP,
    coequalizer_maps,
    compose_maps,
    identity_map,
    maps_from,
    permutation_maps,
    pushout_maps,
    surjection_maps,
)


def _truncation_note(N):
    return f"sorts 1..{N} only; quantifiers over surjections with domain <= {N}"


@dataclass
class AxiomReport:
    axiom: str
    holds: bool
    witnesses: list = field(default_factory=list)
    counterexample: dict = None
    note: str = ""

    def to_json(self):
        out = {
            "axiom": self.axiom,
            "verdict": "pass" if self.holds else "fail",
            "witnesses": self.witnesses,
            "counterexample": self.counterexample,
        }
        if self.note:
            out["note"] = self.note
        return out


@dataclass
class TheoryReport:
    theory: str
    N: int
    axioms: list

    @property
    def passed(self):
        return all(a.holds for a in self.axioms)

    def axiom(self, name):
        return next(a for a in self.axioms if a.axiom == name)

    def to_json(self):
        return {
            "theory": self.theory,
            "truncation": _truncation_note(self.N),
            "verdict": "pass" if self.passed else "fail",
            "axioms": [a.to_json() for a in self.axioms],
        }


# -- basic evaluation ---------------------------------------------------------

def check_fix_trivial(M, n, x, cap=PERMUTATION_CAP):
    """``Fix(x) = {1}``: no non-identity ``σ ∈ S_n`` fixes ``x``."""
    if n > cap:
        from .errors import CapExceeded

        raise CapExceeded(f"S_{n} exceeds the cap {cap}")
    ident = identity_map(n)
    return all(M.act(p, x) != x for p in permutation_maps(n) if p != ident)


def faithful_masks(M):
    """Per level, a boolean mask of the fix-trivial elements."""
    out = []
    for n in range(1, M.N + 1):
        size = M.size(n)
        mask = np.ones(size, dtype=bool)
        ident = identity_map(n)
        own = np.arange(1, size + 1)
        for p in permutation_maps(n):
            if p != ident:
                mask &= M.maps[p] != own
        out.append(mask)
    return out


def _faithful_ids(masks):
    return [np.flatnonzero(mk) + 1 for mk in masks]


@lru_cache(maxsize=None)
def canonical_maps_from(n):
    """Surjections out of ``n`` whose values appear in first-occurrence order."""
    out = []
    for q in maps_from(n):
        nxt = 1
        ok = True
        for v in q:
            if v > nxt:
                ok = False
                break
            if v == nxt:
                nxt += 1
        if ok:
            out.append(q)
    return tuple(out)


def _axiom1(M):
    bad = functoriality_violation(M)
    return AxiomReport("(1)", bad is None, counterexample=bad,
                       note="identity and composition; composition checked on generating squares")


def _preimage_data(M, fids):
    """For every level ``n``, ``hits[n][m]``: witness counts of ``x = M(f)(y)`` with ``y`` fix-trivial at ``m``."""
    hits = {}
    for n in range(1, M.N + 1):
        per_m = {}
        for f in maps_from(n):
            m = max(f)
            ys = fids[m - 1]
            if not ys.size:
                continue
            vals = M.maps[f][ys - 1]
            arr = per_m.setdefault(m, np.zeros(M.size(n), dtype=np.int64))
            np.add.at(arr, vals - 1, 1)
        hits[n] = per_m
    return hits


def _find_sigma(M, f, x, g, y):
    """Brute force over ``S_n``: some ``σ`` with ``σ ∘ f = g`` and ``M(σ)(y) = x``."""
    n = max(f)
    if max(g) != n or len(f) != len(g):
        return None
    # σ ∘ f = g forces σ(f(i)) = g(i)
    sigma = [0] * n
    for a, b in zip(f, g):
        if sigma[a - 1] not in (0, b):
            return None
        sigma[a - 1] = b
    if len(set(sigma)) != n:
        return None
    sigma = tuple(sigma)
    return sigma if M.act(sigma, y) == x else None


# -- pairwise evaluation (used when (1) fails) ------------------------------

def _pairwise_collision(M, fids, same_target):
    for k in range(1, M.N + 1):
        buckets = {}
        for f in maps_from(k):
            ys = fids[max(f) - 1]
            tab = M.maps[f]
            for y in ys:
                buckets.setdefault(int(tab[y - 1]), []).append((f, int(y)))
        for z, entries in sorted(buckets.items()):
            for f, x in entries:
                for g, y in entries:
                    if same_target and max(f) != max(g):
                        continue
                    if _find_sigma(M, f, x, g, y) is None:
                        return {"f": list(f), "x": x, "g": list(g), "y": y, "value": z, "sort": k}
    return None


def _normal_form_collision(M, ids_by_level, same_target):
    """First pair of distinct normal forms with a common value, else ``None``."""
    for k in range(1, M.N + 1):
        seen = {}
        for h in canonical_maps_from(k):
            m = max(h)
            ys = ids_by_level[m - 1]
            if not ys.size:
                continue
            vals = M.maps[h][ys - 1]
            key_m = m if same_target else 0
            for y, z in zip(ys.tolist(), vals.tolist()):
                prev = seen.setdefault((key_m, z), (h, y))
                if prev != (h, y):
                    g, yy = prev
                    return {"f": list(h), "x": y, "g": list(g), "y": yy, "value": z, "sort": k}
    return None


# -- T1 ------------------------------------------------------------------------

def check_T1(M, exhaustive=None):
    """Axioms (1)–(3) of T1 and the derived injectivity (4)."""
    ax1 = _axiom1(M)
    masks = faithful_masks(M)
    fids = _faithful_ids(masks)
    hits = _preimage_data(M, fids)

    cex2, witnesses = None, []
    for n in range(1, M.N + 1):
        total = sum(hits[n].values()) if hits[n] else np.zeros(M.size(n), dtype=np.int64)
        missing = np.flatnonzero(np.asarray(total) == 0)
        if missing.size and cex2 is None:
            cex2 = {"sort": n, "x": int(missing[0]) + 1}
        for m, arr in sorted(hits[n].items()):
            counts = Counter(arr[arr > 0].tolist())
            for c, how_many in sorted(counts.items()):
                witnesses.append({"sort": n, "m": m, "witnesses": c, "elements": how_many})
    ax2 = AxiomReport("(2)", cex2 is None, witnesses, cex2)

    pairwise = exhaustive if exhaustive is not None else ax1.counterexample is not None
    if pairwise:
        cex3 = _pairwise_collision(M, fids, same_target=False)
        note = "pairwise over all witnesses"
    else:
        cex3 = _normal_form_collision(M, fids, same_target=False)
        note = "via first-occurrence normal forms"
    ax3 = AxiomReport("(3)", cex3 is None, counterexample=cex3, note=note)

    cex4 = None
    for q in sorted(M.maps, key=lambda q: (len(q), q)):
        t = M.maps[q]
        if len(np.unique(t)) != len(t):
            vals, first = {}, None
            for x, v in enumerate(t.tolist(), 1):
                if v in vals:
                    first = (vals[v], x)
                    break
                vals[v] = x
            cex4 = {"f": list(q), "x": first[0], "y": first[1]}
            break
    ax4 = AxiomReport("(4)", cex4 is None, counterexample=cex4, note="derived; reported, implied by (1)-(3)")
    return TheoryReport("T1", M.N, [ax1, ax2, ax3, ax4])


def witness_multiplicity(M):
    """``{(sort, m): witness counts}`` for every element with a fix-trivial preimage."""
    hits = _preimage_data(M, _faithful_ids(faithful_masks(M)))
    out = {}
    for n, per_m in hits.items():
        for m, arr in per_m.items():
            out[(n, m)] = sorted(set(arr[arr > 0].tolist()))
    return out


# -- T2 ------------------------------------------------------------------------

def check_T2(M, fix_trivial_only=True, exhaustive=None):
    """Axioms (1), (5) and (6) of T2.

    (6) reads ``q₁(x₁) = q₂(x₂) → ∃σ (σ ∘ q₂ = q₁ ∧ σ(x₁) = x₂)``; with
    ``fix_trivial_only`` the ``x``'s range over fix-trivial elements only.
    """
    ax1 = _axiom1(M)
    masks = faithful_masks(M)
    fids = _faithful_ids(masks)
    hits = _preimage_data(M, fids)

    cex5, witnesses = None, []
    for n in range(1, M.N + 1):
        levels = np.zeros(M.size(n), dtype=np.int64)
        for m, arr in hits[n].items():
            levels += arr > 0
        bad = np.flatnonzero(levels != 1)
        if bad.size and cex5 is None:
            x = int(bad[0]) + 1
            ms = sorted(m for m, arr in hits[n].items() if arr[x - 1] > 0)
            cex5 = {"sort": n, "x": x, "levels_with_preimage": ms}
        for m in sorted(hits[n]):
            witnesses.append({"sort": n, "m": m, "elements": int((hits[n][m] > 0).sum())})
    ax5 = AxiomReport("(5)", cex5 is None, witnesses, cex5, note="exclusive-or read as exactly one m")

    if fix_trivial_only:
        ids = fids
    else:
        ids = [np.arange(1, M.size(n) + 1) for n in range(1, M.N + 1)]
    pairwise = exhaustive if exhaustive is not None else ax1.counterexample is not None
    if pairwise:
        cex6 = _pairwise_collision(M, ids, same_target=True)
    else:
        cex6 = _normal_form_collision(M, ids, same_target=True)
    if cex6:
        # report in the (q1, x1, q2, x2) orientation of (6)
        cex6 = {"q1": cex6["g"], "x1": cex6["y"], "q2": cex6["f"], "x2": cex6["x"],
                "value": cex6["value"], "sort": cex6["sort"]}
    note = "x ranges over fix-trivial elements" if fix_trivial_only else "x ranges over all elements"
    ax6 = AxiomReport("(6)", cex6 is None, counterexample=cex6, note=note)
    return TheoryReport("T2", M.N, [ax1, ax5, ax6])


# -- lex preservation ---------------------------------------------------------

@lru_cache(maxsize=None)
def coequalizer_diagrams(k, reduced=True):
    """``(f, g, q)`` for parallel ``f, g: k↠n`` with coequalizer ``q``."""
    out = []
    for f in maps_from(k):
        for g in surjection_maps(k, max(f)):
            if reduced and list(zip(f, g)) != sorted(zip(f, g)):
                continue
            out.append((f, g, coequalizer_maps(f, g, max(f))))
    return tuple(out)


@lru_cache(maxsize=None)
def pushout_diagrams(k, reduced=True):
    """``(f, g, f', g')`` for ``f: k↠n``, ``g: k↠m`` and their pushout."""
    out = []
    for f in maps_from(k):
        if reduced and list(f) != sorted(f):
            continue
        for g in maps_from(k):
            if reduced and list(zip(f, g)) != sorted(zip(f, g)):
                continue
            a, b = pushout_maps(f, g, max(f), max(g))
            out.append((f, g, a, b))
    return tuple(out)


def check_lex_preservation(M, exhaustive=None):
    """Coequalizers go to equalizers and pushouts to pullbacks, on sorts ``<= N``."""
    ax1 = _axiom1(M)
    full = exhaustive if exhaustive is not None else ax1.counterexample is not None
    N = M.N

    eq_cex = None
    checked = 0
    for k in range(1, N + 1):
        for f, g, q in coequalizer_diagrams(k, reduced=not full):
            checked += 1
            tq = M.maps[q]
            agree = M.maps[f] == M.maps[g]
            uq = np.unique(tq)
            if len(uq) != len(tq):
                vals = tq.tolist()
                x1 = vals.index(vals[[vals.count(v) > 1 for v in vals].index(True)]) + 1
                x2 = vals.index(vals[x1 - 1], x1) + 1
                eq_cex = {"f": list(f), "g": list(g), "q": list(q), "kind": "injective", "x1": x1, "x2": x2}
            elif tq.size and not agree[tq - 1].all():
                x = int(tq[np.flatnonzero(~agree[tq - 1])[0]])
                eq_cex = {"f": list(f), "g": list(g), "q": list(q), "kind": "image_inside", "x": x}
            elif int(agree.sum()) != len(uq):
                image = set(uq.tolist())
                x = next(int(i) + 1 for i in np.flatnonzero(agree) if int(i) + 1 not in image)
                eq_cex = {"f": list(f), "g": list(g), "q": list(q), "kind": "image_covers", "x": x}
            if eq_cex:
                break
        if eq_cex:
            break
    note = "one diagram per re-indexing orbit" if not full else "all diagrams"
    ax_eq = AxiomReport("equalizers", eq_cex is None, [{"diagrams": checked}], eq_cex, note)

    pb_cex = None
    checked = 0
    for k in range(1, N + 1):
        for f, g, a, b in pushout_diagrams(k, reduced=not full):
            checked += 1
            vf, vg = M.maps[f], M.maps[g]
            za, zb = M.maps[a], M.maps[b]
            if not za.size:
                pairs_count = 0
                if vf.size and vg.size:
                    pairs_count = int((np.bincount(vf, minlength=M.size(k) + 1)
                                       * np.bincount(vg, minlength=M.size(k) + 1)).sum())
                if pairs_count:
                    x, y = _first_pair(vf, vg)
                    pb_cex = {"f": list(f), "g": list(g), "f_push": list(a), "g_push": list(b),
                              "kind": "covering", "x": x, "y": y}
                    break
                continue
            inside = vf[za - 1] == vg[zb - 1]
            if not inside.all():
                z = int(np.flatnonzero(~inside)[0]) + 1
                pb_cex = {"f": list(f), "g": list(g), "f_push": list(a), "g_push": list(b),
                          "kind": "commutes", "z": z}
                break
            width = max(M.size(len(b)), 1)
            codes = (za.astype(np.int64) - 1) * width + (zb.astype(np.int64) - 1)
            uc, first = np.unique(codes, return_index=True)
            if len(uc) != len(codes):
                dup = np.setdiff1d(np.arange(len(codes)), first)[0]
                z1 = int(first[np.searchsorted(uc, codes[dup])]) + 1
                pb_cex = {"f": list(f), "g": list(g), "f_push": list(a), "g_push": list(b),
                          "kind": "joint_injective", "z1": z1, "z2": int(dup) + 1}
                break
            size_k = M.size(k) + 1
            pairs_count = int((np.bincount(vf, minlength=size_k) * np.bincount(vg, minlength=size_k)).sum())
            if pairs_count != len(uc):
                image = set(zip(za.tolist(), zb.tolist()))
                x, y = next((x, y) for x, y in _all_pairs(vf, vg) if (x, y) not in image)
                pb_cex = {"f": list(f), "g": list(g), "f_push": list(a), "g_push": list(b),
                          "kind": "covering", "x": x, "y": y}
                break
        if pb_cex:
            break
    ax_pb = AxiomReport("pullbacks", pb_cex is None, [{"diagrams": checked}], pb_cex, note)
    return TheoryReport("lex", N, [ax1, ax_eq, ax_pb])


def _all_pairs(vf, vg):
    by_value = {}
    for y, v in enumerate(vg.tolist(), 1):
        by_value.setdefault(v, []).append(y)
    for x, v in enumerate(vf.tolist(), 1):
        for y in by_value.get(v, ()):
            yield x, y


def _first_pair(vf, vg):
    return next(_all_pairs(vf, vg))


# -- self-validating reports --------------------------------------------------

def instance_holds(M, axiom, cex, fix_trivial_only=True):
    """Re-evaluate the axiom instance named by a counterexample by brute force."""
    if axiom == "(1)":
        if cex["kind"] == "identity":
            return M.act(identity_map(cex["level"]), cex["element"]) == cex["element"]
        g, f, e = tuple(cex["g"]), tuple(cex["f"]), cex["element"]
        return M.act(f, M.act(g, e)) == M.act(compose_maps(g, f), e)
    if axiom in ("(2)", "(5)"):
        n, x = cex["sort"], cex["x"]
        levels = set()
        for f in maps_from(n):
            m = max(f)
            for y in range(1, M.size(m) + 1):
                if M.act(f, y) == x and check_fix_trivial(M, m, y):
                    levels.add(m)
        return bool(levels) if axiom == "(2)" else len(levels) == 1
    if axiom == "(3)":
        f, x, g, y = tuple(cex["f"]), cex["x"], tuple(cex["g"]), cex["y"]
        if not (check_fix_trivial(M, max(f), x) and check_fix_trivial(M, max(g), y)):
            return True
        if M.act(f, x) != M.act(g, y):
            return True
        return _find_sigma(M, f, x, g, y) is not None
    if axiom == "(4)":
        f = tuple(cex["f"])
        return M.act(f, cex["x"]) != M.act(f, cex["y"]) or cex["x"] == cex["y"]
    if axiom == "(6)":
        q1, x1, q2, x2 = tuple(cex["q1"]), cex["x1"], tuple(cex["q2"]), cex["x2"]
        if fix_trivial_only and not (check_fix_trivial(M, max(q1), x1) and check_fix_trivial(M, max(q2), x2)):
            return True
        if M.act(q1, x1) != M.act(q2, x2):
            return True
        return _find_sigma(M, q2, x2, q1, x1) is not None
    if axiom == "equalizers":
        f, g, q = tuple(cex["f"]), tuple(cex["g"]), tuple(cex["q"])
        if cex["kind"] == "injective":
            return M.act(q, cex["x1"]) != M.act(q, cex["x2"]) or cex["x1"] == cex["x2"]
        x = cex["x"]
        in_eq = M.act(f, x) == M.act(g, x)
        in_image = any(M.act(q, z) == x for z in range(1, M.size(max(q)) + 1))
        return in_eq == in_image
    if axiom == "pullbacks":
        f, g, a, b = (tuple(cex[k]) for k in ("f", "g", "f_push", "g_push"))
        r = max(a)
        if cex["kind"] == "joint_injective":
            z1, z2 = cex["z1"], cex["z2"]
            return z1 == z2 or (M.act(a, z1), M.act(b, z1)) != (M.act(a, z2), M.act(b, z2))
        if cex["kind"] == "commutes":
            z = cex["z"]
            return M.act(f, M.act(a, z)) == M.act(g, M.act(b, z))
        x, y = cex["x"], cex["y"]
        if M.act(f, x) != M.act(g, y):
            return True
        return any(M.act(a, z) == x and M.act(b, z) == y for z in range(1, M.size(r) + 1))
    raise KeyError(axiom)


# -- classification -----------------------------------------------------------

@dataclass
class Classification:
    counts: dict
    frame: FiniteFrame

    def to_json(self):
        return {"clusters": {str(m): c for m, c in sorted(self.counts.items())}, "frame": self.frame.to_json()}


def classify_model(M, check=True):
    """Cluster multiset ``{m: |fix-trivial M_m| / m!}`` of a T2-model and its frame."""
    if check:
        rep = check_T2(M)
        if not rep.passed:
            failed = [a.axiom for a in rep.axioms if not a.holds]
            raise NotAModel(f"structure fails T2 axioms {failed}")
    counts = {}
    for n, mask in enumerate(faithful_masks(M), 1):
        size = int(mask.sum())
        if not size:
            continue
        if size % factorial(n):
            raise NonIntegralOrbit(f"{size} fix-trivial elements at sort {n} is not a multiple of {n}!")
        counts[n] = size // factorial(n)
    blocks = []
    for m, c in sorted(counts.items()):
        for _ in range(c):
            b = len(set(blocks)) + 1
            blocks.extend([b] * m)
    return Classification(counts, FiniteFrame(tuple(blocks)))


def _as_multiset(sizes):
    if isinstance(sizes, dict):
        return {int(m): int(c) for m, c in sizes.items() if int(c)}
    return dict(Counter(int(s) for s in sizes))


def model_from_frame(sizes, N):
    """Disjoint union of canonical liftings, one per cluster, truncated at ``N``."""
    ms = _as_multiset(sizes)
    if any(m < 1 for m in ms):
        raise ClusterExceedsTruncation("cluster sizes must be positive")
    too_big = [m for m in ms if m > N]
    if too_big:
        raise ClusterExceedsTruncation(f"clusters of size {sorted(too_big)} exceed the truncation level {N}")
    summands = [cached_lifting(canonical_action(m), N) for m in sorted(ms) for _ in range(ms[m])]
    if not summands:
        return empty_presheaf(N)
    return disjoint_union_presheaves(summands)
