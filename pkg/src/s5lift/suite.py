"""The acceptance corpus: nine exhaustive or seeded checks over small instances.

Every randomized part draws from ``numpy.random.default_rng([seed, number])``
so each criterion is reproducible on its own and reports contain no timings.
"""

from dataclasses import dataclass, field
from itertools import product
from math import factorial

import numpy as np

from .actions import (
    SymmetricAction,
    canonical_action,
    cycle_perm,
    disjoint_union_actions,
    relabel_action,
    swap_perm,
    trivial_action,
    validate_action,
)
from .algebras import (
    algebra_to_frame,
    check_s5_axioms,
    frame_to_algebra,
    hom_to_pmorphism,
    pmorphism_to_hom,
)
from .frames import (
    FiniteFrame,
    cluster_signature,
    coequalizer_intertwiner,
    enumerate_frames,
    enumerate_pmorphisms,
    factor_through,
    frame_coequalizer,
)
from .lifting import (
    canonical_lifting,
    cached_lifting,
    counting_law,
    enumerate_nat_transformations,
    induced_transformation,
    is_isomorphism,
    representability_iso,
    verify_lifting_conditions,
)
from .mutants import cross_level_glue, extra_fixed_point, orbit_merge, redirect
from .presheaves import disjoint_union_presheaves, is_natural, representable
from .surjections import (
    coequalizer_maps,
    compose_maps,
    count_surjections,
    enumerate_surjections,
    invert_map,
    maps_from,
    permutation_maps,
    pushout_maps,
    surjection_maps,
)
from .theory import (
    check_lex_preservation,
    check_T1,
    check_T2,
    classify_model,
    instance_holds,
    model_from_frame,
    witness_multiplicity,
)


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    details: dict = field(default_factory=dict)

    def line(self):
        return f"criterion {self.number} [{'PASS' if self.passed else 'FAIL'}] {self.title}"

    def to_json(self):
        return {"criterion": self.number, "title": self.title,
                "verdict": "pass" if self.passed else "fail", "details": self.details}


def _rng(seed, number):
    return np.random.default_rng([seed, number])


# -- 1 ---------------------------------------------------------------------------

def surjection_counts(seed=0):
    mismatches = []
    total = 0
    for n in range(1, 8):
        for m in range(1, n + 1):
            got = len(enumerate_surjections(n, m))
            total += got
            if got != count_surjections(n, m):
                mismatches.append([n, m, got, count_surjections(n, m)])
    return CriterionResult(1, "surjection counts match inclusion-exclusion for m <= n <= 7",
                           not mismatches, {"enumerated": total, "mismatches": mismatches})


# -- 2 ---------------------------------------------------------------------------

def _set_coequalizers(limit):
    checked, failures = 0, []
    for k in range(1, limit + 1):
        for n in range(1, k + 1):
            for f, g in product(surjection_maps(k, n), repeat=2):
                q = coequalizer_maps(f, g, n)
                if compose_maps(q, f) != compose_maps(q, g):
                    failures.append({"f": f, "g": g, "kind": "cocone"})
                    continue
                for h in maps_from(n):
                    if compose_maps(h, f) != compose_maps(h, g):
                        continue
                    checked += 1
                    hits = [u for u in maps_from(max(q)) if max(u) == max(h) and compose_maps(u, q) == h]
                    if len(hits) != 1:
                        failures.append({"f": f, "g": g, "h": h, "factorizations": len(hits)})
    return checked, failures


def _set_pushouts(limit):
    checked, failures = 0, []
    for k in range(1, limit + 1):
        for f, g in product(maps_from(k), repeat=2):
            a, b = pushout_maps(f, g, max(f), max(g))
            if compose_maps(a, f) != compose_maps(b, g):
                failures.append({"f": f, "g": g, "kind": "cocone"})
                continue
            r = max(a)
            for h1 in maps_from(max(f)):
                for h2 in surjection_maps(max(g), max(h1)):
                    if compose_maps(h1, f) != compose_maps(h2, g):
                        continue
                    checked += 1
                    hits = [u for u in surjection_maps(r, max(h1))
                            if compose_maps(u, a) == h1 and compose_maps(u, b) == h2]
                    if len(hits) != 1:
                        failures.append({"f": f, "g": g, "h1": h1, "h2": h2, "factorizations": len(hits)})
    return checked, failures


def _frames_upto(n):
    return [fr for k in range(0, n + 1) for fr in enumerate_frames(k)]


def _factorizations(quot, q, outgoing, homs):
    """Per outgoing ``h``: does it factor through ``q``, and how many ways."""
    exists, counts = [], []
    for h in outgoing:
        u = factor_through(h, q)
        exists.append(u is not None and compose_maps(u.map, q.map) == h.map)
        counts.append(sum(1 for v in homs[(quot, h.target)] if compose_maps(v.map, q.map) == h.map))
    return np.array(exists, dtype=bool), np.array(counts)


def _frame_coequalizers(limit):
    """Every parallel pair and every cocone under it, objects up to ``limit`` worlds.

    Whether ``h`` factors through ``q`` depends on ``(q, h)`` only, so that
    part is computed once per quotient; the cocone test runs per pair.
    """
    frames = _frames_upto(limit)
    homs = {(a, b): enumerate_pmorphisms(a, b) for a in frames for b in frames}
    checked, pairs, failures = 0, 0, []
    for b in frames:
        outgoing = [h for c in frames for h in homs[(b, c)]]
        codes = np.array([[frames.index(h.target) * 64 + v for v in h.map] for h in outgoing],
                         dtype=np.int64).reshape(len(outgoing), b.worlds)
        cache = {}
        for a in frames:
            for f, g in product(homs[(a, b)], repeat=2):
                pairs += 1
                quot, q = frame_coequalizer(f, g)
                if compose_maps(q.map, f.map) != compose_maps(q.map, g.map):
                    failures.append({"f": f.map, "g": g.map, "kind": "cocone"})
                    continue
                if q.map not in cache:
                    cache[q.map] = _factorizations(quot, q, outgoing, homs)
                exists, counts = cache[q.map]
                fi, gi = np.asarray(f.map, dtype=np.int64) - 1, np.asarray(g.map, dtype=np.int64) - 1
                cocone = (codes[:, fi] == codes[:, gi]).all(axis=1)
                checked += int(cocone.sum())
                bad = np.flatnonzero(cocone & ~(exists & (counts == 1)))
                if bad.size:
                    h = outgoing[int(bad[0])]
                    failures.append({"f": f.map, "g": g.map, "h": h.map, "factorizations": int(counts[bad[0]])})
    return pairs, checked, failures


def colimit_universal_properties(seed=0, limit=4):
    coeq_checked, coeq_fail = _set_coequalizers(limit)
    push_checked, push_fail = _set_pushouts(limit)
    pairs, frame_checked, frame_fail = _frame_coequalizers(limit)
    failures = coeq_fail + push_fail + frame_fail
    return CriterionResult(2, f"colimit universal properties, objects <= {limit}", not failures, {
        "set_coequalizer_cocones": coeq_checked,
        "set_pushout_cocones": push_checked,
        "frame_parallel_pairs": pairs,
        "frame_cocones": frame_checked,
        "failures": failures[:5],
    })


# -- 3 ---------------------------------------------------------------------------

def _random_frame(rng, worlds):
    blocks = [1]
    for _ in range(worlds - 1):
        blocks.append(int(rng.integers(1, max(blocks) + 2)))
    perm = rng.permutation(worlds)
    return FiniteFrame(tuple(blocks[int(i)] for i in perm))


def duality(seed=0, limit=4, random_cases=200, random_worlds=8):
    rng = _rng(seed, 3)
    frames = _frames_upto(limit)
    failures = []
    for fr in frames:
        alg = frame_to_algebra(fr)
        if algebra_to_frame(alg) != fr or frame_to_algebra(algebra_to_frame(alg)) != alg:
            failures.append({"frame": fr.to_json(), "kind": "object"})
    morphisms = 0
    for a in frames:
        for b in frames:
            for f in enumerate_pmorphisms(a, b):
                morphisms += 1
                h = pmorphism_to_hom(f)
                if hom_to_pmorphism(h) != f:
                    failures.append({"map": f.map, "kind": "morphism"})
    axiom_cases = 0
    for _ in range(random_cases):
        worlds = int(rng.integers(1, random_worlds + 1))
        fr = _random_frame(rng, worlds)
        axiom_cases += 1
        if not check_s5_axioms(frame_to_algebra(fr)).passed:
            failures.append({"frame": fr.to_json(), "kind": "axioms"})
    return CriterionResult(3, "frame/algebra duality round trips and S5 axioms", not failures, {
        "frames": len(frames), "pmorphisms": morphisms, "random_axiom_cases": axiom_cases,
        "failures": failures[:5],
    })


# -- 4 ---------------------------------------------------------------------------

def _random_parallel_pair(rng, max_worlds):
    while True:
        a = _random_frame(rng, int(rng.integers(1, max_worlds + 1)))
        b = _random_frame(rng, int(rng.integers(1, a.worlds + 1)))
        homs = enumerate_pmorphisms(a, b)
        if homs:
            i, j = rng.integers(len(homs), size=2)
            return homs[int(i)], homs[int(j)]


def _intertwined(f, g):
    quot, _ = frame_coequalizer(f, g)
    h = coequalizer_intertwiner(f, g)
    return h is not None and cluster_signature(h.source) == cluster_signature(quot) == cluster_signature(h.target)


def cross_oracle_colimits(seed=0, limit=3, random_cases=200, random_worlds=5):
    rng = _rng(seed, 4)
    frames = _frames_upto(limit)
    exhaustive, failures = 0, []
    for a in frames:
        for b in frames:
            for f, g in product(enumerate_pmorphisms(a, b), repeat=2):
                exhaustive += 1
                if not _intertwined(f, g):
                    failures.append({"f": f.to_json(), "g": g.to_json()})
    for _ in range(random_cases):
        f, g = _random_parallel_pair(rng, random_worlds)
        if not _intertwined(f, g):
            failures.append({"f": f.to_json(), "g": g.to_json()})
    return CriterionResult(4, "frame and family coequalizers agree", not failures, {
        "exhaustive_pairs": exhaustive, "random_pairs": random_cases, "failures": failures[:5],
    })


# -- 5 ---------------------------------------------------------------------------

def counting_law_check(seed=0, N=6, max_mult=2):
    rng = _rng(seed, 5)
    failures, cases = [], []
    for m in range(1, 5):
        for k in range(1, max_mult + 1):
            a = disjoint_union_actions([canonical_action(m)] * k)
            rho = tuple(int(v) + 1 for v in rng.permutation(a.carrier))
            a = relabel_action(a, rho)
            L = canonical_lifting(a, N)
            cases.append([m, k])
            if L.sizes != counting_law(a, N):
                failures.append({"m": m, "copies": k, "sizes": list(L.sizes), "law": list(counting_law(a, N))})
    for m in range(1, 5):
        L, R, xi = representability_iso(m, N)
        if not is_isomorphism(xi, L, R):
            failures.append({"m": m, "kind": "representability"})
    return CriterionResult(5, f"lifting counting law and representability, n <= {N}", not failures, {
        "actions": cases, "failures": failures,
    })


# -- 6 ---------------------------------------------------------------------------

def _points_action(m):
    """``a(σ, i) = σ⁻¹(i)`` on ``{1..m}``."""
    return SymmetricAction(m, m, invert_map(swap_perm(m)), invert_map(cycle_perm(m)))


def _sign_action(m):
    if m == 1:
        return trivial_action(1, 2)
    return SymmetricAction(m, 2, (2, 1), (1, 2) if m % 2 else (2, 1))


def sample_actions(m):
    acts = {
        "canonical": canonical_action(m),
        "trivial": trivial_action(m, 1),
        "points": _points_action(m),
        "sign": _sign_action(m),
        "mixed": disjoint_union_actions([canonical_action(m), trivial_action(m, 1)]),
    }
    return {name: a for name, a in acts.items() if validate_action(a).passed}


def _equivariant_maps(a, Y):
    m = a.m
    perms = list(zip(permutation_maps(m), a.tables))
    for mu in product(range(1, Y.size(m) + 1), repeat=a.carrier):
        if all(Y.maps[p][mu[x] - 1] == mu[t[x] - 1] for p, t in perms for x in range(a.carrier)):
            yield mu


def _targets(N):
    out = {
        "point": model_from_frame([1], N),
        "c2": model_from_frame([2], N),
        "c1+c2": model_from_frame([1, 2], N),
        "surj(-,2)": representable(2, N),
    }
    if N >= 3:
        out["c3"] = model_from_frame([3], N)
    out["point+point"] = disjoint_union_presheaves([out["point"], out["point"]])
    return out


def kan_property(seed=0, max_m=3, max_N=5, max_instances=400):
    failures, verified = [], []
    for m in range(1, max_m + 1):
        for N in range(m, max_N + 1):
            for name, a in sample_actions(m).items():
                L = canonical_lifting(a, N)
                rep = verify_lifting_conditions(L, a, L.unit)
                verified.append([m, N, name])
                if not rep.passed:
                    failures.append({"m": m, "N": N, "action": name, "report": rep.to_json()})
    instances = 0
    for m in range(1, max_m + 1):
        N = m + 1
        for aname, a in sample_actions(m).items():
            L = cached_lifting(a, N) if aname == "canonical" else canonical_lifting(a, N)
            for yname, Y in _targets(N).items():
                candidates = None
                for mu in _equivariant_maps(a, Y):
                    if instances >= max_instances:
                        break
                    if candidates is None:
                        candidates = enumerate_nat_transformations(L, Y)
                    instances += 1
                    xi = induced_transformation(L, a, L.unit, Y, mu)
                    ok = is_natural(xi, L, Y) and all(
                        xi.components[m - 1][L.unit[x] - 1] == mu[x] for x in range(a.carrier))
                    matches = [c for c in candidates
                               if all(c.components[m - 1][L.unit[x] - 1] == mu[x] for x in range(a.carrier))]
                    if not ok or matches != [xi]:
                        failures.append({"m": m, "action": aname, "target": yname, "mu": list(mu),
                                         "matching": len(matches)})
    passed = not failures and instances >= 50
    return CriterionResult(6, "lifting conditions and the universal property", passed, {
        "verified_liftings": len(verified), "kan_instances": instances, "failures": failures[:5],
    })


# -- 7 ---------------------------------------------------------------------------

def genuine_multisets(N, max_size=4, max_mult=2):
    sizes = range(1, min(max_size, N) + 1)
    out = []
    for mults in product(range(max_mult + 1), repeat=len(sizes)):
        out.append({m: c for m, c in zip(sizes, mults) if c})
    return out


def build_corpus(seed=0, max_N=5):
    """Genuine models and labeled mutants, in a fixed order."""
    rng = _rng(seed, 7)
    genuine = []
    for N in range(1, max_N + 1):
        for ms in genuine_multisets(N):
            genuine.append((f"model N={N} {sorted(ms.items())}", model_from_frame(ms, N), ms))
    mutants = []
    bases = [ms for ms in genuine_multisets(max_N) if ms]
    order = np.concatenate([rng.permutation(len(bases)) for _ in range(2)])
    for i in order:
        ms = bases[int(i)]
        N = int(rng.integers(max(3, max(ms)), max_N + 1))
        M = model_from_frame(ms, N)
        levels = sorted(ms)
        kind = len(mutants) % 4
        if kind == 0:
            mu = extra_fixed_point(M, int(rng.integers(2, N + 1)))
        elif kind == 1:
            big = [m for m in levels if m >= 2]
            if not big:
                mu = extra_fixed_point(M, N)
            else:
                m = big[int(rng.integers(len(big)))]
                mu = orbit_merge(M, m, swap=int(rng.integers(1, m)))
        elif kind == 2:
            low = [m for m in levels if m < N]
            if len(low) < 2:
                mu = extra_fixed_point(M, N)
            else:
                a, b = sorted(rng.choice(low, size=2, replace=False).tolist())
                mu = cross_level_glue(M, a, b, int(rng.integers(b + 1, N + 1)))
        else:
            small = model_from_frame(ms, min(N, 4)) if max(ms) <= 4 else M
            mu = redirect(small if max(ms) <= small.N else M, rng)
        mutants.append((f"{mu.kind} {sorted(ms.items())} {mu.params}", mu))
        if len(mutants) >= 110:
            break
    return genuine, mutants


def _verdicts(M):
    reports = (check_T1(M), check_T2(M), check_lex_preservation(M))
    return reports, tuple(r.passed for r in reports)


def _bad_counterexamples(M, reports):
    bad = []
    for rep in reports:
        for ax in rep.axioms:
            if ax.counterexample is not None and instance_holds(M, ax.axiom, ax.counterexample):
                bad.append(ax.axiom)
    return bad


def theory_equivalence(seed=0, max_N=5):
    genuine, mutants = build_corpus(seed, max_N)
    failures, divergence = [], []
    derived_ok = True
    for name, M, _ in genuine:
        reports, verdicts = _verdicts(M)
        if verdicts != (True, True, True):
            failures.append({"structure": name, "verdicts": list(verdicts)})
        if not check_T2(M, fix_trivial_only=False).passed:
            divergence.append(name)
    for name, mu in mutants:
        M = mu.structure
        reports, verdicts = _verdicts(M)
        failed = {a.axiom for r in reports for a in r.axioms if not a.holds}
        if any(verdicts):
            failures.append({"structure": name, "verdicts": list(verdicts)})
        if not set(mu.expected_failures) <= failed:
            failures.append({"structure": name, "expected": list(mu.expected_failures), "failed": sorted(failed)})
        bad = _bad_counterexamples(M, reports)
        if bad:
            failures.append({"structure": name, "counterexamples_not_falsifying": bad})
        t1 = reports[0]
        if all(t1.axiom(x).holds for x in ("(1)", "(2)", "(3)")) and not t1.axiom("(4)").holds:
            derived_ok = False
    if not derived_ok:
        failures.append({"derived": "(4) failed while (1)-(3) held"})
    total = len(genuine) + len(mutants)
    passed = not failures and total >= 300 and len(mutants) >= 50
    return CriterionResult(7, "T1, T2 and lex preservation agree on the corpus", passed, {
        "genuine": len(genuine),
        "mutants": len(mutants),
        "mutant_kinds": sorted({n.split()[0] for n, _ in mutants}),
        "failures": failures[:5],
        "all_elements_variant_of_(6)_rejects_genuine": len(divergence),
    })


# -- 8 ---------------------------------------------------------------------------

def classification_round_trip(seed=0, max_N=5):
    failures, cases = [], 0
    for N in range(1, max_N + 1):
        for ms in genuine_multisets(N, max_size=N):
            cases += 1
            M = model_from_frame(ms, N)
            got = classify_model(M).counts
            if got != ms:
                failures.append({"N": N, "sizes": ms, "classified": got})
            for (n, m), counts in witness_multiplicity(M).items():
                if counts != [factorial(m)]:
                    failures.append({"N": N, "sizes": ms, "sort": n, "m": m, "witnesses": counts})
    return CriterionResult(8, "classification inverts model_from_frame; m! witnesses", not failures, {
        "multisets": cases, "failures": failures[:5],
    })


# -- 9 ---------------------------------------------------------------------------

def hom_correspondence(seed=0, max_level=4):
    failures, table, sensitivity = [], [], []
    for n in range(1, max_level + 1):
        for m in range(1, max_level + 1):
            expected = count_surjections(n, m)
            counts = {}
            for N in (max(n, m), max(n, m) + 1):
                X = cached_lifting(canonical_action(n), N)
                Y = cached_lifting(canonical_action(m), N)
                counts[N] = len(enumerate_nat_transformations(X, Y))
            tested = counts[max(n, m) + 1]
            table.append([n, m, tested, expected])
            if tested != expected:
                failures.append({"n": n, "m": m, "count": tested, "expected": expected})
            if len(set(counts.values())) > 1:
                sensitivity.append({"n": n, "m": m, "counts": {str(k): v for k, v in counts.items()}})
    return CriterionResult(9, "natural transformations between liftings count surjections", not failures, {
        "table": table, "failures": failures, "N_sensitivity": sensitivity,
    })


CRITERIA = (
    surjection_counts,
    colimit_universal_properties,
    duality,
    cross_oracle_colimits,
    counting_law_check,
    kan_property,
    theory_equivalence,
    classification_round_trip,
    hom_correspondence,
)


def run_suite(seed=0, only=None):
    results = []
    for i, crit in enumerate(CRITERIA, 1):
        if only is None or i in only:
            results.append(crit(seed=seed))
    return results
