import json

import numpy as np
import pytest
from hypothesis import given, settings

from s5lift.actions import canonical_action, disjoint_union_actions, trivial_action
from s5lift.errors import CapExceeded, ClusterExceedsTruncation, NonIntegralOrbit, NotAModel
from s5lift.frames import FiniteFrame
from s5lift.lifting import canonical_lifting
from s5lift.mutants import orbit_merge, redirect
from s5lift.presheaves import empty_presheaf, representable
from s5lift.surjections import count_surjections
from s5lift.theory import (
    canonical_maps_from,
    check_fix_trivial,
    check_lex_preservation,
    check_T1,
    check_T2,
    classify_model,
    faithful_masks,
    instance_holds,
    model_from_frame,
    witness_multiplicity,
)

from strategies import cluster_multisets


def all_reports(M, **kw):
    return [check_T1(M, **kw), check_T2(M, exhaustive=kw.get("exhaustive")), check_lex_preservation(M, **kw)]


class TestFixTrivial:
    def test_cluster_lifting(self):
        L = model_from_frame([2], 3)
        assert all(check_fix_trivial(L, 2, x) for x in (1, 2))
        # at sort 3 every q: 3↠2 has a fibre of size 2, fixed by a transposition
        assert not faithful_masks(L)[2].any()

    def test_trivial_action_lifting(self):
        L = canonical_lifting(trivial_action(2, 1), 3)
        assert not check_fix_trivial(L, 2, 1)
        assert faithful_masks(L)[1].tolist() == [False]

    def test_sort_one_always_trivial(self):
        assert check_fix_trivial(model_from_frame([1], 2), 1, 1)

    def test_cap(self):
        with pytest.raises(CapExceeded):
            check_fix_trivial(model_from_frame([1], 3), 3, 1, cap=2)

    def test_first_occurrence_forms(self):
        # Bell numbers: one form per partition of the domain
        assert [len(canonical_maps_from(n)) for n in range(1, 6)] == [1, 2, 5, 15, 52]


class TestGenuineModels:
    @pytest.mark.parametrize("sizes", [[], [1], [2], [3], [1, 2], [2, 2], [1, 1, 3]])
    def test_all_theories_pass(self, sizes):
        M = model_from_frame(sizes, 4)
        assert all(r.passed for r in all_reports(M))

    @pytest.mark.parametrize("sizes", [[1, 2], [2, 3]])
    def test_pairwise_agrees_with_normal_forms(self, sizes):
        M = model_from_frame(sizes, 4)
        assert all(r.passed for r in all_reports(M, exhaustive=True))

    @settings(max_examples=15)
    @given(cluster_multisets)
    def test_random_models(self, ms):
        M = model_from_frame(ms, 4)
        assert check_T1(M).passed and check_T2(M).passed

    def test_witness_counts_are_surjection_counts(self):
        # every element has one witness orbit, so exactly m! witness pairs
        mult = witness_multiplicity(model_from_frame([1, 2], 4))
        assert mult[(3, 2)] == [2] and mult[(2, 2)] == [2] and mult[(3, 1)] == [1]

    def test_report_json(self):
        obj = json.loads(json.dumps(check_T2(model_from_frame([2], 4)).to_json()))
        assert obj["verdict"] == "pass" and obj["theory"] == "T2"
        assert "1..4" in obj["truncation"]
        assert [a["axiom"] for a in obj["axioms"]] == ["(1)", "(5)", "(6)"]


class TestNonModels:
    def test_trivial_action_lifting_fails_two(self):
        L = canonical_lifting(trivial_action(2, 1), 4)
        r1, r2 = check_T1(L), check_T2(L)
        assert not r1.axiom("(2)").holds and not r2.axiom("(5)").holds
        assert r1.axiom("(2)").counterexample == {"sort": 2, "x": 1}

    def test_representable_is_a_model(self):
        assert check_T2(representable(2, 4)).passed

    def test_redirect_breaks_six(self):
        mt = redirect(model_from_frame([2], 4), np.random.default_rng(0))
        rep = check_T2(mt.structure)
        assert not rep.axiom("(1)").holds and not rep.axiom("(6)").holds

    def test_counterexamples_self_validate(self):
        M = orbit_merge(model_from_frame([2, 3], 4), 3).structure
        for rep in all_reports(M):
            for a in rep.axioms:
                if not a.holds:
                    assert not instance_holds(M, a.axiom, a.counterexample)

    def test_instance_holds_on_satisfied_instance(self):
        M = model_from_frame([2], 3)
        assert instance_holds(M, "(2)", {"sort": 3, "x": 1})
        assert instance_holds(M, "(6)", {"q1": [1, 2, 2], "x1": 1, "q2": [1, 2, 2], "x2": 1})
        with pytest.raises(KeyError):
            instance_holds(M, "(9)", {})


class TestAllElementsVariant:
    def test_cluster_three_survives(self):
        assert check_T2(model_from_frame([3], 4), fix_trivial_only=False).passed

    def test_point_rejected(self):
        rep = check_T2(model_from_frame([1], 4), fix_trivial_only=False)
        assert rep.axiom("(6)").counterexample == {
            "q1": [1, 1, 2], "x1": 1, "q2": [1, 2, 1], "x2": 1, "value": 1, "sort": 3}
        assert "all elements" in rep.axiom("(6)").note


class TestClassification:
    def test_mixed(self):
        c = classify_model(model_from_frame({1: 1, 2: 2}, 4))
        assert c.counts == {1: 1, 2: 2}
        assert c.frame == FiniteFrame((1, 2, 2, 3, 3))
        assert c.to_json()["clusters"] == {"1": 1, "2": 2}

    def test_empty(self):
        assert classify_model(empty_presheaf(3)).counts == {}

    def test_lifting_of_canonical(self):
        assert classify_model(canonical_lifting(canonical_action(3), 4)).counts == {3: 1}

    def test_copies(self):
        L = canonical_lifting(disjoint_union_actions([canonical_action(2)] * 3), 4)
        assert classify_model(L).counts == {2: 3}

    def test_carrier_sizes(self):
        M = model_from_frame([2], 5)
        assert M.sizes == tuple(count_surjections(n, 2) for n in range(1, 6))

    def test_too_big(self):
        with pytest.raises(ClusterExceedsTruncation):
            model_from_frame({5: 1}, 4)

    def test_not_a_model(self):
        with pytest.raises(NotAModel):
            classify_model(canonical_lifting(trivial_action(2, 1), 3))

    def test_non_integral_orbit(self):
        assert issubclass(NonIntegralOrbit, ValueError)

    @settings(max_examples=20)
    @given(cluster_multisets)
    def test_round_trip(self, ms):
        assert classify_model(model_from_frame(ms, 4)).counts == {m: c for m, c in ms.items() if c}
