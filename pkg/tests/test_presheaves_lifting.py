import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from s5lift.actions import canonical_action, disjoint_union_actions, trivial_action
from s5lift.errors import LevelMismatch, NotEquivariant, NotFunctorial, OutOfRange
from s5lift.lifting import (
    canonical_lifting,
    counting_law,
    enumerate_nat_transformations,
    equivalent_pairs,
    induced_transformation,
    is_isomorphism,
    kan_uniqueness_violation,
    representability_iso,
    verify_lifting_conditions,
)
from s5lift.presheaves import (
    NatTransformation,
    TruncatedPresheaf,
    all_maps,
    disjoint_union_presheaves,
    empty_presheaf,
    functoriality_violation,
    identity_transformation,
    is_natural,
    naturality_violation,
    representable,
    require_functorial,
)
from s5lift.surjections import count_surjections


def copies(m, k):
    return disjoint_union_actions([canonical_action(m)] * k, m=m)


class TestPresheaves:
    @pytest.mark.parametrize("m,N", [(1, 3), (2, 4), (3, 4)])
    def test_representable_sizes(self, m, N):
        R = representable(m, N)
        assert R.sizes == tuple(count_surjections(n, m) for n in range(1, N + 1))
        assert functoriality_violation(R) is None

    def test_empty(self):
        E = empty_presheaf(3)
        assert E.sizes == (0, 0, 0) and functoriality_violation(E) is None

    def test_disjoint_union_sizes(self):
        X = disjoint_union_presheaves([representable(1, 3), representable(2, 3)])
        assert X.sizes == (1, 3, 7)
        assert functoriality_violation(X) is None

    def test_missing_table(self):
        R = representable(2, 3)
        maps = dict(R.maps)
        maps.pop((1, 1))
        with pytest.raises(OutOfRange):
            TruncatedPresheaf(3, R.sizes, maps)

    def test_size_mismatch(self):
        with pytest.raises(LevelMismatch):
            TruncatedPresheaf(2, (1,), {})

    def test_broken_identity(self):
        R = representable(2, 2)
        maps = dict(R.maps)
        maps[(1, 2)] = [2, 1]
        X = TruncatedPresheaf(2, R.sizes, maps)
        assert functoriality_violation(X) is not None
        with pytest.raises(NotFunctorial):
            require_functorial(X)

    def test_json_round_trip(self):
        X = canonical_lifting(canonical_action(2), 3)
        obj = json.loads(json.dumps(X.to_json()))
        assert set(obj) >= {"N", "carriers", "maps"}
        assert TruncatedPresheaf.from_json(obj) == X

    def test_json_rejects_bad_levels(self):
        obj = representable(1, 2).to_json()
        obj["maps"][0]["level_to"] = 7
        with pytest.raises(OutOfRange):
            TruncatedPresheaf.from_json(obj)

    def test_identity_natural(self):
        X = representable(2, 3)
        assert is_natural(identity_transformation(X), X, X)

    def test_bad_component(self):
        X = representable(2, 3)
        xi = identity_transformation(X)
        comps = list(xi.components)
        comps[2] = tuple(reversed(comps[2]))
        assert naturality_violation(NatTransformation(tuple(comps)), X, X) is not None


class TestLifting:
    @pytest.mark.parametrize("m,k,N", [(1, 2, 3), (2, 1, 4), (2, 3, 4), (3, 1, 4), (3, 2, 5)])
    def test_counting_law(self, m, k, N):
        a = copies(m, k)
        assert canonical_lifting(a, N).sizes == counting_law(a, N)
        assert counting_law(a, N) == tuple(k * count_surjections(n, m) for n in range(1, N + 1))

    def test_trivial_action_sizes(self):
        # classes of (x, q) under S_2 acting trivially: q up to relabeling
        L = canonical_lifting(trivial_action(2, 1), 4)
        assert L.sizes == (0, 1, 3, 7)

    @pytest.mark.parametrize("m,N", [(1, 4), (2, 4), (3, 5)])
    def test_representability(self, m, N):
        L, R, iso = representability_iso(m, N)
        assert is_isomorphism(iso, L, R)

    @pytest.mark.parametrize("a", [canonical_action(2), trivial_action(2, 2), copies(3, 2),
                                   disjoint_union_actions([canonical_action(3), trivial_action(3, 1)])])
    def test_conditions_hold(self, a):
        L = canonical_lifting(a, 4)
        assert verify_lifting_conditions(L, a, L.unit).passed

    def test_conditions_fail_for_wrong_unit(self):
        a = trivial_action(2, 2)
        L = canonical_lifting(a, 3)
        rep = verify_lifting_conditions(L, a, (1, 1))
        assert not rep.passed and rep.checks["eta_bijective"]

    def test_conditions_fail_for_representable_vs_trivial(self):
        # Surj(-, 2) is not the lifting of the one-point trivial action
        a = trivial_action(2, 2)
        rep = verify_lifting_conditions(representable(2, 3), a, (1, 2))
        assert not rep.passed

    def test_degree_beyond_truncation(self):
        a = canonical_action(3)
        L = canonical_lifting(a, 2)
        assert L.sizes == (0, 0)
        assert verify_lifting_conditions(L, a, ()).checks["eta_bijective"]

    def test_equivalent_pairs(self):
        a = canonical_action(2)
        sigma = equivalent_pairs(a, (1, (1, 2, 2)), (2, (2, 1, 1)))
        assert sigma is not None and tuple(sigma.image) == (2, 1)
        assert equivalent_pairs(a, (1, (1, 2, 2)), (1, (2, 1, 1))) is None
        # non-bijective forced relabeling
        assert equivalent_pairs(a, (1, (1, 2, 2)), (1, (1, 1, 2))) is None

    def test_equivalent_pairs_wrong_degree(self):
        with pytest.raises(OutOfRange):
            equivalent_pairs(canonical_action(2), (1, (1, 1)), (1, (1, 2)))

    @given(st.permutations([1, 2, 3]), st.lists(st.integers(1, 2), min_size=2, max_size=2))
    def test_lift_of_pairs_agrees(self, sigma, extra):
        a = canonical_action(3)
        q = (1, 2, 3) + tuple(extra)
        q2 = tuple(sigma.index(v) + 1 for v in q)
        # (x, q) ≈ (a(σ, x), σ⁻¹ ∘ q)
        from s5lift.actions import apply

        x2 = apply(a, tuple(sigma), 1)
        assert equivalent_pairs(a, (1, q), (x2, q2)) is not None


class TestUniversalProperty:
    def test_hom_between_cluster_liftings(self):
        L3 = canonical_lifting(canonical_action(3), 4)
        L2 = canonical_lifting(canonical_action(2), 4)
        assert len(enumerate_nat_transformations(L3, L2)) == count_surjections(3, 2) == 6

    def test_no_hom_downward(self):
        L2 = canonical_lifting(canonical_action(2), 4)
        L3 = canonical_lifting(canonical_action(3), 4)
        assert enumerate_nat_transformations(L2, L3) == []

    def test_all_enumerated_are_natural(self):
        X = canonical_lifting(copies(2, 2), 3)
        Y = canonical_lifting(canonical_action(1), 3)
        homs = enumerate_nat_transformations(X, Y)
        assert len(homs) == 1 and all(is_natural(h, X, Y) for h in homs)

    def test_induced_transformation(self):
        a = canonical_action(2)
        L = canonical_lifting(a, 4)
        Y = canonical_lifting(trivial_action(2, 1), 4)
        xi = induced_transformation(L, a, L.unit, Y, (1, 1))
        assert is_natural(xi, L, Y)
        assert kan_uniqueness_violation(L, a, L.unit, Y, (1, 1)) is None

    def test_induced_rejects_non_equivariant(self):
        a = canonical_action(2)
        L = canonical_lifting(a, 3)
        Y = canonical_lifting(trivial_action(2, 2), 3)
        with pytest.raises(NotEquivariant):
            induced_transformation(L, a, L.unit, Y, (1, 2))

    def test_induced_rejects_level_mismatch(self):
        a = canonical_action(2)
        L = canonical_lifting(a, 3)
        with pytest.raises(LevelMismatch):
            induced_transformation(L, a, L.unit, representable(2, 4), (1, 2))

    def test_induced_rejects_bad_mu(self):
        a = canonical_action(2)
        L = canonical_lifting(a, 3)
        with pytest.raises(OutOfRange):
            induced_transformation(L, a, L.unit, representable(2, 3), (1, 5))

    def test_json(self):
        xi = identity_transformation(representable(2, 2))
        assert json.loads(json.dumps(xi.to_json())) == {"N": 2, "components": [[], [1, 2]]}


def test_all_maps_count():
    assert len(all_maps(3)) == sum(count_surjections(n, k) for n in range(1, 4) for k in range(1, n + 1))
    assert np.all([max(q) <= len(q) for q in all_maps(4)])
