import json
from itertools import product

import pytest
from hypothesis import given, strategies as st

from s5lift.errors import NotIntoOneClass, NotOnto, NotParallel, OutOfRange, SourceMismatch
from s5lift.frames import (
    EMPTY_FRAME,
    ClusterFamily,
    FamilyMorphism,
    FiniteFrame,
    PMorphism,
    cluster_signature,
    coequalizer_intertwiner,
    compose_pmorphisms,
    enumerate_frames,
    enumerate_pmorphisms,
    factor_through,
    family_coequalizer,
    family_to_pmorphism,
    frame_coequalizer,
    frame_coproduct,
    frame_pushout,
    from_cluster_family,
    pmorphism_to_family,
    to_cluster_family,
    validate_pmorphism,
)

from strategies import frames, pmorphisms

# Bell numbers B(0..5)
BELL = [1, 1, 2, 5, 15, 52]

C1, C2, C3 = FiniteFrame.cluster(1), FiniteFrame.cluster(2), FiniteFrame.cluster(3)
TWO_POINTS = FiniteFrame.discrete(2)


def pm(src, tgt, *image):
    return PMorphism(src, tgt, image)


class TestFrame:
    def test_blocks_canonical(self):
        assert FiniteFrame((3, 3, 1)).blocks == (1, 1, 2)
        assert FiniteFrame((2, 1)) == FiniteFrame((1, 2))

    def test_classes_and_relation(self):
        fr = FiniteFrame((1, 2, 1))
        assert fr.classes == ((1, 3), (2,))
        assert fr.related(1, 3) and not fr.related(1, 2)
        assert fr.relation() == {(1, 1), (1, 3), (3, 1), (3, 3), (2, 2)}

    @pytest.mark.parametrize("n", range(6))
    def test_enumeration_is_bell(self, n):
        frs = enumerate_frames(n)
        assert len(frs) == BELL[n] == len(set(frs))

    def test_json(self):
        fr = FiniteFrame((1, 2, 1))
        assert fr.to_json() == {"worlds": 3, "blocks": [1, 2, 1]}
        assert FiniteFrame.from_json(fr.to_json()) == fr
        with pytest.raises(OutOfRange):
            FiniteFrame.from_json({"worlds": 2, "blocks": [1]})


class TestPMorphism:
    def test_identity(self):
        fr = FiniteFrame((1, 2, 1))
        assert PMorphism.identity(fr).map == (1, 2, 3)

    def test_cluster_onto_singleton(self):
        assert validate_pmorphism([1, 1], C2, TWO_POINTS) == (1, 1)

    def test_not_onto(self):
        with pytest.raises(NotOnto) as err:
            validate_pmorphism([1, 1], TWO_POINTS, C2)
        assert err.value.world == 1

    def test_not_into_one_class(self):
        with pytest.raises(NotIntoOneClass):
            validate_pmorphism([1, 2], C2, TWO_POINTS)

    def test_out_of_range(self):
        with pytest.raises(OutOfRange):
            validate_pmorphism([1, 3], C2, C2)

    def test_counts(self):
        # classes map onto classes; the map as a whole need not be onto
        assert len(enumerate_pmorphisms(C3, C2)) == 6
        assert len(enumerate_pmorphisms(FiniteFrame((1, 2, 2)), C2)) == 0
        assert len(enumerate_pmorphisms(FiniteFrame((1, 2, 2)), FiniteFrame((1, 2)))) == 4

    @given(pmorphisms())
    def test_json_round_trip(self, f):
        obj = json.loads(json.dumps(f.to_json()))
        assert set(obj) == {"map", "source", "target"}
        assert PMorphism.from_json(obj) == f


class TestColimits:
    def test_coproduct_examples(self):
        total, inj = frame_coproduct([])
        assert total == EMPTY_FRAME and inj == []
        total, inj = frame_coproduct([C2, C3])
        assert total.blocks == (1, 1, 2, 2, 2)
        assert [i.map for i in inj] == [(1, 2), (3, 4, 5)]
        fr = FiniteFrame((1, 2, 1))
        assert frame_coproduct([fr, EMPTY_FRAME])[0] == fr

    @given(st.lists(frames(4), max_size=3))
    def test_coproduct_signature_and_cover(self, frs):
        total, inj = frame_coproduct(frs)
        assert cluster_signature(total) == sorted(s for fr in frs for s in cluster_signature(fr))
        assert sorted(v for i in inj for v in i.map) == list(range(1, total.worlds + 1))

    def test_coequalizer_same_pair(self):
        f = pm(C1, FiniteFrame((1, 2)), 2)
        quot, q = frame_coequalizer(f, f)
        assert quot == f.target and q.map == (1, 2)

    def test_coequalizer_merges_singletons(self):
        quot, q = frame_coequalizer(pm(C1, TWO_POINTS, 1), pm(C1, TWO_POINTS, 2))
        assert quot == C1 and q.map == (1, 1)

    def test_coequalizer_of_cluster_stays_cluster(self):
        quot, q = frame_coequalizer(pm(C3, C3, 1, 2, 3), pm(C3, C3, 2, 1, 3))
        assert quot == C2 and q.map == (1, 1, 2)

    def test_not_parallel(self):
        with pytest.raises(NotParallel):
            frame_coequalizer(PMorphism.identity(C2), PMorphism.identity(C1))

    def test_pushouts(self):
        fr, a, b = frame_pushout(PMorphism.identity(C2), PMorphism.identity(C2))
        assert fr == C2 and a.map == b.map == (1, 2)
        fr, a, b = frame_pushout(PMorphism.identity(C2), pm(C2, C2, 2, 1))
        assert fr == C2
        assert compose_pmorphisms(a, PMorphism.identity(C2)) == compose_pmorphisms(b, pm(C2, C2, 2, 1))
        fr, a, b = frame_pushout(pm(EMPTY_FRAME, C2), pm(EMPTY_FRAME, C1))
        assert fr == frame_coproduct([C2, C1])[0]
        with pytest.raises(SourceMismatch):
            frame_pushout(PMorphism.identity(C2), PMorphism.identity(C1))

    @given(pmorphisms(5), st.data())
    def test_coequalizer_projection_valid(self, f, data):
        g = data.draw(st.sampled_from(enumerate_pmorphisms(f.source, f.target)))
        quot, q = frame_coequalizer(f, g)
        validate_pmorphism(q.map, f.target, quot)
        assert compose_pmorphisms(q, f) == compose_pmorphisms(q, g)

    def test_universal_exhaustive_small(self):
        frs = [fr for n in range(4) for fr in enumerate_frames(n)]
        for a, b in product(frs, repeat=2):
            for f, g in product(enumerate_pmorphisms(a, b), repeat=2):
                quot, q = frame_coequalizer(f, g)
                for c in frs:
                    for h in enumerate_pmorphisms(b, c):
                        coeq = compose_pmorphisms(h, f) == compose_pmorphisms(h, g)
                        fits = [u for u in enumerate_pmorphisms(quot, c) if compose_pmorphisms(u, q) == h]
                        assert len(fits) == (1 if coeq else 0)
                        if coeq:
                            assert factor_through(h, q) == fits[0]


class TestFamilies:
    def test_frame_to_family(self):
        assert to_cluster_family(FiniteFrame((1, 1, 2))).sizes == (2, 1)
        assert from_cluster_family(ClusterFamily((3,))) == C3

    def test_empty_cluster_rejected(self):
        with pytest.raises(OutOfRange):
            ClusterFamily((2, 0))

    @pytest.mark.parametrize("n", range(6))
    def test_round_trip_all_frames(self, n):
        for fr in enumerate_frames(n):
            back = from_cluster_family(to_cluster_family(fr))
            assert cluster_signature(back) == cluster_signature(fr)
            assert to_cluster_family(back) == to_cluster_family(fr)

    def test_identity_morphism(self):
        fr = FiniteFrame((1, 2, 1))
        m = pmorphism_to_family(PMorphism.identity(fr))
        assert m.index_map == (1, 2)
        assert [c.image for c in m.components] == [(1, 2), (1,)]

    def test_collapse(self):
        m = pmorphism_to_family(pm(C2, C1, 1, 1))
        assert m.index_map == (1,) and m.components[0].image == (1, 1)

    @given(pmorphisms(5))
    def test_morphism_round_trip(self, f):
        m = pmorphism_to_family(f)
        assert FamilyMorphism.from_json(json.loads(json.dumps(m.to_json()))) == m
        g = family_to_pmorphism(m)
        assert cluster_signature(g.source) == cluster_signature(f.source)
        assert pmorphism_to_family(g) == m

    def test_family_coequalizer_examples(self):
        fam = ClusterFamily((2, 1))
        ident = FamilyMorphism.identity(fam)
        Z, q = family_coequalizer(ident, ident)
        assert Z == fam and q == ident

        src, tgt = ClusterFamily((2,)), ClusterFamily((1, 1))
        f = FamilyMorphism(src, tgt, (1,), ((1, 1),))
        g = FamilyMorphism(src, tgt, (2,), ((1, 1),))
        Z, q = family_coequalizer(f, g)
        assert Z.sizes == (1,) and q.index_map == (1, 1)
        with pytest.raises(NotParallel):
            family_coequalizer(f, ident)

    @given(pmorphisms(5), st.data())
    def test_agrees_with_frame_coequalizer(self, f, data):
        g = data.draw(st.sampled_from(enumerate_pmorphisms(f.source, f.target)))
        h = coequalizer_intertwiner(f, g)
        assert h is not None
        assert cluster_signature(h.source) == cluster_signature(frame_coequalizer(f, g)[0])
