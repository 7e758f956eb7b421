from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from gwprofile import builtin_model, decode, encode, tree_weight
from gwprofile.errors import DomainError, ReconstructionError
from gwprofile.excursion import (
    Excursion,
    ExcursionDecomposition,
    ExcursionForest,
    decompose,
    decomposition_weight,
    excursion_counts,
    first_hit_counts,
    reconstruct,
    root_component_weight,
)
from gwprofile.oracle import enumerate_trees
from gwprofile.sampler import Sampler, SamplerConfig

from test_tree import random_trees


class TestExcursion:
    def test_from_tree(self):
        e = Excursion.from_tree(decode("1(-()+())"))
        assert e.sign == 1 and e.n == 1

    def test_rejects_zero_root(self):
        with pytest.raises(DomainError):
            Excursion.from_tree(decode("0(+())"))

    def test_rejects_inner_zero(self):
        with pytest.raises(DomainError):
            Excursion.from_tree(decode("1(-(+()))"))


class TestDecompose:
    def test_two_leaf_children(self):
        # root 0 with two leaf children labelled 1, decomposed at m = 1
        d = decompose(decode("0(+()+())"), 1)
        assert len(d.forest.roots) == 2
        for r in d.forest.roots:
            exc = d.forest.decorations[r]
            assert exc.sign == 1 and exc.tree.n_vertices == 1

    def test_path_example(self):
        # 0 -> 1 -> 2 at m = 1: one root decoration with one zero-leaf,
        # carrying one child whose decoration is a single vertex
        d = decompose(decode("0(+(+()))"), 1)
        assert len(d.forest.roots) == 1
        r = d.forest.roots[0]
        assert d.forest.decorations[r].n == len(d.forest.children[r])

    def test_negative_level(self):
        d = decompose(decode("0(-()-())"), -1)
        assert len(d.forest.roots) == 2
        for r in d.forest.roots:
            assert d.forest.decorations[r].sign == -1

    def test_level_zero_rejected(self):
        with pytest.raises(DomainError):
            decompose(decode("0(+())"), 0)

    def test_admissibility_enforced(self):
        d = decompose(decode("0(+(-()))"), 1)
        import dataclasses

        forged_forest = dataclasses.replace(
            d.forest, children=((),) * len(d.forest.children)
        )
        forged = dataclasses.replace(d, forest=forged_forest)
        with pytest.raises((DomainError, ReconstructionError)):
            reconstruct(forged)


class TestRoundTrip:
    @pytest.mark.parametrize(
        "model_id", ["geom-pm1", "geom-pm01", "incomplete-binary", "complete-binary"]
    )
    def test_exhaustive_small(self, model_id):
        model = builtin_model(model_id)
        for e in range(0, 4):
            for t, _ in enumerate_trees(model, e).items:
                span = max([abs(l) for l in t.labels] + [1])
                for m in list(range(1, span + 1)) + list(range(-span, 0)):
                    assert reconstruct(decompose(t, m)) == t, (encode(t), m)

    @given(random_trees(root_label=0), st.sampled_from([1, 2, -1, -2]))
    @settings(max_examples=150)
    def test_random_trees(self, t, m):
        assert reconstruct(decompose(t, m)) == t

    def test_sampled(self):
        s = Sampler(builtin_model("geom-pm01"), SamplerConfig(seed=5))
        for _ in range(150):
            t = s.sample_tree()
            for m in (1, -1, 2):
                assert reconstruct(decompose(t, m)) == t


class TestCounts:
    def test_first_hit_counts(self):
        counts = first_hit_counts(decode("0(+(+())+())"))
        assert counts[1] == 2 and counts[2] == 1

    def test_excursion_counts(self):
        d = decompose(decode("0(+()-())"), 1)
        pos, neg = excursion_counts(d)
        assert sum(pos.values()) + sum(neg.values()) == len(d.forest.decorations)


class TestWeights:
    @pytest.mark.parametrize("model_id", ["geom-pm1", "incomplete-binary"])
    def test_weight_preserved(self, model_id):
        # the decomposition's weight factorization multiplies back to Pi_0
        model = builtin_model(model_id)
        for e in range(0, 4):
            for t, _ in enumerate_trees(model, e).items:
                for m in (1, -1):
                    d = decompose(t, m)
                    assert decomposition_weight(model, d) == tree_weight(model, t)

    def test_root_component_weight_factor(self):
        model = builtin_model("geom-pm1")
        t = decode("0(+()-())")
        d = decompose(t, 1)
        w = root_component_weight(model, d.root_component, 1)
        assert 0 < w < 1 and isinstance(w, Fraction)
