import math

import pytest

from gwprofile import builtin_model, decode
from gwprofile.errors import DomainError, IntegrityError
from gwprofile.maps import (
    PlanarMap,
    Quadrangulation,
    ball,
    ball_profile,
    boltzmann_mass,
    card_pointed_quadrangulations,
    load_map,
    map_to_tree,
    save_map,
    tree_to_map,
    verify_profile_relations,
)
from gwprofile.oracle import enumerate_trees
from gwprofile.sampler import Sampler, SamplerConfig

MODEL = builtin_model("geom-pm01")


def all_trees(max_edges):
    for e in range(1, max_edges + 1):
        for t, _ in enumerate_trees(MODEL, e).items:
            yield t


class TestPlanarMap:
    def test_single_edge(self):
        m = PlanarMap(alpha={0: 1, 1: 0}, sigma={0: 0, 1: 1})
        assert m.n_edges == 1 and m.n_vertices == 2 and m.n_faces == 1
        assert m.euler_characteristic() == 2

    def test_alpha_must_be_involution(self):
        with pytest.raises(IntegrityError):
            PlanarMap(alpha={0: 0, 1: 1}, sigma={0: 1, 1: 0})

    def test_connectivity_required(self):
        with pytest.raises(IntegrityError):
            PlanarMap(
                alpha={0: 1, 1: 0, 2: 3, 3: 2},
                sigma={0: 0, 1: 1, 2: 2, 3: 3},
            )

    def test_quadrangulation_rejects_wrong_faces(self):
        # a single edge has one face of degree 2
        with pytest.raises(IntegrityError):
            Quadrangulation(
                alpha={0: 1, 1: 0},
                sigma={0: 0, 1: 1},
                root_dart=0,
                pointed_vertex=1,
            )


class TestBijection:
    def test_roundtrip_exhaustive(self):
        for t in all_trees(4):
            for bit in (0, 1):
                q = tree_to_map(t, bit)
                assert q.n_faces == t.n_edges
                assert q.n_vertices == t.n_vertices + 1
                assert map_to_tree(q) == (t, bit)

    def test_distinctness_counts(self):
        # distinct pointed rooted quadrangulations with n faces: 2 * 3^n * Cat(n)
        for n in (1, 2, 3):
            seen = set()
            for t, _ in enumerate_trees(MODEL, n).items:
                for bit in (0, 1):
                    q = tree_to_map(t, bit)
                    seen.add(_canonical_key(q))
            assert len(seen) == card_pointed_quadrangulations(n)

    def test_rejects_edgeless_tree(self):
        with pytest.raises(DomainError):
            tree_to_map(decode("0()"), 0)

    def test_rejects_bad_orientation(self):
        with pytest.raises(DomainError):
            tree_to_map(decode("0(+())"), 2)

    def test_sampled_roundtrip(self):
        s = Sampler(MODEL, SamplerConfig(seed=11, vertex_cap=2000))
        for _ in range(60):
            q = s.sample_quadrangulation()
            t, bit = map_to_tree(q)
            q2 = tree_to_map(t, bit)
            assert q2.alpha == q.alpha and q2.sigma == q.sigma
            assert q2.root_dart == q.root_dart
            assert q2.pointed_vertex == q.pointed_vertex


def _canonical_key(q):
    order = {}
    queue = [q.root_dart]
    while queue:
        d = queue.pop(0)
        if d in order:
            continue
        order[d] = len(order)
        queue.append(q.alpha[d])
        queue.append(q.sigma[d])
    darts = sorted(order, key=order.get)
    point = min(order[d] for d in q.darts if q.vertex_of(d) == q.pointed_vertex)
    return (
        tuple(order[q.alpha[d]] for d in darts),
        tuple(order[q.sigma[d]] for d in darts),
        point,
    )


class TestBalls:
    def test_radius_covers_map(self):
        q = tree_to_map(decode("0(+(+())-())"), 0)
        summary = ball_profile(q)
        sub, external, internal = ball(q, summary.k_max)
        assert not external and internal == q.n_faces

    def test_profile_relations_hold(self):
        for t in all_trees(3):
            for bit in (0, 1):
                rep = verify_profile_relations(tree_to_map(t, bit))
                assert rep.ok, rep.mismatches

    def test_negative_control(self):
        flagged = 0
        total = 0
        for t in all_trees(3):
            for bit in (0, 1):
                total += 1
                rep = verify_profile_relations(tree_to_map(t, bit), d_star_shift=1)
                flagged += 0 if rep.ok else 1
        assert flagged == total

    def test_perimeters_even(self):
        for t in all_trees(3):
            summary = ball_profile(tree_to_map(t, 0))
            assert all(p % 2 == 0 for p in summary.P)


class TestCounting:
    def test_card_formula(self):
        for n in range(1, 6):
            cat = math.comb(2 * n, n) // (n + 1)
            assert card_pointed_quadrangulations(n) == 2 * 3**n * cat

    def test_boltzmann_mass_monotone(self):
        a, b = boltzmann_mass(20), boltzmann_mass(80)
        assert 0 < a < b < 2


class TestCSV:
    def test_roundtrip(self, tmp_path):
        q = tree_to_map(decode("0(-(0()+()))"), 1)
        path = str(tmp_path / "map.csv")
        save_map(q, path)
        q2 = load_map(path)
        assert q2.alpha == q.alpha and q2.sigma == q.sigma
        assert q2.root_dart == q.root_dart
        assert q2.pointed_vertex == q.pointed_vertex

    def test_malformed(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("nonsense\n")
        with pytest.raises(DomainError):
            load_map(str(path))
