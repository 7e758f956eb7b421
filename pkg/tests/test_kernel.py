import random
from fractions import Fraction

import pytest

from gwprofile import builtin_model
from gwprofile.errors import DomainError
from gwprofile.genfun import f_table, joint_table, nu_table
from gwprofile.kernel import (
    CondState,
    State,
    check_cond_state,
    check_state,
    cond_transition_prob,
    count_profile,
    harmonic_H,
    simulate_chain,
    transition_prob,
)
from gwprofile.oracle import exact_chain_law

BINARY = builtin_model("incomplete-binary")


def tables(p_max=8, q_max=8):
    nu = nu_table(BINARY, q_max + 2)
    return f_table(nu, p_max, q_max)


class TestStates:
    def test_valid(self):
        assert check_state(2, 3) == State(2, 3)
        assert check_cond_state(0, 0, 4, 4) == CondState(0, 0, 4)

    def test_invalid(self):
        with pytest.raises(DomainError):
            check_state(0, 1)
        with pytest.raises(DomainError):
            check_cond_state(0, 0, 2, 4)
        with pytest.raises(DomainError):
            check_cond_state(1, 0, 5, 4)


class TestFreeKernel:
    def test_absorption_cell(self):
        f = tables()
        assert transition_prob(f, (1, 0), (0, 0)) == Fraction(5, 8)

    def test_absorbing_state(self):
        f = tables()
        assert transition_prob(f, (0, 0), (0, 0)) == 1
        assert transition_prob(f, (0, 0), (1, 0)) == 0

    def test_row_sums_to_one(self):
        nu = [float(x) for x in nu_table(BINARY, 210)]
        f = f_table(nu, 215, 205)
        for p, q in [(1, 0), (1, 1), (2, 1), (3, 2)]:
            total = 0.0
            for s in range(200):
                for r in range(p + s + 1):
                    if r == 0 and s > 0:
                        continue
                    state = (r, s) if r > 0 else (0, 0)
                    total += float(transition_prob(f, (p, q), state))
            assert abs(total - 1.0) < 1e-9, (p, q, total)

    def test_unreachable_state(self):
        f = tables()
        with pytest.raises(DomainError):
            transition_prob({1: {0: 0}}, (1, 0), (0, 0))


class TestConditionedKernel:
    def test_mass_coordinate_pinned(self):
        V = 4
        ftilde = joint_table(BINARY, V + 1, V + 1, V)
        # w must equal v + p + q
        assert cond_transition_prob(ftilde, V, (1, 0, 0), (1, 0, 2)) == 0
        # absorption requires all V edges accounted for: v + p + q = V
        assert cond_transition_prob(ftilde, V, (1, 0, 0), (0, 0, V)) == 0
        assert cond_transition_prob(ftilde, V, (1, 0, V - 1), (0, 0, V)) > 0

    def test_rows_sum_to_one(self):
        V = 5
        ftilde = joint_table(BINARY, V + 1, V + 1, V)
        law = exact_chain_law(V)
        seen = {s for path in law for s in path[:-1]}
        for p, q, v in seen:
            w = v + p + q
            total = Fraction(0)
            for s in range(V + 1):
                for r in range(p + s + 1):
                    tgt = (r, s, w) if r > 0 else (0, 0, V)
                    if r == 0 and (s > 0 or w != V):
                        continue
                    total += cond_transition_prob(ftilde, V, (p, q, v), tgt)
            assert total == 1, (p, q, v)

    def test_h_transform_links_kernels(self):
        # conditioned kernel = free kernel reweighted by the harmonic ratio
        V = 5
        ftilde = joint_table(BINARY, V + 1, V + 1, V)
        nu = nu_table(BINARY, V + 2)
        f = f_table(nu, 2 * V + 2, V + 1)
        law = exact_chain_law(V)
        seen = {s for path in law for s in path[:-1]}
        for p, q, v in seen:
            if p == 0:
                continue
            w = v + p + q
            h_from = harmonic_H(f, ftilde, V, (p, q, v))
            for s in range(V + 1):
                for r in range(p + s + 1):
                    tgt = (r, s, w) if r > 0 else (0, 0, V)
                    if r == 0 and (s > 0 or w != V):
                        continue
                    lhs = cond_transition_prob(ftilde, V, (p, q, v), tgt)
                    h_to = harmonic_H(f, ftilde, V, tgt)
                    free = transition_prob(f, (p, q), (tgt[0], tgt[1]))
                    if h_from != 0:
                        assert lhs == free * h_to / h_from, ((p, q, v), tgt)


class TestSimulate:
    def test_deterministic(self):
        f = tables(20, 18)
        a = simulate_chain(f, (1, 0), 12, random.Random(4))
        b = simulate_chain(f, (1, 0), 12, random.Random(4))
        assert a == b
        assert len(a) == 13 and a[0] == (1, 0)

    def test_absorption_permanent(self):
        f = tables(20, 18)
        path = simulate_chain(f, (1, 0), 40, random.Random(7))
        hit = [i for i, s in enumerate(path) if s == (0, 0)]
        if hit:
            assert all(s == (0, 0) for s in path[hit[0]:])


class TestCountProfile:
    def test_one_edge_up(self):
        res = count_profile([(1, 0)], [])
        assert res.card == 1
        assert res.event_prob == Fraction(1, 16)

    def test_u_initial(self):
        f = tables()
        res = count_profile([(1, 0)], [], f=f)
        assert res.u_initial == Fraction(1, 10)

    def test_state_constraint(self):
        res = count_profile([(0, 1)], [])
        assert res.card == 0 and res.event_prob == 0

    def test_non_prefix_support(self):
        with pytest.raises(DomainError):
            count_profile([(0, 0), (1, 0)], [])

    def test_total_mass_over_trees(self):
        # summing event probabilities over all profiles of <=3-edge trees
        # recovers the total 4^{-V-1} masses
        from gwprofile.oracle import enumerate_trees
        from gwprofile.tree import edge_profile

        total = Fraction(0)
        for e in range(0, 4):
            for t, wgt in enumerate_trees(BINARY, e).items:
                total += wgt
        by_profile = {}
        for e in range(0, 4):
            for t, _ in enumerate_trees(BINARY, e).items:
                prof = edge_profile(t)
                mmax = max(list(prof.x_plus) + [0])
                cmax = max(list(prof.check_minus) + [0])
                key = (
                    tuple(
                        (prof.x_plus.get(k, 0), prof.x_minus.get(k, 0))
                        for k in range(1, mmax + 1)
                    ),
                    tuple(
                        (prof.check_plus.get(k, 0), prof.check_minus.get(k, 0))
                        for k in range(1, cmax + 1)
                    ),
                )
                by_profile[key] = True
        acc = Fraction(0)
        for plus, check in by_profile:
            acc += count_profile(plus, check).event_prob
        assert acc == total
