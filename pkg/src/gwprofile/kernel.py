"""Explicit transition kernels of the binary-tree edge-profile chain.

The chain is ``(X_m^+, X_m^-)`` for the incomplete binary model: the
counts of upward and downward vertical edges between labels m-1 and m.
Its kernel has the closed form

    P[(p,q) -> (r,s)] = (p 4^{-p-s}/(p+s)) C(p+s,r) C(p+s,q) f_r(s)/f_p(q)

where ``f_p(q)`` is the probability that p independent draws from the
first-hit offspring law sum to q.  Conditioning the tree on V edges
replaces the f-ratio by a ratio of joint tables ``f~_p(q, l)`` (p
excursions, q zero-leaves, l edges) and pins the third coordinate
``M^-`` (edge mass below the level) to w = v + p + q.

All kernel operations take the f / f~ tables as explicit arguments so
the provenance of the tables (series expansion, fixed point, dynamic
program) is part of every computation.  Tables map ``f[p][q]`` and
``ftilde[p][q][l]`` to exact rationals (missing entries are zero);
nested sequences or nested mappings both work.
"""

from __future__ import annotations

import random
from fractions import Fraction
from functools import lru_cache
from typing import List, NamedTuple, Optional, Sequence, Tuple

from .errors import DomainError, ResourceLimitError


class State(NamedTuple):
    """Free-chain state (p, q) with q = 0 forced when p = 0."""

    p: int
    q: int


class CondState(NamedTuple):
    """Conditioned-chain state (p, q, v); absorbing state is (0, 0, V)."""

    p: int
    q: int
    v: int


@lru_cache(maxsize=None)
def binomial(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    import math

    return math.comb(n, k)


def check_state(p: int, q: int) -> State:
    if p < 0 or q < 0 or (p == 0 and q != 0):
        raise DomainError(f"({p},{q}) is not a valid chain state")
    return State(p, q)


def check_cond_state(p: int, q: int, v: int, V: int) -> CondState:
    if V < 0:
        raise DomainError("V must be >= 0")
    if p == 0:
        if q != 0 or v != V:
            raise DomainError(f"({p},{q},{v}) invalid: absorbing state is (0,0,{V})")
    elif q < 0 or not (0 <= v <= V):
        raise DomainError(f"({p},{q},{v}) outside the conditioned state space")
    return CondState(p, q, v)


def _lookup(table, *idx):
    cur = table
    for i in idx:
        try:
            cur = cur[i]
        except (IndexError, KeyError):
            return Fraction(0)
    return Fraction(cur) if not isinstance(cur, float) else cur


def transition_prob(f, from_state, to_state) -> Fraction:
    """One-step probability of the free chain (exact)."""
    p, q = check_state(*from_state)
    r, s = check_state(*to_state)
    if p == 0:
        return Fraction(1) if (r, s) == (0, 0) else Fraction(0)
    denom = _lookup(f, p, q)
    if denom == 0:
        raise DomainError(f"state ({p},{q}) is unreachable: f_{p}({q}) = 0")
    num = _lookup(f, r, s) if r > 0 else (Fraction(1) if s == 0 else Fraction(0))
    if num == 0:
        return Fraction(0)
    return (
        Fraction(p, p + s)
        * Fraction(1, 4 ** (p + s))
        * binomial(p + s, r)
        * binomial(p + s, q)
        * num
        / denom
    )


def _ftilde_at(ftilde, p: int, q: int, l: int) -> Fraction:
    if p == 0:
        return Fraction(1) if (q == 0 and l == 0) else Fraction(0)
    if l < 0:
        return Fraction(0)
    return _lookup(ftilde, p, q, l)


def cond_transition_prob(ftilde, V: int, from_state, to_state) -> Fraction:
    """One-step probability of the chain conditioned on V total edges."""
    p, q, v = check_cond_state(*from_state, V)
    r, s, w = check_cond_state(*to_state, V)
    if p == 0:
        return Fraction(1) if (r, s, w) == (0, 0, V) else Fraction(0)
    if w != v + p + q:
        return Fraction(0)
    denom = _ftilde_at(ftilde, p, q, V - v - p)
    if denom == 0:
        raise DomainError(
            f"state ({p},{q},{v}) is unreachable: f~_{p}({q},{V - v - p}) = 0"
        )
    num = _ftilde_at(ftilde, r, s, V - w - r)
    if num == 0:
        return Fraction(0)
    return (
        Fraction(p, p + s)
        * Fraction(1, 4 ** (p + s))
        * binomial(p + s, r)
        * binomial(p + s, q)
        * num
        / denom
    )


def harmonic_H(f, ftilde, V: int, state) -> Fraction:
    """H(p,q,v) = f~_p(q, V-v-p) / f_p(q); the h-transform linking the kernels."""
    p, q, v = check_cond_state(*state, V)
    if p == 0:
        return Fraction(1)
    denom = _lookup(f, p, q)
    if denom == 0:
        raise DomainError(f"state ({p},{q}) is unreachable: f_{p}({q}) = 0")
    return _ftilde_at(ftilde, p, q, V - v - p) / denom


_TAIL = 1e-15
_SMAX = 10**4


def simulate_chain(
    f, start, steps: int, rng: random.Random
) -> List[State]:
    """Kernel-driven path of the free chain, inverse-CDF per row.

    Each row is enumerated s = 0, 1, 2, ... (then r in 0..p+s) until the
    unexplored tail is below 1e-15; the path includes the start state
    and ``steps`` further states; absorption at (0,0) is permanent.
    """
    state = check_state(*start)
    path = [state]
    for _ in range(steps):
        p, q = state
        if p == 0:
            path.append(state)
            continue
        denom = float(_lookup(f, p, q))
        if denom == 0.0:
            raise DomainError(f"state ({p},{q}) is unreachable: f_{p}({q}) = 0")
        u = rng.random()
        acc = 0.0
        chosen = None
        last_positive = None
        s = 0
        while True:
            if s > _SMAX:
                raise ResourceLimitError(
                    f"row ({p},{q}) not resolved within s <= {_SMAX}"
                )
            base = float(p) / (p + s) / 4 ** (p + s) * binomial(p + s, q) / denom
            for r in range(p + s + 1):
                fr = (
                    float(_lookup(f, r, s))
                    if r > 0
                    else (1.0 if s == 0 else 0.0)
                )
                pr = base * binomial(p + s, r) * fr
                if pr > 0.0:
                    last_positive = (r, s)
                acc += pr
                if chosen is None and u < acc:
                    chosen = (r, s)
            if chosen is not None:
                break
            if 1.0 - acc < _TAIL:
                # u landed in the unresolved tail of mass < 1e-15; clamp
                # to the last explored cell with positive mass.
                chosen = last_positive
                break
            s += 1
        r, s = chosen
        state = State(r, s) if r > 0 else State(0, 0)
        path.append(state)
    return path


class ProfileCount(NamedTuple):
    card: int
    event_prob: Fraction
    u_initial: Optional[Fraction]


def _validate_half_profile(states: Sequence[Tuple[int, int]], side: str):
    """First components must be positive exactly on a prefix {1..m}."""
    m = len(states)
    for k, (a, b) in enumerate(states):
        if a < 0 or b < 0:
            raise DomainError(f"{side} profile has negative entries at level {k + 1}")
    support = [k for k, (a, _) in enumerate(states) if a > 0]
    if support and (support[0] != 0 or support != list(range(support[-1] + 1))):
        raise DomainError(f"{side} profile support is not a prefix interval")
    return support[-1] + 1 if support else 0


def count_profile(plus, check, f=None) -> ProfileCount:
    """Number of binary trees with the given vertical edge profile.

    ``plus`` lists (p_k, q_k) = (up, down) edge counts between labels
    k-1 and k for k = 1..; ``check`` lists (pcheck_k, qcheck_k) = (up,
    down) counts between labels -k and -k+1.  Returns the exact count,
    the probability of the profile event under the free law, and - when
    an f table is supplied - the closed-form probability U of the level-1
    marginal (p_1, q_1, pcheck_1, qcheck_1).

    A profile violating the state-space constraint (a downward count
    without the matching upward count) has count 0.
    """
    plus = [tuple(x) for x in plus]
    check = [tuple(x) for x in check]
    m = _validate_half_profile(plus, "positive")
    mck = _validate_half_profile([(qc, pc) for pc, qc in check], "negative")
    # state-space constraint: q_k = 0 whenever p_k = 0 (and mirrored).
    for p_k, q_k in plus:
        if p_k == 0 and q_k != 0:
            return ProfileCount(0, Fraction(0), None)
    for pc_k, qc_k in check:
        if qc_k == 0 and pc_k != 0:
            return ProfileCount(0, Fraction(0), None)

    def at(seq, k):  # 1-based, zero beyond range
        return seq[k - 1] if 1 <= k <= len(seq) else (0, 0)

    p1, q1 = at(plus, 1)
    pc1, qc1 = at(check, 1)
    m0 = pc1 + q1 + 1
    card = Fraction(binomial(m0, p1) * binomial(m0, qc1), m0)
    for i in range(1, mck + 1):
        pc_i, qc_i = at(check, i)
        pc_n, qc_n = at(check, i + 1)
        mi = pc_n + qc_i
        card *= Fraction(qc_i, mi) * binomial(mi, qc_n) * binomial(mi, pc_i)
    for j in range(1, m + 1):
        p_j, q_j = at(plus, j)
        p_n, q_n = at(plus, j + 1)
        mj = p_j + q_n
        card *= Fraction(p_j, mj) * binomial(mj, p_n) * binomial(mj, q_j)
    if card.denominator != 1:
        raise DomainError("profile count formula produced a non-integer")
    total = sum(a + b for a, b in plus) + sum(a + b for a, b in check)
    event_prob = card * Fraction(1, 4 ** (1 + total))
    u = None
    if f is not None:
        fp = _lookup(f, p1, q1) if p1 > 0 else (Fraction(1) if q1 == 0 else Fraction(0))
        fc = (
            _lookup(f, qc1, pc1)
            if qc1 > 0
            else (Fraction(1) if pc1 == 0 else Fraction(0))
        )
        u = (
            Fraction(1, 4 ** (1 + pc1 + q1))
            * Fraction(1, 1 + pc1 + q1)
            * binomial(1 + pc1 + q1, p1)
            * binomial(1 + pc1 + q1, qc1)
            * fp
            * fc
        )
    return ProfileCount(int(card), event_prob, u)
