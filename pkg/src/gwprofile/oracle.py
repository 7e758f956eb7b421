"""Exhaustive exact computations used to verify every formula independently.

Everything here is brute force over small edge budgets, with exact
rational weights: full tree enumeration, bicoloured-forest counting,
marked-forest joint laws, exact conditioned-chain path laws, and the
first-hitting-time (cyclic lemma) identity for the associated walk.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import DomainError, IntegrityError, ResourceLimitError
from .excursion import Excursion
from .model import TreeModel, tree_weight
from .tree import LabelledPlaneTree, edge_profile

ITEM_CAP = 10**7


@dataclass(frozen=True)
class WeightedEnsemble:
    """A finite family of trees with exact positive weights."""

    items: Tuple[Tuple[LabelledPlaneTree, Fraction], ...]
    total: Fraction

    def __post_init__(self):
        if any(w <= 0 for _, w in self.items):
            raise IntegrityError("ensemble weights must be positive")
        if sum((w for _, w in self.items), Fraction(0)) != self.total:
            raise IntegrityError("ensemble total does not match its items")


@dataclass(frozen=True)
class MarkedTree:
    """A plane tree with two vertex marks sigma and iota.

    ``R`` = vertices with sigma = 1, ``L`` = vertices with iota = 1.
    A vertex with sigma = 0 has no children.  ``tail_mass`` records the
    truncation of the offspring table when the tree was sampled.
    """

    children: Tuple[Tuple[int, ...], ...]
    sigma: Tuple[int, ...]
    iota: Tuple[int, ...]
    tail_mass: Optional[float] = None

    def __post_init__(self):
        n = len(self.children)
        if not (len(self.sigma) == len(self.iota) == n and n >= 1):
            raise IntegrityError("marked tree arrays must have equal length >= 1")
        for v in range(n):
            if self.sigma[v] == 0 and self.children[v]:
                raise IntegrityError(f"vertex {v} has sigma=0 but children")

    @property
    def n_vertices(self) -> int:
        return len(self.children)

    @property
    def n_edges(self) -> int:
        return len(self.children) - 1

    @property
    def R(self) -> Tuple[int, ...]:
        return tuple(v for v, s in enumerate(self.sigma) if s)

    @property
    def L(self) -> Tuple[int, ...]:
        return tuple(v for v, i in enumerate(self.iota) if i)


# -- exhaustive tree enumeration -------------------------------------------

_shape_memo: Dict[tuple, List[Tuple[tuple, Fraction]]] = {}


def _subtree_shapes(model: TreeModel, budget: int) -> List[Tuple[tuple, Fraction]]:
    """All weighted increment-shapes with exactly ``budget`` edges.

    A shape is a tuple of (child increment, child shape) pairs; the
    weight collects every offspring and displacement factor in the
    subtree.  Shapes are label-free, so the memo is shared across root
    labels.
    """
    key = (model.key, budget)
    got = _shape_memo.get(key)
    if got is not None:
        return got
    out: List[Tuple[tuple, Fraction]] = []
    for k in model.offspring.arities_up_to(budget):
        xi = model.offspring.prob(k)
        if xi == 0:
            continue
        if k == 0:
            if budget == 0:
                out.append(((), xi))
            continue
        if k > budget:
            continue
        for vec, eta in model.displacement.vectors(k):
            base = xi * eta
            for parts in _compositions(budget - k, k):
                for combo in product(
                    *(_subtree_shapes(model, e) for e in parts)
                ):
                    shape = tuple(
                        (vec[i], combo[i][0]) for i in range(k)
                    )
                    w = base
                    for _, cw in combo:
                        w *= cw
                    out.append((shape, w))
    _shape_memo[key] = out
    return out


def _compositions(total: int, parts: int):
    """All tuples of ``parts`` nonnegative integers summing to ``total``."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _shape_to_tree(shape: tuple, root_label: int) -> LabelledPlaneTree:
    return LabelledPlaneTree.from_nested(root_label, shape)


def enumerate_trees(
    model: TreeModel, edges: int, cap: int = ITEM_CAP
) -> WeightedEnsemble:
    """Every positive-weight tree with root label 0 and ``edges`` edges."""
    if edges < 0:
        raise DomainError("edges must be >= 0")
    shapes = _subtree_shapes(model, edges)
    if len(shapes) > cap:
        raise ResourceLimitError(
            f"enumeration would produce {len(shapes)} > cap {cap} trees"
        )
    items = tuple((_shape_to_tree(s, 0), w) for s, w in shapes)
    total = sum((w for _, w in items), Fraction(0))
    return WeightedEnsemble(items, total)


_mass_memo: Dict[tuple, Fraction] = {}


def size_mass(model: TreeModel, edges: int) -> Fraction:
    """Exact mass the model puts on trees with the given edge count."""
    if edges < 0:
        raise DomainError("edges must be >= 0")
    key = (model.key, edges)
    got = _mass_memo.get(key)
    if got is not None:
        return got
    total = Fraction(0)
    for k in model.offspring.arities_up_to(edges):
        xi = model.offspring.prob(k)
        if xi == 0:
            continue
        if k == 0:
            if edges == 0:
                total += xi
            continue
        if k > edges:
            continue
        eta_total = sum((eta for _, eta in model.displacement.vectors(k)), Fraction(0))
        if eta_total == 0:
            continue
        for parts in _compositions(edges - k, k):
            w = xi * eta_total
            for e in parts:
                w *= size_mass(model, e)
                if w == 0:
                    break
            total += w
    _mass_memo[key] = total
    return total


# -- exact conditioned chain law -------------------------------------------


def chain_path(t: LabelledPlaneTree, V: int) -> Tuple[Tuple[int, int, int], ...]:
    """The (X_m^+, X_m^-, M_m^-) path of one tree, up to absorption.

    States are listed for m = 1, 2, ... and end with the first
    absorbing state (0, 0, V).
    """
    prof = edge_profile(t)
    path = []
    m = 1
    while True:
        state = (
            prof.x_plus.get(m, 0),
            prof.x_minus.get(m, 0),
            prof.mass_below(m),
        )
        path.append(state)
        if state[0] == 0:
            if state != (0, 0, V):
                raise IntegrityError(f"absorbed at {state}, expected (0,0,{V})")
            return tuple(path)
        m += 1


def exact_chain_law(V: int, cap: int = ITEM_CAP):
    """Exact path law of (X^+, X^-, M^-) for the uniform V-edge binary tree."""
    from .model import builtin_model

    model = builtin_model("incomplete-binary")
    ens = enumerate_trees(model, V, cap=cap)
    if ens.total == 0:
        raise DomainError(f"no {V}-edge trees")
    law: Dict[tuple, Fraction] = defaultdict(Fraction)
    for t, w in ens.items:
        law[chain_path(t, V)] += w / ens.total
    return dict(law)


@dataclass
class MarkovReport:
    histories_checked: int = 0
    transitions_checked: int = 0
    discrepancies: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.discrepancies


def verify_markov_exact(law, V: int, transition=None) -> MarkovReport:
    """Check the exact Markov property of a path law, and a kernel.

    For every history with positive mass, the conditional next-state
    law must equal the conditional law given the final state alone; if
    ``transition(from_state, to_state)`` is given, every conditional
    probability is also compared to it.  Returns a report listing any
    discrepancy (never raises).
    """
    report = MarkovReport()
    absorbing = (0, 0, V)
    max_len = max((len(p) for p in law), default=0)

    def state_at(path, k):  # absorbing once ended
        return path[k] if k < len(path) else absorbing

    for k in range(max_len - 1):
        by_history: Dict[tuple, Dict[tuple, Fraction]] = defaultdict(
            lambda: defaultdict(Fraction)
        )
        by_state: Dict[tuple, Dict[tuple, Fraction]] = defaultdict(
            lambda: defaultdict(Fraction)
        )
        for path, w in law.items():
            if k >= len(path):
                continue
            hist = path[: k + 1]
            nxt = state_at(path, k + 1)
            by_history[hist][nxt] += w
            by_state[hist[-1]][nxt] += w
        norm_state = {
            s: {n: w / sum(d.values()) for n, w in d.items()}
            for s, d in by_state.items()
        }
        for hist, d in by_history.items():
            total = sum(d.values())
            cond = {n: w / total for n, w in d.items()}
            report.histories_checked += 1
            if cond != norm_state[hist[-1]]:
                report.discrepancies.append(
                    f"step {k + 1}: history {hist} gives {cond},"
                    f" state {hist[-1]} alone gives {norm_state[hist[-1]]}"
                )
        if transition is not None:
            for s, d in norm_state.items():
                for n, prob in d.items():
                    report.transitions_checked += 1
                    expected = transition(s, n)
                    if expected != prob:
                        report.discrepancies.append(
                            f"transition {s} -> {n}: law {prob},"
                            f" kernel {expected}"
                        )
    return report


# -- bicoloured forest counting --------------------------------------------


def enumerate_bicoloured_forests(
    n: int, n_plus: Sequence[int], n_minus: Sequence[int]
) -> int:
    """Count bicoloured plane forests with prescribed per-vertex arities.

    The forest has ``n`` trees rooted at positive vertices; positive
    vertices v_1..v_p have n_plus[j] children (all negative), negative
    vertices u_1..u_q have n_minus[i] children (all positive).  The
    count is verified against q!(p-1)!n in tests.
    """
    p, q = len(n_plus), len(n_minus)
    if n < 1 or p < n:
        raise DomainError("need n >= 1 and p >= n")
    if p != n + sum(n_minus) or q != sum(n_plus):
        raise DomainError(
            "arity lists violate p = n + sum(n_minus), q = sum(n_plus)"
        )

    count = 0
    # Fill the forest in depth-first order: a stack of (sign of the
    # vertex wanted); assignment of the labelled vertices is explicit.
    used_p = [False] * p
    used_q = [False] * q

    def fill(stack) -> None:
        nonlocal count
        if not stack:
            # a valid forest uses every one of the p + q labelled vertices
            if all(used_p) and all(used_q):
                count += 1
            return
        sign, rest = stack[0], stack[1:]
        if sign > 0:
            for j in range(p):
                if used_p[j]:
                    continue
                used_p[j] = True
                fill([-1] * n_plus[j] + rest)
                used_p[j] = False
        else:
            for i in range(q):
                if used_q[i]:
                    continue
                used_q[i] = True
                fill([+1] * n_minus[i] + rest)
                used_q[i] = False

    fill([+1] * n)
    return count


# -- marked trees and forests ----------------------------------------------


def _marked_tree_law(nu: Sequence[Fraction], edges: int):
    """Joint law (|L|, |R|) -> prob for one marked tree with ``edges`` edges.

    Every vertex draws iota, sigma ~ Bernoulli(1/2); a vertex with
    sigma = 1 draws its children count from ``nu``; |T| counts edges.
    """
    memo: Dict[int, Dict[Tuple[int, int], Fraction]] = {}
    half = Fraction(1, 2)

    def tree(e: int) -> Dict[Tuple[int, int], Fraction]:
        got = memo.get(e)
        if got is not None:
            return got
        out: Dict[Tuple[int, int], Fraction] = defaultdict(Fraction)
        for iota in (0, 1):
            # sigma = 0: leaf
            if e == 0:
                out[(iota, 0)] += half * half
            # sigma = 1 with k children
            for k in range(len(nu)):
                if nu[k] == 0 or k > e:
                    continue
                base = half * half * nu[k]
                for sub, w in forest(k, e - k).items():
                    out[(iota + sub[0], 1 + sub[1])] += base * w
        memo[e] = dict(out)
        return memo[e]

    forest_memo: Dict[Tuple[int, int], Dict[Tuple[int, int], Fraction]] = {}

    def forest(k: int, budget: int) -> Dict[Tuple[int, int], Fraction]:
        if k == 0:
            return {(0, 0): Fraction(1)} if budget == 0 else {}
        got = forest_memo.get((k, budget))
        if got is not None:
            return got
        out: Dict[Tuple[int, int], Fraction] = defaultdict(Fraction)
        for e in range(budget + 1):
            for a, wa in tree(e).items():
                for b, wb in forest(k - 1, budget - e).items():
                    out[(a[0] + b[0], a[1] + b[1])] += wa * wb
        forest_memo[(k, budget)] = dict(out)
        return forest_memo[(k, budget)]

    return tree(edges)


def enumerate_marked_forests(nu: Sequence[Fraction], p: int, s: int):
    """Joint law of (sum |L_k|, sum |R_k|) for p marked trees, total edges s.

    Returns a dict (q, r) -> exact probability of the event
    {sum |T_k| = s, sum |L_k| = q, sum |R_k| = r}.
    """
    if p < 1 or s < 0:
        raise DomainError("need p >= 1 and s >= 0")
    nu = [Fraction(x) for x in nu]
    # distribute the s edges over the p trees, convolving (|L|, |R|)
    acc: Dict[Tuple[int, int, int], Fraction] = {(0, 0, 0): Fraction(1)}
    for _ in range(p):
        nxt: Dict[Tuple[int, int, int], Fraction] = defaultdict(Fraction)
        for (e0, q0, r0), w0 in acc.items():
            for e in range(s - e0 + 1):
                for (l, rho), w in _marked_tree_law(nu, e).items():
                    nxt[(e0 + e, q0 + l, r0 + rho)] += w0 * w
        acc = dict(nxt)
    return {
        (q, r): w for (e, q, r), w in acc.items() if e == s and w != 0
    }


def to_marked(tau) -> MarkedTree:
    """The marked tree of label-1 vertices of a positive excursion.

    Vertices are the label-1 vertices of ``tau`` (incomplete binary
    model), joined by nearest-label-1-ancestor edges; sigma marks
    vertices with a right (+1) child, iota those with a left (-1)
    child.  The edge-count identities |T| = y-, |L| = n, |R| = y+ are
    asserted.
    """
    t = tau.tree if isinstance(tau, Excursion) else tau
    if t.labels[0] != 1 or any(l < 0 for l in t.labels):
        raise DomainError("to_marked expects a positive excursion rooted at 1")
    ones = [v for v in range(t.n_vertices) if t.labels[v] == 1]
    index = {v: i for i, v in enumerate(ones)}
    children: List[List[int]] = [[] for _ in ones]
    sigma = [0] * len(ones)
    iota = [0] * len(ones)
    # nearest label-1 ancestor via preorder stack
    anc: List[Optional[int]] = [None] * t.n_vertices
    for v in range(1, t.n_vertices):
        par = t.parents[v]
        anc[v] = par if t.labels[par] == 1 else anc[par]
    for v in ones:
        if v != 0:
            children[index[anc[v]]].append(index[v])
        for c in t.children[v]:
            if t.labels[c] == 2:
                sigma[index[v]] = 1
            elif t.labels[c] == 0:
                iota[index[v]] = 1
    marked = MarkedTree(
        tuple(tuple(c) for c in children), tuple(sigma), tuple(iota)
    )
    prof_y_minus = sum(
        1
        for v in range(1, t.n_vertices)
        if t.labels[v] == 1 and t.labels[t.parents[v]] == 2
    )
    n_tau = sum(1 for l in t.labels if l == 0)
    y_plus = sum(
        1
        for v in range(1, t.n_vertices)
        if t.labels[v] == 2 and t.labels[t.parents[v]] == 1
    )
    if (marked.n_edges, len(marked.L), len(marked.R)) != (
        prof_y_minus,
        n_tau,
        y_plus,
    ):
        raise IntegrityError("marked-tree cardinality identities violated")
    return marked


# -- first-hitting-time (cyclic lemma) identity -----------------------------


def _walk_joint(nu: Sequence[Fraction], steps: int):
    """Joint law (sum k_j, sum sigma_j) of iid steps of the marked walk.

    One step: with prob 1/2 sigma = 0 and k = 0; with prob (1/2) nu(k)
    sigma = 1 and k children.
    """
    half = Fraction(1, 2)
    step = {(0, 0): half}
    for k in range(len(nu)):
        if nu[k]:
            step[(k, 1)] = half * nu[k]
    acc = {(0, 0): Fraction(1)}
    for _ in range(steps):
        nxt: Dict[Tuple[int, int], Fraction] = defaultdict(Fraction)
        for (c0, s0), w0 in acc.items():
            for (k, sg), w in step.items():
                nxt[(c0 + k, s0 + sg)] += w0 * w
        acc = dict(nxt)
    return acc


def kemperman_check(nu: Sequence[Fraction], p: int, s: int):
    """Both sides of the first-hit identity for the marked walk.

    Returns a dict (q, r) -> (lhs, rhs) with
    lhs = P(h_{-p} = p+s, sum sigma = r, sum iota = q) computed by
    forest exhaustion, rhs = (p/(p+s)) P(S_{p+s} = -p, ...) computed
    from the unconstrained walk.  The two must agree exactly.
    """
    from .kernel import binomial

    nu = [Fraction(x) for x in nu]
    lhs = enumerate_marked_forests(nu, p, s)
    walk = _walk_joint(nu, p + s)
    out = {}
    iota_denom = Fraction(1, 2 ** (p + s))
    for (q, r) in set(lhs) | {
        (q, r)
        for (k, r), w in walk.items()
        if k == s
        for q in range(p + s + 1)
    }:
        rhs = (
            Fraction(p, p + s)
            * walk.get((s, r), Fraction(0))
            * binomial(p + s, q)
            * iota_denom
        )
        l = lhs.get((q, r), Fraction(0))
        if l or rhs:
            out[(q, r)] = (l, rhs)
    return out
