"""Seedable random generation of labelled trees, excursions and maps.

Randomness
----------
All sampling is driven by :class:`random.Random` (Mersenne Twister).  A
:class:`SamplerConfig` carries a 64-bit ``seed`` and a ``stream`` index;
the generator is seeded with ``(seed ^ (stream * STREAM_MIX)) mod 2**64``
where ``STREAM_MIX`` is a fixed odd 64-bit constant, so distinct streams
of the same seed are decorrelated and a (seed, stream) pair fully
determines every sample.  Parallel drivers assign one stream per worker.

Draw order is part of the contract: a vertex's offspring count is drawn
first, then its displacement vector, and children are expanded
depth-first in plane (left-to-right) order.  Trees are generated
iteratively; the only growth limits are the explicit caps in the config,
reported via :class:`ResourceLimitError` / the rejection counters.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .errors import ConfigurationError, DomainError, ResourceLimitError
from .excursion import Excursion
from .model import TreeModel, builtin_model
from .tree import LabelledPlaneTree

STREAM_MIX = 0x9E3779B97F4A7C15  # odd 64-bit mixing constant (golden ratio)

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class SamplerConfig:
    """Reproducibility and resource limits for all samplers.

    ``seed`` is reduced modulo 2**64.  ``vertex_cap`` bounds the number
    of vertices of any single generated tree; ``rejection_cap`` bounds
    the number of attempts of any rejection loop.
    """

    seed: int = 0
    vertex_cap: int = 10**7
    rejection_cap: int = 10**6
    stream: int = 0

    def __post_init__(self):
        if self.vertex_cap < 1:
            raise ConfigurationError("vertex_cap must be >= 1")
        if self.rejection_cap < 1:
            raise ConfigurationError("rejection_cap must be >= 1")


def make_rng(config: SamplerConfig) -> random.Random:
    """The generator determined by (seed, stream); see module docstring."""
    mixed = (config.seed ^ ((config.stream * STREAM_MIX) & _MASK64)) & _MASK64
    return random.Random(mixed)


class Sampler:
    """Stateful sampler bound to one model and one RNG stream.

    Successive calls consume the same stream, so a sequence of samples
    is reproducible from the config alone.
    """

    def __init__(self, model: TreeModel, config: Optional[SamplerConfig] = None):
        self.model = model
        self.config = config or SamplerConfig()
        self.rng = make_rng(self.config)
        self._offspring_cum = self._offspring_cumulative()
        self._vector_cum = {}  # arity -> (vectors, cumulative floats)

    # -- elementary draws -------------------------------------------------

    def _offspring_cumulative(self) -> Optional[List[float]]:
        off = self.model.offspring
        if off.kind == "finite-table":
            cum, acc = [], 0.0
            for p in off.table:
                acc += float(p)
                cum.append(acc)
            cum[-1] = 1.0
            return cum
        return None

    def draw_offspring(self) -> int:
        off = self.model.offspring
        if self._offspring_cum is not None:
            u = self.rng.random()
            for k, c in enumerate(self._offspring_cum):
                if u < c:
                    return k
            return len(self._offspring_cum) - 1
        if off.kind == "geometric-half":
            # P(k) = 2^{-k-1}: count leading 1-bits.
            k = 0
            while self.rng.getrandbits(1):
                k += 1
            return k
        # geometric with parameter p: P(k) = (1-p) p^k
        p = float(off.p)
        u, acc, term, k = self.rng.random(), 0.0, 1.0 - p, 0
        while True:
            acc += term
            if u < acc:
                return k
            term *= p
            k += 1
            if k > 10**6:  # pragma: no cover - float underflow guard
                return k

    def draw_displacements(self, d: int) -> Tuple[int, ...]:
        if d == 0:
            return ()
        disp = self.model.displacement
        if disp.kind == "iid-uniform-pm1":
            return tuple(1 - 2 * self.rng.getrandbits(1) for _ in range(d))
        if disp.kind == "iid-uniform-pm01":
            return tuple(self.rng.randrange(3) - 1 for _ in range(d))
        entry = self._vector_cum.get(d)
        if entry is None:
            vectors, cum, acc = [], [], 0.0
            for v, w in disp.vectors(d):
                vectors.append(v)
                acc += float(w)
                cum.append(acc)
            if not vectors:
                raise DomainError(
                    f"model {self.model.name!r} has no displacement vectors"
                    f" for arity {d}"
                )
            cum[-1] = 1.0
            entry = (vectors, cum)
            self._vector_cum[d] = entry
        vectors, cum = entry
        u = self.rng.random()
        for v, c in zip(vectors, cum):
            if u < c:
                return v
        return vectors[-1]

    # -- tree generation ---------------------------------------------------

    def _grow(
        self,
        root_label: int,
        vertex_cap: int,
        freeze_zero: bool = False,
    ) -> Optional[LabelledPlaneTree]:
        """One unconditioned tree, or None if ``vertex_cap`` is exceeded.

        With ``freeze_zero`` vertices labelled 0 are kept as leaves and
        consume no randomness (excursion law).
        """
        labels = [root_label]
        parents: List[Optional[int]] = [None]
        children: List[List[int]] = [[]]
        stack = [0]
        while stack:
            v = stack.pop()
            if freeze_zero and labels[v] == 0:
                continue
            d = self.draw_offspring()
            if d == 0:
                continue
            incs = self.draw_displacements(d)
            base = labels[v]
            first = len(labels)
            if first + d > vertex_cap:
                return None
            kids = children[v]
            for i, inc in enumerate(incs):
                labels.append(base + inc)
                parents.append(v)
                children.append([])
                kids.append(first + i)
            stack.extend(range(first + d - 1, first - 1, -1))
        return _preorder_tree(labels, parents, children)

    def sample_tree(self, root_label: int = 0) -> LabelledPlaneTree:
        """One tree from the unconditioned model law, rooted at ``root_label``."""
        t = self._grow(root_label, self.config.vertex_cap)
        if t is None:
            raise ResourceLimitError(
                f"tree exceeded vertex_cap={self.config.vertex_cap}"
            )
        return t

    def sample_excursion(self, sign: int) -> Excursion:
        """One excursion of the given sign (+1 or -1).

        The root is labelled ``sign``; vertices that reach label 0 are
        leaves by definition and are never expanded.
        """
        if sign not in (1, -1):
            raise DomainError(f"excursion sign must be +1 or -1, got {sign}")
        t = self._grow(sign, self.config.vertex_cap, freeze_zero=True)
        if t is None:
            raise ResourceLimitError(
                f"excursion exceeded vertex_cap={self.config.vertex_cap}"
            )
        return Excursion.from_tree(t)

    def sample_conditioned(self, n_edges: int) -> LabelledPlaneTree:
        """One tree conditioned on having exactly ``n_edges`` edges.

        Rejection from the unconditioned law.  Raises DomainError when
        the model gives the target size zero mass, ResourceLimitError
        when the rejection budget is exhausted.
        """
        if n_edges < 0:
            raise DomainError("n_edges must be >= 0")
        from .oracle import size_mass

        if size_mass(self.model, n_edges) == 0:
            raise DomainError(
                f"model {self.model.name!r} puts zero mass on trees"
                f" with {n_edges} edges"
            )
        cap = min(self.config.vertex_cap, n_edges + 2)
        for _ in range(self.config.rejection_cap):
            t = self._grow(0, cap)
            if t is not None and t.n_edges == n_edges:
                return t
        raise ResourceLimitError(
            f"no tree with {n_edges} edges in"
            f" rejection_cap={self.config.rejection_cap} attempts"
        )

    def sample_marked_tree(self, nu: Sequence[Fraction], tail_tol: float = 1e-2):
        """One marked tree whose offspring law is the truncated table ``nu``.

        ``nu`` lists offspring probabilities nu(0..K); the missing tail
        mass (which decays only polynomially in K for the first-hit
        laws) must be < ``tail_tol`` and is renormalized away.  The tail
        mass is recorded on the returned tree (``tail_mass``) so callers
        can account for the truncation bias.
        """
        from .oracle import MarkedTree

        total = sum(Fraction(x) if not isinstance(x, float) else Fraction(x) for x in nu)
        tail = 1 - Fraction(total)
        if tail < 0 or float(tail) >= tail_tol:
            raise ConfigurationError(
                f"nu table tail mass {float(tail):.3e} not in [0, {tail_tol:g})"
            )
        scale = float(total)
        cum, acc = [], 0.0
        for x in nu:
            acc += float(x) / scale
            cum.append(acc)
        cum[-1] = 1.0

        def draw_nu() -> int:
            u = self.rng.random()
            for k, c in enumerate(cum):
                if u < c:
                    return k
            return len(cum) - 1

        children: List[List[int]] = []
        sigma: List[int] = []
        iota: List[int] = []
        stack = [-1]  # parent indices; -1 = create root
        order: List[int] = []
        while stack:
            parent = stack.pop()
            v = len(children)
            if v >= self.config.vertex_cap:
                raise ResourceLimitError(
                    f"marked tree exceeded vertex_cap={self.config.vertex_cap}"
                )
            children.append([])
            sigma.append(self.rng.getrandbits(1))
            iota.append(self.rng.getrandbits(1))
            if parent >= 0:
                children[parent].append(v)
            order.append(v)
            if sigma[v]:
                d = draw_nu()
                stack.extend([v] * d)
        # children were appended in reverse plane order (LIFO); restore.
        for c in children:
            c.reverse()
        return MarkedTree(
            children=tuple(tuple(c) for c in children),
            sigma=tuple(sigma),
            iota=tuple(iota),
            tail_mass=float(tail),
        )

    def sample_quadrangulation(self):
        """One pointed rooted quadrangulation from the Boltzmann law.

        A tree from the {-1,0,+1}-increment geometric model conditioned
        on at least one edge, plus one orientation bit, pushed through
        the tree-to-map bijection.
        """
        from .maps import tree_to_map

        model = builtin_model("geom-pm01")
        saved = self.model, self._offspring_cum, self._vector_cum
        self.model, self._offspring_cum, self._vector_cum = model, None, {}
        try:
            for _ in range(self.config.rejection_cap):
                t = self._grow(0, self.config.vertex_cap)
                if t is not None and t.n_edges >= 1:
                    bit = self.rng.getrandbits(1)
                    return tree_to_map(t, bit)
            raise ResourceLimitError(
                f"no tree with >=1 edge in"
                f" rejection_cap={self.config.rejection_cap} attempts"
            )
        finally:
            self.model, self._offspring_cum, self._vector_cum = saved


def _preorder_tree(labels, parents, children) -> LabelledPlaneTree:
    """Renumber a structurally valid rooted tree into preorder storage."""
    n = len(labels)
    rank = [0] * n
    order = []
    stack = [0]
    while stack:
        v = stack.pop()
        rank[v] = len(order)
        order.append(v)
        stack.extend(reversed(children[v]))
    new_labels = [labels[v] for v in order]
    new_parents = [None if parents[v] is None else rank[parents[v]] for v in order]
    new_children = [tuple(rank[c] for c in children[v]) for v in order]
    return LabelledPlaneTree.unchecked(new_labels, new_parents, new_children)


# -- module-level one-shot wrappers ---------------------------------------


def sample_tree(
    model: TreeModel, config: Optional[SamplerConfig] = None, root_label: int = 0
) -> LabelledPlaneTree:
    return Sampler(model, config).sample_tree(root_label)


def sample_excursion(
    model: TreeModel, sign: int, config: Optional[SamplerConfig] = None
) -> Excursion:
    return Sampler(model, config).sample_excursion(sign)


def sample_conditioned(
    model: TreeModel, n_edges: int, config: Optional[SamplerConfig] = None
) -> LabelledPlaneTree:
    return Sampler(model, config).sample_conditioned(n_edges)


def sample_marked_tree(nu: Sequence[Fraction], config: Optional[SamplerConfig] = None):
    return Sampler(builtin_model("incomplete-binary"), config).sample_marked_tree(nu)


def sample_quadrangulation(config: Optional[SamplerConfig] = None):
    return Sampler(builtin_model("geom-pm01"), config).sample_quadrangulation()


# -- fast profile path (incomplete binary model) ---------------------------


def sample_incomplete_binary_profile(rng: random.Random, vertex_cap: int):
    """Per-level vertical edge counts of one incomplete-binary tree.

    Returns ``(x_plus, x_minus, check_plus, check_minus)`` as lists
    indexed by level m >= 1 (index 0 unused), or None if the tree would
    exceed ``vertex_cap`` vertices.  Equivalent to sampling the tree and
    reading its edge profile, but without building the tree: one 2-bit
    draw per vertex encodes (has left -1 child, has right +1 child),
    matching the model's offspring table (1/4, 1/2, 1/4) with symmetric
    single-child displacement.
    """
    xp = [0, 0]
    xm = [0, 0]
    cp = [0, 0]
    cm = [0, 0]
    stack = [0]
    grb = rng.getrandbits
    count = 1
    pop = stack.pop
    push = stack.append
    while stack:
        lab = pop()
        code = grb(2)
        if not code:
            continue
        count += code & 1
        count += code >> 1
        if count > vertex_cap:
            return None
        if code & 1:  # child labelled lab - 1
            c = lab - 1
            if lab >= 1:  # downward edge below level lab
                if lab >= len(xm):
                    xm.extend([0] * (lab + 1 - len(xm)))
                xm[lab] += 1
            else:  # upper label is lab (= -m+1), lower is c
                m = 1 - lab
                if m >= len(cm):
                    cm.extend([0] * (m + 1 - len(cm)))
                cm[m] += 1
            push(c)
        if code >> 1:  # child labelled lab + 1
            c = lab + 1
            if c >= 1:  # upward edge, upper label c
                if c >= len(xp):
                    xp.extend([0] * (c + 1 - len(xp)))
                xp[c] += 1
            else:  # upper label c = -m+1, lower lab = -m
                m = -lab
                if m >= len(cp):
                    cp.extend([0] * (m + 1 - len(cp)))
                cp[m] += 1
            push(c)
    return xp, xm, cp, cm
