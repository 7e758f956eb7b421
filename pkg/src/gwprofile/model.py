"""Tree models: offspring laws, displacement families, and exact weights.

A :class:`TreeModel` pairs an offspring distribution ξ (critical or
subcritical) with a per-arity displacement family η: for every arity d,
η^(d) is a probability measure on {-1,0,1}^d giving the label increments of
the d children in plane order.  The weight of a labelled plane tree is

    Π(t) = ∏_{v ∈ t} ξ(arity(v)) · η^(arity(v))(increments(v)),

with the convention η^(0)(()) = 1 for leaves.  The weight of a label
excursion drops the factors of its label-0 leaves.

All probabilities are exact :class:`fractions.Fraction` values.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Tuple

from .errors import ConfigurationError, DomainError
from .tree import LabelledPlaneTree

BUILTIN_IDS = ("geom-pm1", "geom-pm01", "incomplete-binary", "complete-binary")

_HALF = Fraction(1, 2)


def parse_rational(value) -> Fraction:
    """Parse an exact rational from int, or a "num/den" / "int" string."""
    if isinstance(value, bool):
        raise ConfigurationError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigurationError(f"not a rational: {value!r}") from exc
    raise ConfigurationError(
        f"rationals must be integers or 'num/den' strings, got {value!r}"
    )


def format_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class OffspringDistribution:
    """Offspring law ξ on {0, 1, 2, ...}.

    ``kind`` is one of:

    - ``finite-table``: ``table[k]`` = ξ(k), exact, finite support;
    - ``geometric-half``: ξ(k) = 2^(-k-1);
    - ``geometric``: ξ(k) = p(1-p)^k with parameter ``p``.
    """

    kind: str
    table: Tuple[Fraction, ...] = ()
    p: Optional[Fraction] = None

    def __post_init__(self):
        if self.kind == "finite-table":
            if not self.table:
                raise ConfigurationError("finite-table offspring needs a table")
            if any(x < 0 for x in self.table):
                raise ConfigurationError("offspring probabilities must be >= 0")
            if sum(self.table) != 1:
                raise ConfigurationError("offspring probabilities must sum to 1")
            if self.mean() > 1:
                raise ConfigurationError(
                    "offspring mean exceeds 1 (supercritical models not supported)"
                )
        elif self.kind in ("geometric-half", "geometric"):
            p = _HALF if self.kind == "geometric-half" else self.p
            if p is None or not (0 < p <= 1):
                raise ConfigurationError("geometric offspring needs p in (0, 1]")
            if p < _HALF:
                raise ConfigurationError(
                    "geometric offspring with p < 1/2 is supercritical"
                )
            object.__setattr__(self, "p", p)
        else:
            raise ConfigurationError(f"unknown offspring kind {self.kind!r}")

    def prob(self, k: int) -> Fraction:
        if k < 0:
            return Fraction(0)
        if self.kind == "finite-table":
            return self.table[k] if k < len(self.table) else Fraction(0)
        return self.p * (1 - self.p) ** k

    def mean(self) -> Fraction:
        if self.kind == "finite-table":
            return sum((k * x for k, x in enumerate(self.table)), Fraction(0))
        return (1 - self.p) / self.p

    def variance(self) -> Fraction:
        if self.kind == "finite-table":
            m = self.mean()
            return sum(
                (x * (Fraction(k) - m) ** 2 for k, x in enumerate(self.table)),
                Fraction(0),
            )
        q = 1 - self.p
        return q / self.p**2

    @property
    def max_arity(self) -> Optional[int]:
        """Largest arity with positive probability, or None if unbounded."""
        if self.kind == "finite-table":
            return max(k for k, x in enumerate(self.table) if x > 0)
        return None

    def arities_up_to(self, budget: int) -> Iterator[int]:
        """Arities with positive probability, bounded by ``budget``."""
        hi = budget if self.max_arity is None else min(budget, self.max_arity)
        for k in range(hi + 1):
            if self.prob(k) > 0:
                yield k


@dataclass(frozen=True)
class DisplacementFamily:
    """Per-arity displacement family η.

    ``kind`` is one of:

    - ``iid-uniform-pm1``: each child's increment uniform on {-1, 1},
      independent;
    - ``iid-uniform-pm01``: each child's increment uniform on {-1, 0, 1},
      independent;
    - ``per-arity-table``: explicit finite tables
      ``tables[d] = ((vector, prob), ...)``.
    """

    kind: str
    tables: Mapping[int, Tuple[Tuple[Tuple[int, ...], Fraction], ...]] = None

    def __post_init__(self):
        if self.kind in ("iid-uniform-pm1", "iid-uniform-pm01"):
            object.__setattr__(self, "tables", None)
            return
        if self.kind != "per-arity-table":
            raise ConfigurationError(f"unknown displacement kind {self.kind!r}")
        if not self.tables:
            raise ConfigurationError("per-arity-table displacement needs tables")
        frozen = {}
        for d, entries in self.tables.items():
            if d < 1:
                raise ConfigurationError("displacement tables start at arity 1")
            entries = tuple((tuple(v), Fraction(w)) for v, w in entries)
            total = Fraction(0)
            seen = set()
            for v, w in entries:
                if len(v) != d or any(e not in (-1, 0, 1) for e in v):
                    raise ConfigurationError(
                        f"bad displacement vector {v!r} for arity {d}"
                    )
                if v in seen:
                    raise ConfigurationError(f"duplicate displacement vector {v!r}")
                if w < 0:
                    raise ConfigurationError("displacement weights must be >= 0")
                seen.add(v)
                total += w
            if total != 1:
                raise ConfigurationError(
                    f"displacement weights for arity {d} must sum to 1"
                )
            frozen[d] = entries
        object.__setattr__(self, "tables", frozen)

    def prob(self, d: int, v: Sequence[int]) -> Fraction:
        v = tuple(v)
        if len(v) != d:
            raise DomainError(f"vector {v!r} does not have length {d}")
        if any(e not in (-1, 0, 1) for e in v):
            raise DomainError(f"vector entries must lie in {{-1, 0, 1}}: {v!r}")
        if d == 0:
            return Fraction(1)
        if self.kind == "iid-uniform-pm1":
            return Fraction(1, 2**d) if 0 not in v else Fraction(0)
        if self.kind == "iid-uniform-pm01":
            return Fraction(1, 3**d)
        for u, w in self.tables.get(d, ()):
            if u == v:
                return w
        return Fraction(0)

    def per_child_support(self) -> Optional[Tuple[Tuple[int, Fraction], ...]]:
        """(increment, prob) pairs per child for iid kinds, else None."""
        if self.kind == "iid-uniform-pm1":
            return ((-1, _HALF), (1, _HALF))
        if self.kind == "iid-uniform-pm01":
            third = Fraction(1, 3)
            return ((-1, third), (0, third), (1, third))
        return None

    def vectors(self, d: int) -> Iterator[Tuple[Tuple[int, ...], Fraction]]:
        """All increment vectors with positive probability for arity d."""
        if d == 0:
            yield (), Fraction(1)
            return
        per_child = self.per_child_support()
        if per_child is not None:
            for combo in itertools.product(per_child, repeat=d):
                yield tuple(c[0] for c in combo), _prod(c[1] for c in combo)
        else:
            for v, w in self.tables.get(d, ()):
                if w > 0:
                    yield v, w

    def supported_arities_bounded(self) -> Optional[int]:
        """Largest arity with any positive vector for table kind, else None."""
        if self.kind == "per-arity-table":
            return max(self.tables)
        return None


def _prod(xs: Iterable[Fraction]) -> Fraction:
    out = Fraction(1)
    for x in xs:
        out *= x
    return out


@dataclass(frozen=True)
class TreeModel:
    """A labelled Galton-Watson tree model (ξ, η)."""

    name: str
    offspring: OffspringDistribution
    displacement: DisplacementFamily
    symmetric_displacements: bool
    increments_pm1_only: bool

    def __post_init__(self):
        self._check_flags()

    def _check_flags(self) -> None:
        disp = self.displacement
        if disp.kind == "iid-uniform-pm1":
            sym, pm1 = True, True
        elif disp.kind == "iid-uniform-pm01":
            sym, pm1 = True, False
        else:
            arities = [
                d
                for d in disp.tables
                if self.offspring.prob(d) > 0
            ]
            sym = all(
                disp.prob(d, tuple(-e for e in v)) == w
                for d in arities
                for v, w in disp.vectors(d)
            )
            pm1 = all(
                0 not in v for d in arities for v, w in disp.vectors(d)
            )
        if sym != self.symmetric_displacements or pm1 != self.increments_pm1_only:
            raise ConfigurationError(
                "model flags inconsistent with displacement family"
            )
        # Every arity with positive offspring probability must have a
        # displacement law (iid kinds cover all arities).
        if disp.kind == "per-arity-table":
            hi = self.offspring.max_arity
            if hi is None:
                raise ConfigurationError(
                    "per-arity-table displacement requires finite-table offspring"
                )
            for d in range(1, hi + 1):
                if self.offspring.prob(d) > 0:
                    total = sum((w for _, w in disp.vectors(d)), Fraction(0))
                    if total != 1:
                        raise ConfigurationError(
                            f"no displacement law for supported arity {d}"
                        )

    @property
    def key(self) -> tuple:
        """Hashable identity used for caching derived tables."""
        off = self.offspring
        disp = self.displacement
        off_key = (off.kind, off.table, off.p)
        if disp.kind == "per-arity-table":
            disp_key = (disp.kind, tuple(sorted(disp.tables.items())))
        else:
            disp_key = (disp.kind,)
        return (off_key, disp_key)


def offspring_prob(model: TreeModel, k: int) -> Fraction:
    return model.offspring.prob(k)


def displacement_prob(model: TreeModel, d: int, v: Sequence[int]) -> Fraction:
    return model.displacement.prob(d, v)


def builtin_model(model_id: str) -> TreeModel:
    """The four built-in critical models."""
    if model_id == "geom-pm1":
        return TreeModel(
            name=model_id,
            offspring=OffspringDistribution("geometric-half"),
            displacement=DisplacementFamily("iid-uniform-pm1"),
            symmetric_displacements=True,
            increments_pm1_only=True,
        )
    if model_id == "geom-pm01":
        return TreeModel(
            name=model_id,
            offspring=OffspringDistribution("geometric-half"),
            displacement=DisplacementFamily("iid-uniform-pm01"),
            symmetric_displacements=True,
            increments_pm1_only=False,
        )
    if model_id == "incomplete-binary":
        quarter = Fraction(1, 4)
        return TreeModel(
            name=model_id,
            offspring=OffspringDistribution(
                "finite-table", (quarter, _HALF, quarter)
            ),
            displacement=DisplacementFamily(
                "per-arity-table",
                {
                    1: (((-1,), _HALF), ((1,), _HALF)),
                    2: (((-1, 1), Fraction(1)),),
                },
            ),
            symmetric_displacements=False,
            increments_pm1_only=True,
        )
    if model_id == "complete-binary":
        return TreeModel(
            name=model_id,
            offspring=OffspringDistribution(
                "finite-table", (_HALF, Fraction(0), _HALF)
            ),
            displacement=DisplacementFamily(
                "per-arity-table", {2: (((-1, 1), Fraction(1)),)}
            ),
            symmetric_displacements=False,
            increments_pm1_only=True,
        )
    raise ConfigurationError(
        f"unknown builtin model {model_id!r}; expected one of {BUILTIN_IDS}"
    )


def resolve_model(spec: str) -> TreeModel:
    """Resolve ``builtin:<id>`` or ``file:<path>`` model references."""
    if spec.startswith("builtin:"):
        return builtin_model(spec[len("builtin:"):])
    if spec.startswith("file:"):
        return load_model(spec[len("file:"):])
    if spec in BUILTIN_IDS:
        return builtin_model(spec)
    raise ConfigurationError(
        f"model reference {spec!r} must be 'builtin:<id>' or 'file:<path>'"
    )


# -- weights ---------------------------------------------------------------


def tree_weight(model: TreeModel, t: LabelledPlaneTree) -> Fraction:
    """Exact weight Π(t): product of ξ·η factors over every vertex."""
    w = Fraction(1)
    for v in t.vertices():
        d = t.arity(v)
        w *= model.offspring.prob(d)
        if w == 0:
            return w
        if d:
            w *= model.displacement.prob(d, t.increments(v))
            if w == 0:
                return w
    return w


def is_excursion(t: LabelledPlaneTree) -> int:
    """Validate excursion invariants; return the sign (+1/-1).

    An excursion has root labelled +1 or -1, all labels of one (weak) sign,
    and every label-0 vertex a leaf.
    """
    sign = t.root_label
    if sign not in (1, -1):
        raise DomainError("excursion root must be labelled +1 or -1")
    for v in t.vertices():
        lv = t.labels[v]
        if lv * sign < 0:
            raise DomainError("excursion labels must all have the root's sign")
        if lv == 0 and t.children[v]:
            raise DomainError("label-0 vertices of an excursion must be leaves")
    return sign


def excursion_weight(model: TreeModel, tau) -> Fraction:
    """Exact excursion weight: Π(τ) omitting the label-0 leaf factors.

    ``tau`` is a :class:`LabelledPlaneTree` satisfying the excursion
    invariants, or any object with a ``tree`` attribute holding one.
    """
    t = getattr(tau, "tree", tau)
    is_excursion(t)
    w = Fraction(1)
    for v in t.vertices():
        if t.labels[v] == 0:
            continue
        d = t.arity(v)
        w *= model.offspring.prob(d)
        if w == 0:
            return w
        if d:
            w *= model.displacement.prob(d, t.increments(v))
            if w == 0:
                return w
    return w


# -- config files -----------------------------------------------------------


def parse_model_config(config: Mapping, name: str = "custom") -> TreeModel:
    """Build a TreeModel from a parsed JSON config (finite tables only)."""
    if not isinstance(config, Mapping):
        raise ConfigurationError("model config must be a JSON object")
    try:
        off_cfg = config["offspring"]
        disp_cfg = config["displacement"]
    except KeyError as exc:
        raise ConfigurationError(f"model config missing field {exc}") from exc

    off_kind = off_cfg.get("kind")
    if off_kind == "finite-table":
        offspring = OffspringDistribution(
            "finite-table",
            tuple(parse_rational(x) for x in off_cfg.get("table", ())),
        )
    elif off_kind in ("geometric-half", "geometric"):
        raise ConfigurationError(
            "geometric offspring laws are builtin-only; custom models use "
            "finite tables"
        )
    else:
        raise ConfigurationError(f"unknown offspring kind {off_kind!r}")

    disp_kind = disp_cfg.get("kind")
    if disp_kind in ("iid-uniform-pm1", "iid-uniform-pm01"):
        displacement = DisplacementFamily(disp_kind)
    elif disp_kind == "per-arity-table":
        tables = {}
        for key, entries in disp_cfg.get("tables", {}).items():
            d = int(key)
            tables[d] = tuple(
                (tuple(int(e) for e in v), parse_rational(w)) for v, w in entries
            )
        displacement = DisplacementFamily("per-arity-table", tables)
    else:
        raise ConfigurationError(f"unknown displacement kind {disp_kind!r}")

    sym, pm1 = _infer_flags(offspring, displacement)
    return TreeModel(
        name=str(config.get("name", name)),
        offspring=offspring,
        displacement=displacement,
        symmetric_displacements=sym,
        increments_pm1_only=pm1,
    )


def _infer_flags(offspring, displacement) -> Tuple[bool, bool]:
    if displacement.kind == "iid-uniform-pm1":
        return True, True
    if displacement.kind == "iid-uniform-pm01":
        return True, False
    arities = [
        d for d in displacement.tables if offspring.prob(d) > 0
    ]
    sym = all(
        displacement.prob(d, tuple(-e for e in v)) == w
        for d in arities
        for v, w in displacement.vectors(d)
    )
    pm1 = all(0 not in v for d in arities for v, _ in displacement.vectors(d))
    return sym, pm1


def load_model(path: str) -> TreeModel:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            config = json.load(fh)
    except OSError as exc:
        raise ConfigurationError(f"cannot read model config {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"invalid JSON in {path!r}: {exc}") from exc
    return parse_model_config(config, name=path)


def model_to_config(model: TreeModel) -> dict:
    """Serialize a model to the JSON config structure."""
    off = model.offspring
    if off.kind == "finite-table":
        off_cfg = {
            "kind": "finite-table",
            "table": [format_rational(x) for x in off.table],
        }
    else:
        off_cfg = {"kind": off.kind}
        if off.kind == "geometric":
            off_cfg["p"] = format_rational(off.p)
    disp = model.displacement
    if disp.kind == "per-arity-table":
        disp_cfg = {
            "kind": disp.kind,
            "tables": {
                str(d): [[list(v), format_rational(w)] for v, w in entries]
                for d, entries in sorted(disp.tables.items())
            },
        }
    else:
        disp_cfg = {"kind": disp.kind}
    return {"name": model.name, "offspring": off_cfg, "displacement": disp_cfg}
