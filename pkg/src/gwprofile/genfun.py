"""Generating functions of excursion leaf counts.

For a tree model, let ν be the law of the number of label-0 leaves of a
positive label excursion, and g_ν its probability generating function.
g_ν satisfies a reduced functional equation obtained by summing the model's
excursion recursion over arities; for each built-in model that equation
forces g_ν onto an explicit quadratic algebraic curve F(x, y) = 0 with a
closed-form solution by radicals.

This module computes g_ν exactly, by two genuinely independent routes:

- :func:`closed_form_series` expands the radical closed form with exact
  series square roots and divisions;
- :func:`solve_nu_gf` expands the algebraic curve by series Newton
  iteration, after verifying the curve at runtime, by exact polynomial
  reduction, against the model's functional equation (substituting the
  equation's expression for the composed term G(G(z)) into F must yield 0
  modulo F), together with criticality F(1,1) = 0 and simplicity of the
  series branch at the known constant term.

A floating-point fixed-point iterator :func:`iterate_nu_gf` is provided
for approximate work (including custom finite-table models): note that the
fixed point of the *truncated* composition map differs from the true
series by a bias that vanishes only as the order grows, so it is not exact
at any finite order.

Also here: the convolution tables f_p(q) (p-fold convolutions of ν), the
joint leaf/edge tables f̃_p(q, l), and high-precision evaluation of the
singular expansion of g_ν near 1.
"""

from __future__ import annotations

import functools
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import mpmath

from .errors import ConfigurationError, DomainError, IntegrityError, ResourceLimitError
from .model import TreeModel, builtin_model
from .series import BivariateSeries, RationalSeries

# ---------------------------------------------------------------------------
# Per-model algebraic data.
#
# Closed forms: g(z) = (num(z) + coef * sqrt((a - z)(1 - z)^3)) / den(z),
# polynomials given by ascending coefficient lists.
#
# Curves: F(x, y) = (P(x) y + Q(x))^2 - S(x) with Q = -num, P = den,
# S = coef^2 (a - x)(1 - x)^3, so that F(z, g(z)) = 0.
#
# Functional equations, reduced over arities (G = g_ν, x the variable):
#   geom-pm1:          G = 2 / (4 - x - G∘G)
#   geom-pm01:         G = 3 / (6 - x - G - G∘G)
#   incomplete-binary: G = (1 + x)(1 + G∘G) / 4
#   complete-binary:   G = (1 + x·G∘G) / 2
# Each is solved for the composed term: G∘G = R(x, G) with R = Rnum/Rden
# below (Rnum, Rden polynomials in x and y).  The runtime verification in
# :func:`_verified_curve` proves, by exact reduction, that the curve is
# invariant under (x, y) -> (y, R(x, y)), which is the algebraic content
# of the functional equation.
# ---------------------------------------------------------------------------

_MODEL_DATA = {
    "geom-pm1": {
        "num": (-4, 9, -2),
        "coef": Fraction(2),
        "a": 4,
        "den": (0, 4, -1),
        "c0": Fraction(5, 8),
        # R(x, y) = (4y - xy - 2) / y
        "r_num": {(0, 1): 4, (1, 1): -1, (0, 0): -2},
        "r_den": {(0, 1): 1},
    },
    "geom-pm01": {
        "num": (-3, 6, -1),
        "coef": Fraction(1),
        "a": 9,
        "den": (0, 2),
        "c0": Fraction(2, 3),
        # R(x, y) = (6y - xy - y^2 - 3) / y
        "r_num": {(0, 1): 6, (1, 1): -1, (0, 2): -1, (0, 0): -3},
        "r_den": {(0, 1): 1},
    },
    "incomplete-binary": {
        "num": (-3, 16, -1),
        "coef": Fraction(1),
        "a": 49,
        "den": (10, 2),
        "c0": Fraction(2, 5),
        # R(x, y) = (4y - 1 - x) / (1 + x)
        "r_num": {(0, 1): 4, (0, 0): -1, (1, 0): -1},
        "r_den": {(0, 0): 1, (1, 0): 1},
    },
    "complete-binary": {
        "num": (-3, 10, -1),
        "coef": Fraction(1),
        "a": 25,
        "den": (4, 2),
        "c0": Fraction(1, 2),
        # R(x, y) = (2y - 1) / x
        "r_num": {(0, 1): 2, (0, 0): -1},
        "r_den": {(1, 0): 1},
    },
}


def _require_builtin(model: TreeModel) -> dict:
    data = _MODEL_DATA.get(model.name)
    if data is None or builtin_model(model.name).key != model.key:
        raise ConfigurationError(
            "exact generating functions are available for the four built-in "
            f"models only, not {model.name!r}; use iterate_nu_gf for "
            "approximate values on custom models"
        )
    return data


# -- polynomial helpers (ascending integer/rational coefficient lists) ------


def _polymul(a: Sequence, b: Sequence) -> list:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += Fraction(x) * y
    return out


def _polysub(a: Sequence, b: Sequence) -> list:
    n = max(len(a), len(b))
    return [
        (Fraction(a[i]) if i < len(a) else Fraction(0))
        - (Fraction(b[i]) if i < len(b) else Fraction(0))
        for i in range(n)
    ]


def _polyneg(a: Sequence) -> list:
    return [-Fraction(x) for x in a]


def _polyeval(a: Sequence, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(list(a)):
        acc = acc * x + c
    return acc


def _curve_polys(data: dict) -> Tuple[list, list, list]:
    """Coefficient polynomials (A0, A1, A2) of F = A2 y^2 + A1 y + A0."""
    p = [Fraction(c) for c in data["den"]]
    q = _polyneg(data["num"])
    coef2 = data["coef"] ** 2
    a = Fraction(data["a"])
    s = _polymul([a, -1], _polymul([1, -1], _polymul([1, -1], [1, -1])))
    s = [coef2 * c for c in s]
    a2 = _polymul(p, p)
    a1 = [2 * c for c in _polymul(p, q)]
    a0 = _polysub(_polymul(q, q), s)
    return a0, a1, a2


@functools.lru_cache(maxsize=None)
def _verified_curve(name: str) -> Tuple[tuple, tuple, tuple, Fraction]:
    """Return the x-stripped curve of a builtin, after runtime verification.

    Checks, all in exact arithmetic via sympy polynomial reduction:

    1. invariance: F(y, R(x, y)) ≡ 0 modulo F(x, y) over Q(x)[y], where
       G∘G = R(x, G) is the model's reduced functional equation solved for
       the composed term — i.e. the curve is consistent with the equation;
    2. criticality: F(1, 1) = 0 (g_ν(1) = 1);
    3. branch: after stripping the common power of x, the constant term c0
       is a simple root of F̃(0, y), so the curve has a unique power-series
       branch with that constant term.

    Returns the stripped coefficient polynomials (B0, B1, B2) and c0.
    """
    import sympy as sp

    data = _MODEL_DATA[name]
    a0, a1, a2 = _curve_polys(data)

    x, y = sp.symbols("x y")

    def poly_expr(coeffs, var):
        return sp.Add(*(sp.Rational(c) * var**i for i, c in enumerate(coeffs)))

    F = poly_expr(a2, x) * y**2 + poly_expr(a1, x) * y + poly_expr(a0, x)
    r_num = sp.Add(
        *(sp.Rational(c) * x**i * y**j for (i, j), c in data["r_num"].items())
    )
    r_den = sp.Add(
        *(sp.Rational(c) * x**i * y**j for (i, j), c in data["r_den"].items())
    )

    # (1) invariance under (x, y) -> (y, G∘G).
    substituted = F.subs({x: y, y: r_num / r_den}, simultaneous=True)
    numerator, _ = sp.fraction(sp.together(substituted * r_den**2))
    field = sp.QQ.frac_field(x)
    _, remainder = sp.div(
        sp.Poly(sp.expand(numerator), y, domain=field),
        sp.Poly(sp.expand(F), y, domain=field),
    )
    if not remainder.is_zero:
        raise IntegrityError(
            f"curve for {name!r} is not invariant under its functional equation"
        )

    # (2) criticality.
    if _polyeval(a2, Fraction(1)) + _polyeval(a1, Fraction(1)) + _polyeval(
        a0, Fraction(1)
    ) != 0:
        raise IntegrityError(f"curve for {name!r} fails F(1,1) = 0")

    # (3) strip the common power of x and check the branch point.
    polys = [list(a0), list(a1), list(a2)]
    while all(p[0] == 0 for p in polys if any(c != 0 for c in p)):
        polys = [p[1:] if any(c != 0 for c in p) else p for p in polys]
    b0, b1, b2 = polys
    c0 = data["c0"]
    value = b2[0] * c0**2 + b1[0] * c0 + b0[0]
    slope = 2 * b2[0] * c0 + b1[0]
    if value != 0 or slope == 0:
        raise IntegrityError(
            f"curve for {name!r}: {c0} is not a simple root at x = 0"
        )
    return tuple(b0), tuple(b1), tuple(b2), c0


# -- the two exact routes ----------------------------------------------------

# Working-order slack: closed-form and Newton routes divide by polynomials
# vanishing at 0 (valuation <= 2 across the four models), which costs top
# coefficients; computing with extra order keeps the requested range exact.
_SLACK = 4


def closed_form_series(model: TreeModel, order: int) -> RationalSeries:
    """g_ν to the given order via the radical closed form (exact)."""
    data = _require_builtin(model)
    if order < 0:
        raise DomainError("order must be >= 0")
    w = order + _SLACK
    num = RationalSeries.from_polynomial(data["num"], w)
    den = RationalSeries.from_polynomial(data["den"], w)
    a = Fraction(data["a"])
    radicand = RationalSeries.from_polynomial([a, -1], w)
    one_minus = RationalSeries.from_polynomial([1, -1], w)
    radicand = radicand * one_minus * one_minus * one_minus
    g = (num + data["coef"] * radicand.sqrt()) / den
    return g.truncate(order)


def solve_nu_gf(model: TreeModel, order: int) -> RationalSeries:
    """g_ν to the given order via the runtime-verified algebraic curve.

    Series Newton iteration on the x-stripped curve F̃(x, y) = 0 starting
    from the constant branch point; the result is certified by checking
    F̃(x, g) ≡ 0 to the working order before returning.
    """
    data = _require_builtin(model)
    if order < 0:
        raise DomainError("order must be >= 0")
    b0, b1, b2, c0 = _verified_curve(model.name)
    w = order + _SLACK
    p0 = RationalSeries.from_polynomial(b0, w)
    p1 = RationalSeries.from_polynomial(b1, w)
    p2 = RationalSeries.from_polynomial(b2, w)
    g = RationalSeries.constant(c0, w)
    for _ in range(w.bit_length() + 3):
        f_val = (p2 * g + p1) * g + p0
        f_slope = 2 * p2 * g + p1
        step = f_val / f_slope
        new_g = g - step
        if new_g == g:
            break
        g = new_g
    else:
        raise IntegrityError("Newton iteration on the curve did not stabilize")
    residual = (p2 * g + p1) * g + p0
    if any(c != 0 for c in residual.coeffs):
        raise IntegrityError("curve branch residual is nonzero")
    return g.truncate(order)


def nu_table(model: TreeModel, order: int) -> Tuple[Fraction, ...]:
    """ν(0..order) as exact rationals (coefficients of g_ν)."""
    return solve_nu_gf(model, order).coeffs


# -- approximate fixed-point route ------------------------------------------


def _float_compose(outer: List[float], inner: List[float], n: int) -> List[float]:
    """Horner evaluation of outer at inner, truncated to order n."""
    result = [0.0] * (n + 1)
    result[0] = outer[-1]
    for c in reversed(outer[:-1]):
        # result = result * inner + c
        out = [0.0] * (n + 1)
        for i, ri in enumerate(result):
            if ri:
                for j in range(n + 1 - i):
                    if inner[j]:
                        out[i + j] += ri * inner[j]
        out[0] += c
        result = out
    return result


def iterate_nu_gf(
    model: TreeModel,
    order: int,
    tol: float = 1e-13,
    max_iter: int = 10000,
) -> List[float]:
    """Float fixed-point iteration for g_ν on the truncated composition map.

    Works for any model with finite-table offspring and for the geometric
    built-ins.  The returned coefficients carry a truncation bias of the
    map itself (the truncated composition's fixed point is not the
    truncated true series); the bias vanishes as ``order`` grows.
    """
    if order < 1:
        raise DomainError("order must be >= 1")
    n = order
    off = model.offspring
    disp = model.displacement
    per_child = disp.per_child_support()
    z_poly = [0.0, 1.0] + [0.0] * (n - 1)

    def step(g: List[float]) -> List[float]:
        gg = _float_compose(g, g, n)
        atoms = {-1: z_poly, 0: g, 1: gg}
        if per_child is not None:
            child = [0.0] * (n + 1)
            for inc, w in per_child:
                fw = float(w)
                for k in range(n + 1):
                    child[k] += fw * atoms[inc][k]
            if off.kind == "finite-table":
                out = _float_polysum_finite(off, child, n)
            else:
                # geometric-half: sum_d 2^{-d-1} child^d = 1 / (2 - child)
                out = _float_div_one(
                    [2.0 - child[0]] + [-c for c in child[1:]], n
                )
        else:
            out = [float(off.prob(0))] + [0.0] * n
            hi = off.max_arity or 0
            for d in range(1, hi + 1):
                xi = float(off.prob(d))
                if xi == 0.0:
                    continue
                for vec, wv in disp.vectors(d):
                    prod = [1.0] + [0.0] * n
                    for inc in vec:
                        prod = _float_mul(prod, atoms[inc], n)
                    fw = xi * float(wv)
                    for k in range(n + 1):
                        out[k] += fw * prod[k]
        return out

    g = [0.0] * (n + 1)
    for _ in range(max_iter):
        new_g = step(g)
        if max(abs(a - b) for a, b in zip(g, new_g)) < tol:
            return new_g
        g = new_g
    raise ResourceLimitError(
        f"fixed-point iteration did not converge within {max_iter} steps"
    )


def _float_mul(a: List[float], b: List[float], n: int) -> List[float]:
    out = [0.0] * (n + 1)
    for i, ai in enumerate(a):
        if ai:
            for j in range(n + 1 - i):
                if b[j]:
                    out[i + j] += ai * b[j]
    return out


def _float_div_one(den: List[float], n: int) -> List[float]:
    out = [0.0] * (n + 1)
    out[0] = 1.0 / den[0]
    for k in range(1, n + 1):
        acc = 0.0
        for j in range(1, k + 1):
            if j < len(den) and den[j]:
                acc -= den[j] * out[k - j]
        out[k] = acc / den[0]
    return out


def _float_polysum_finite(off, child: List[float], n: int) -> List[float]:
    hi = off.max_arity or 0
    out = [float(off.prob(hi))] + [0.0] * n
    for d in range(hi - 1, -1, -1):
        out = _float_mul(out, child, n)
        out[0] += float(off.prob(d))
    return out


# -- convolution tables ------------------------------------------------------


def f_table(nu: Sequence, p_max: int, q_max: int) -> List[List]:
    """f_p(q) for p <= p_max, q <= q_max: p-fold convolutions of ν.

    Exact when ``nu`` holds Fractions; works identically on floats.
    ``nu`` must reach index q_max.
    """
    if len(nu) <= q_max:
        raise DomainError(
            f"nu table reaches index {len(nu) - 1} < q_max = {q_max}"
        )
    zero = nu[0] * 0
    one = zero + 1
    rows = [[one] + [zero] * q_max]
    for _ in range(p_max):
        prev = rows[-1]
        row = []
        for q in range(q_max + 1):
            acc = zero
            for j in range(q + 1):
                if prev[j] != zero:
                    acc += prev[j] * nu[q - j]
            row.append(acc)
        rows.append(row)
    return rows


# -- joint leaf/edge tables --------------------------------------------------


def _excursion_joint_gf(model: TreeModel, l_max: int) -> List[Dict[int, Fraction]]:
    """Joint law of (label-0 leaves, edges) of one positive excursion.

    Returns ``table[l][q]`` = Π⁺-mass of excursions with l edges and q
    label-0 leaves, by dynamic programming over subtrees rooted at positive
    labels (finite because every child consumes one edge).
    """
    off = model.offspring
    disp = model.displacement
    per_child = disp.per_child_support()

    # subtree[(j, l)] = dict q -> mass of subtrees rooted at label j >= 1
    # with l edges, labels >= 0 and label-0 vertices leaves.
    subtree_memo: Dict[Tuple[int, int], Dict[int, Fraction]] = {}

    def subtree(j: int, budget: int) -> Dict[int, Fraction]:
        if j == 0:
            return {1: Fraction(1)} if budget == 0 else {}
        key = (j, budget)
        hit = subtree_memo.get(key)
        if hit is not None:
            return hit
        out: Dict[int, Fraction] = {}
        for d in off.arities_up_to(budget):
            xi = off.prob(d)
            if xi == 0:
                continue
            if d == 0:
                if budget == 0:
                    out[0] = out.get(0, Fraction(0)) + xi
                continue
            if per_child is not None:
                for q, w in forest_gf(j, d, budget - d).items():
                    out[q] = out.get(q, Fraction(0)) + xi * w
            else:
                for vec, wv in disp.vectors(d):
                    if any(j + inc < 0 for inc in vec):
                        continue
                    for q, w in vector_forest(j, vec, budget - d).items():
                        out[q] = out.get(q, Fraction(0)) + xi * wv * w
        subtree_memo[key] = out
        return out

    # forest_gf(j, d, b): d iid children of a label-j vertex, total subtree
    # edges b (excluding the d connecting edges), as dict q -> mass; only
    # used for iid displacement kinds.  The result here is summed over the
    # edge split, so key is q only; we need (q per total budget), hence the
    # memo below is keyed by exact budget.
    child_memo: Dict[Tuple[int, int], Dict[int, Fraction]] = {}

    def child_gf(j: int, budget: int) -> Dict[int, Fraction]:
        key = (j, budget)
        hit = child_memo.get(key)
        if hit is not None:
            return hit
        out: Dict[int, Fraction] = {}
        for inc, w in per_child:
            if j + inc < 0:
                continue
            for q, mass in subtree(j + inc, budget).items():
                out[q] = out.get(q, Fraction(0)) + w * mass
        child_memo[key] = out
        return out

    forest_memo: Dict[Tuple[int, int, int], Dict[int, Fraction]] = {}

    def forest_gf(j: int, d: int, budget: int) -> Dict[int, Fraction]:
        if d == 0:
            return {0: Fraction(1)} if budget == 0 else {}
        key = (j, d, budget)
        hit = forest_memo.get(key)
        if hit is not None:
            return hit
        out: Dict[int, Fraction] = {}
        for b1 in range(budget + 1):
            first = child_gf(j, b1)
            if not first:
                continue
            rest = forest_gf(j, d - 1, budget - b1)
            for q1, w1 in first.items():
                for q2, w2 in rest.items():
                    q = q1 + q2
                    out[q] = out.get(q, Fraction(0)) + w1 * w2
        forest_memo[key] = out
        return out

    vec_memo: Dict[Tuple[int, tuple, int], Dict[int, Fraction]] = {}

    def vector_forest(j: int, vec: tuple, budget: int) -> Dict[int, Fraction]:
        if not vec:
            return {0: Fraction(1)} if budget == 0 else {}
        key = (j, vec, budget)
        hit = vec_memo.get(key)
        if hit is not None:
            return hit
        out: Dict[int, Fraction] = {}
        for b1 in range(budget + 1):
            first = subtree(j + vec[0], b1)
            if not first:
                continue
            rest = vector_forest(j, vec[1:], budget - b1)
            for q1, w1 in first.items():
                for q2, w2 in rest.items():
                    q = q1 + q2
                    out[q] = out.get(q, Fraction(0)) + w1 * w2
        vec_memo[key] = out
        return out

    return [dict(subtree(1, l)) for l in range(l_max + 1)]


def joint_table(
    model: TreeModel,
    p_max: int,
    q_max: int,
    l_max: int,
    cross_check: bool = True,
) -> List[List[List[Fraction]]]:
    """f̃_p(q, l) = P(total label-0 leaves = q, total edges = l) over p
    independent positive excursions; exact rationals.

    Returns ``table[p][q][l]``.  For the incomplete-binary model (and
    unless disabled) the single-excursion table is cross-checked against an
    independent bivariate fixed-point solution of
    B(z, u) = ¼(1 + z u)(1 + u B(B(z, u), u)).
    """
    if p_max < 0 or q_max < 0 or l_max < 0:
        raise DomainError("table bounds must be >= 0")
    if (q_max + 1) * (l_max + 1) * (p_max + 1) > 4_000_000:
        raise ResourceLimitError("joint table exceeds the memory budget")
    single = _excursion_joint_gf(model, l_max)

    zero = Fraction(0)
    base = [[zero] * (l_max + 1) for _ in range(q_max + 1)]
    for l, row in enumerate(single):
        for q, w in row.items():
            if q <= q_max:
                base[q][l] = w

    if cross_check and model.name == "incomplete-binary":
        check = bivariate_fixed_point(q_max, l_max)
        for q in range(q_max + 1):
            for l in range(l_max + 1):
                if check[q, l] != base[q][l]:
                    raise IntegrityError(
                        "joint table disagrees with the bivariate fixed "
                        f"point at (q={q}, l={l})"
                    )

    delta = [[zero] * (l_max + 1) for _ in range(q_max + 1)]
    delta[0][0] = Fraction(1)
    tables = [delta]
    for _ in range(p_max):
        prev = tables[-1]
        nxt = [[zero] * (l_max + 1) for _ in range(q_max + 1)]
        for q1 in range(q_max + 1):
            for l1 in range(l_max + 1):
                w1 = prev[q1][l1]
                if w1 == 0:
                    continue
                for q2 in range(q_max + 1 - q1):
                    row = base[q2]
                    for l2 in range(l_max + 1 - l1):
                        if row[l2] != 0:
                            nxt[q1 + q2][l1 + l2] += w1 * row[l2]
        tables.append(nxt)
    return tables


def bivariate_fixed_point(z_order: int, u_order: int) -> BivariateSeries:
    """Solve B(z,u) = ¼(1 + z u)(1 + u B(B(z,u), u)) exactly.

    B is the joint generating function of (label-0 leaves, edges) of one
    positive incomplete-binary excursion.  Because the coefficient of z^k
    in B has u-valuation >= k, the truncated iteration stabilizes exactly
    after at most u_order + 2 steps (checked).
    """
    nz = max(z_order, u_order)
    nu = u_order
    quarter = Fraction(1, 4)
    zu = BivariateSeries.zero(nz, nu)
    rows = [list(r) for r in zu.coeffs]
    if nz >= 1 and nu >= 1:
        rows[1][1] = Fraction(1)
    zu = BivariateSeries(rows)

    b = BivariateSeries.zero(nz, nu)
    for _ in range(nu + 3):
        composed = b.compose_z(b)
        new_b = (quarter * (zu + 1)) * (composed.shift_u(1) + 1)
        if new_b == b:
            return BivariateSeries([row[: u_order + 1] for row in b.coeffs[: z_order + 1]])
        b = new_b
    raise IntegrityError("bivariate fixed point failed to stabilize")


# -- singular expansion ------------------------------------------------------


def _closed_form_mp(model: TreeModel, z):
    data = _require_builtin(model)
    num = mpmath.polyval([mpmath.mpf(str(c)) for c in reversed(data["num"])], z)
    den = mpmath.polyval([mpmath.mpf(str(c)) for c in reversed(data["den"])], z)
    coef = mpmath.mpf(data["coef"].numerator) / data["coef"].denominator
    rad = (data["a"] - z) * (1 - z) ** 3
    return (num + coef * mpmath.sqrt(rad)) / den


def measured_singular_coefficient(model: TreeModel, z_eval: Fraction) -> float:
    """(g(z) - 1 + (1-z)) / (1-z)^{3/2} at a rational z near 1.

    Available for all four built-ins; reported as a measurement without
    asserting a closed form for the limit.
    """
    z_eval = Fraction(z_eval)
    if not (0 < z_eval < 1):
        raise DomainError("z_eval must lie in (0, 1)")
    with mpmath.workdps(60):
        z = mpmath.mpf(z_eval.numerator) / z_eval.denominator
        g = _closed_form_mp(model, z)
        value = (g - 1 + (1 - z)) / (1 - z) ** mpmath.mpf("1.5")
        return float(value)


def singular_coefficient(model: TreeModel, z_eval: Fraction) -> float:
    """Singular-term coefficient estimate for the iid-displacement models.

    Restricted to geom-pm1 / geom-pm01, where the per-edge displacement
    variance is unambiguous and the limit is sqrt(2/3) * σ_ξ / σ_η.
    """
    if model.name not in ("geom-pm1", "geom-pm01"):
        raise ConfigurationError(
            "singular_coefficient supports geom-pm1 and geom-pm01 only; "
            "use measured_singular_coefficient for other built-ins"
        )
    z_eval = Fraction(z_eval)
    if not (Fraction(99, 100) < z_eval < 1):
        raise DomainError("z_eval must lie in (0.99, 1)")
    return measured_singular_coefficient(model, z_eval)


def linear_coefficient(model: TreeModel, z_eval: Fraction) -> float:
    """(g(z) - 1) / (1 - z) at a rational z near 1; tends to -1."""
    z_eval = Fraction(z_eval)
    if not (0 < z_eval < 1):
        raise DomainError("z_eval must lie in (0, 1)")
    with mpmath.workdps(60):
        z = mpmath.mpf(z_eval.numerator) / z_eval.denominator
        g = _closed_form_mp(model, z)
        return float((g - 1) / (1 - z))
