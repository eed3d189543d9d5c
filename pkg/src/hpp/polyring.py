"""Polynomials over a finite field: univariate and sparse multivariate forms.

Univariate polynomials are dense coefficient tuples indexed by exponent with
trailing zeros trimmed.  Multivariate polynomials are sparse maps from
exponent vectors to nonzero coefficients, kept in graded-lexicographic order
so that serialization and iteration are deterministic.  Evaluation,
Lagrange interpolation, and variable substitution are all exact field
arithmetic; nothing here ever touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Mapping, Sequence

from .gf import Felt, FieldCtx


def _graded_lex_key(alpha: tuple[int, ...]) -> tuple:
    return (sum(alpha), alpha)


def monomials(arity: int, max_total_degree: int, include_constant: bool = False):
    """All exponent vectors with total degree <= bound, in graded-lex order."""
    out = []
    for alpha in product(range(max_total_degree + 1), repeat=arity):
        total = sum(alpha)
        if total > max_total_degree:
            continue
        if total == 0 and not include_constant:
            continue
        out.append(alpha)
    out.sort(key=_graded_lex_key)
    return out


@dataclass(frozen=True)
class UniPoly:
    """Dense univariate polynomial; coeffs[i] multiplies X^i."""

    ctx: FieldCtx
    coeffs: tuple[Felt, ...]

    def __post_init__(self):
        trimmed = list(self.coeffs)
        for c in trimmed:
            self.ctx.check(c)
        while trimmed and trimmed[-1] == 0:
            trimmed.pop()
        object.__setattr__(self, "coeffs", tuple(trimmed))

    @property
    def degree(self) -> int:
        """Degree of the zero polynomial is -1 by convention."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, i: int) -> Felt:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def constant_term(self) -> Felt:
        return self.coeff(0)


def eval_uni(q: UniPoly, r: Felt) -> Felt:
    """Horner evaluation of q at r."""
    ctx = q.ctx
    ctx.check(r)
    acc = 0
    for c in reversed(q.coeffs):
        acc = ctx.add(ctx.mul(acc, r), c)
    return acc


def lagrange_interpolate(
    ctx: FieldCtx, points: Sequence[tuple[Felt, Felt]], degree_bound: int
) -> UniPoly:
    """Unique interpolant through the given points, checked against a degree bound.

    The bound is an explicit argument because callers always know it a
    priori; an interpolant that comes out with higher degree means the
    supplied values were inconsistent, and that is reported rather than
    silently returned.
    """
    if degree_bound < 0:
        raise ValueError(f"degree bound must be >= 0, got {degree_bound}")
    if len(points) < degree_bound + 1:
        raise ValueError(
            f"need at least {degree_bound + 1} points for degree bound {degree_bound}, "
            f"got {len(points)}"
        )
    ts = [t for t, _ in points]
    if len(set(ts)) != len(ts):
        raise ValueError("interpolation abscissae must be pairwise distinct")
    for t, y in points:
        ctx.check(t)
        ctx.check(y)

    n_pts = len(points)
    coeffs = [0] * n_pts
    for i, (ti, yi) in enumerate(points):
        # Numerator polynomial prod_{j != i} (X - t_j), built incrementally.
        basis = [1]
        denom = 1
        for j, (tj, _) in enumerate(points):
            if j == i:
                continue
            neg_tj = ctx.neg(tj)
            nxt = [0] * (len(basis) + 1)
            for k, c in enumerate(basis):
                nxt[k] = ctx.add(nxt[k], ctx.mul(c, neg_tj))
                nxt[k + 1] = ctx.add(nxt[k + 1], c)
            basis = nxt
            denom = ctx.mul(denom, ctx.sub(ti, tj))
        scale = ctx.mul(yi, ctx.inv(denom))
        for k, c in enumerate(basis):
            coeffs[k] = ctx.add(coeffs[k], ctx.mul(scale, c))

    result = UniPoly(ctx, tuple(coeffs))
    if result.degree > degree_bound:
        raise ValueError(
            f"interpolant has degree {result.degree}, exceeding the stated bound "
            f"{degree_bound}; input values are inconsistent"
        )
    return result


@dataclass(frozen=True)
class MultiPoly:
    """Sparse multivariate polynomial over a fixed field.

    terms maps exponent vectors (length == arity) to nonzero coefficients and
    is stored as a graded-lex-sorted tuple of pairs so instances hash and
    compare by mathematical content.  degree_bound records the promised
    maximum total degree; it documents intent and is validated, but two
    polynomials with identical terms compare equal regardless of their bounds.
    """

    ctx: FieldCtx
    arity: int
    terms: tuple[tuple[tuple[int, ...], Felt], ...]
    degree_bound: int = field(compare=False, default=-1)

    def __post_init__(self):
        if self.arity < 1:
            raise ValueError(f"arity must be >= 1, got {self.arity}")
        cleaned = {}
        for alpha, c in self.terms:
            alpha = tuple(alpha)
            if len(alpha) != self.arity:
                raise ValueError(f"exponent vector {alpha} does not match arity {self.arity}")
            if any(a < 0 for a in alpha):
                raise ValueError(f"negative exponent in {alpha}")
            self.ctx.check(c)
            if c != 0:
                if alpha in cleaned:
                    raise ValueError(f"duplicate exponent vector {alpha}")
                cleaned[alpha] = c
        bound = self.degree_bound
        actual = max((sum(a) for a in cleaned), default=0)
        if bound < 0:
            bound = actual
        elif actual > bound:
            raise ValueError(f"term of total degree {actual} exceeds the bound {bound}")
        object.__setattr__(
            self,
            "terms",
            tuple(sorted(cleaned.items(), key=lambda kv: _graded_lex_key(kv[0]))),
        )
        object.__setattr__(self, "degree_bound", bound)

    @property
    def total_degree(self) -> int:
        return max((sum(a) for a, _ in self.terms), default=-1)

    def coeff(self, alpha: Sequence[int]) -> Felt:
        key = tuple(alpha)
        for a, c in self.terms:
            if a == key:
                return c
        return 0

    def as_dict(self) -> dict[tuple[int, ...], Felt]:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def constant_term(self) -> Felt:
        return self.coeff((0,) * self.arity)


def multi_poly(
    ctx: FieldCtx,
    arity: int,
    terms: Mapping[Sequence[int], Felt] | Iterable[tuple[Sequence[int], Felt]],
    degree_bound: int = -1,
) -> MultiPoly:
    items = terms.items() if isinstance(terms, Mapping) else terms
    return MultiPoly(
        ctx, arity, tuple((tuple(a), c) for a, c in items), degree_bound=degree_bound
    )


def eval_multi(q: MultiPoly, point: Sequence[Felt]) -> Felt:
    """Evaluate at a point of matching arity."""
    ctx = q.ctx
    if len(point) != q.arity:
        raise ValueError(f"point has {len(point)} coordinates, polynomial has {q.arity}")
    for v in point:
        ctx.check(v)
    acc = 0
    for alpha, c in q.terms:
        term = c
        for v, a in zip(point, alpha):
            if a:
                term = ctx.mul(term, ctx.pow(v, a))
        acc = ctx.add(acc, term)
    return acc


def substitute(q: MultiPoly, assignment: Mapping[int, Felt]) -> MultiPoly:
    """Fix some variables (0-based positions) to field values.

    Returns a polynomial over the remaining variables in their original
    order.  Substituting every variable leaves an arity-1 constant in the
    sole surviving slot convention; callers wanting a scalar should use
    eval_multi instead.
    """
    ctx = q.ctx
    for pos, val in assignment.items():
        if not 0 <= pos < q.arity:
            raise ValueError(f"position {pos} out of range for arity {q.arity}")
        ctx.check(val)
    keep = [i for i in range(q.arity) if i not in assignment]
    if not keep:
        raise ValueError("substitution must leave at least one free variable")
    acc: dict[tuple[int, ...], Felt] = {}
    for alpha, c in q.terms:
        term = c
        for pos, val in assignment.items():
            a = alpha[pos]
            if a:
                term = ctx.mul(term, ctx.pow(val, a))
        if term == 0:
            continue
        new_alpha = tuple(alpha[i] for i in keep)
        acc[new_alpha] = ctx.add(acc.get(new_alpha, 0), term)
    acc = {a: c for a, c in acc.items() if c != 0}
    return multi_poly(ctx, len(keep), acc, degree_bound=q.degree_bound)


def slice_multi(q: MultiPoly, t: Felt) -> MultiPoly:
    """Substitute the last variable with t; arity drops by one."""
    if q.arity < 2:
        raise ValueError("slice needs arity >= 2; use eval_uni for univariate forms")
    return substitute(q, {q.arity - 1: t})


def from_unipoly(q: UniPoly, degree_bound: int = -1) -> MultiPoly:
    terms = {(i,): c for i, c in enumerate(q.coeffs) if c != 0}
    return multi_poly(q.ctx, 1, terms, degree_bound=degree_bound)


def to_unipoly(q: MultiPoly) -> UniPoly:
    if q.arity != 1:
        raise ValueError(f"cannot flatten arity-{q.arity} polynomial to univariate form")
    size = q.total_degree + 1 if q.terms else 0
    coeffs = [0] * size
    for (a,), c in q.terms:
        coeffs[a] = c
    return UniPoly(q.ctx, tuple(coeffs))


def format_unipoly(q: UniPoly) -> str:
    if q.is_zero():
        return "0"
    parts = [f"{c}*X^{i}" for i, c in enumerate(q.coeffs) if c != 0]
    return "+".join(parts)


def format_multipoly(q: MultiPoly) -> str:
    if q.is_zero():
        return "0"
    parts = []
    for alpha, c in q.terms:
        factors = [str(c)]
        factors += [f"X{i + 1}^{a}" for i, a in enumerate(alpha) if a != 0]
        parts.append("*".join(factors) if len(factors) > 1 or sum(alpha) == 0 else str(c))
    return "+".join(parts)
