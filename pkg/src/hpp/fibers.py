"""Fibers of the power-sum moment map and the good-set machinery built on them.

For a direction vector x in F^n, each point b in F^n is sent to

    w_i = sum_j b_j^i * x_j,   i = 1..n,

i.e. w = Phi(b) @ x where Phi(b) is the n x n matrix with entry (i, j) equal
to b_j^i.  S_w^x is the preimage of w and eta_w^x its cardinality.  The
fibers partition F^n, so counts over w always sum to d^n.  Everything the
measurement analysis needs, success probabilities, conditional outcome
distributions, block structures, reduces to these counts, so this module
computes them exactly (integer arithmetic throughout) by enumeration, with a
vectorized path for prime fields.

Two classifications of "good" (x, w) pairs are provided.  The first applies
whenever the characteristic exceeds n: x must have all coordinates nonzero
and the fiber must be nonempty with at most n! points (the product of the
degrees of the triangular eliminated system, which bounds any
zero-dimensional fiber).  The second is specific to n = 2: it requires
x1*x2*(x1+x2) != 0 and a nonempty fiber, with the cap 4 = 2*2.  For n = 2
the fiber over any such x can be read off two explicit quadratics, which is
what solve_n2_triangular does; brute-force enumeration stays available as
the oracle it is checked against.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import product
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import GuardExceededError, InvariantViolationError
from .gf import Felt, FieldCtx, quadratic_roots

# Largest d^n an enumeration call will attempt.
ENUMERATION_BUDGET = 10**8

# Largest d^n routed through the vectorized prime-field path.
_NUMPY_LIMIT = 1 << 22

Point = tuple[Felt, ...]


def apply_map(ctx: FieldCtx, x: Sequence[Felt], b: Sequence[Felt], rows: int | None = None):
    """w = Phi(b) @ x with rows power levels (defaults to len(x))."""
    if len(x) != len(b):
        raise ValueError(f"length mismatch: x has {len(x)}, b has {len(b)}")
    n = len(x) if rows is None else rows
    w = [0] * n
    for xj, bj in zip(x, b):
        ctx.check(xj)
        ctx.check(bj)
        pw = 1
        for i in range(n):
            pw = ctx.mul(pw, bj)
            w[i] = ctx.add(w[i], ctx.mul(xj, pw))
    return tuple(w)


@dataclass(eq=False)
class EtaTable:
    """All fiber sizes of one direction x; optionally the fibers themselves.

    counts maps w to eta_w^x > 0 (absent keys mean empty fiber).  When
    solutions are stored, each fiber is listed in lexicographic order of the
    integer-encoded b tuples, matching enumeration order.
    """

    ctx: FieldCtx
    x: Point
    counts: dict[Point, int]
    solutions: dict[Point, list[Point]] | None = None

    @property
    def d(self) -> int:
        return self.ctx.d

    @property
    def n(self) -> int:
        return len(self.x)

    def eta(self, w: Sequence[Felt]) -> int:
        return self.counts.get(tuple(w), 0)

    def check_partition(self) -> None:
        total = sum(self.counts.values())
        if total != self.d**self.n:
            raise InvariantViolationError(
                f"fiber sizes for x={self.x} sum to {total}, expected {self.d**self.n}"
            )


def _check_enum_budget(d: int, n: int) -> None:
    if d**n > ENUMERATION_BUDGET:
        raise GuardExceededError(
            f"enumeration over d^n = {d}^{n} exceeds the budget of {ENUMERATION_BUDGET}"
        )


def _prime_w_codes(ctx: FieldCtx, x: Point) -> np.ndarray:
    """Vectorized prime-field path: array over all b (lex order, raveled)
    holding the integer code of w = Phi(b) @ x.  Exact int64 arithmetic."""
    p = ctx.p
    n = len(x)
    idx = np.arange(p, dtype=np.int64)
    powers = np.empty((n, p), dtype=np.int64)
    powers[0] = idx
    for i in range(1, n):
        powers[i] = powers[i - 1] * idx % p
    comps = []
    for i in range(n):
        acc = np.zeros((), dtype=np.int64)
        for j in range(n):
            contrib = powers[i] * x[j] % p
            acc = (acc[..., None] + contrib) % p
        comps.append(acc)
    codes = np.zeros((), dtype=np.int64)
    for comp in comps:
        codes = codes * p + comp
    return codes.ravel()


def _decode_point(code: int, d: int, n: int) -> Point:
    out = []
    for _ in range(n):
        out.append(code % d)
        code //= d
    return tuple(reversed(out))


def eta_table(ctx: FieldCtx, x: Sequence[Felt], store_solutions: bool = False) -> EtaTable:
    """Exact fiber sizes for one x by full enumeration of F^n."""
    x = tuple(x)
    n = len(x)
    d = ctx.d
    for xi in x:
        ctx.check(xi)
    _check_enum_budget(d, n)

    if ctx.e == 1 and not store_solutions and d**n <= _NUMPY_LIMIT:
        codes = _prime_w_codes(ctx, x)
        hist = np.bincount(codes, minlength=d**n)
        nz = np.flatnonzero(hist)
        counts = {_decode_point(int(c), d, n): int(hist[c]) for c in nz}
        return EtaTable(ctx=ctx, x=x, counts=counts, solutions=None)

    counts: dict[Point, int] = {}
    solutions: dict[Point, list[Point]] | None = {} if store_solutions else None
    # Per-column contribution tables avoid redoing the power ladder inside
    # the d^n loop.
    cols = []
    for xj in x:
        col = []
        for b in range(d):
            pw = 1
            comp = []
            for _ in range(n):
                pw = ctx.mul(pw, b)
                comp.append(ctx.mul(xj, pw))
            col.append(tuple(comp))
        cols.append(col)
    add = ctx.add
    for b in product(range(d), repeat=n):
        w = [0] * n
        for j in range(n):
            comp = cols[j][b[j]]
            for i in range(n):
                w[i] = add(w[i], comp[i])
        w = tuple(w)
        counts[w] = counts.get(w, 0) + 1
        if solutions is not None:
            solutions.setdefault(w, []).append(b)
    return EtaTable(ctx=ctx, x=x, counts=counts, solutions=solutions)


def brute_fiber(ctx: FieldCtx, x: Sequence[Felt], w: Sequence[Felt]) -> list[Point]:
    """S_w^x by brute force, in lexicographic order; the oracle for the solver."""
    x = tuple(x)
    w = tuple(w)
    n = len(x)
    d = ctx.d
    if len(w) != n:
        raise ValueError(f"w has {len(w)} components, expected {n}")
    _check_enum_budget(d, n)
    if ctx.e == 1 and d**n <= _NUMPY_LIMIT:
        codes = _prime_w_codes(ctx, x)
        target = 0
        for wi in w:
            ctx.check(wi)
            target = target * d + wi
        hits = np.flatnonzero(codes == target)
        return [_decode_point(int(h), d, n) for h in hits]
    return [
        b for b in product(range(d), repeat=n) if apply_map(ctx, x, b) == w
    ]


def iter_eta_tables(
    ctx: FieldCtx, n: int, store_solutions: bool = False, jobs: int = 1
) -> Iterator[EtaTable]:
    """All x in F^n in lexicographic order; jobs > 1 parallelizes table builds."""
    _check_enum_budget(ctx.d, 2 * n)
    xs = product(range(ctx.d), repeat=n)
    if jobs <= 1:
        for x in xs:
            yield eta_table(ctx, x, store_solutions=store_solutions)
        return
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=jobs) as pool:
        yield from pool.map(
            lambda x: eta_table(ctx, x, store_solutions=store_solutions), xs, chunksize=16
        )


def eta_moments(ctx: FieldCtx, n: int, k: int | None = None) -> tuple[Fraction, Fraction]:
    """Exact first and second moments of eta over uniform (x, w).

    k is the number of oracle copies (columns of Phi); the default k = n is
    the regime everything else runs in, smaller k is a diagnostic.  The
    first moment is d^(k-n) exactly, which doubles as a self-check here.
    """
    if k is None:
        k = n
    if not 1 <= k <= n:
        raise ValueError(f"copy count k must be in 1..{n}, got {k}")
    d = ctx.d
    _check_enum_budget(d, k + n)
    total_eta = 0
    total_eta_sq = 0
    use_numpy = ctx.e == 1 and d**n <= _NUMPY_LIMIT
    for x in product(range(d), repeat=k):
        if use_numpy:
            codes = _prime_rect_w_codes(ctx, x, n)
            hist = np.bincount(codes, minlength=d**n)
            total_eta += int(hist.sum())
            total_eta_sq += int(np.dot(hist, hist))
        else:
            counts: dict[Point, int] = {}
            for b in product(range(d), repeat=k):
                w = apply_map(ctx, x, b, rows=n)
                counts[w] = counts.get(w, 0) + 1
            total_eta += sum(counts.values())
            total_eta_sq += sum(c * c for c in counts.values())
    pairs = d ** (k + n)
    first = Fraction(total_eta, pairs)
    second = Fraction(total_eta_sq, pairs)
    if first != Fraction(d ** k, d ** n):
        raise InvariantViolationError(
            f"first moment came out {first}, expected d^(k-n) = {Fraction(d**k, d**n)}"
        )
    return first, second


def _prime_rect_w_codes(ctx: FieldCtx, x: Point, rows: int) -> np.ndarray:
    """Like _prime_w_codes but with len(x) = k columns and `rows` power levels."""
    p = ctx.p
    k = len(x)
    idx = np.arange(p, dtype=np.int64)
    powers = np.empty((rows, p), dtype=np.int64)
    powers[0] = idx
    for i in range(1, rows):
        powers[i] = powers[i - 1] * idx % p
    comps = []
    for i in range(rows):
        acc = np.zeros((), dtype=np.int64)
        for j in range(k):
            contrib = powers[i] * x[j] % p
            acc = (acc[..., None] + contrib) % p
        comps.append(acc)
    codes = np.zeros((), dtype=np.int64)
    for comp in comps:
        codes = codes * p + comp
    return codes.ravel()


# -- the explicit n = 2 solver ------------------------------------------------


def n2_constraint(ctx: FieldCtx, x: Sequence[Felt]) -> Felt:
    """x1*x2*(x1+x2): nonzero exactly when the n = 2 elimination is sound."""
    if len(x) != 2:
        raise ValueError(f"constraint is defined for n = 2, got {len(x)} coordinates")
    x1, x2 = x
    return ctx.mul(ctx.mul(x1, x2), ctx.add(x1, x2))


def elimination_quadratic(
    ctx: FieldCtx, x: Sequence[Felt], w: Sequence[Felt], var: int
) -> tuple[Felt, Felt, Felt]:
    """Coefficients (a2, a1, a0) of the quadratic whose roots contain every
    feasible value of coordinate `var` (0 or 1) of a fiber point at n = 2.

    Eliminating the other coordinate from  b1*x1 + b2*x2 = w1,
    b1^2*x1 + b2^2*x2 = w2  gives, for b1,

        -(x1*x2 + x1^2) T^2 + 2*w1*x1 T + (w2*x2 - w1^2) = 0,

    and symmetrically for b2 with x1 and x2 exchanged.  The leading
    coefficient is -x1*(x1+x2), nonzero whenever n2_constraint(x) != 0.
    """
    if var not in (0, 1):
        raise ValueError("var selects coordinate 0 or 1")
    x1, x2 = (x[0], x[1]) if var == 0 else (x[1], x[0])
    w1, w2 = w
    two = 2 % ctx.p
    a2 = ctx.neg(ctx.mul(x1, ctx.add(x1, x2)))
    a1 = ctx.mul(two, ctx.mul(w1, x1))
    a0 = ctx.sub(ctx.mul(w2, x2), ctx.mul(w1, w1))
    return a2, a1, a0


SECOND_ANALYSIS_CAP = 4


def solve_n2_triangular(ctx: FieldCtx, x: Sequence[Felt], w: Sequence[Felt]) -> list[Point]:
    """S_w^x at n = 2 without enumeration: root-find two quadratics, filter.

    Requires x1*x2*(x1+x2) != 0 so both quadratics are honest (nonzero
    leading coefficient, at most two roots each).  Candidate coordinates are
    combined and checked against the defining equations, so at most
    4 = 2*2 solutions survive; the final filter makes the answer immune to
    any labeling convention in the eliminated quadratics.
    """
    x = tuple(x)
    w = tuple(w)
    if len(x) != 2 or len(w) != 2:
        raise ValueError("triangular solver is specific to n = 2")
    for v in (*x, *w):
        ctx.check(v)
    if n2_constraint(ctx, x) == 0:
        raise ValueError(
            f"x = {x} is outside the solvable set: x1*x2*(x1+x2) must be nonzero"
        )
    roots1 = quadratic_roots(ctx, *elimination_quadratic(ctx, x, w, 0))
    roots2 = quadratic_roots(ctx, *elimination_quadratic(ctx, x, w, 1))
    out = sorted(
        {
            (b1, b2)
            for b1 in roots1
            for b2 in roots2
            if apply_map(ctx, x, (b1, b2)) == w
        }
    )
    if len(out) > SECOND_ANALYSIS_CAP:
        raise InvariantViolationError(
            f"triangular solve found {len(out)} points at x={x}, w={w}; cap is "
            f"{SECOND_ANALYSIS_CAP}"
        )
    return out


# -- good-set classification ---------------------------------------------------


class Analysis(str, Enum):
    FIRST = "first"
    SECOND = "second"


def first_cap(n: int) -> int:
    """Fiber-size cap for the first analysis: product of the triangular
    degrees 1*2*...*n, which bounds any zero-dimensional fiber."""
    return math.factorial(n)


@dataclass(frozen=True)
class GoodSets:
    """Membership predicates for good directions x and good targets w.

    First analysis (characteristic > n): x in (F*)^n, 1 <= eta <= n!.
    Second analysis (n = 2 only): x1*x2*(x1+x2) != 0, eta >= 1, cap 4.
    The second-analysis cap is a theorem rather than part of the predicate,
    so violating it raises instead of classifying the pair as bad.
    """

    ctx: FieldCtx
    n: int
    analysis: Analysis
    cap: int

    def x_good(self, x: Sequence[Felt]) -> bool:
        if len(x) != self.n:
            raise ValueError(f"x has {len(x)} coordinates, expected {self.n}")
        if self.analysis is Analysis.FIRST:
            return all(xi != 0 for xi in x)
        return n2_constraint(self.ctx, x) != 0

    def w_good(self, x: Sequence[Felt], w: Sequence[Felt], eta: int) -> bool:
        if not self.x_good(x):
            return False
        if self.analysis is Analysis.FIRST:
            return 1 <= eta <= self.cap
        if eta > self.cap:
            raise InvariantViolationError(
                f"fiber size {eta} exceeds the cap {self.cap} on the classified-good "
                f"pair x={tuple(x)}, w={tuple(w)}"
            )
        return eta >= 1


def good_sets(ctx: FieldCtx, n: int, analysis: Analysis) -> GoodSets:
    if analysis is Analysis.FIRST:
        if ctx.p <= n:
            raise ValueError(
                f"first analysis needs characteristic > n; got p = {ctx.p}, n = {n}"
            )
        return GoodSets(ctx=ctx, n=n, analysis=analysis, cap=first_cap(n))
    if n != 2:
        raise ValueError(f"second analysis is specific to n = 2, got n = {n}")
    if ctx.d < 3:
        raise ValueError("second analysis needs at least 3 field elements")
    return GoodSets(ctx=ctx, n=n, analysis=analysis, cap=SECOND_ANALYSIS_CAP)


def pick_analysis(ctx: FieldCtx, n: int) -> Analysis:
    """Default rule: first analysis when the characteristic allows it."""
    if ctx.p > n:
        return Analysis.FIRST
    if n == 2:
        return Analysis.SECOND
    raise ValueError(
        f"no applicable analysis for p = {ctx.p}, n = {n} "
        "(first needs p > n, second needs n = 2)"
    )


def classify_first(
    ctx: FieldCtx, n: int, x: Sequence[Felt], w: Sequence[Felt], table: EtaTable
) -> bool:
    good = good_sets(ctx, n, Analysis.FIRST)
    if table.x != tuple(x):
        raise ValueError(f"table was computed for x = {table.x}, not {tuple(x)}")
    return good.w_good(x, w, table.eta(w))


def classify_second_n2(
    ctx: FieldCtx, x: Sequence[Felt], w: Sequence[Felt], table: EtaTable
) -> bool:
    good = good_sets(ctx, 2, Analysis.SECOND)
    if table.x != tuple(x):
        raise ValueError(f"table was computed for x = {table.x}, not {tuple(x)}")
    return good.w_good(x, w, table.eta(w))


@dataclass(frozen=True)
class GoodSetSummary:
    """Scan statistics of the good sets over all of F^n."""

    analysis: Analysis
    cap: int
    d: int
    n: int
    x_good_count: int
    w_good_min: int
    w_good_mean: float

    def as_dict(self) -> dict:
        return {
            "analysis": self.analysis.value,
            "D": self.cap,
            "x_good_count": self.x_good_count,
            "w_good_min": self.w_good_min,
            "w_good_mean": self.w_good_mean,
        }


def summarize_good_sets(tables: Iterable[EtaTable], good: GoodSets) -> GoodSetSummary:
    """|X_good| plus min and mean of |W_good^x| over classified-good x."""
    x_count = 0
    w_min: int | None = None
    w_total = 0
    d = good.ctx.d
    seen = 0
    for table in tables:
        seen += 1
        if not good.x_good(table.x):
            continue
        x_count += 1
        w_count = sum(
            1 for w, eta in table.counts.items() if good.w_good(table.x, w, eta)
        )
        w_total += w_count
        w_min = w_count if w_min is None else min(w_min, w_count)
    if seen != d**good.n:
        raise InvariantViolationError(
            f"good-set scan saw {seen} tables, expected all {d**good.n} directions"
        )
    return GoodSetSummary(
        analysis=good.analysis,
        cap=good.cap,
        d=d,
        n=good.n,
        x_good_count=x_count,
        w_good_min=0 if w_min is None else w_min,
        w_good_mean=(w_total / x_count) if x_count else 0.0,
    )


def write_eta_csv(
    tables: EtaTable | Iterable[EtaTable], path, include_solutions: bool = False
) -> None:
    """CSV export: columns x, w, eta (semicolon-joined digit codes), lex order in w.

    Only w with nonempty fibers get rows.  Accepts one table or a stream.
    """
    if isinstance(tables, EtaTable):
        tables = [tables]
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        header = ["x", "w", "eta"] + (["solutions"] if include_solutions else [])
        writer.writerow(header)
        for table in tables:
            x_label = ";".join(str(c) for c in table.x)
            for w in sorted(table.counts):
                row = [x_label, ";".join(str(c) for c in w), table.counts[w]]
                if include_solutions:
                    if table.solutions is None:
                        raise ValueError("table was built without solutions")
                    row.append(
                        "|".join(",".join(str(c) for c in b) for b in table.solutions[w])
                    )
                writer.writerow(row)
