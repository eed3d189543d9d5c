"""Arithmetic in GF(p^e) with trace, additive characters, and quadratic roots.

A field element is a single integer in [0, p^e).  Its base-p digits, least
significant first, are the coefficients of the element in the polynomial
basis {1, t, ..., t^(e-1)}.  Prime fields (e = 1) are plain modular
arithmetic; extension fields multiply coefficient vectors and reduce modulo
a fixed monic irreducible polynomial.  The modulus is chosen
deterministically (smallest integer encoding among monic irreducibles of
degree e), so two contexts built from the same (p, e) are interchangeable
and results are reproducible across runs and machines.

The absolute trace Tr(a) = a + a^p + ... + a^(p^(e-1)) lands in the prime
subfield, i.e. in [0, p).  The additive character

    chi(a) = exp(2*pi*i * Tr(a) / p)

turns field addition into phase multiplication and is the workhorse of all
the Fourier analysis downstream: sum_a chi(a*m) over the whole field is d
when m = 0 and exactly 0 otherwise.

Integers in [0, p) double as prime-subfield elements (their digit vector is
a constant polynomial), so small constants like 2 % p can be fed straight
into the arithmetic helpers.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .errors import GuardExceededError, InvariantViolationError

# Largest field the integer-encoded representation will agree to build.
MAX_FIELD_SIZE = 1 << 20

# Extension fields at or below this order get a cached multiplication table.
_MUL_TABLE_LIMIT = 512

Felt = int
CharValue = complex


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _int_digits(value: int, length: int, p: int) -> list[int]:
    out = []
    for _ in range(length):
        out.append(value % p)
        value //= p
    return out


def _poly_rem(num: Sequence[int], den: Sequence[int], p: int) -> list[int]:
    """Remainder of num mod den over GF(p); coefficients ascending, den monic."""
    num = list(num)
    dd = len(den) - 1
    for i in range(len(num) - 1, dd - 1, -1):
        c = num[i]
        if c:
            for j in range(dd + 1):
                num[i - dd + j] = (num[i - dd + j] - c * den[j]) % p
    return num[:dd]


def _is_irreducible(cand: Sequence[int], p: int) -> bool:
    # Trial division by every monic polynomial of degree 1..e//2.  Fields are
    # capped at 2^20 elements, so the divisor count p^(e/2) stays tiny.
    e = len(cand) - 1
    for deg in range(1, e // 2 + 1):
        for code in range(p**deg):
            div = _int_digits(code, deg, p) + [1]
            if not any(_poly_rem(cand, div, p)):
                return False
    return True


def _find_modulus(p: int, e: int) -> tuple[int, ...]:
    if e == 1:
        return (0, 1)
    for code in range(p**e):
        cand = _int_digits(code, e, p) + [1]
        if cand[0] == 0:
            continue  # zero constant term means a root at 0
        if _is_irreducible(cand, p):
            return tuple(cand)
    raise InvariantViolationError(f"no monic irreducible of degree {e} over GF({p})")


@dataclass(frozen=True)
class FieldCtx:
    """Immutable description of GF(p^e) plus all element-level arithmetic.

    Elements are bare ints; every method validates nothing beyond what it
    needs, so callers pushing untrusted input should run check() first.
    """

    p: int
    e: int
    modulus: tuple[int, ...]
    d: int

    def describe(self) -> str:
        if self.e == 1:
            return f"GF({self.p})"
        terms = []
        for i in range(self.e, -1, -1):
            c = self.modulus[i]
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            else:
                head = "" if c == 1 else str(c)
                terms.append(f"{head}t^{i}" if i > 1 else f"{head}t")
        return f"GF({self.p}^{self.e}) mod " + "+".join(terms)

    # -- representation ----------------------------------------------------

    def check(self, a: Felt) -> Felt:
        if not isinstance(a, int) or isinstance(a, bool) or not 0 <= a < self.d:
            raise ValueError(f"{a!r} is not an element of {self.describe()}")
        return a

    def digits(self, a: Felt) -> list[int]:
        return _int_digits(a, self.e, self.p)

    def from_digits(self, digits: Iterable[int]) -> Felt:
        acc = 0
        for i, c in enumerate(digits):
            acc += (c % self.p) * self.p**i
        return acc

    def elements(self) -> range:
        return range(self.d)

    # -- arithmetic --------------------------------------------------------

    def add(self, a: Felt, b: Felt) -> Felt:
        if self.e == 1:
            return (a + b) % self.p
        p = self.p
        out, scale = 0, 1
        for _ in range(self.e):
            out += ((a + b) % p) * scale
            a //= p
            b //= p
            scale *= p
        return out

    def neg(self, a: Felt) -> Felt:
        if self.e == 1:
            return (-a) % self.p
        p = self.p
        out, scale = 0, 1
        for _ in range(self.e):
            out += ((-a) % p) * scale
            a //= p
            scale *= p
        return out

    def sub(self, a: Felt, b: Felt) -> Felt:
        return self.add(a, self.neg(b))

    @cached_property
    def _mul_table(self) -> list[int] | None:
        if self.e == 1 or self.d > _MUL_TABLE_LIMIT:
            return None
        return [self._mul_poly(a, b) for a in range(self.d) for b in range(self.d)]

    def _mul_poly(self, a: Felt, b: Felt) -> Felt:
        p = self.p
        da, db = self.digits(a), self.digits(b)
        prod = [0] * (2 * self.e - 1)
        for i, ca in enumerate(da):
            if ca:
                for j, cb in enumerate(db):
                    prod[i + j] = (prod[i + j] + ca * cb) % p
        return self.from_digits(_poly_rem(prod, self.modulus, p))

    def mul(self, a: Felt, b: Felt) -> Felt:
        if self.e == 1:
            return (a * b) % self.p
        table = self._mul_table
        if table is not None:
            return table[a * self.d + b]
        return self._mul_poly(a, b)

    def pow(self, a: Felt, k: int) -> Felt:
        if k < 0:
            return self.pow(self.inv(a), -k)
        if self.e == 1:
            return pow(a, k, self.p)
        out, base = 1, a
        while k:
            if k & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            k >>= 1
        return out

    def inv(self, a: Felt) -> Felt:
        if a == 0:
            raise ZeroDivisionError(f"0 has no inverse in {self.describe()}")
        if self.e == 1:
            return pow(a, self.p - 2, self.p)
        return self.pow(a, self.d - 2)

    def div(self, a: Felt, b: Felt) -> Felt:
        return self.mul(a, self.inv(b))

    # -- characters ----------------------------------------------------------

    @cached_property
    def _unit_roots(self) -> tuple[complex, ...]:
        return tuple(cmath.exp(2j * cmath.pi * t / self.p) for t in range(self.p))

    @cached_property
    def _squaring_map_solver(self) -> list[tuple[int, int]]:
        # Row-reduced form of the GF(2)-linear map u -> u^2 + u, used to
        # invert it when solving Artin-Schreier equations in characteristic 2.
        # Columns are images of the basis 1, t, ..., t^(e-1) packed as bitmasks.
        cols = []
        for i in range(self.e):
            beta = 1 << i  # encodes t^i when p = 2
            img = self.add(self.mul(beta, beta), beta)
            cols.append(img)
        # Gaussian elimination over GF(2): track (pivot_bit, column_combo).
        pivots: list[tuple[int, int]] = []
        for j, col in enumerate(cols):
            combo = 1 << j
            for bit, cmb in pivots:
                if col >> bit & 1:
                    col ^= self._squaring_image(cmb)
                    combo ^= cmb
            if col:
                pivots.append((col.bit_length() - 1, combo))
        return pivots

    def _squaring_image(self, combo_mask: int) -> int:
        img = 0
        for i in range(self.e):
            if combo_mask >> i & 1:
                beta = 1 << i
                img = self.add(img, self.add(self.mul(beta, beta), beta))
        return img


def make_field(p: int, e: int = 1) -> FieldCtx:
    """Build GF(p^e) with the canonical modulus; errors on bad or oversized input."""
    if not _is_prime(p):
        raise ValueError(f"p must be prime, got {p}")
    if e < 1:
        raise ValueError(f"extension degree must be >= 1, got {e}")
    d = p**e
    if d > MAX_FIELD_SIZE:
        raise GuardExceededError(
            f"field size {p}^{e} = {d} exceeds the cap of {MAX_FIELD_SIZE}"
        )
    return FieldCtx(p=p, e=e, modulus=_find_modulus(p, e), d=d)


def parse_field(descriptor: str) -> FieldCtx:
    """Parse 'p' or 'p^e' (e.g. '7^1', '2^2') into a field context."""
    text = descriptor.strip()
    if "^" in text:
        p_str, e_str = text.split("^", 1)
    else:
        p_str, e_str = text, "1"
    try:
        p, e = int(p_str), int(e_str)
    except ValueError:
        raise ValueError(f"malformed field descriptor {descriptor!r}, want 'p^e'") from None
    return make_field(p, e)


def field_descriptor(ctx: FieldCtx) -> str:
    return str(ctx.p) if ctx.e == 1 else f"{ctx.p}^{ctx.e}"


def trace(ctx: FieldCtx, a: Felt) -> Felt:
    """Absolute trace a + a^p + ... + a^(p^(e-1)); always lands in [0, p)."""
    ctx.check(a)
    acc = a
    frob = a
    for _ in range(ctx.e - 1):
        frob = ctx.pow(frob, ctx.p)
        acc = ctx.add(acc, frob)
    if acc >= ctx.p:
        raise InvariantViolationError(
            f"trace({a}) = {acc} escaped the prime subfield of {ctx.describe()}"
        )
    return acc


def chi(ctx: FieldCtx, a: Felt) -> CharValue:
    """Additive character exp(2*pi*i*Tr(a)/p); chi(0) is exactly 1."""
    return ctx._unit_roots[trace(ctx, a)]


def dot(ctx: FieldCtx, v: Sequence[Felt], w: Sequence[Felt]) -> Felt:
    """Bilinear form sum_i v_i * w_i used in character phases."""
    if len(v) != len(w):
        raise ValueError(f"length mismatch in dot: {len(v)} vs {len(w)}")
    acc = 0
    for vi, wi in zip(v, w):
        acc = ctx.add(acc, ctx.mul(vi, wi))
    return acc


# -- square roots and quadratics ---------------------------------------------


def _tonelli_shanks(ctx: FieldCtx, a: Felt) -> Felt:
    """One square root of a known residue in a field of odd order."""
    q1 = ctx.d - 1
    s = 0
    t = q1
    while t % 2 == 0:
        t //= 2
        s += 1
    minus_one = ctx.neg(1)
    z = next(
        c for c in range(2, ctx.d) if ctx.pow(c, q1 // 2) == minus_one
    )  # deterministic scan keeps results reproducible
    m = s
    c = ctx.pow(z, t)
    u = ctx.pow(a, t)
    r = ctx.pow(a, (t + 1) // 2)
    while u != 1:
        i = 0
        probe = u
        while probe != 1:
            probe = ctx.mul(probe, probe)
            i += 1
        b = c
        for _ in range(m - i - 1):
            b = ctx.mul(b, b)
        m = i
        c = ctx.mul(b, b)
        u = ctx.mul(u, c)
        r = ctx.mul(r, b)
    return r


def sqrt_elem(ctx: FieldCtx, a: Felt) -> list[Felt]:
    """All square roots of a, sorted; empty when a is a non-residue."""
    ctx.check(a)
    if a == 0:
        return [0]
    if ctx.p == 2:
        # Squaring is the Frobenius, a bijection: the unique root is a^(d/2).
        return [ctx.pow(a, ctx.d // 2)]
    if ctx.pow(a, (ctx.d - 1) // 2) != 1:
        return []
    r = _tonelli_shanks(ctx, a)
    return sorted({r, ctx.neg(r)})


def _artin_schreier_root(ctx: FieldCtx, delta: Felt) -> Felt:
    """Some u with u^2 + u = delta in characteristic 2; requires Tr(delta) = 0."""
    u = 0
    residual = delta
    for bit, combo in ctx._squaring_map_solver:
        if residual >> bit & 1:
            residual ^= ctx._squaring_image(combo)
            u ^= combo
    if ctx.add(ctx.mul(u, u), u) != delta:
        raise InvariantViolationError("Artin-Schreier solve failed on a trace-zero input")
    return u


def quadratic_roots(ctx: FieldCtx, a2: Felt, a1: Felt, a0: Felt) -> list[Felt]:
    """Distinct roots in F of a2*T^2 + a1*T + a0, sorted.

    Handles the degenerate linear case a2 = 0 as long as a1 != 0.  Odd
    characteristic goes through the discriminant and a Tonelli-Shanks square
    root; characteristic 2 substitutes T = (a1/a2)*U to reach U^2 + U = delta,
    which has solutions exactly when Tr(delta) = 0.
    """
    for c in (a2, a1, a0):
        ctx.check(c)
    if a2 == 0:
        if a1 == 0:
            raise ValueError("degenerate equation: both leading coefficients are zero")
        return [ctx.mul(ctx.neg(a0), ctx.inv(a1))]
    if ctx.p != 2:
        four = 4 % ctx.p
        disc = ctx.sub(ctx.mul(a1, a1), ctx.mul(four, ctx.mul(a2, a0)))
        droots = sqrt_elem(ctx, disc)
        if not droots:
            return []
        inv_2a = ctx.inv(ctx.mul(2 % ctx.p, a2))
        return sorted({ctx.mul(ctx.add(ctx.neg(a1), r), inv_2a) for r in droots})
    if a1 == 0:
        return [ctx.pow(ctx.mul(a0, ctx.inv(a2)), ctx.d // 2)]
    delta = ctx.mul(ctx.mul(a0, a2), ctx.inv(ctx.mul(a1, a1)))
    if trace(ctx, delta) != 0:
        return []
    u = _artin_schreier_root(ctx, delta)
    scale = ctx.div(a1, a2)
    return sorted({ctx.mul(scale, u), ctx.mul(scale, ctx.add(u, 1))})
