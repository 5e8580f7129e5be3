"""Exact integer lattice arithmetic for the diagonal expansion matrix A = diag(3*q1, 3*q2).

Everything here is pure, exact and hashable: signed-digit radix expansions,
A-adic digit expansions, the residue digit sets used by the spectrum
constructions, and a symbolic vector type that keeps kick terms ``A^e * v``
unexpanded so that astronomically large coordinates stay cheap to compare.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

Vec = tuple[int, int]

ZERO: Vec = (0, 0)

# Symbolic terms with exponents beyond this are refused by materialize();
# everything the desk-scale suites produce stays far below it.
MATERIALIZE_EXPONENT_LIMIT = 2_000_000


class LatticeError(ValueError):
    """Invalid digit, parameter or symbolic-form input."""


@dataclass(frozen=True)
class MatrixParams:
    """The pair (q1, q2) defining A = diag(3*q1, 3*q2) and all derived digit sets."""

    q1: int
    q2: int

    def __post_init__(self):
        if not (isinstance(self.q1, int) and isinstance(self.q2, int)):
            raise LatticeError("q1, q2 must be integers")
        if not (1 <= self.q1 <= self.q2):
            raise LatticeError(f"require 1 <= q1 <= q2, got ({self.q1}, {self.q2})")

    @property
    def base_x(self) -> int:
        return 3 * self.q1

    @property
    def base_y(self) -> int:
        return 3 * self.q2

    @property
    def primary_digit(self) -> Vec:
        """The generator digit (q1, -q2) of the three-element spectrum digit set."""
        return (self.q1, -self.q2)

    def mul(self, v: Vec) -> Vec:
        return (self.base_x * v[0], self.base_y * v[1])

    def divides(self, v: Vec) -> bool:
        return v[0] % self.base_x == 0 and v[1] % self.base_y == 0

    def div(self, v: Vec) -> Vec:
        if not self.divides(v):
            raise LatticeError(f"A does not divide {v}")
        return (v[0] // self.base_x, v[1] // self.base_y)


def centered_mod(x: int, b: int) -> int:
    """Representative of x mod b in [-floor(b/2), b - 1 - floor(b/2)]."""
    h = b // 2
    return (x + h) % b - h


def signed_expansion(k: int, b: int) -> list[int]:
    """Signed-digit expansion of k in base b, little-endian, no trailing zeros.

    Digits lie in [-floor(b/2), b - 1 - floor(b/2)]; the expansion over that
    digit alphabet is unique, and sum(d * b**i) reconstructs k exactly.
    The empty list represents 0.
    """
    if b < 2:
        raise LatticeError("base must be >= 2")
    digits: list[int] = []
    h = b // 2
    while k:
        d = (k + h) % b - h
        digits.append(d)
        k = (k - d) // b
    return digits


def signed_value(digits, b: int) -> int:
    """Inverse of signed_expansion: sum of digits[i] * b**i."""
    acc = 0
    for d in reversed(list(digits)):
        acc = acc * b + d
    return acc


def a_adic_expansion(w: Vec, p: MatrixParams) -> list[Vec]:
    """Digit expansion w = sum A^i * c_i with every c_i in the residue box Gamma.

    Equals the componentwise signed expansions in bases 3*q1 and 3*q2,
    zero-padded to a common length.  Little-endian, no trailing zero digit.
    """
    xs = signed_expansion(w[0], p.base_x)
    ys = signed_expansion(w[1], p.base_y)
    length = max(len(xs), len(ys))
    xs += [0] * (length - len(xs))
    ys += [0] * (length - len(ys))
    return list(zip(xs, ys))


def in_gamma(v: Vec, p: MatrixParams) -> bool:
    bx, by = p.base_x, p.base_y
    return -(bx // 2) <= v[0] < bx - bx // 2 and -(by // 2) <= v[1] < by - by // 2


def reconstruct(digits, p: MatrixParams) -> Vec:
    """Evaluate a little-endian Gamma-digit sequence back to the lattice vector.

    Rejects any digit outside Gamma, reporting the offending index.
    """
    seq = list(digits)
    for i, d in enumerate(seq):
        if not in_gamma(d, p):
            raise LatticeError(f"digit {d} at index {i} lies outside Gamma")
    x = y = 0
    for dx, dy in reversed(seq):
        x = x * p.base_x + dx
        y = y * p.base_y + dy
    return (x, y)


def mod_a_reduce(v: Vec, p: MatrixParams) -> Vec:
    """Canonical representative of v mod A*Z^2 inside the residue box Gamma."""
    return (centered_mod(v[0], p.base_x), centered_mod(v[1], p.base_y))


@dataclass(frozen=True)
class DigitSetCatalog:
    """The residue system Gamma and its standard decompositions.

    gamma   -- full residue box, |gamma| = 9*q1*q2
    c_set   -- {(0,0), (q1,-q2), (-q1,q2)}, the three-element coset generator
    e_q1    -- coset leaders with first coordinate in [-q1/2, q1/2)
    e_q2    -- coset leaders with second coordinate in [-q2/2, q2/2)
    l_set   -- the canonical spectrum digit set (equal to c_set as a set)
    """

    gamma: tuple[Vec, ...]
    c_set: tuple[Vec, ...]
    e_q1: tuple[Vec, ...]
    e_q2: tuple[Vec, ...]
    l_set: tuple[Vec, ...]


def _box_range(b: int) -> range:
    return range(-(b // 2), b - b // 2)


@lru_cache(maxsize=None)
def enumerate_digit_sets(p: MatrixParams) -> DigitSetCatalog:
    q1, q2 = p.q1, p.q2
    gamma = tuple((x, y) for x in _box_range(p.base_x) for y in _box_range(p.base_y))
    c_set = ((0, 0), (q1, -q2), (-q1, q2))
    e_q1 = tuple(v for v in gamma if -(q1 // 2) <= v[0] < q1 - q1 // 2)
    e_q2 = tuple(v for v in gamma if -(q2 // 2) <= v[1] < q2 - q2 // 2)
    return DigitSetCatalog(gamma=gamma, c_set=c_set, e_q1=e_q1, e_q2=e_q2, l_set=c_set)


@dataclass(frozen=True)
class ResidueReport:
    """Outcome of the exhaustive coset-partition check of Gamma."""

    passed: bool
    coset_count: int
    collisions: tuple[tuple[Vec, Vec, Vec], ...]  # (leader1, leader2, shared residue)
    missing: tuple[Vec, ...]


def _partition_check(leaders, cosets, gamma, p) -> ResidueReport:
    seen: dict[Vec, Vec] = {}
    collisions = []
    for a in leaders:
        for c in cosets:
            r = mod_a_reduce((a[0] + c[0], a[1] + c[1]), p)
            if r in seen:
                collisions.append((seen[r], a, r))
            else:
                seen[r] = a
    missing = tuple(v for v in gamma if v not in seen)
    return ResidueReport(
        passed=not collisions and not missing,
        coset_count=len(leaders),
        collisions=tuple(collisions),
        missing=missing,
    )


def verify_residue_decomposition(p: MatrixParams) -> tuple[ResidueReport, ResidueReport]:
    """Check Gamma = disjoint union of (a + C mod A) over both leader sets.

    Returns the reports for the e_q1 and the e_q2 decompositions; each lists
    every collision or omission found by exhaustive enumeration.
    """
    cat = enumerate_digit_sets(p)
    return (
        _partition_check(cat.e_q1, cat.c_set, cat.gamma, p),
        _partition_check(cat.e_q2, cat.c_set, cat.gamma, p),
    )


# ---------------------------------------------------------------------------
# Symbolic vectors: base + sum of A^e * v terms with possibly huge exponents.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SymVec:
    """Exact lattice vector ``base + sum_i A^{e_i} * v_i`` kept in unexpanded form.

    Kicked spectrum points place a digit at position n + m_k with m_k as large
    as k**2, so materialized coordinates overflow any fixed width and get
    expensive to expand.  ``terms`` is sorted by exponent; exponents are
    distinct and >= 1 and term vectors are nonzero.
    """

    base: Vec
    terms: tuple[tuple[int, Vec], ...] = ()

    @property
    def is_concrete(self) -> bool:
        return not self.terms

    def materialize(self, p: MatrixParams) -> Vec:
        x, y = self.base
        for e, (vx, vy) in self.terms:
            if e > MATERIALIZE_EXPONENT_LIMIT:
                raise LatticeError(f"refusing to expand A^{e} term")
            x += p.base_x**e * vx
            y += p.base_y**e * vy
        return (x, y)


def sym(v: Vec) -> SymVec:
    return SymVec(base=v)


def make_sym(base: Vec, raw_terms, p: MatrixParams, fold_limit: int = 64) -> SymVec:
    """Normalize (base, terms): merge equal exponents, fold small exponents into base."""
    acc: dict[int, list[int]] = {}
    bx, by = base
    for e, (vx, vy) in raw_terms:
        if e < 0:
            raise LatticeError("term exponents must be >= 0")
        if e == 0:
            bx += vx
            by += vy
            continue
        cur = acc.setdefault(e, [0, 0])
        cur[0] += vx
        cur[1] += vy
    terms = []
    for e in sorted(acc):
        vx, vy = acc[e]
        if vx == 0 and vy == 0:
            continue
        if e <= fold_limit:
            bx += p.base_x**e * vx
            by += p.base_y**e * vy
        else:
            terms.append((e, (vx, vy)))
    return SymVec(base=(bx, by), terms=tuple(terms))


def sym_diff(a: SymVec, b: SymVec) -> SymVec:
    """Exact difference a - b with merged terms (no folding; stays symbolic)."""
    base = (a.base[0] - b.base[0], a.base[1] - b.base[1])
    if not a.terms and not b.terms:
        return SymVec(base=base)
    acc: dict[int, list[int]] = {}
    for sign, sv in ((1, a), (-1, b)):
        for e, (vx, vy) in sv.terms:
            cur = acc.setdefault(e, [0, 0])
            cur[0] += sign * vx
            cur[1] += sign * vy
    terms = tuple(
        (e, (vx, vy)) for e in sorted(acc) for vx, vy in [tuple(acc[e])] if vx or vy
    )
    return SymVec(base=base, terms=terms)


def sym_is_zero(v: SymVec, p: MatrixParams | None = None) -> bool:
    if not v.terms:
        return v.base == (0, 0)
    return (
        scalar_sign(*scalar_parts(v, p, 0)) == 0
        and scalar_sign(*scalar_parts(v, p, 1)) == 0
    )


def scalar_parts(v: SymVec, p: MatrixParams | None, axis: int):
    """Per-coordinate view (b, ((e, c), ...), B) of a SymVec.

    p is only needed when the coordinate actually carries symbolic terms.
    """
    b = v.base[axis]
    terms = tuple((e, vec[axis]) for e, vec in v.terms if vec[axis] != 0)
    if terms:
        if p is None:
            raise LatticeError("params required for symbolic coordinate")
        B = p.base_x if axis == 0 else p.base_y
    else:
        B = 2  # unused
    return b, terms, B


def scalar_materialize(b: int, terms, B: int) -> int:
    for e, c in terms:
        if e > MATERIALIZE_EXPONENT_LIMIT:
            raise LatticeError(f"refusing to expand {B}^{e} term")
        b += B**e * c
    return b


def _sign_int(x: int) -> int:
    return (x > 0) - (x < 0)


def scalar_sign(b: int, terms, B: int) -> int:
    """Exact sign of b + sum(c * B**e) without expanding huge powers when avoidable.

    The top term dominates once B**gap exceeds a small multiple of every lower
    coefficient; since 2**(gap*(bitlen(B)-1)) <= B**gap this becomes an exact
    integer test on bit lengths.  Falls back to full materialization only when
    exponents are small or the surrogate test is inconclusive.
    """
    terms = [(e, c) for e, c in terms if c != 0]
    if not terms:
        return _sign_int(b)
    terms.sort()
    top_e, top_c = terms[-1]
    lower = [(e, abs(c)) for e, c in terms[:-1]]
    if b:
        lower.append((0, abs(b)))
    if not lower:
        return _sign_int(top_c)
    shift = B.bit_length() - 1  # 2**shift <= B
    npieces = len(lower)
    dominated = all(
        (top_e - e) * shift >= (2 * npieces * c).bit_length() for e, c in lower
    )
    if dominated:
        return _sign_int(top_c)
    return _sign_int(scalar_materialize(b, terms, B))


def scalar_cmp_frac(b: int, terms, B: int, bound: Fraction) -> int:
    """Exact sign of (b + sum c*B^e) - bound for a rational bound."""
    num, den = bound.numerator, bound.denominator
    scaled = [(e, c * den) for e, c in terms]
    return scalar_sign(b * den - num, scaled, B)


def scalar_abs_lt(b: int, terms, B: int, bound: Fraction) -> bool:
    """Exact |b + sum c*B^e| < bound."""
    if bound <= 0:
        return False
    return (
        scalar_cmp_frac(b, terms, B, bound) < 0
        and scalar_cmp_frac(b, terms, B, -bound) > 0
    )


def _frac_sqrt_upper(h2: Fraction) -> Fraction:
    """A rational u >= sqrt(h2), tight enough for coordinate pre-filtering."""
    num, den = h2.numerator, h2.denominator
    return Fraction(math.isqrt(num * den) + 1, den)


def sym_dist2_lt(d: SymVec, p: MatrixParams | None, h2: Fraction) -> bool:
    """Exact test |d|^2 < h2 for a symbolic difference vector.

    Coordinates whose top symbolic term dominates fail the per-coordinate
    bound immediately; otherwise every surviving exponent is small and exact
    expansion is cheap.
    """
    h = _frac_sqrt_upper(h2)
    bx, tx, Bx = scalar_parts(d, p, 0)
    if not scalar_abs_lt(bx, tx, Bx, h):
        return False
    by, ty, By = scalar_parts(d, p, 1)
    if not scalar_abs_lt(by, ty, By, h):
        return False
    x = scalar_materialize(bx, tx, Bx)
    y = scalar_materialize(by, ty, By)
    return Fraction(x * x + y * y) < h2
