"""Exact orthogonality certification and numerical completeness evidence.

Orthogonality of a candidate spectrum is equivalent to every nonzero pairwise
difference lying in the zero set of the transform; that test runs in exact
integer arithmetic (symbolically for huge kicked coordinates).  Completeness
is never certified: the quadratic sums of the transform over a prefix give
evidence (bounded by 1, nondecreasing), and maximality is probed per candidate
with three-valued verdicts.
"""

from __future__ import annotations

import functools
import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .fourier import in_zero_set, in_zero_set_sym, tail_bound, zero_set_1d_sym
from .lattice import MatrixParams, SymVec, scalar_parts, scalar_sign, sym_diff
from .treemap import SpectrumPoint, SpectrumPrefix

FULL_PAIRWISE_LIMIT = 10_000
SAMPLED_PAIRS = 1_000_000


@dataclass(frozen=True)
class PairViolation:
    k1: int
    k2: int
    difference: SymVec
    reason: str  # "not-in-zero-set" | "coincident"


@dataclass(frozen=True)
class OrthogonalityReport:
    pairs_checked: int
    violations: tuple[PairViolation, ...]
    sampled: bool

    @property
    def passed(self) -> bool:
        return not self.violations


def _pair_iter(n: int, seed: int):
    """All unordered index pairs, or a seeded sample when the full set is too large."""
    if n <= FULL_PAIRWISE_LIMIT:
        return itertools.combinations(range(n), 2), False
    rng = random.Random(seed)

    def sample():
        for _ in range(SAMPLED_PAIRS):
            i = rng.randrange(n)
            j = rng.randrange(n - 1)
            if j >= i:
                j += 1
            yield (i, j) if i < j else (j, i)

    return sample(), True


def check_orthogonality(
    prefix: SpectrumPrefix | list[SpectrumPoint],
    p: MatrixParams | None = None,
    *,
    seed: int = 0,
    max_violations: int = 100,
) -> OrthogonalityReport:
    """Test every pairwise difference for zero-set membership, exactly."""
    points, p = _points_and_params(prefix, p)
    pairs, sampled = _pair_iter(len(points), seed)
    violations: list[PairViolation] = []
    checked = 0
    for i, j in pairs:
        a, b = points[i], points[j]
        checked += 1
        if a.value.is_concrete and b.value.is_concrete:
            dx = a.value.base[0] - b.value.base[0]
            dy = a.value.base[1] - b.value.base[1]
            if dx == 0 and dy == 0:
                violations.append(
                    PairViolation(a.k, b.k, SymVec(base=(0, 0)), "coincident")
                )
            elif in_zero_set((dx, dy), p) is None:
                violations.append(
                    PairViolation(a.k, b.k, SymVec(base=(dx, dy)), "not-in-zero-set")
                )
        else:
            d = sym_diff(a.value, b.value)
            if not d.terms and d.base == (0, 0):
                violations.append(PairViolation(a.k, b.k, d, "coincident"))
            elif in_zero_set_sym(d, p) is None:
                violations.append(PairViolation(a.k, b.k, d, "not-in-zero-set"))
        if len(violations) >= max_violations:
            break
    return OrthogonalityReport(
        pairs_checked=checked, violations=tuple(violations), sampled=sampled
    )


def _points_and_params(prefix, p):
    if isinstance(prefix, SpectrumPrefix):
        return list(prefix.points), prefix.params
    if p is None:
        raise ValueError("params required when passing a bare point list")
    return list(prefix), p


# ---------------------------------------------------------------------------
# Structural consequences of orthogonality
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LineReport:
    passed: bool
    shared_x: tuple[tuple[int, int], ...]  # witness index pairs
    shared_y: tuple[tuple[int, int], ...]


def _coord_cmp(p: MatrixParams, axis: int):
    def cmp(a: SpectrumPoint, b: SpectrumPoint) -> int:
        d = sym_diff(a.value, b.value)
        return scalar_sign(*scalar_parts(d, p, axis))

    return cmp


def check_distinct_lines(
    prefix: SpectrumPrefix | list[SpectrumPoint], p: MatrixParams | None = None
) -> LineReport:
    """Report any two points sharing an x- or a y-coordinate (exact comparison)."""
    points, p = _points_and_params(prefix, p)
    shared: dict[int, list[tuple[int, int]]] = {0: [], 1: []}
    for axis in (0, 1):
        ordered = sorted(points, key=functools.cmp_to_key(_coord_cmp(p, axis)))
        cmp = _coord_cmp(p, axis)
        for a, b in zip(ordered, ordered[1:]):
            if cmp(a, b) == 0:
                shared[axis].append((a.k, b.k))
    return LineReport(
        passed=not shared[0] and not shared[1],
        shared_x=tuple(shared[0]),
        shared_y=tuple(shared[1]),
    )


@dataclass(frozen=True)
class ProjectionReport:
    passed: bool
    x_violations: tuple[tuple[int, int], ...]
    y_violations: tuple[tuple[int, int], ...]


def check_projection_orthogonality(
    prefix: SpectrumPrefix | list[SpectrumPoint],
    p: MatrixParams | None = None,
    *,
    seed: int = 0,
    max_violations: int = 100,
) -> ProjectionReport:
    """Pairwise projected differences must lie in the one-dimensional zero sets.

    The x-projections are tested against the base-3*q1 zero set, the
    y-projections against base-3*q2; exact symbolic arithmetic throughout.
    A zero projected difference between distinct points is a violation too.
    """
    points, p = _points_and_params(prefix, p)
    pairs, _ = _pair_iter(len(points), seed)
    bad: dict[int, list[tuple[int, int]]] = {0: [], 1: []}
    qs = (p.q1, p.q2)
    for i, j in pairs:
        d = sym_diff(points[i].value, points[j].value)
        for axis in (0, 1):
            b, terms, B = scalar_parts(d, p, axis)
            if not zero_set_1d_sym(b, terms, B, qs[axis]):
                bad[axis].append((points[i].k, points[j].k))
        if len(bad[0]) >= max_violations or len(bad[1]) >= max_violations:
            break
    return ProjectionReport(
        passed=not bad[0] and not bad[1],
        x_violations=tuple(bad[0]),
        y_violations=tuple(bad[1]),
    )


# ---------------------------------------------------------------------------
# Finite-level unitarity
# ---------------------------------------------------------------------------

DIGITS = ((0, 0), (1, 0), (0, 1))


def gram_unitarity(
    n: int, prefix: SpectrumPrefix | list[SpectrumPoint], p: MatrixParams | None = None
) -> float:
    """Max deviation of the level-n character matrix from unitarity.

    The 3^n atoms are the digit sums sum_j A^-j d_j; against a spectrum slice
    of 3^n points the matrix U[a, lam] = 3^(-n/2) e^(-2 pi i <lam, a>) must be
    unitary.  Phases are computed from exact fractional parts, so the returned
    deviation carries no argument-reduction noise.
    """
    points, p = _points_and_params(prefix, p)
    if n < 0:
        raise ValueError("n must be >= 0")
    if len(points) != 3**n:
        raise ValueError(f"need exactly 3^{n} = {3**n} points, got {len(points)}")
    denx, deny = p.base_x**n, p.base_y**n
    atoms = []
    for digits in itertools.product(DIGITS, repeat=n):
        ax = ay = 0
        for dx, dy in digits:  # position j contributes d_j * B^(n-j)
            ax = ax * p.base_x + dx
            ay = ay * p.base_y + dy
        atoms.append((ax, ay))
    lams = [pt.concrete(p) for pt in points]
    size = 3**n
    phase = np.empty((size, size), dtype=float)
    for r, (ax, ay) in enumerate(atoms):
        for c, (lx, ly) in enumerate(lams):
            phase[r, c] = ((lx * ax) % denx) / denx + ((ly * ay) % deny) / deny
    u = np.exp(-2j * np.pi * phase) / math.sqrt(size)
    gram = u.conj().T @ u
    return float(np.max(np.abs(gram - np.eye(size))))


# ---------------------------------------------------------------------------
# Quadratic transform sums (completeness evidence)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SamplingBox:
    """The frequency box |xi_1| <= 3q1/(2(3q1-1)), |xi_2| <= 3q2/(2(3q2-1))."""

    half_width_x: Fraction
    half_width_y: Fraction

    @classmethod
    def for_params(cls, p: MatrixParams) -> "SamplingBox":
        box = cls(
            half_width_x=Fraction(p.base_x, 2 * (p.base_x - 1)),
            half_width_y=Fraction(p.base_y, 2 * (p.base_y - 1)),
        )
        assert Fraction(1, 2) < box.half_width_x <= Fraction(3, 4)
        assert Fraction(1, 2) < box.half_width_y <= Fraction(3, 4)
        return box

    def samples(self, count: int, seed: int = 0) -> list[tuple[float, float]]:
        rng = random.Random(seed)
        wx, wy = float(self.half_width_x), float(self.half_width_y)
        return [
            (rng.uniform(-wx, wx), rng.uniform(-wy, wy)) for _ in range(count)
        ]


@dataclass(frozen=True)
class QSumResult:
    value: float
    error: float
    depth: int
    terms: int


def q_sum_terms(xi, prefix, p: MatrixParams | None = None, tail_target: float = 1e-9):
    """Per-point |transform(xi + lambda)|^2 with certified per-term error bounds.

    Returns (values, errors, depth).  Points must have float-representable
    coordinates; kicked points with huge exponents are rejected.
    """
    points, p = _points_and_params(prefix, p)
    coords = []
    for pt in points:
        if not pt.value.is_concrete:
            raise ValueError(
                "q_sum needs float-representable points; got a symbolic kick term"
            )
        coords.append(pt.value.base)
    arr = np.array(coords, dtype=float)
    if arr.size == 0:
        return np.zeros(0), np.zeros(0), 1
    arr = arr + np.asarray(xi, dtype=float)
    xmax = float(np.max(np.abs(arr))) if arr.size else 0.0
    per_term = tail_target / (3.0 * max(1, len(points)))
    depth = 1
    while tail_bound((xmax, xmax), p, depth) > per_term:
        depth += 1
    prod = np.ones(len(points), dtype=complex)
    x = arr[:, 0].copy()
    y = arr[:, 1].copy()
    for _ in range(depth):
        x /= p.base_x
        y /= p.base_y
        prod *= (1.0 + np.exp(-2j * np.pi * x) + np.exp(-2j * np.pi * y)) / 3.0
    tails = np.array(
        [tail_bound((float(c[0]), float(c[1])), p, depth) for c in arr]
    )
    values = np.abs(prod) ** 2
    errors = tails * (2.0 * np.abs(prod) + tails)
    return values, errors, depth


def q_sum(xi, prefix, p: MatrixParams | None = None, tail_target: float = 1e-9) -> QSumResult:
    """Partial quadratic sum over the prefix with accumulated certified error."""
    values, errors, depth = q_sum_terms(xi, prefix, p, tail_target)
    # generous cover for float accumulation on top of the certified tails
    float_slack = 1e-14 * (len(values) + 1) * max(depth, 1)
    return QSumResult(
        value=float(np.sum(values)),
        error=float(np.sum(errors)) + float_slack,
        depth=depth,
        terms=len(values),
    )


# ---------------------------------------------------------------------------
# Maximality probing
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProbeVerdict:
    candidate: tuple[int, int]
    status: str  # "member" | "conflict" | "inconclusive"
    conflict_with: int | None = None  # index k of the witnessing point


def maximality_probe(
    prefix: SpectrumPrefix | list[SpectrumPoint],
    p: MatrixParams | None = None,
    *,
    box: tuple[int, int],
) -> list[ProbeVerdict]:
    """Per-candidate extension verdicts over an integer box.

    CONFLICT(lambda) certifies the candidate cannot extend the orthogonal
    family (the difference to lambda escapes the zero set, exactly);
    INCONCLUSIVE means no finite certificate exists at this prefix size.
    Maximality itself is never certified from a finite prefix.
    """
    points, p = _points_and_params(prefix, p)
    concrete = {
        pt.value.base: pt.k for pt in points if pt.value.is_concrete
    }
    verdicts = []
    bx, by = box
    for gx in range(-bx, bx + 1):
        for gy in range(-by, by + 1):
            cand = (gx, gy)
            if cand in concrete:
                verdicts.append(ProbeVerdict(cand, "member"))
                continue
            hit = None
            for pt in points:
                if pt.value.is_concrete:
                    d = (gx - pt.value.base[0], gy - pt.value.base[1])
                    if d != (0, 0) and in_zero_set(d, p) is None:
                        hit = pt.k
                        break
                else:
                    d = sym_diff(SymVec(base=cand), pt.value)
                    if in_zero_set_sym(d, p) is None:
                        hit = pt.k
                        break
            if hit is None:
                verdicts.append(ProbeVerdict(cand, "inconclusive"))
            else:
                verdicts.append(ProbeVerdict(cand, "conflict", conflict_with=hit))
    return verdicts
