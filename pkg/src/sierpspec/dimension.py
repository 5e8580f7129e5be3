"""Lattice-counting dimension estimation and closed-form dimension evaluators.

The counting estimator regresses log ball-count against log radius over a
geometric scale grid, taking the sup over centers from a finite policy (the
densest balls of these digit-generated sets center on points of the set, so
candidate centers are the origin plus generated points; this is a documented
heuristic, the true sup is over all of R^2).  Counting is exact: huge kicked
coordinates are compared in symbolic form and never expanded unless small.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .lattice import (
    MatrixParams,
    SymVec,
    scalar_abs_lt,
    scalar_materialize,
    scalar_parts,
    sym,
    sym_diff,
    sym_dist2_lt,
)
from .treemap import SpectrumPoint, SpectrumPrefix

INT64_SAFE = 2**63 - 1


def _as_symvecs(points, p=None):
    if isinstance(points, SpectrumPrefix):
        return [pt.value for pt in points.points], points.params
    out = []
    for item in points:
        if isinstance(item, SpectrumPoint):
            out.append(item.value)
        elif isinstance(item, SymVec):
            out.append(item)
        else:
            x, y = item
            out.append(sym((int(x), int(y))))
    return out, p


def _center_to_symvec(center) -> SymVec | tuple[Fraction, Fraction]:
    if isinstance(center, SpectrumPoint):
        return center.value
    if isinstance(center, SymVec):
        return center
    cx, cy = center
    if isinstance(cx, int) and isinstance(cy, int):
        return sym((cx, cy))
    return (Fraction(cx), Fraction(cy))


def _dist2_lt_frac_center(v: SymVec, center, h2: Fraction, p) -> bool:
    cx, cy = center
    h = Fraction(math.isqrt(h2.numerator * h2.denominator) + 1, h2.denominator)
    coords = []
    for axis, c in ((0, cx), (1, cy)):
        b, terms, B = scalar_parts(v, p, axis)
        den = c.denominator
        scaled_terms = [(e, coef * den) for e, coef in terms]
        if not scalar_abs_lt(b * den - c.numerator, scaled_terms, B, h * den):
            return False
        coords.append(Fraction(scalar_materialize(b, terms, B)) - c)
    return coords[0] ** 2 + coords[1] ** 2 < h2


def count_in_ball(points, center, h, p: MatrixParams | None = None) -> int:
    """Exact number of points at Euclidean distance < h from the center."""
    if h <= 0:
        raise ValueError("radius must be positive")
    vecs, p = _as_symvecs(points, p)
    h2 = Fraction(h) ** 2
    c = _center_to_symvec(center)
    if isinstance(c, SymVec):
        return sum(1 for v in vecs if sym_dist2_lt(sym_diff(v, c), p, h2))
    return sum(1 for v in vecs if _dist2_lt_frac_center(v, c, h2, p))


@dataclass(frozen=True)
class DimensionEstimate:
    scales: tuple
    counts: tuple[int, ...]
    slope: float
    fit_residual: float
    centers_used: int

    def __str__(self) -> str:
        return f"dim~{self.slope:.4f} over {len(self.scales)} scales (rms {self.fit_residual:.3f})"


def geometric_scales(p: MatrixParams, j_lo: int, j_hi: int) -> list[int]:
    """The scale grid h = (3*q2)^j for consecutive exponents."""
    if j_lo < 1 or j_hi < j_lo:
        raise ValueError("need 1 <= j_lo <= j_hi")
    return [p.base_y**j for j in range(j_lo, j_hi + 1)]


def _resolve_centers(vecs, policy, seed):
    if policy == "origin":
        return [sym((0, 0))]
    if policy == "points":
        return [sym((0, 0))] + list(vecs)
    if isinstance(policy, str) and policy.startswith("sample:"):
        n = int(policy.split(":", 1)[1])
        rng = random.Random(seed)
        chosen = list(vecs) if len(vecs) <= n else rng.sample(list(vecs), n)
        return [sym((0, 0))] + chosen
    return [_center_to_symvec(c) for c in policy]


def beurling_dim_estimate(
    points,
    scales,
    p: MatrixParams | None = None,
    *,
    centers="sample:64",
    seed: int = 0,
) -> DimensionEstimate:
    """Slope of log max-ball-count against log radius over the scale grid.

    centers: "origin", "points", "sample:N" (origin plus a seeded sample of
    generated points), or an explicit list.  Counting is exact; the regression
    is an estimate whose window the caller controls.
    """
    vecs, p = _as_symvecs(points, p)
    if not vecs:
        raise ValueError("cannot estimate the dimension of an empty set")
    scales = list(scales)
    if len(scales) < 4:
        raise ValueError("need at least 4 scales")
    if len(set(scales)) != len(scales) or any(h <= 0 for h in scales):
        raise ValueError("scales must be positive and distinct")
    scales.sort()
    center_vecs = _resolve_centers(vecs, centers, seed)
    counts = []
    fast = _Int64Counter.build(vecs, scales, center_vecs, p)
    if fast is None:
        concrete = [v.base for v in vecs if v.is_concrete]
        symbolic = [v for v in vecs if not v.is_concrete]
    for h in scales:
        h2 = Fraction(h) ** 2
        best = 0
        for c in center_vecs:
            if fast is not None:
                n = fast.count(c, h)
            elif c.is_concrete and isinstance(h, int):
                cx, cy = c.base
                hh = h * h
                n = sum(
                    1 for x, y in concrete if (x - cx) ** 2 + (y - cy) ** 2 < hh
                ) + sum(
                    1
                    for v in symbolic
                    if sym_dist2_lt(sym_diff(v, c), p, h2)
                )
            else:
                n = sum(1 for v in vecs if sym_dist2_lt(sym_diff(v, c), p, h2))
            if n > best:
                best = n
        counts.append(best)
    if min(counts) < 1:
        raise ValueError("every scale needs a nonempty densest ball; enlarge scales")
    xs = np.log(np.array([float(h) for h in scales]))
    ys = np.log(np.array(counts, dtype=float))
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = float(np.sqrt(np.mean((ys - (slope * xs + intercept)) ** 2)))
    return DimensionEstimate(
        scales=tuple(scales),
        counts=tuple(counts),
        slope=float(slope),
        fit_residual=resid,
        centers_used=len(center_vecs),
    )


class _Int64Counter:
    """Vectorized exact counting when every coordinate fits comfortably in int64.

    Symbolic points with huge kick terms are kept aside: against an int64
    center they lie outside every grid scale iff the exact symbolic test says
    so, which is checked per point (cheap, the top term dominates).
    """

    def __init__(self, arr, sym_vecs, p):
        self.arr = arr
        self.sym_vecs = sym_vecs
        self.p = p

    @classmethod
    def build(cls, vecs, scales, center_vecs, p):
        concrete = []
        symbolic = []
        for v in vecs:
            (concrete if v.is_concrete else symbolic).append(v)
        hmax = max(scales)
        if not isinstance(hmax, int):
            return None
        bound = 0
        for v in concrete:
            bound = max(bound, abs(v.base[0]), abs(v.base[1]))
        for c in center_vecs:
            if not c.is_concrete:
                return None
            bound = max(bound, abs(c.base[0]), abs(c.base[1]))
        if (2 * bound) ** 2 * 2 > INT64_SAFE or hmax**2 > INT64_SAFE:
            return None
        arr = np.array([v.base for v in concrete], dtype=np.int64).reshape(-1, 2)
        return cls(arr, symbolic, p)

    def count(self, center: SymVec, h: int) -> int:
        cx, cy = center.base
        if len(self.arr):
            dx = self.arr[:, 0] - cx
            dy = self.arr[:, 1] - cy
            n = int(np.count_nonzero(dx * dx + dy * dy < h * h))
        else:
            n = 0
        if self.sym_vecs:
            h2 = Fraction(h) ** 2
            n += sum(
                1
                for v in self.sym_vecs
                if sym_dist2_lt(sym_diff(v, center), self.p, h2)
            )
        return n


# ---------------------------------------------------------------------------
# Position patterns and the closed-form dimension formulas
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Periodic:
    """Repeating activity bits; position i (1-based) is active iff bits[(i-1) % P]."""

    bits: tuple[int, ...]

    def __post_init__(self):
        if not self.bits or any(b not in (0, 1) for b in self.bits):
            raise ValueError("Periodic needs a nonempty 0/1 bit tuple")

    def active(self, i: int) -> bool:
        return bool(self.bits[(i - 1) % len(self.bits)])

    @property
    def frequency(self) -> float:
        # the prefix frequency converges to the period average
        return sum(self.bits) / len(self.bits)


@dataclass(frozen=True)
class Beatty:
    """Active where floor(i*d) increments; prefix frequency converges to d exactly."""

    density: float

    def __post_init__(self):
        if not 0.0 <= self.density <= 1.0:
            raise ValueError("Beatty density must lie in [0, 1]")

    def active(self, i: int) -> bool:
        d = self.density
        return math.floor(i * d) > math.floor((i - 1) * d)

    @property
    def frequency(self) -> float:
        return self.density


@dataclass(frozen=True)
class Explicit:
    """Caller-supplied activity predicate with a claimed limiting frequency."""

    predicate: object  # Callable[[int], bool]
    claimed_frequency: float

    def active(self, i: int) -> bool:
        return bool(self.predicate(i))

    @property
    def frequency(self) -> float:
        return self.claimed_frequency

    def consistency_check(self, horizon: int = 10_000, tol: float = 0.05) -> None:
        avg = sum(1 for i in range(1, horizon + 1) if self.active(i)) / horizon
        if abs(avg - self.claimed_frequency) > tol:
            raise ValueError(
                f"claimed frequency {self.claimed_frequency} is inconsistent with "
                f"prefix average {avg:.4f} over {horizon} positions"
            )


Pattern = Periodic | Beatty | Explicit


def _pattern_frequency(pattern: Pattern) -> float:
    if isinstance(pattern, Explicit):
        pattern.consistency_check()
    return pattern.frequency


def formula_dim_1d(b: int, digit_set, pattern: Pattern) -> float:
    """Closed-form dimension of a one-dimensional digit-sum set.

    For the set of sums d_1 + d_2 b + ... with digits drawn from D on active
    positions and {0} elsewhere, the dimension is (limsup position frequency)
    times log|D|/log b, provided D sits inside the centered residue alphabet.
    """
    if b < 2:
        raise ValueError("base must be >= 2")
    digits = sorted(set(digit_set))
    if not digits:
        raise ValueError("digit set must be nonempty")
    lo, hi = -(b // 2), b - 1 - b // 2
    for d in digits:
        if not lo <= d <= hi:
            raise ValueError(f"digit {d} outside the centered alphabet [{lo}, {hi}]")
    return _pattern_frequency(pattern) * math.log(len(digits)) / math.log(b)


def formula_dim_2d(a: int, b: int, digit_set, pattern: Pattern) -> float:
    """Closed-form dimension of a planar digit-sum set under diag(a, b), a <= b.

    Requires the y-components of the digits to be distinct and to sit inside
    the centered base-b alphabet: then distinct digit strings give distinct
    y-coordinates, the generated set meets every horizontal level at most once,
    and its dimension equals (frequency) * log|B|/log b.
    """
    if not (1 < a <= b):
        raise ValueError("need 1 < a <= b")
    digits = sorted(set(tuple(d) for d in digit_set))
    if not digits:
        raise ValueError("digit set must be nonempty")
    lo, hi = -(b // 2), b - 1 - b // 2
    ys = [d[1] for d in digits]
    for y in ys:
        if not lo <= y <= hi:
            raise ValueError(f"digit y-component {y} outside [{lo}, {hi}]")
    if len(set(ys)) != len(ys):
        raise ValueError(
            "digit set has colliding y-components; the one-point-per-line "
            "hypothesis of the closed form fails"
        )
    return _pattern_frequency(pattern) * math.log(len(digits)) / math.log(b)


# ---------------------------------------------------------------------------
# Lacunarity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LacunaryReport:
    """Exact growth check |a_{n+1}| >= b |a_n| along both index branches.

    ratio_pass covers the consecutive-ratio clauses; strict_pass additionally
    requires the branch heads to satisfy |a_1| >= b.  lacunary_constant is the
    largest c for which the set is strictly c-lacunary (> 1 forces dimension 0).
    """

    b: float
    ratio_pass: bool
    strict_pass: bool
    min_ratio: float
    head_magnitudes: tuple[float, ...]
    lacunary_constant: float
    branch_sizes: tuple[int, int]

    @property
    def passed(self) -> bool:
        return self.ratio_pass


def lacunary_check(points, b, p: MatrixParams | None = None) -> LacunaryReport:
    """Verify the lacunary growth clauses with exact integer comparisons.

    Accepts an indexed prefix (split into the k>0 and k<0 branches, ordered by
    |k|) or a bare point list (single branch ordered by magnitude, zero
    dropped).  All comparisons are performed on exact squared magnitudes.
    """
    if b <= 1:
        raise ValueError("lacunarity constant must exceed 1")
    branches = _magnitude_branches(points, p)
    b2 = Fraction(b) ** 2
    ratio_ok = True
    strict_ok = True
    min_ratio2 = None
    heads = []
    for branch in branches:
        if not branch:
            continue
        heads.append(_float_sqrt(branch[0]))
        if Fraction(branch[0]) < b2:
            strict_ok = False
        for prev, nxt in zip(branch, branch[1:]):
            if prev == 0:
                ratio_ok = False
                continue
            r2 = Fraction(nxt, prev)
            if min_ratio2 is None or r2 < min_ratio2:
                min_ratio2 = r2
            if r2 < b2:
                ratio_ok = False
    strict_ok = strict_ok and ratio_ok
    min_ratio = _float_sqrt_frac(min_ratio2) if min_ratio2 is not None else math.inf
    constant = min([min_ratio, *heads]) if heads else math.inf
    return LacunaryReport(
        b=float(b),
        ratio_pass=ratio_ok,
        strict_pass=strict_ok,
        min_ratio=min_ratio,
        head_magnitudes=tuple(heads),
        lacunary_constant=constant,
        branch_sizes=(len(branches[0]), len(branches[1]) if len(branches) > 1 else 0),
    )


def _magnitude_branches(points, p):
    """Exact squared magnitudes per branch, verified nondecreasing within each."""
    indexed = None
    if isinstance(points, SpectrumPrefix):
        indexed = points.points
        p = points.params
    elif points and isinstance(points[0], SpectrumPoint):
        indexed = list(points)
    if indexed is not None:
        pos = sorted((pt for pt in indexed if pt.k > 0), key=lambda pt: pt.k)
        neg = sorted((pt for pt in indexed if pt.k < 0), key=lambda pt: -pt.k)
        branches = [
            [_mag2(pt.value, p) for pt in pos],
            [_mag2(pt.value, p) for pt in neg],
        ]
        for branch in branches:
            for prev, nxt in zip(branch, branch[1:]):
                if nxt < prev:
                    raise ValueError(
                        "branch magnitudes are not nondecreasing in |k|; "
                        "lacunary ordering assumption violated"
                    )
        return branches
    vecs, p = _as_symvecs(points, p)
    mags = sorted(_mag2(v, p) for v in vecs)
    return [[m for m in mags if m > 0]]


def _mag2(v: SymVec, p) -> int:
    x, y = v.materialize(p) if not v.is_concrete else v.base
    return x * x + y * y


def _float_sqrt(m2: int) -> float:
    if m2.bit_length() > 1000:
        return math.inf
    return math.sqrt(float(m2))


def _float_sqrt_frac(fr: Fraction) -> float:
    if (fr.numerator.bit_length() - fr.denominator.bit_length()) > 1000:
        return math.inf
    try:
        return math.sqrt(float(fr))
    except OverflowError:
        return math.inf


# ---------------------------------------------------------------------------
# Entropy and support dimensions (closed forms + Monte Carlo)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EntropyDimensions:
    dim_x: float
    dim_mu: float
    lower: float  # log 3 / log 3q2
    upper: float  # log 3 / log 3q1
    strict: bool  # strict chain (q1 < q2) vs equality to the upper end


def entropy_dim_closed_form(p: MatrixParams) -> EntropyDimensions:
    """Closed-form entropy dimensions of the measure and its x-projection.

    dim_x = (2/3 log 2/3 + 1/3 log 1/3) / (-log 3q1);
    dim_mu = (dim_x * log(3q2/3q1) + log 3) / log 3q2, which sits strictly
    between log3/log3q2 and log3/log3q1 when q1 < q2 and hits the upper end
    when q1 = q2.
    """
    dim_x = (2 / 3 * math.log(2 / 3) + 1 / 3 * math.log(1 / 3)) / (-math.log(p.base_x))
    dim_mu = (dim_x * math.log(p.base_y / p.base_x) + math.log(3)) / math.log(p.base_y)
    lower = math.log(3) / math.log(p.base_y)
    upper = math.log(3) / math.log(p.base_x)
    if p.q1 < p.q2:
        if not (lower < dim_mu < upper):
            raise AssertionError("entropy dimension escaped its strict bracket")
        strict = True
    else:
        if abs(dim_mu - upper) > 1e-12:
            raise AssertionError("entropy dimension should equal log3/log3q1 here")
        strict = False
    return EntropyDimensions(dim_x=dim_x, dim_mu=dim_mu, lower=lower, upper=upper, strict=strict)


DIGITS_2D = np.array([(0, 0), (1, 0), (0, 1)], dtype=float)


def entropy_dim_monte_carlo(
    p: MatrixParams, n: int, samples: int, seed: int = 0
) -> float:
    """Plug-in entropy of the sampled measure on the dyadic 2^-n grid, over n log 2.

    Samples are truncated digit sums sum_j A^-j d_j with the truncation depth
    chosen so the dropped tail is below 2^-(n+4) per coordinate.
    """
    if n == 0:
        return 0.0
    if samples < 1:
        raise ValueError("need at least one sample")
    depth = 1
    while 1.0 / (p.base_x**depth * (p.base_x - 1)) >= 2.0 ** -(n + 4):
        depth += 1
    rng = np.random.default_rng(seed)
    choice = rng.integers(0, 3, size=(samples, depth))
    wx = p.base_x ** -np.arange(1.0, depth + 1)
    wy = p.base_y ** -np.arange(1.0, depth + 1)
    x = (choice == 1) @ wx
    y = (choice == 2) @ wy
    cells = np.floor(x * 2**n).astype(np.int64) * (2**n + 3) + np.floor(
        y * 2**n
    ).astype(np.int64)
    _, counts = np.unique(cells, return_counts=True)
    freq = counts / samples
    entropy = float(-np.sum(freq * np.log(freq)))
    return entropy / (n * math.log(2))


def support_hausdorff_dim(p: MatrixParams) -> float:
    """Closed-form Hausdorff dimension log(2^u + 1)/log(3q1), u = log3q1/log3q2."""
    u = math.log(p.base_x) / math.log(p.base_y)
    value = math.log(2**u + 1) / math.log(p.base_x)
    if not value > math.log(3) / math.log(p.base_y) - 1e-12:
        raise AssertionError("support dimension fell below the counting bound")
    return value


# ---------------------------------------------------------------------------
# Relative-density surrogate
# ---------------------------------------------------------------------------


def relative_density_check(points, p: MatrixParams | None = None, pexp: int = 1) -> float:
    """Finite-prefix surrogate sup_lambda inf_gamma ||A^-pexp lambda - gamma||.

    Reported, never asserted: boundedness of this statistic (as the prefix
    grows) is the hypothesis under which generated spectra attain the optimal
    dimension; for lacunary families it grows with the prefix instead.
    """
    vecs, p = _as_symvecs(points, p)
    if not vecs:
        raise ValueError("empty prefix")
    if pexp < 1:
        raise ValueError("pexp must be >= 1")
    coords = []
    for v in vecs:
        x, y = v.materialize(p) if not v.is_concrete else v.base
        coords.append((_to_float(x), _to_float(y)))
    arr = np.array(coords, dtype=float)
    scaled = arr / np.array([float(p.base_x**pexp), float(p.base_y**pexp)])
    worst = 0.0
    for sx, sy in scaled:
        if math.isinf(sx) or math.isinf(sy):
            return math.inf
        d2 = (arr[:, 0] - sx) ** 2 + (arr[:, 1] - sy) ** 2
        worst = max(worst, float(np.min(d2)))
    return math.sqrt(worst)


def _to_float(x: int) -> float:
    if x.bit_length() > 1000:
        return math.inf if x > 0 else -math.inf
    return float(x)
