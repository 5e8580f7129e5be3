import math

import pytest

from sierpspec.construct import (
    build_intermediate_spectrum,
    coherent_perturbation_report,
    family_variants,
    gamma_t_from_density,
    pattern_lattice_points,
    t_max,
)
from sierpspec.dimension import beurling_dim_estimate, geometric_scales, lacunary_check
from sierpspec.lattice import MatrixParams, enumerate_digit_sets, sym_diff, sym_is_zero
from sierpspec.treemap import CanonicalMapping, enumerate_spectrum, validate_tree_mapping
from sierpspec.verify import check_orthogonality

P12 = MatrixParams(1, 2)
P44 = MatrixParams(4, 4)
P48 = MatrixParams(4, 8)


def test_gamma_t_density_mapping():
    tm = t_max(P12)
    pattern, member = gamma_t_from_density(tm, P12)
    assert pattern.density == pytest.approx(1.0)
    assert all(member(k) for k in range(-40, 41))
    pattern0, member0 = gamma_t_from_density(0.0, P12)
    assert pattern0.density == 0.0
    assert member0(0) and not any(member0(k) for k in range(1, 41))
    pattern3, _ = gamma_t_from_density(0.3, P12)
    d = 0.3 * math.log(6) / math.log(3)
    assert pattern3.density == pytest.approx(d)
    horizon = 10_000
    avg = sum(1 for i in range(1, horizon + 1) if pattern3.active(i)) / horizon
    assert abs(avg - d) < 1e-3
    with pytest.raises(ValueError):
        gamma_t_from_density(tm + 0.05, P12)


def test_density_is_affine_in_t():
    tm = t_max(P48)
    ds = [gamma_t_from_density(t, P48)[0].density for t in (0.0, tm / 2, tm)]
    assert ds[0] == 0.0
    assert ds[2] == pytest.approx(1.0)
    assert ds[1] == pytest.approx(0.5, abs=1e-12)


def test_t_max_prefix_equals_canonical():
    spec = build_intermediate_spectrum(t_max(P48), P48)
    pre = spec.prefix(40)
    canon = enumerate_spectrum(CanonicalMapping(), P48, index_bound=40)
    assert [pt.value for pt in pre.points] == [pt.value for pt in canon.points]


def test_all_kicked_lacunary():
    spec = build_intermediate_spectrum(0.0, P44)
    pre = spec.prefix(50)
    rep = lacunary_check(pre, 36)
    assert rep.ratio_pass and rep.min_ratio >= 36


def test_intermediate_orthogonal_and_valid():
    spec = build_intermediate_spectrum(0.3, P44, mode="coherent")
    assert validate_tree_mapping(spec.mapping(), P44, 6).passed
    pre = spec.prefix(121)
    assert check_orthogonality(pre).passed


def test_kick_rejected_with_hint():
    with pytest.raises(Exception, match="E_q1"):
        build_intermediate_spectrum(0.1, P12)
    spec = build_intermediate_spectrum(0.1, P12, kick=(0, 1))
    assert check_orthogonality(spec.prefix(40)).passed


def test_split_parts_and_dimensions():
    spec = build_intermediate_spectrum(0.3, P48)
    pre = spec.prefix(364)
    f_part, kicked = spec.split(pre)
    assert len(f_part) + len(kicked) == len(pre.points)
    assert all(pt.kick_position is None for pt in f_part)
    assert all(pt.kick_position is not None for pt in kicked)
    scales = geometric_scales(P48, 1, 6)
    est_f = beurling_dim_estimate(f_part, scales, P48, centers="sample:32")
    assert abs(est_f.slope - 0.3) < 0.1
    est_k = beurling_dim_estimate(kicked, scales, P48, centers="sample:32")
    assert est_k.slope < 0.1
    est_union = beurling_dim_estimate(pre, scales, centers="sample:32")
    assert abs(est_union.slope - 0.3) < 0.1


def test_f_part_is_sublattice_of_canonical():
    spec = build_intermediate_spectrum(0.3, P48)
    pre = spec.prefix(364)
    f_part, _ = spec.split(pre)
    brute = set(pattern_lattice_points(P48, spec.pattern, depth=6))
    assert {pt.value.base for pt in f_part} <= brute
    report = coherent_perturbation_report(spec, pre)
    assert report["f_part_changed"] == 0


def test_family_variants_distinct():
    specs = family_variants(0.15, P48, count=4, seed=0)
    assert len(specs) == 4
    assert specs[0].variant_bits == ()
    prefixes = [spec.prefix(121) for spec in specs]
    for i in range(4):
        for j in range(i + 1, 4):
            pa, pb = prefixes[i], prefixes[j]
            differs = any(
                not sym_is_zero(sym_diff(a.value, b.value), P48)
                for a, b in zip(pa.points, pb.points)
            )
            assert differs, (i, j)
    # single variant is the canonical choice
    only = family_variants(0.15, P48, count=1, seed=9)
    assert only[0].variant_bits == ()
    with pytest.raises(ValueError):
        family_variants(0.15, P48, count=2**16 + 1)


def test_variants_keep_offsets_increasing():
    spec = family_variants(0.15, P48, count=4, seed=0)[3]
    offs = spec.mapping().offsets
    for branch in (range(1, 30), range(-1, -30, -1)):
        last = -1
        for k in branch:
            m = offs(k)
            if m:
                assert m > last
                last = m
