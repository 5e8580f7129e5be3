"""Command-line front end: generate, verify, measure and construct spectra.

Subcommands
    gen        emit spectrum points as JSON-lines or CSV (decimal-string coords)
    verify     exact orthogonality / line / projection checks, unitarity, q-sums
    dim        counting-based dimension table plus closed-form references
    construct  describe (and optionally emit) intermediate-dimension variants
    qsum       quadratic transform sums over increasing prefixes

Exit codes: 0 all requested checks pass, 1 mathematical violations found,
2 usage or malformed input.  Coordinates always serialize as decimal strings;
kicked coordinates overflow any float.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from .construct import build_intermediate_spectrum, family_variants, t_max
from .dimension import (
    beurling_dim_estimate,
    entropy_dim_closed_form,
    geometric_scales,
    support_hausdorff_dim,
)
from .lattice import MatrixParams, SymVec
from .treemap import (
    CanonicalMapping,
    KickedMapping,
    SpectrumPoint,
    SpectrumPrefix,
    TableOffsets,
    enumerate_spectrum,
    level_index_bound,
)
from .verify import (
    SamplingBox,
    check_distinct_lines,
    check_orthogonality,
    check_projection_orthogonality,
    gram_unitarity,
    q_sum,
)

USAGE_ERROR = 2
VIOLATION = 1

# kicked coordinates run to hundreds of thousands of digits
if hasattr(sys, "set_int_max_str_digits"):
    sys.set_int_max_str_digits(0)


class InputError(Exception):
    """Malformed input file or inconsistent flags (exit code 2)."""


def _params(args) -> MatrixParams:
    return MatrixParams(args.q1, args.q2)


def _parse_vec(text: str) -> tuple[int, int]:
    try:
        x, y = (int(part) for part in text.split(","))
    except ValueError as exc:
        raise InputError(f"expected 'X,Y' integers, got {text!r}") from exc
    return (x, y)


def _parse_offsets(text: str) -> dict[int, int]:
    table = {}
    for chunk in text.split(","):
        try:
            k, m = chunk.split(":")
            table[int(k)] = int(m)
        except ValueError as exc:
            raise InputError(f"expected 'k:m' pairs, got {chunk!r}") from exc
    return table


def _echo_config(args) -> None:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k != "func" and v is not None}
    print("config: " + json.dumps(cfg, default=str), file=sys.stderr)


# ---------------------------------------------------------------------------
# Point generation and (de)serialization
# ---------------------------------------------------------------------------


def _add_gen_flags(sub, require_bound=True):
    sub.add_argument("--q1", type=int, required=True)
    sub.add_argument("--q2", type=int, required=True)
    sub.add_argument("--level", type=int, help="include all words of length <= level")
    sub.add_argument("--range", type=int, dest="index_range", help="include |k| <= range")
    sub.add_argument("--construct-t", type=float, dest="construct_t",
                     help="build the intermediate-dimension family at this t")
    sub.add_argument("--kick", type=str, help="kick digit X,Y (default (q1/4,-q2/4))")
    sub.add_argument("--mode", choices=("coherent", "literal"), default="coherent")
    sub.add_argument("--variant-bits", type=str, default="",
                     help="bit string cycling over kicked indices, e.g. 0101")
    sub.add_argument("--offsets", type=str,
                     help="explicit kick offsets as k:m[,k:m...] (plain kicked mapping)")
    sub.add_argument("--seed", type=int, default=0)


def _prefix_from_args(args) -> SpectrumPrefix:
    p = _params(args)
    if args.level is None and args.index_range is None:
        raise InputError("one of --level / --range is required")
    bound = args.index_range if args.index_range is not None else level_index_bound(args.level)
    kick = _parse_vec(args.kick) if args.kick else None
    bits = tuple(int(c) for c in args.variant_bits) if args.variant_bits else ()
    if args.construct_t is not None:
        spec = build_intermediate_spectrum(
            args.construct_t, p, kick=kick, mode=args.mode, variant_bits=bits
        )
        return spec.prefix(bound)
    if args.offsets:
        mapping = KickedMapping(TableOffsets(_parse_offsets(args.offsets)),
                                kick=kick, mode=args.mode)
        return enumerate_spectrum(mapping, p, index_bound=bound)
    return enumerate_spectrum(CanonicalMapping(), p, index_bound=bound)


def _point_record(pt: SpectrumPoint, p: MatrixParams) -> dict:
    x, y = pt.value.materialize(p)
    return {
        "k": pt.k,
        "word": list(pt.word),
        "lambda": [str(x), str(y)],
        "kick_position": pt.kick_position,
    }


def _write_points(prefix: SpectrumPrefix, fmt: str, out) -> None:
    p = prefix.params
    if fmt == "jsonl":
        for pt in prefix.points:
            out.write(json.dumps(_point_record(pt, p)) + "\n")
        return
    writer = csv.writer(out)
    writer.writerow(["k", "word", "x", "y", "kick_position"])
    for pt in prefix.points:
        x, y = pt.value.materialize(p)
        word = " ".join(str(letter) for letter in pt.word)
        kick = "" if pt.kick_position is None else pt.kick_position
        writer.writerow([pt.k, word, str(x), str(y), kick])


def _read_points(path: str, p: MatrixParams) -> list[SpectrumPoint]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(str(exc)) from exc
    text = text.strip()
    if not text:
        raise InputError(f"{path}: empty input")
    if text.lstrip().startswith("{"):
        return _read_jsonl(text, path)
    return _read_csv(text, path)


def _read_jsonl(text: str, path: str) -> list[SpectrumPoint]:
    points = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            k = int(rec["k"])
            word = tuple(int(i) for i in rec.get("word", []))
            x, y = (int(s) for s in rec["lambda"])
            kick = rec.get("kick_position")
        except (ValueError, KeyError, TypeError) as exc:
            raise InputError(f"{path}:{lineno}: bad record ({exc})") from exc
        points.append(SpectrumPoint(k=k, word=word, value=SymVec(base=(x, y)),
                                    kick_position=kick))
    if not points:
        raise InputError(f"{path}: no records")
    return points


def _read_csv(text: str, path: str) -> list[SpectrumPoint]:
    points = []
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or "x" not in reader.fieldnames:
        raise InputError(f"{path}: not a point CSV (need k,word,x,y header)")
    for lineno, rec in enumerate(reader, start=2):
        try:
            k = int(rec["k"])
            word = tuple(int(t) for t in (rec.get("word") or "").split())
            x, y = int(rec["x"]), int(rec["y"])
            kick = rec.get("kick_position") or None
            kick = int(kick) if kick is not None else None
        except (ValueError, KeyError, TypeError) as exc:
            raise InputError(f"{path}:{lineno}: bad record ({exc})") from exc
        points.append(SpectrumPoint(k=k, word=word, value=SymVec(base=(x, y)),
                                    kick_position=kick))
    if not points:
        raise InputError(f"{path}: no records")
    return points


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_gen(args) -> int:
    _echo_config(args)
    prefix = _prefix_from_args(args)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as out:
            _write_points(prefix, args.format, out)
    else:
        _write_points(prefix, args.format, sys.stdout)
    return 0


def cmd_verify(args) -> int:
    _echo_config(args)
    p = _params(args)
    if args.input:
        points = _read_points(args.input, p)
        prefix = points
    else:
        prefix = _prefix_from_args(args)
        points = list(prefix.points)
    checks = args.checks.split(",") if args.checks else ["orthogonality", "lines", "projections"]
    failed = False
    if "orthogonality" in checks:
        rep = check_orthogonality(points, p, seed=args.seed)
        print(f"orthogonality: pairs={rep.pairs_checked} sampled={rep.sampled} "
              f"violations={len(rep.violations)}")
        for v in rep.violations[:20]:
            print(f"  violation k={v.k1},k'={v.k2} reason={v.reason} diff={v.difference}")
        failed |= not rep.passed
    if "lines" in checks:
        rep = check_distinct_lines(points, p)
        print(f"distinct-lines: shared_x={len(rep.shared_x)} shared_y={len(rep.shared_y)}")
        for pair in (list(rep.shared_x) + list(rep.shared_y))[:20]:
            print(f"  shared coordinate between k={pair[0]} and k={pair[1]}")
        failed |= not rep.passed
    if "projections" in checks:
        rep = check_projection_orthogonality(points, p, seed=args.seed)
        print(f"projections: x_violations={len(rep.x_violations)} "
              f"y_violations={len(rep.y_violations)}")
        failed |= not rep.passed
    if args.unitarity is not None:
        n = args.unitarity
        bound = level_index_bound(n)
        slice_pts = [pt for pt in points if abs(pt.k) <= bound]
        dev = gram_unitarity(n, slice_pts, p)
        print(f"unitarity n={n}: max deviation {dev:.3e}")
        failed |= dev > args.tolerance
    if args.qsum:
        box = SamplingBox.for_params(p)
        for xi in box.samples(args.qsum, seed=args.seed):
            res = q_sum(xi, points, p)
            print(f"qsum xi=({xi[0]:+.4f},{xi[1]:+.4f}): value={res.value:.9f} "
                  f"err<{res.error:.2e}")
            failed |= res.value > 1 + 1e-9
    return VIOLATION if failed else 0


def cmd_dim(args) -> int:
    _echo_config(args)
    p = _params(args)
    ent = entropy_dim_closed_form(p)
    references = {
        "upper_bound": math.log(3) / math.log(p.base_y),
        "entropy_dim": ent.dim_mu,
        "entropy_dim_x": ent.dim_x,
        "support_hausdorff_dim": support_hausdorff_dim(p),
    }
    if args.closed_forms_only:
        print(json.dumps({"references": references}))
        return 0
    if args.input:
        points = _read_points(args.input, p)
    else:
        points = list(_prefix_from_args(args).points)
    try:
        j_lo, j_hi = (int(s) for s in args.scale_exps.split(":"))
    except ValueError as exc:
        raise InputError(f"--scale-exps expects LO:HI, got {args.scale_exps!r}") from exc
    scales = geometric_scales(p, j_lo, j_hi)
    est = beurling_dim_estimate(points, scales, p, centers=args.centers, seed=args.seed)
    if args.format == "csv":
        writer = csv.writer(sys.stdout)
        writer.writerow(["h", "count", "log_h", "log_count"])
        for h, c in zip(est.scales, est.counts):
            writer.writerow([h, c, math.log(h), math.log(c)])
        print(f"slope={est.slope:.5f} references={json.dumps(references)}", file=sys.stderr)
    else:
        for h, c in zip(est.scales, est.counts):
            print(json.dumps({"h": str(h), "count": c,
                              "log_h": math.log(h), "log_count": math.log(c)}))
        print(json.dumps({"slope": est.slope, "fit_residual": est.fit_residual,
                          "references": references}))
    return 0


def cmd_construct(args) -> int:
    _echo_config(args)
    p = _params(args)
    kick = _parse_vec(args.kick) if args.kick else None
    specs = family_variants(args.t, p, args.count, seed=args.seed, kick=kick)
    for i, spec in enumerate(specs):
        desc = spec.describe()
        desc["variant"] = i
        desc["t_max"] = t_max(p)
        print(json.dumps(desc))
    if args.index_range is not None:
        for i, spec in enumerate(specs):
            prefix = spec.prefix(args.index_range)
            path = args.points_prefix + f".variant{i}.jsonl"
            with open(path, "w", encoding="utf-8") as out:
                _write_points(prefix, "jsonl", out)
            print(json.dumps({"variant": i, "points_file": path}))
    return 0


def cmd_qsum(args) -> int:
    _echo_config(args)
    p = _params(args)
    box = SamplingBox.for_params(p)
    if args.xi:
        xis = [_parse_vec_float(args.xi)]
    else:
        xis = box.samples(args.num_xi, seed=args.seed)
    mapping = CanonicalMapping()
    failed = False
    for xi in xis:
        prev = -1.0
        for n in range(1, args.n_max + 1):
            prefix = enumerate_spectrum(mapping, p, level=n)
            res = q_sum(xi, prefix)
            gap = 1.0 - res.value
            print(json.dumps({"xi": list(xi), "n": n, "q": res.value,
                              "gap": gap, "err": res.error}))
            failed |= res.value > 1 + 1e-9 or res.value < prev - 1e-9
            prev = res.value
    return VIOLATION if failed else 0


def _parse_vec_float(text: str) -> tuple[float, float]:
    try:
        x, y = (float(part) for part in text.split(","))
    except ValueError as exc:
        raise InputError(f"expected 'X,Y' floats, got {text!r}") from exc
    return (x, y)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spectra",
        description="Construct, certify and measure spectra of Sierpinski-type "
                    "self-affine measures.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    gen = subs.add_parser("gen", help="generate spectrum points")
    _add_gen_flags(gen)
    gen.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")
    gen.add_argument("--output", type=str)
    gen.set_defaults(func=cmd_gen)

    ver = subs.add_parser("verify", help="exact checks on generated or loaded points")
    _add_gen_flags(ver)
    ver.add_argument("--input", type=str, help="points file from gen (jsonl or csv)")
    ver.add_argument("--checks", type=str,
                     help="comma list: orthogonality,lines,projections")
    ver.add_argument("--unitarity", type=int, metavar="N",
                     help="also check level-N unitarity on the |k| <= (3^N-1)/2 slice")
    ver.add_argument("--qsum", type=int, metavar="COUNT",
                     help="also evaluate q-sums at COUNT sampled frequencies")
    ver.add_argument("--tolerance", type=float, default=1e-9)
    ver.set_defaults(func=cmd_verify)

    dim = subs.add_parser("dim", help="dimension table and closed forms")
    _add_gen_flags(dim)
    dim.add_argument("--input", type=str)
    dim.add_argument("--scale-exps", type=str, default="4:10",
                     help="scale window LO:HI in powers of 3*q2")
    dim.add_argument("--centers", type=str, default="sample:64")
    dim.add_argument("--closed-forms-only", action="store_true")
    dim.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")
    dim.set_defaults(func=cmd_dim)

    con = subs.add_parser("construct", help="intermediate-dimension families")
    con.add_argument("--q1", type=int, required=True)
    con.add_argument("--q2", type=int, required=True)
    con.add_argument("--t", type=float, required=True)
    con.add_argument("--count", type=int, default=1)
    con.add_argument("--seed", type=int, default=0)
    con.add_argument("--kick", type=str)
    con.add_argument("--range", type=int, dest="index_range",
                     help="also write per-variant point files up to |k| <= range")
    con.add_argument("--points-prefix", type=str, default="lambda_t")
    con.set_defaults(func=cmd_construct)

    qs = subs.add_parser("qsum", help="quadratic sums over increasing prefixes")
    qs.add_argument("--q1", type=int, required=True)
    qs.add_argument("--q2", type=int, required=True)
    qs.add_argument("--n-max", type=int, default=4)
    qs.add_argument("--num-xi", type=int, default=5)
    qs.add_argument("--xi", type=str, help="single frequency X,Y instead of samples")
    qs.add_argument("--seed", type=int, default=0)
    qs.set_defaults(func=cmd_qsum)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
