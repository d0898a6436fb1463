"""Command-line interface.

Subcommands: sample, spectrum, distance, trace-stat, sweep, fit, check.
Exit codes: 0 success, 1 check failure, 2 usage error, 3 validation error.
"""
from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import __version__
from .config import load_config
from .matrices import (
    ConfigurationError,
    MatrixKind,
    ScaleShift,
    apply_scale_shift,
    build,
    write_triplets,
)
from .metrics import DistanceReport, bl_upper_bound, ks_distance, ks_to_semicircle, w1_equal_size, w1_to_semicircle
from .models import (
    ChungLuSpec,
    ErSpec,
    Provenance,
    ValidationError,
    parse_profile_label,
    read_edgelist,
    read_weights,
    replicate_stream,
    sample_chung_lu,
    sample_er,
    weights_from_profile,
    write_edgelist,
)
from .spectra import eigvals_sym, write_spectrum_csv
from .stats import CellSummary, fit_decay, trace_stat_chung_lu, trace_stat_er
from .sweep import read_summary_csv, run_sweep

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_VALIDATION = 3

MATRIX_CHOICES = tuple(kind.value for kind in MatrixKind)


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (ValidationError, ConfigurationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="speclaw",
        description="Random-graph spectra vs the semicircle law: samplers, "
                    "distances, trace statistics, and Monte-Carlo sweeps.",
    )
    parser.add_argument("--version", action="version", version=f"speclaw {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="sample one graph and write an edge list")
    _add_model_flags(p)
    p.add_argument("--out", required=True, help="edge-list output path")
    p.set_defaults(handler=_cmd_sample)

    p = sub.add_parser("spectrum", help="eigenvalue CSV (and optional SVG histogram)")
    _add_graph_source_flags(p)
    p.add_argument("--matrix", required=True, choices=MATRIX_CHOICES)
    p.add_argument("--scale", choices=("theorem-er", "theorem-cl", "none"), default="none",
                   help="affine spectral rescaling, calibrated for the normalized Laplacian")
    p.add_argument("--out", required=True, help="CSV output path")
    p.add_argument("--svg", help="also write a density histogram with semicircle overlay")
    p.add_argument("--bins", type=int, help="histogram bin count (default Freedman-Diaconis)")
    p.add_argument("--dump-matrix", help="write lower-triangle 'i j value' triplets here")
    p.set_defaults(handler=_cmd_spectrum)

    p = sub.add_parser("distance", help="distances between two spectra (or vs the semicircle)")
    _add_graph_source_flags(p)
    p.add_argument("--a", required=True, choices=MATRIX_CHOICES, help="first matrix kind")
    p.add_argument("--b", required=True, choices=MATRIX_CHOICES + ("semicircle",),
                   help="second matrix kind, or 'semicircle'")
    p.add_argument("--scale", choices=("theorem-er", "theorem-cl", "none"), default="none",
                   help="rescaling applied to --a for semicircle comparisons")
    p.set_defaults(handler=_cmd_distance)

    p = sub.add_parser("trace-stat", help="edge-sum trace statistic for one sample")
    _add_model_flags(p)
    p.set_defaults(handler=_cmd_trace_stat)

    p = sub.add_parser("sweep", help="run a Monte-Carlo sweep from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--workers", type=int,
                   help="worker processes (also capped by SPECLAW_THREADS)")
    p.set_defaults(handler=_cmd_sweep)

    p = sub.add_parser("fit", help="decay-exponent fit over a sweep CSV")
    p.add_argument("--csv", required=True)
    p.add_argument("--mode", choices=("lemma1", "chunglu-key"), default="lemma1")
    p.set_defaults(handler=_cmd_fit)

    p = sub.add_parser("check", help="run the deterministic self-check suites")
    p.add_argument("--inject-fault", choices=("dbl-sign",), help=argparse.SUPPRESS)
    p.set_defaults(handler=_cmd_check)
    return parser


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", required=True, choices=("er", "cl"))
    p.add_argument("--n", type=int, help="vertex count (er, or cl with --profile)")
    p.add_argument("--p", type=float, help="edge probability (er)")
    p.add_argument("--weights", help="weight file, one positive decimal per line (cl)")
    p.add_argument("--profile", help="weight profile, e.g. ramp:15:45, const:30, "
                                     "two-block:10:50:0.5 (cl)")
    p.add_argument("--seed", type=int, required=True)


def _add_graph_source_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", choices=("er", "cl"), help="sample a fresh graph")
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=float, help="edge probability (er; also needed by "
                                           "proxy/semicircle-scaled kinds on --edgelist input)")
    p.add_argument("--weights", help="weight file (cl context)")
    p.add_argument("--profile", help="weight profile (cl context)")
    p.add_argument("--seed", type=int)
    p.add_argument("--edgelist", help="read the graph from an edge-list file instead")


def _parse_profile_flag(text: str, n: int) -> np.ndarray:
    parts = text.split(":")
    kind = parts[0]
    try:
        if kind in ("const", "constant"):
            return weights_from_profile(n, {"kind": "constant", "w": float(parts[1])})
        if kind == "ramp":
            return weights_from_profile(n, {"kind": "ramp", "wmin": float(parts[1]),
                                            "wmax": float(parts[2])})
        if kind == "two-block":
            return weights_from_profile(n, {"kind": "two-block", "wlo": float(parts[1]),
                                            "whi": float(parts[2]), "frac": float(parts[3])})
    except (IndexError, ValueError) as exc:
        raise ValidationError(f"bad profile {text!r}: {exc}") from None
    raise ValidationError(f"unknown profile kind {kind!r}")


def _resolve_model(args) -> tuple[ErSpec | ChungLuSpec, str]:
    if args.model == "er":
        if args.n is None or args.p is None:
            raise ValidationError("er model needs --n and --p")
        return ErSpec(args.n, args.p), "er"
    if args.weights:
        w = read_weights(args.weights)
    elif args.profile and args.n is not None:
        w = _parse_profile_flag(args.profile, args.n)
    else:
        raise ValidationError("cl model needs --weights FILE, or --profile with --n")
    return ChungLuSpec(w), "cl"


def _sample_from_args(args):
    spec, kind = _resolve_model(args)
    prov = Provenance(master_seed=args.seed, profile=args.profile)
    rng = replicate_stream(args.seed)
    if kind == "er":
        return sample_er(spec, rng, prov), spec
    return sample_chung_lu(spec, rng, prov), spec


def _graph_from_args(args):
    """Graph plus whatever model context the flags determine."""
    if args.edgelist:
        g = read_edgelist(args.edgelist)
        er_ctx = ErSpec(g.n, args.p) if args.p is not None else None
        cl_ctx = None
        if args.weights:
            cl_ctx = ChungLuSpec(read_weights(args.weights))
        elif args.profile:
            cl_ctx = ChungLuSpec(_parse_profile_flag(args.profile, g.n))
        return g, er_ctx, cl_ctx
    if not args.model:
        raise ValidationError("need either --edgelist or --model flags")
    if args.seed is None:
        raise ValidationError("sampling a graph needs --seed")
    g, spec = _sample_from_args(args)
    if isinstance(spec, ErSpec):
        return g, spec, None
    return g, None, spec


def _context_for(kind: MatrixKind, er_ctx, cl_ctx):
    from .matrices import CL_CONTEXT_KINDS, ER_CONTEXT_KINDS

    if kind in ER_CONTEXT_KINDS:
        if er_ctx is None:
            raise ValidationError(f"{kind.value} needs the edge probability (--p)")
        return er_ctx
    if kind in CL_CONTEXT_KINDS:
        if cl_ctx is None:
            raise ValidationError(f"{kind.value} needs weights (--weights/--profile)")
        return cl_ctx
    return None


def _scale_shift_for(scale: str, g, er_ctx, cl_ctx) -> ScaleShift:
    if scale == "theorem-er":
        if er_ctx is None:
            raise ValidationError("theorem-er scaling needs the edge probability (--p)")
        return ScaleShift.theorem_er(g.n, er_ctx.p)
    if scale == "theorem-cl":
        if cl_ctx is None:
            raise ValidationError("theorem-cl scaling needs weights (--weights/--profile)")
        return ScaleShift.theorem_cl(cl_ctx.w_bar)
    return ScaleShift(1.0, 0.0)


def _cmd_sample(args) -> int:
    g, _ = _sample_from_args(args)
    write_edgelist(g, args.out)
    degrees = g.degrees
    print(
        f"n={g.n} edges={g.edge_count} "
        f"min_degree={int(degrees.min()) if g.n else 0} "
        f"max_degree={int(degrees.max()) if g.n else 0} "
        f"isolated={g.isolated_count}"
    )
    return EXIT_OK


def _cmd_spectrum(args) -> int:
    g, er_ctx, cl_ctx = _graph_from_args(args)
    kind = MatrixKind(args.matrix)
    m = build(g, kind, _context_for(kind, er_ctx, cl_ctx))
    if args.scale != "none":
        m = apply_scale_shift(m, _scale_shift_for(args.scale, g, er_ctx, cl_ctx))
    if args.dump_matrix:
        write_triplets(m, args.dump_matrix)
    s = eigvals_sym(m)
    write_spectrum_csv(s, args.out)
    if args.svg:
        from .svgplot import histogram_svg

        title = f"{args.matrix} n={g.n} scale={args.scale}"
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(histogram_svg(s.values, bins=args.bins, title=title))
    print(f"n={s.n} lambda_min={s.values[0]:.6g} lambda_max={s.values[-1]:.6g} -> {args.out}")
    return EXIT_OK


def _cmd_distance(args) -> int:
    g, er_ctx, cl_ctx = _graph_from_args(args)
    kind_a = MatrixKind(args.a)
    ma = build(g, kind_a, _context_for(kind_a, er_ctx, cl_ctx))
    if args.b == "semicircle":
        if args.scale != "none":
            ma = apply_scale_shift(ma, _scale_shift_for(args.scale, g, er_ctx, cl_ctx))
        s = eigvals_sym(ma)
        report = DistanceReport(ks=ks_to_semicircle(s), w1=w1_to_semicircle(s))
    else:
        kind_b = MatrixKind(args.b)
        mb = build(g, kind_b, _context_for(kind_b, er_ctx, cl_ctx))
        sa, sb = eigvals_sym(ma), eigvals_sym(mb)
        report = DistanceReport(ks=ks_distance(sa, sb), w1=w1_equal_size(sa, sb),
                                bl_upper=bl_upper_bound(ma, mb))
    print(report.to_json())
    return EXIT_OK


def _cmd_trace_stat(args) -> int:
    g, spec = _sample_from_args(args)
    if isinstance(spec, ErSpec):
        ts = trace_stat_er(g, spec.p)
    else:
        ts = trace_stat_chung_lu(g, spec)
    print(
        "{"
        f'"t_value": {ts.t_value:.17g}, "u_n": {ts.u_n:.17g}, '
        f'"e1_fail_count": {ts.e1_fail_count}, "gamma_fail": {ts.gamma_fail}, '
        f'"isolated_count": {ts.isolated_count}'
        "}"
    )
    return EXIT_OK


def _cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    result = run_sweep(cfg, workers=args.workers)
    print(f"{len(result.cells)} cells -> {result.manifest_path.parent}")
    for path in result.output_paths:
        print(f"  {path.name}")
    return EXIT_OK


def _cmd_fit(args) -> int:
    rows = read_summary_csv(args.csv)
    if len(rows) < 3:
        raise ValidationError(f"need at least 3 cells in {args.csv}, got {len(rows)}")
    cells = [_cell_from_row(row) for row in rows]
    fit = fit_decay(cells, args.mode)
    print(fit.to_json())
    return EXIT_OK


def _cell_from_row(row: dict) -> CellSummary:
    w_min = math.nan
    label = row["schedule"]
    try:
        profile = parse_profile_label(label)
    except (ValidationError, KeyError, ValueError):
        profile = None
    if profile is not None:
        if profile["kind"] == "constant":
            w_min = profile["w"]
        elif profile["kind"] == "ramp":
            w_min = min(profile["wmin"], profile["wmax"])
        else:
            w_min = min(profile["wlo"], profile["whi"])
    nan = math.nan
    return CellSummary(
        n=int(row["n"]), schedule=label, p=float(row["p"]), u_n=float(row["u_n"]),
        replicates=int(row["R"]), mean_t=float(row["mean_t"]),
        var_t=nan, ci_lo_t=float(row["ci_lo_t"]), ci_hi_t=float(row["ci_hi_t"]),
        mean_ks=float(row["mean_ks"]), ci_lo_ks=float(row["ci_lo_ks"]),
        ci_hi_ks=float(row["ci_hi_ks"]), mean_w1=float(row["mean_w1"]),
        gamma_fail_count=0, p_gamma_fail=float(row["p_gamma_fail"]),
        gamma_ci=(nan, nan), chernoff_bound=float(row["chernoff_bound"]),
        isolated_exists_count=0, p_isolated=float(row["p_isolated"]),
        isolated_ci=(nan, nan), seed=int(row["seed"]), w_min=w_min,
    )


def _cmd_check(args) -> int:
    from .checks import run_checks

    ok, lines = run_checks(fault=args.inject_fault)
    for line in lines:
        print(line)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
