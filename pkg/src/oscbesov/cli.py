"""Command line interface.

Subcommands: transform, norm, blocks, paraproduct, heat, rates, equiv,
maxreg, kernels, verify.  All accept --config (YAML, built-in defaults when
omitted), --format {csv,json} and --seed.  Exit codes: 0 pass, 1 budget
violation, 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import besov as bz
from . import calculus as ca
from . import paraproduct as pp
from . import semigroup as sg
from .checks import CheckContext, CHECK_REGISTRY, run_suite
from .config import ConfigError, ExperimentConfig, load_config
from .corpus import generate_corpus
from .hermite import GridFunction, HermiteBasis, SpectralCoefficients, analyze, synthesize
from .io import (
    load_coeffs_csv,
    load_grid_csv,
    read_container,
    save_coeffs_csv,
    save_grid_csv,
    write_container,
)
from .report import FLAG_INFO, ExperimentReport

INF = math.inf


def _index(text: str) -> float:
    if text.lower() in ("inf", "infinity", "oo"):
        return INF
    return float(text)


def _env(cfg: ExperimentConfig):
    basis = HermiteBasis(cfg.d, cfg.N)
    partition = ca.build_partition(cfg.d)
    corpus = generate_corpus(cfg.corpus, basis, cfg.seed)
    return basis, partition, corpus


def _emit(report: ExperimentReport, fmt: str) -> None:
    text = report.to_csv_text() if fmt == "csv" else report.to_json_text()
    sys.stdout.write(text)


def _load_input(path: Path):
    if path.suffix in (".bin", ".hbsv"):
        return read_container(path)
    with open(path, newline="") as fh:
        header = fh.readline()
    if header.startswith("n"):
        return load_coeffs_csv(path)
    return load_grid_csv(path)


def cmd_transform(cfg: ExperimentConfig, args) -> int:
    obj = _load_input(Path(args.input))
    report = ExperimentReport(cfg.canonical_hash())
    out = Path(args.out)
    binary = out.suffix in (".bin", ".hbsv")
    if isinstance(obj, SpectralCoefficients):
        gf = synthesize(obj)
        back = analyze(gf, obj.basis)
        err = float(np.max(np.abs(back.coeffs - obj.coeffs)))
        write_container(out, gf) if binary else save_grid_csv(out, gf)
        report.add("transform:synthesize_roundtrip", err, flag=FLAG_INFO)
    elif isinstance(obj, GridFunction):
        basis = HermiteBasis(cfg.d, cfg.N)
        coeffs = analyze(obj, basis)
        gf = synthesize(coeffs, obj.grid)
        err = float(np.max(np.abs(gf.values - obj.values)))
        write_container(out, coeffs) if binary else save_coeffs_csv(out, coeffs)
        report.add("transform:analyze_residual", err, flag=FLAG_INFO)
    else:
        raise ConfigError("transform expects coefficient or grid data")
    _emit(report, args.format)
    return 0


def cmd_norm(cfg: ExperimentConfig, args) -> int:
    basis, partition, corpus = _env(cfg)
    f = corpus.get(args.f)
    params = bz.BesovParams(args.s, _index(args.p), _index(args.q))
    value, profile = bz.besov_norm(f, partition, params)
    report = ExperimentReport(cfg.canonical_hash())
    report.add("norm:besov", value, f_id=args.f,
               params={"s": args.s, "p": args.p, "q": args.q})
    for j, raw, weighted in zip(profile.js, profile.block_lp, profile.weighted):
        report.add("norm:block", weighted, f_id=args.f,
                   params={"j": int(j), "lp": raw}, flag=FLAG_INFO)
    _emit(report, args.format)
    return 0


def cmd_blocks(cfg: ExperimentConfig, args) -> int:
    basis, partition, corpus = _env(cfg)
    f = corpus.get(args.f)
    report = ExperimentReport(cfg.canonical_hash())
    for p in (1.0, 2.0, INF):
        js, norms = bz.block_profile(f, partition, p)
        for j, val in zip(js, norms):
            report.add("blocks:lp", val, f_id=args.f,
                       params={"j": int(j), "p": p}, flag=FLAG_INFO)
    _emit(report, args.format)
    return 0


def cmd_paraproduct(cfg: ExperimentConfig, args) -> int:
    basis, partition, corpus = _env(cfg)
    f = corpus.get(args.f)
    g = corpus.get(args.g)
    pieces = pp.bony_decompose(f, g, partition)
    report = ExperimentReport(cfg.canonical_hash())
    for name, c in (("low_high", pieces.low_high), ("high_low", pieces.high_low),
                    ("resonant", pieces.resonant), ("product", pieces.full)):
        report.add(f"paraproduct:{name}_l2", c.l2_norm(),
                   f_id=args.f, g_id=args.g, flag=FLAG_INFO)
    report.add("paraproduct:completeness_residual",
               pieces.completeness_residual(), f_id=args.f, g_id=args.g,
               flag=FLAG_INFO)
    _emit(report, args.format)
    return 0


def cmd_heat(cfg: ExperimentConfig, args) -> int:
    basis, partition, corpus = _env(cfg)
    f = corpus.get(args.f)
    flowed = sg.heat_apply(args.t, f)
    report = ExperimentReport(cfg.canonical_hash())
    gf = synthesize(flowed)
    for p in (1.0, 2.0, INF):
        report.add("heat:lp_norm", bz.lp_norm(gf, p), f_id=args.f,
                   params={"p": p, "t": args.t}, flag=FLAG_INFO)
    for s, p, q in ((0.0, 2.0, 2.0), (1.0, 2.0, 2.0), (0.0, INF, INF)):
        val, _ = bz.besov_norm(flowed, partition, bz.BesovParams(s, p, q))
        report.add("heat:besov_norm", val, f_id=args.f,
                   params={"s": s, "p": p, "q": q, "t": args.t}, flag=FLAG_INFO)
    _emit(report, args.format)
    return 0


def cmd_kernels(cfg: ExperimentConfig, args) -> int:
    basis = HermiteBasis(1, cfg.N)
    partition = ca.build_partition(1)
    grid = basis.default_grid(cfg.grid_spacing, cfg.grid_buffer)
    kern = ca.multiplier_kernel(partition.block_symbol(args.j), basis, grid)
    report = ExperimentReport(cfg.canonical_hash())
    report.add("kernels:l1_norm", ca.operator_norm(kern, 1.0),
               params={"j": args.j, "resolved": kern.resolved}, flag=FLAG_INFO)
    report.add("kernels:linf_norm", ca.operator_norm(kern, INF),
               params={"j": args.j, "resolved": kern.resolved}, flag=FLAG_INFO)
    if args.out:
        write_container(Path(args.out), kern)
    _emit(report, args.format)
    return 0


def _run_groups(cfg: ExperimentConfig, names: tuple[str, ...], fmt: str) -> int:
    report = ExperimentReport(cfg.canonical_hash())
    ctx = CheckContext(cfg, report)
    for entry in CHECK_REGISTRY:
        if entry.name in names:
            entry.fn(ctx)
    report.finish_summary()
    _emit(report, fmt)
    return 1 if report.violations() else 0


def cmd_rates(cfg: ExperimentConfig, args) -> int:
    return _run_groups(cfg, ("rates",), args.format)


def cmd_equiv(cfg: ExperimentConfig, args) -> int:
    return _run_groups(cfg, ("equivalence",), args.format)


def cmd_maxreg(cfg: ExperimentConfig, args) -> int:
    return _run_groups(cfg, ("maxreg",), args.format)


def cmd_verify(cfg: ExperimentConfig, args) -> int:
    report, status = run_suite(cfg)
    outdir = Path(cfg.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    fmt = args.format or cfg.output_format
    report.write(outdir / f"report.{fmt}", fmt)
    _emit(report, fmt)
    return status


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oscbesov",
        description="Dyadic spectral calculus and Besov-space verification "
                    "suite for the harmonic oscillator")
    parser.add_argument("--config", default=None, help="YAML configuration file")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the configured master seed")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("transform", help="analyze/synthesize round trip on a file")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_transform)

    p = sub.add_parser("norm", help="Besov norm and block profile of a member")
    p.add_argument("--f", required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--p", required=True)
    p.add_argument("--q", required=True)
    p.set_defaults(fn=cmd_norm)

    p = sub.add_parser("blocks", help="per-block L^p table of a member")
    p.add_argument("--f", required=True)
    p.set_defaults(fn=cmd_blocks)

    p = sub.add_parser("paraproduct", help="Bony pieces and completeness residual")
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    p.set_defaults(fn=cmd_paraproduct)

    p = sub.add_parser("heat", help="norm table after heat flow")
    p.add_argument("--f", required=True)
    p.add_argument("--t", type=float, required=True)
    p.set_defaults(fn=cmd_heat)

    p = sub.add_parser("rates", help="smoothing-rate fits")
    p.set_defaults(fn=cmd_rates)

    p = sub.add_parser("equiv", help="semigroup norm equivalence ratios")
    p.set_defaults(fn=cmd_equiv)

    p = sub.add_parser("maxreg", help="maximal regularity ratios")
    p.set_defaults(fn=cmd_maxreg)

    p = sub.add_parser("kernels", help="dyadic multiplier kernel and its norms")
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--out", default=None, help="optional container output path")
    p.set_defaults(fn=cmd_kernels)

    p = sub.add_parser("verify", help="run the full verification suite")
    p.set_defaults(fn=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg = cfg.with_seed(args.seed)
        return args.fn(cfg, args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
