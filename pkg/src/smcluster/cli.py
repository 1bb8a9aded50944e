"""Command line entry point: ``smc run | sweep | bench | synth``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path

from .dataset_io import SyntheticSpec, generate_synthetic, save_dataset
from .pipeline import (
    PipelineConfig,
    bench_scaling,
    rows_to_csv,
    run_pipeline,
    sweep,
    write_outputs,
)

log = logging.getLogger("smcluster")

# CLI flag name -> PipelineConfig field
_FLAG_FIELDS = {
    "data": "data",
    "mode": "mode",
    "k": "k",
    "mu": "mu",
    "alpha": "alpha",
    "anchors": "m",
    "gamma": "gamma",
    "clusters": "g",
    "knn": "k_nn",
    "seed": "seed",
    "restarts": "restarts",
    "standardize": "standardize",
    "normalize_z": "normalize_z",
    "normalize_q": "normalize_q",
    "symmetrize": "symmetrize",
    "out": "out",
    "save_embedding": "save_embedding",
    "dump_z": "dump_z",
}

_GRID_NAMES = {"k": "k", "mu": "mu", "alpha": "alpha", "anchors": "m", "m": "m",
               "gamma": "gamma", "knn": "k_nn", "k_nn": "k_nn"}
_INT_PARAMS = {"k", "m", "k_nn"}


def _add_pipeline_flags(p: argparse.ArgumentParser):
    src = p.add_mutually_exclusive_group()
    src.add_argument("--data", metavar="DIR", help="dataset directory with manifest.json")
    src.add_argument("--synth", metavar="SPEC.json", help="synthetic dataset spec (JSON)")
    p.add_argument("--config", metavar="FILE.json", help="config file; flags override it")
    p.add_argument("--mode", choices=["auto", "feature", "graph"])
    p.add_argument("--k", type=int, help="filter order")
    p.add_argument("--mu", type=float, help="filter parameter")
    p.add_argument("--alpha", type=float, help="ridge weight of the anchor model")
    p.add_argument("--anchors", type=int, help="anchor count m")
    p.add_argument("--gamma", type=float, help="sampling sharpness")
    p.add_argument("--clusters", type=int, help="cluster count g")
    p.add_argument("--knn", type=int, help="neighbors per node for feature-only data")
    p.add_argument("--seed", type=int)
    p.add_argument("--restarts", type=int, help="K-means restarts on the embedding")
    for flag in ("standardize", "normalize-z", "normalize-q", "symmetrize",
                 "save-embedding", "dump-z"):
        p.add_argument(f"--{flag}", action="store_const", const=True, default=None)
    p.add_argument("--out", metavar="DIR", help="output directory")


def _build_config(args) -> PipelineConfig:
    base: dict = {}
    if args.config:
        base = json.loads(Path(args.config).read_text())
    for flag, name in _FLAG_FIELDS.items():
        val = getattr(args, flag, None)
        if val is not None:
            base[name] = val
    if args.synth:
        base["synth"] = json.loads(Path(args.synth).read_text())
        base.pop("data", None)
    elif args.data:
        base.pop("synth", None)
    grids = dict(base.pop("grids", {}) or {})
    for item in getattr(args, "grid", None) or []:
        name, _, values = item.partition("=")
        if name not in _GRID_NAMES or not values:
            raise SystemExit(f"bad --grid {item!r}; use NAME=v1,v2 with NAME in {sorted(_GRID_NAMES)}")
        field = _GRID_NAMES[name]
        cast = int if field in _INT_PARAMS else float
        grids[field] = [cast(v) for v in values.split(",") if v]
    base["grids"] = {_GRID_NAMES.get(k, k): v for k, v in grids.items()}
    return PipelineConfig.from_dict(base)


def _cmd_run(args) -> int:
    cfg = _build_config(args)
    report = run_pipeline(cfg)
    out = Path(cfg.out or "smc_out")
    write_outputs(report, out)
    if report.metrics is not None:
        m = report.metrics
        print(f"ACC={m.acc:.4f} NMI={m.nmi:.4f} PUR={m.purity:.4f} F1={m.f1:.4f} ARI={m.ari:.4f}")
    print(f"wrote {out}")
    return 0


def _cmd_sweep(args) -> int:
    cfg = _build_config(args)
    rows = sweep(cfg)
    out = Path(cfg.out or "smc_out")
    out.mkdir(parents=True, exist_ok=True)
    rows_to_csv(rows, out / "sweep.csv")
    print(f"{len(rows)} cells -> {out / 'sweep.csv'}")
    return 0


def _spec_from_args(args) -> SyntheticSpec:
    spec = json.loads(Path(args.synth).read_text()) if args.synth else {}
    for name in ("n", "v", "g", "d", "separation", "p_in", "p_out"):
        val = getattr(args, f"s_{name}", None)
        if val is not None:
            spec[name] = val
    if getattr(args, "seed", None) is not None:
        spec["seed"] = args.seed
    return SyntheticSpec.from_dict(spec)


def _cmd_bench(args) -> int:
    cfg = _build_config(args)
    base = SyntheticSpec.from_dict(cfg.synth) if cfg.synth else SyntheticSpec()
    sizes = [int(s) for s in args.sizes.split(",")]
    rows = bench_scaling(sizes, base, cfg, repeats=args.repeats,
                         fixed_degree=not args.fixed_density)
    out = Path(cfg.out or "smc_out")
    out.mkdir(parents=True, exist_ok=True)
    rows_to_csv(rows, out / "bench.csv")
    for r in rows:
        print(f"n={r['n']:>7d}  {r['seconds']:.3f}s  nnz={r['nnz']}")
    return 0


def _cmd_synth(args) -> int:
    spec = _spec_from_args(args)
    data = generate_synthetic(spec)
    out = save_dataset(data, args.out)
    (out / "spec.json").write_text(json.dumps(asdict(spec), indent=2) + "\n")
    print(f"wrote n={data.n} v={data.v} g={data.g} -> {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="smc", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="cluster one dataset")
    _add_pipeline_flags(p)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("sweep", help="grid over parameters, one run per cell")
    _add_pipeline_flags(p)
    p.add_argument("--grid", action="append", metavar="NAME=v1,v2,...",
                   help="parameter grid (k, mu, alpha, anchors, gamma, knn); repeatable")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("bench", help="wall-clock scaling on synthetic graph data")
    _add_pipeline_flags(p)
    p.add_argument("--sizes", default="2000,4000", help="comma-separated ascending n")
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--fixed-density", action="store_true",
                   help="keep p_in/p_out fixed instead of the expected degree")
    p.set_defaults(func=_cmd_bench, mode="graph")

    p = sub.add_parser("synth", help="write a synthetic dataset to disk")
    p.add_argument("--synth", metavar="SPEC.json")
    p.add_argument("--n", dest="s_n", type=int)
    p.add_argument("--views", dest="s_v", type=int)
    p.add_argument("--clusters", dest="s_g", type=int)
    p.add_argument("--dim", dest="s_d", type=int)
    p.add_argument("--separation", dest="s_separation", type=float)
    p.add_argument("--p-in", dest="s_p_in", type=float)
    p.add_argument("--p-out", dest="s_p_out", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True, metavar="DIR")
    p.set_defaults(func=_cmd_synth)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
