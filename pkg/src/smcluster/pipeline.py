"""End-to-end pipeline, parameter sweeps and the scaling benchmark."""

from __future__ import annotations

import csv
import io
import itertools
import json
import logging
import time
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from . import anchors as anchor_mod
from .dataset_io import MultiViewDataset, SyntheticSpec, generate_synthetic, load_dataset
from .embedding import cluster_embedding, normalize_rows, spectral_embed
from .graph_core import build_probabilistic_neighbor_graph, normalize
from .graph_filter import FilterConfig, filter_all_views
from .metrics import MetricsReport, evaluate
from .subspace import concat_views, normalize_columns, solve_view

log = logging.getLogger(__name__)

__all__ = [
    "PipelineConfig",
    "RunReport",
    "PipelineError",
    "resolve_dataset",
    "run_pipeline",
    "write_outputs",
    "sweep",
    "rows_to_csv",
    "bench_scaling",
    "MODE_DEFAULTS",
    "SWEEPABLE",
]

STAGES = ("graph", "filtering", "anchors", "subspace", "embedding", "kmeans")

# per-branch defaults for parameters left unset
MODE_DEFAULTS = {
    "feature": {"k": 1, "mu": 0.1, "alpha": 1.0},
    "graph": {"k": 2, "mu": 0.5, "alpha": 20.0},
}

SWEEPABLE = ("k", "mu", "alpha", "m", "gamma", "k_nn")


class PipelineError(RuntimeError):
    def __init__(self, stage: str, exc: Exception):
        super().__init__(f"[{stage}] {exc}")
        self.stage = stage


@dataclass
class PipelineConfig:
    data: str | None = None
    synth: dict | None = None
    mode: str = "auto"
    k: int | None = None
    mu: float | None = None
    alpha: float | None = None
    m: int = 100
    gamma: float = 2.0
    g: int | None = None
    k_nn: int = 5
    seed: int = 0
    restarts: int = 10
    standardize: bool = False
    normalize_z: bool = False
    normalize_q: bool = False
    symmetrize: bool = False
    out: str | None = None
    save_embedding: bool = False
    dump_z: bool = False
    grids: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.mode not in ("auto", "feature", "graph"):
            raise ValueError(f"unknown mode {self.mode!r}")
        unknown = set(self.grids) - set(SWEEPABLE)
        if unknown:
            raise ValueError(f"cannot sweep {sorted(unknown)}; choose from {SWEEPABLE}")

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineConfig":
        names = {f.name for f in fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    def resolved(self, mode: str, g: int) -> "PipelineConfig":
        defaults = MODE_DEFAULTS[mode]
        return replace(
            self,
            mode=mode,
            g=g,
            k=defaults["k"] if self.k is None else self.k,
            mu=defaults["mu"] if self.mu is None else self.mu,
            alpha=defaults["alpha"] if self.alpha is None else self.alpha,
        )


@dataclass
class RunReport:
    config: dict
    timings: dict
    labels: np.ndarray
    seed: int
    metrics: MetricsReport | None = None
    embedding: np.ndarray | None = field(default=None, repr=False)
    zbar: np.ndarray | None = field(default=None, repr=False)
    anchor_indices: np.ndarray | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        out = {
            "config": self.config,
            "timings": self.timings,
            "seed": self.seed,
            "n": int(self.labels.size),
            "metrics": self.metrics.to_dict() if self.metrics else None,
        }
        if self.anchor_indices is not None:
            out["anchor_indices"] = self.anchor_indices.tolist()
        return out


def resolve_dataset(cfg: PipelineConfig) -> MultiViewDataset:
    if (cfg.data is None) == (cfg.synth is None):
        raise ValueError("give exactly one of data directory or synthetic spec")
    if cfg.data is not None:
        return load_dataset(cfg.data, symmetrize=cfg.symmetrize)
    return generate_synthetic(SyntheticSpec.from_dict(cfg.synth))


def _standardize(X: np.ndarray) -> np.ndarray:
    sd = X.std(axis=0)
    sd[sd == 0] = 1.0
    return (X - X.mean(axis=0)) / sd


class _Stage:
    def __init__(self, name: str, timings: dict):
        self.name, self.timings = name, timings

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        self.timings[self.name] = time.perf_counter() - self.t0
        if exc is not None and not isinstance(exc, PipelineError):
            raise PipelineError(self.name, exc) from exc
        return False


def run_pipeline(cfg: PipelineConfig, data: MultiViewDataset | None = None) -> RunReport:
    """Run one clustering pass.

    Feature branch: neighbor graph per view, filter, K-means anchors per view.
    Graph branch: filter on the given graphs, one importance-sampled index set.
    Both then solve each view's ``Z``, embed ``[Z^1 ... Z^v]`` and run K-means.
    """
    if data is None:
        data = resolve_dataset(cfg)
    mode = cfg.mode
    if mode == "auto":
        mode = "graph" if data.has_graphs else "feature"
    if mode == "graph" and not data.has_graphs:
        raise ValueError("graph mode requested but the dataset has no graphs")
    g = cfg.g if cfg.g is not None else data.g
    if g is None:
        raise ValueError("cluster count unknown: dataset has no labels/clusters and g is unset")
    cfg = cfg.resolved(mode, g)

    timings = {s: 0.0 for s in STAGES}
    t_start = time.perf_counter()
    views = data.views
    if cfg.standardize:
        views = [_standardize(X) for X in views]

    with _Stage("graph", timings):
        if mode == "feature":
            graphs = [build_probabilistic_neighbor_graph(X, cfg.k_nn) for X in views]
        else:
            graphs = data.graphs
        ops = [normalize(G) for G in graphs]

    with _Stage("filtering", timings):
        filtered = filter_all_views(views, ops, FilterConfig(mu=cfg.mu, k=cfg.k))

    with _Stage("anchors", timings):
        if mode == "feature":
            aset = anchor_mod.anchors_by_kmeans(filtered, cfg.m, seed=cfg.seed)
        else:
            scfg = anchor_mod.SamplerConfig(m=cfg.m, gamma=cfg.gamma, seed=cfg.seed)
            p = anchor_mod.importance_probabilities(graphs, scfg.gamma)
            ind = anchor_mod.sample_without_replacement(p, scfg.m, seed=scfg.seed)
            aset = anchor_mod.build_anchor_matrices(filtered, ind)

    with _Stage("subspace", timings):
        zbar = concat_views([solve_view(X, B, cfg.alpha) for X, B in zip(filtered, aset.B)])
        if cfg.normalize_z:
            zbar = normalize_columns(zbar)

    with _Stage("embedding", timings):
        emb = spectral_embed(zbar, g)

    with _Stage("kmeans", timings):
        labels = cluster_embedding(
            emb, g, seed=cfg.seed, restarts=cfg.restarts, normalize=cfg.normalize_q
        )
    timings["total"] = time.perf_counter() - t_start

    metrics = evaluate(data.labels, labels) if data.labels is not None else None
    config = asdict(cfg)
    config.pop("grids")
    Q = normalize_rows(emb.Q) if cfg.normalize_q else emb.Q
    return RunReport(
        config=config,
        timings=timings,
        labels=labels,
        seed=cfg.seed,
        metrics=metrics,
        embedding=Q,
        zbar=zbar,
        anchor_indices=aset.indices,
    )


def write_outputs(report: RunReport, out) -> Path:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    np.savetxt(out / "labels.csv", report.labels, fmt="%d")
    if report.metrics is not None:
        (out / "metrics.json").write_text(json.dumps(report.metrics.to_dict(), indent=2) + "\n")
    (out / "report.json").write_text(json.dumps(report.to_dict(), indent=2) + "\n")
    if report.config.get("save_embedding"):
        _write_matrix(out / "embedding.csv", report.embedding, "q")
    if report.config.get("dump_z"):
        _write_matrix(out / "zbar.csv", report.zbar, "z")
    return out


def _write_matrix(path: Path, M: np.ndarray, prefix: str):
    header = ",".join(f"{prefix}{j}" for j in range(M.shape[1]))
    np.savetxt(path, M, delimiter=",", header=header, comments="", fmt="%.17g")


METRIC_COLUMNS = ("acc", "nmi", "purity", "f1", "ari")


def sweep(cfg: PipelineConfig, data: MultiViewDataset | None = None) -> list[dict]:
    """One run per cell of the Cartesian product of ``cfg.grids``.

    Cell ``i`` (in grid order) uses seed ``cfg.seed + i``. A failing cell is
    recorded with its error message and the sweep carries on.
    """
    grids = {k: list(v) for k, v in cfg.grids.items() if v is not None}
    if not grids or any(len(v) == 0 for v in grids.values()):
        raise ValueError("no sweep parameters")
    if data is None:
        data = resolve_dataset(cfg)
    names = list(grids)
    rows = []
    for i, values in enumerate(itertools.product(*(grids[k] for k in names))):
        cell = dict(zip(names, values))
        row = {"run": i, "seed": cfg.seed + i, **cell}
        try:
            rep = run_pipeline(replace(cfg, grids={}, seed=cfg.seed + i, **cell), data)
            for k in METRIC_COLUMNS:
                row[k] = getattr(rep.metrics, k) if rep.metrics else None
            row["seconds"] = rep.timings["total"]
            row["error"] = ""
        except Exception as exc:  # noqa: BLE001 - recorded per cell
            log.warning("sweep cell %s failed: %s", cell, exc)
            row.update({k: None for k in METRIC_COLUMNS})
            row["seconds"] = None
            row["error"] = str(exc)
        rows.append(row)
    return rows


def rows_to_csv(rows: list[dict], path=None) -> str:
    buf = io.StringIO()
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow({k: ("" if v is None else v) for k, v in r.items()})
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def bench_scaling(
    sizes, base: SyntheticSpec, cfg: PipelineConfig | None = None, repeats: int = 3,
    fixed_degree: bool = True,
) -> list[dict]:
    """Time ``run_pipeline`` on synthetic data of each size.

    With ``fixed_degree`` the edge probabilities are rescaled by ``base.n / n``
    so the expected degree (and hence ``nnz / n``) stays constant, which is
    the sparse regime the linear-time argument assumes. Each size reports the
    fastest of ``repeats`` runs; data generation is not timed.
    """
    sizes = list(sizes)
    if sizes != sorted(sizes):
        raise ValueError("sizes must be ascending")
    cfg = cfg or PipelineConfig(mode="graph")
    rows = []
    for n in sizes:
        scale = base.n / n if fixed_degree else 1.0
        spec = replace(base, n=n, p_in=min(1.0, base.p_in * scale), p_out=base.p_out * scale)
        data = generate_synthetic(spec)
        best = np.inf
        for _ in range(repeats):
            t0 = time.perf_counter()
            run_pipeline(replace(cfg, data=None, synth=None), data)
            best = min(best, time.perf_counter() - t0)
        rows.append({"n": n, "seconds": best, "nnz": int(sum(G.nnz for G in data.graphs))})
    return rows
