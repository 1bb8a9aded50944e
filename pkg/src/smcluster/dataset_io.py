"""Multi-view datasets: in-memory type, synthetic generator, directory format.

On-disk layout::

    DIR/
      manifest.json   {"views": [...], "graphs": [...], "labels": "...", "clusters": g}
      view_0.csv      header "f0,f1,...", one sample per row
      graph_0.mtx     Matrix Market "coordinate real symmetric", 1-based
      labels.csv      one 0-based integer per line
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.io
import scipy.sparse as sp

from .graph_core import GraphError, SparseGraph

__all__ = [
    "DatasetError",
    "MultiViewDataset",
    "SyntheticSpec",
    "generate_synthetic",
    "load_dataset",
    "save_dataset",
]

MANIFEST = "manifest.json"


class DatasetError(ValueError):
    pass


@dataclass(eq=False)
class MultiViewDataset:
    views: list[np.ndarray]
    graphs: list[SparseGraph] | None = None
    labels: np.ndarray | None = None
    g: int | None = None

    def __post_init__(self):
        if not self.views:
            raise DatasetError("dataset needs at least one view")
        self.views = [np.ascontiguousarray(X, dtype=np.float64) for X in self.views]
        n = self.views[0].shape[0]
        for i, X in enumerate(self.views):
            if X.ndim != 2 or X.shape[1] < 1:
                raise DatasetError(f"view {i} must be a 2-d matrix with at least one column")
            if X.shape[0] != n:
                raise DatasetError(
                    f"row-count mismatch: view {i} has {X.shape[0]} rows, expected {n}"
                )
            if not np.all(np.isfinite(X)):
                raise DatasetError(f"view {i} contains non-finite values")
        if self.graphs is not None:
            if len(self.graphs) != len(self.views):
                raise DatasetError(
                    f"{len(self.graphs)} graphs given for {len(self.views)} views"
                )
            for i, G in enumerate(self.graphs):
                if G.n != n:
                    raise DatasetError(f"graph {i} has {G.n} nodes, expected {n}")
        if self.labels is not None:
            labels = np.asarray(self.labels)
            if labels.ndim != 1 or labels.shape[0] != n:
                raise DatasetError(f"labels must be a vector of length {n}")
            if labels.size and not np.issubdtype(labels.dtype, np.integer):
                if not np.all(labels == np.round(labels)):
                    raise DatasetError("labels must be integers")
            labels = labels.astype(np.int64)
            if self.g is None:
                self.g = int(labels.max()) + 1 if labels.size else 0
            if labels.size and (labels.min() < 0 or labels.max() >= self.g):
                raise DatasetError(f"label out of range [0, {self.g})")
            if np.unique(labels).size != self.g:
                raise DatasetError(f"every class in [0, {self.g}) must be nonempty")
            self.labels = labels
        if self.g is not None and self.g < 1:
            raise DatasetError("cluster count must be positive")

    @property
    def n(self) -> int:
        return self.views[0].shape[0]

    @property
    def v(self) -> int:
        return len(self.views)

    @property
    def has_graphs(self) -> bool:
        return self.graphs is not None


@dataclass(frozen=True)
class SyntheticSpec:
    """Gaussian blobs per view plus a planted-partition graph per view.

    ``separation`` is the minimum distance between cluster centers in units
    of the within-cluster standard deviation (which is 1).
    """

    n: int = 600
    v: int = 2
    g: int = 3
    d: int = 10
    separation: float = 6.0
    p_in: float = 0.1
    p_out: float = 0.005
    seed: int = 0

    def __post_init__(self):
        if self.n < 1 or self.v < 1 or self.d < 1:
            raise ValueError("n, v and d must be positive")
        if not 1 <= self.g <= self.n:
            raise ValueError("need 1 <= g <= n")
        if self.separation <= 0:
            raise ValueError("separation must be positive")
        if not (0 <= self.p_out < self.p_in <= 1):
            raise ValueError("need 0 <= p_out < p_in <= 1")

    @classmethod
    def from_dict(cls, d: dict) -> "SyntheticSpec":
        return cls(**d)


def _blob_centers(rng: np.random.Generator, g: int, d: int, separation: float) -> np.ndarray:
    centers = rng.standard_normal((g, d))
    if g == 1:
        return np.zeros((1, d))
    diff = centers[:, None, :] - centers[None, :, :]
    dist = np.sqrt((diff**2).sum(-1))
    closest = dist[np.triu_indices(g, 1)].min()
    return centers * (separation / closest)


def _planted_partition(
    rng: np.random.Generator, labels: np.ndarray, p_in: float, p_out: float
) -> SparseGraph:
    n = labels.shape[0]
    iu, ju = np.triu_indices(n, 1)
    same = labels[iu] == labels[ju]
    prob = np.where(same, p_in, p_out)
    keep = rng.random(iu.shape[0]) < prob
    rows, cols = iu[keep], ju[keep]
    deg = np.bincount(rows, minlength=n) + np.bincount(cols, minlength=n)
    extra_r, extra_c = [], []
    for i in np.flatnonzero(deg == 0):
        mates = np.flatnonzero(labels == labels[i])
        mates = mates[mates != i]
        if mates.size == 0:
            continue
        j = int(rng.choice(mates))
        extra_r.append(min(i, j))
        extra_c.append(max(i, j))
        deg[i] += 1
        deg[j] += 1
    pairs = np.unique(
        np.stack([np.concatenate([rows, extra_r]), np.concatenate([cols, extra_c])]).astype(np.int64),
        axis=1,
    )
    r, c = pairs
    A = sp.coo_matrix(
        (np.ones(2 * r.size), (np.concatenate([r, c]), np.concatenate([c, r]))), shape=(n, n)
    )
    return SparseGraph.from_matrix(A)


def generate_synthetic(spec: SyntheticSpec) -> MultiViewDataset:
    """Draw a dataset fully determined by ``spec`` (including its seed)."""
    rng = np.random.default_rng(spec.seed)
    labels = (np.arange(spec.n) * spec.g) // spec.n
    views, graphs = [], []
    for _ in range(spec.v):
        centers = _blob_centers(rng, spec.g, spec.d, spec.separation)
        views.append(centers[labels] + rng.standard_normal((spec.n, spec.d)))
    for _ in range(spec.v):
        graphs.append(_planted_partition(rng, labels, spec.p_in, spec.p_out))
    return MultiViewDataset(views=views, graphs=graphs, labels=labels, g=spec.g)


def save_dataset(data: MultiViewDataset, path) -> Path:
    """Write ``data`` in the directory format; floats are written round-trip exact."""
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    manifest: dict = {"views": []}
    for i, X in enumerate(data.views):
        name = f"view_{i}.csv"
        header = ",".join(f"f{j}" for j in range(X.shape[1]))
        np.savetxt(path / name, X, delimiter=",", header=header, comments="", fmt="%.17g")
        manifest["views"].append(name)
    if data.graphs is not None:
        manifest["graphs"] = []
        for i, G in enumerate(data.graphs):
            name = f"graph_{i}.mtx"
            scipy.io.mmwrite(
                path / name, sp.coo_matrix(G.adjacency), field="real",
                symmetry="symmetric", precision=17,
            )
            manifest["graphs"].append(name)
    if data.labels is not None:
        manifest["labels"] = "labels.csv"
        np.savetxt(path / "labels.csv", data.labels, fmt="%d")
    if data.g is not None:
        manifest["clusters"] = int(data.g)
    (path / MANIFEST).write_text(json.dumps(manifest, indent=2) + "\n")
    return path


def _read_view(file: Path) -> np.ndarray:
    with open(file, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetError(f"{file.name}: empty view file") from None
        rows = [r for r in reader if r]
    if not rows:
        return np.zeros((0, len(header)))
    try:
        X = np.array(rows, dtype=np.float64)
    except ValueError as exc:
        raise DatasetError(f"{file.name}: {exc}") from None
    if X.shape[1] != len(header):
        raise DatasetError(f"{file.name}: header has {len(header)} columns, rows have {X.shape[1]}")
    return X


def _read_graph(file: Path, symmetrize: bool) -> SparseGraph:
    try:
        A = scipy.io.mmread(file)
    except Exception as exc:
        raise DatasetError(f"{file.name}: cannot parse Matrix Market file ({exc})") from None
    try:
        return SparseGraph.from_matrix(A, symmetrize=symmetrize)
    except GraphError as exc:
        hint = " (pass symmetrize=True to accept it)" if "symmetric" in str(exc) else ""
        raise DatasetError(f"{file.name}: {exc}{hint}") from None


def _read_labels(file: Path) -> np.ndarray:
    lines = [ln.strip() for ln in file.read_text().splitlines() if ln.strip()]
    try:
        return np.array([int(ln) for ln in lines], dtype=np.int64)
    except ValueError as exc:
        raise DatasetError(f"{file.name}: {exc}") from None


def load_dataset(path, symmetrize: bool = False) -> MultiViewDataset:
    path = Path(path)
    manifest_file = path / MANIFEST
    if not manifest_file.is_file():
        raise DatasetError(f"missing manifest: {manifest_file}")
    manifest = json.loads(manifest_file.read_text())

    def resolve(name: str, kind: str) -> Path:
        f = path / name
        if not f.is_file():
            raise DatasetError(f"missing {kind} file: {name}")
        return f

    if not manifest.get("views"):
        raise DatasetError("manifest lists no views")
    views = [_read_view(resolve(name, "view")) for name in manifest["views"]]
    graphs = None
    if manifest.get("graphs"):
        graphs = [_read_graph(resolve(name, "graph"), symmetrize) for name in manifest["graphs"]]
    labels = None
    if manifest.get("labels"):
        labels = _read_labels(resolve(manifest["labels"], "labels"))
    return MultiViewDataset(views=views, graphs=graphs, labels=labels, g=manifest.get("clusters"))
