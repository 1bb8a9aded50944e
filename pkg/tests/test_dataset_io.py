import json

import numpy as np
import pytest

from smcluster.dataset_io import (
    DatasetError,
    MultiViewDataset,
    SyntheticSpec,
    generate_synthetic,
    load_dataset,
    save_dataset,
)
from smcluster.graph_core import degrees


def write_fixture(tmp_path, views, labels=None, graphs=None, clusters=None):
    manifest = {"views": []}
    for i, X in enumerate(views):
        name = f"v{i}.csv"
        lines = [",".join(f"f{j}" for j in range(len(X[0])))]
        lines += [",".join(str(x) for x in row) for row in X]
        (tmp_path / name).write_text("\n".join(lines) + "\n")
        manifest["views"].append(name)
    if labels is not None:
        (tmp_path / "y.csv").write_text("\n".join(map(str, labels)) + "\n")
        manifest["labels"] = "y.csv"
    if graphs is not None:
        manifest["graphs"] = []
        for i, text in enumerate(graphs):
            (tmp_path / f"g{i}.mtx").write_text(text)
            manifest["graphs"].append(f"g{i}.mtx")
    if clusters is not None:
        manifest["clusters"] = clusters
    (tmp_path / "manifest.json").write_text(json.dumps(manifest))
    return tmp_path


TWO_VIEWS = [
    [[0.0, 1.0], [0.5, 1.5], [9.0, 9.0], [9.5, 8.5]],
    [[1.0], [1.1], [5.0], [5.2]],
]


def test_load_two_views(tmp_path):
    data = load_dataset(write_fixture(tmp_path, TWO_VIEWS, labels=[0, 0, 1, 1]))
    assert (data.n, data.v, data.g) == (4, 2, 2)
    np.testing.assert_array_equal(data.views[0], TWO_VIEWS[0])
    assert data.labels.tolist() == [0, 0, 1, 1]
    assert not data.has_graphs


def test_missing_view_file(tmp_path):
    write_fixture(tmp_path, TWO_VIEWS)
    (tmp_path / "v1.csv").unlink()
    with pytest.raises(DatasetError, match="missing view file"):
        load_dataset(tmp_path)


def test_missing_manifest(tmp_path):
    with pytest.raises(DatasetError, match="missing manifest"):
        load_dataset(tmp_path)


def test_row_count_mismatch(tmp_path):
    with pytest.raises(DatasetError, match="row-count mismatch"):
        load_dataset(write_fixture(tmp_path, [TWO_VIEWS[0], TWO_VIEWS[1][:3]]))


def test_non_finite(tmp_path):
    bad = [[0.0, 1.0], [float("nan"), 1.0]]
    with pytest.raises(DatasetError, match="non-finite"):
        load_dataset(write_fixture(tmp_path, [bad]))


def test_label_out_of_range(tmp_path):
    with pytest.raises(DatasetError, match="out of range"):
        load_dataset(write_fixture(tmp_path, TWO_VIEWS, labels=[0, 0, 1, 2], clusters=2))


def test_empty_class_rejected(tmp_path):
    with pytest.raises(DatasetError, match="nonempty"):
        load_dataset(write_fixture(tmp_path, TWO_VIEWS, labels=[0, 0, 2, 2], clusters=3))


ASYM = "%%MatrixMarket matrix coordinate real general\n4 4 2\n1 2 1.0\n3 4 2.0\n"
SYM = "%%MatrixMarket matrix coordinate real symmetric\n4 4 2\n2 1 1.0\n4 3 2.0\n"


def test_symmetric_graph_file(tmp_path):
    data = load_dataset(write_fixture(tmp_path, TWO_VIEWS[:1], graphs=[SYM]))
    np.testing.assert_array_equal(degrees(data.graphs[0]), [1, 1, 2, 2])


def test_asymmetric_graph_rejected_unless_symmetrized(tmp_path):
    write_fixture(tmp_path, TWO_VIEWS[:1], graphs=[ASYM])
    with pytest.raises(DatasetError, match="not symmetric"):
        load_dataset(tmp_path)
    data = load_dataset(tmp_path, symmetrize=True)
    np.testing.assert_array_equal(degrees(data.graphs[0]), [0.5, 0.5, 1, 1])


def test_graph_count_must_match_views(tmp_path):
    with pytest.raises(DatasetError):
        load_dataset(write_fixture(tmp_path, TWO_VIEWS, graphs=[SYM]))


def test_round_trip(tmp_path):
    data = generate_synthetic(SyntheticSpec(n=90, v=3, g=3, d=4, seed=11))
    back = load_dataset(save_dataset(data, tmp_path / "ds"))
    assert (back.n, back.v, back.g) == (data.n, data.v, data.g)
    assert back.labels.tobytes() == data.labels.tobytes()
    for a, b in zip(data.views, back.views):
        np.testing.assert_array_equal(a, b)
    for a, b in zip(data.graphs, back.graphs):
        assert (a.adjacency != b.adjacency).nnz == 0
    text = (tmp_path / "ds" / "graph_0.mtx").read_text()
    assert text.startswith("%%MatrixMarket matrix coordinate real symmetric")
    assert (tmp_path / "ds" / "view_0.csv").read_text().startswith("f0,f1,f2,f3\n")


def test_synthetic_block_structure():
    data = generate_synthetic(SyntheticSpec(n=6, v=2, g=2, d=2, separation=100, p_in=1, p_out=0, seed=7))
    assert data.labels.tolist() == [0, 0, 0, 1, 1, 1]
    block = np.kron(np.eye(2), np.ones((3, 3))) - np.eye(6)
    for G in data.graphs:
        np.testing.assert_array_equal(G.to_dense(), block)


def test_synthetic_deterministic():
    spec = SyntheticSpec(n=50, seed=4)
    a, b = generate_synthetic(spec), generate_synthetic(spec)
    for x, y in zip(a.views, b.views):
        assert x.tobytes() == y.tobytes()
    for x, y in zip(a.graphs, b.graphs):
        assert (x.adjacency != y.adjacency).nnz == 0
    c = generate_synthetic(SyntheticSpec(n=50, seed=5))
    assert not np.array_equal(a.views[0], c.views[0])


def test_synthetic_balanced_and_no_isolated_nodes():
    data = generate_synthetic(SyntheticSpec(n=100, g=3, p_in=0.01, p_out=0.0, seed=2))
    assert np.bincount(data.labels).tolist() == [34, 33, 33]
    for G in data.graphs:
        assert degrees(G).min() > 0
        assert G.adjacency.diagonal().sum() == 0


def test_synthetic_center_separation():
    data = generate_synthetic(SyntheticSpec(n=3000, g=4, d=3, separation=6, seed=0))
    for X in data.views:
        means = np.array([X[data.labels == c].mean(0) for c in range(4)])
        dist = np.linalg.norm(means[:, None] - means[None], axis=-1)[np.triu_indices(4, 1)]
        assert dist.min() == pytest.approx(6.0, abs=0.3)


@pytest.mark.parametrize("seed", range(3))
def test_planted_density_within_three_standard_errors(seed):
    spec = SyntheticSpec(n=600, g=3, p_in=0.1, p_out=0.005, seed=seed)
    data = generate_synthetic(spec)
    same = data.labels[:, None] == data.labels[None, :]
    iu = np.triu_indices(spec.n, 1)
    within = same[iu]
    for G in data.graphs:
        A = G.to_dense()[iu]
        for mask, p in ((within, spec.p_in), (~within, spec.p_out)):
            pairs = mask.sum()
            density = A[mask].mean()
            se = np.sqrt(p * (1 - p) / pairs)
            assert abs(density - p) <= 3 * se


def test_synthetic_spec_validation():
    with pytest.raises(ValueError):
        SyntheticSpec(p_in=0.1, p_out=0.2)
    with pytest.raises(ValueError):
        SyntheticSpec(separation=0)


def test_dataset_invariants():
    with pytest.raises(DatasetError):
        MultiViewDataset(views=[])
    with pytest.raises(DatasetError):
        MultiViewDataset(views=[np.ones((3, 0))])
    with pytest.raises(DatasetError):
        MultiViewDataset(views=[np.ones((3, 1))], labels=[0, 1])
