import json

import numpy as np
import pytest

import netcontrast as nc
from netcontrast import datasets
from netcontrast.datasets import (
    DatasetNotFound,
    builtin_manifest,
    data_dir_from_env,
    list_datasets,
    load_dataset,
    save_dataset,
)


def test_builtin_manifest_names():
    names = set(builtin_manifest()["datasets"])
    assert names == {
        "karate",
        "dolphin",
        "p2p-Gnutella08",
        "lc-multiple",
        "combined-ap-ms",
        "price1",
        "price2",
        "random1",
        "random2",
    }


def test_bundled_karate_loads_and_matches_expectation():
    g = load_dataset("karate")
    expected = builtin_manifest()["datasets"]["karate"]["expected"]
    assert (g.n, g.l) == (expected["n"], expected["l"]) == (34, 78)
    assert not g.directed


@pytest.mark.parametrize("name", ["price1", "price2", "random1", "random2"])
def test_generator_datasets_hit_expected_sizes(name):
    entry = builtin_manifest()["datasets"][name]
    g = load_dataset(name)
    assert g.n == entry["expected"]["n"]
    assert g.l == entry["expected"]["l"]
    assert g.directed == entry["directed"]


def test_generator_datasets_are_reproducible():
    a = load_dataset("random1")
    b = load_dataset("random1")
    assert np.array_equal(a.edges, b.edges)


def test_unknown_name_raises():
    with pytest.raises(DatasetNotFound):
        load_dataset("nope")


def test_fetchable_dataset_missing_file_names_fetch_script(data_dir):
    data_dir.mkdir()
    with pytest.raises(DatasetNotFound, match="fetch_datasets"):
        load_dataset("dolphin", data_dir)
    with pytest.raises(DatasetNotFound, match="fetch_datasets"):
        load_dataset("dolphin")  # no data dir at all


def test_list_datasets_availability(data_dir):
    data_dir.mkdir()
    rows = {r["name"]: r for r in list_datasets(data_dir)}
    assert rows["karate"]["available"]
    assert rows["price2"]["available"]
    assert not rows["dolphin"]["available"]
    # dropping a file into the data dir flips availability
    (data_dir / "dolphin.edges").write_text("a b\n")
    rows = {r["name"]: r for r in list_datasets(data_dir)}
    assert rows["dolphin"]["available"]


def test_save_and_reload_unweighted(data_dir):
    g = nc.load_edge_list("a b\nb c\nc a")
    save_dataset("tri", g, data_dir, description="triangle")
    rows = {r["name"]: r for r in list_datasets(data_dir)}
    assert rows["tri"]["available"] and rows["tri"]["kind"] == "file"
    back = load_dataset("tri", data_dir)
    assert (back.n, back.l) == (3, 3)
    assert back.labels == g.labels
    assert np.array_equal(back.edges, g.edges)


def test_save_and_reload_weighted(data_dir):
    g = nc.load_edge_list("a b 2.5\nb c 1.0", has_weights=True)
    save_dataset("wg", g, data_dir)
    back = load_dataset("wg", data_dir)
    assert back.weights.tolist() == [2.5, 1.0]


def test_save_directed_round_trip(data_dir):
    g = load_dataset("price1")
    save_dataset("price1-copy", g, data_dir)
    back = load_dataset("price1-copy", data_dir)
    assert back.directed
    assert (back.n, back.l) == (g.n, g.l)
    # reload indexes by first appearance; compare degrees per label
    indeg = nc.degree(g, "in").values
    indeg_back = nc.degree(back, "in").values
    remap = [back.labels.index(lab) for lab in g.labels]
    assert np.array_equal(indeg_back[remap], indeg)


def test_save_rejects_hostile_names(data_dir):
    g = nc.load_edge_list("a b")
    for bad in ("", "../escape", "x/y", "a" * 65, "sp ace"):
        with pytest.raises(ValueError, match="names"):
            save_dataset(bad, g, data_dir)


def test_saved_manifest_is_valid_json(data_dir):
    g = nc.load_edge_list("a b")
    save_dataset("one", g, data_dir)
    save_dataset("two", g, data_dir)
    manifest = json.loads((data_dir / "manifest.json").read_text())
    assert set(manifest["datasets"]) == {"one", "two"}
    assert manifest["datasets"]["one"]["expected"] == {"n": 2, "l": 1}


def test_data_dir_env_override(monkeypatch):
    monkeypatch.delenv("NETCONTRAST_DATA_DIR", raising=False)
    assert str(data_dir_from_env()) == "data"
    monkeypatch.setenv("NETCONTRAST_DATA_DIR", "/tmp/elsewhere")
    assert str(data_dir_from_env()) == "/tmp/elsewhere"


def test_local_manifest_extends_builtin(data_dir):
    data_dir.mkdir()
    (data_dir / "extra.edges").write_text("x y\ny z\n")
    (data_dir / "manifest.json").write_text(
        json.dumps(
            {
                "version": 1,
                "datasets": {
                    "extra": {
                        "kind": "file",
                        "path": "extra.edges",
                        "directed": False,
                    }
                },
            }
        )
    )
    g = load_dataset("extra", data_dir)
    assert (g.n, g.l) == (3, 2)
    names = {r["name"] for r in list_datasets(data_dir)}
    assert "extra" in names and "karate" in names
