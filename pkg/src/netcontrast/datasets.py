"""Named dataset registry: bundled files, generator specs, and a data dir.

Bundled with the package: the karate club graph. Well-known study graphs too
large or licensed to vendor (dolphin social network, p2p-Gnutella08, protein
interaction networks) are registered as fetchable: scripts/fetch_datasets.py
downloads and verifies them into the data directory. Synthetic fixtures are
generator specs and always available. Uploaded or generated graphs are
persisted under the data directory next to a manifest.
"""

from __future__ import annotations

import json
import os
import re
from importlib import resources
from pathlib import Path

from .generators import generate
from .graph import Graph, load_edge_list

__all__ = [
    "builtin_manifest",
    "data_dir_from_env",
    "list_datasets",
    "load_dataset",
    "save_dataset",
    "DatasetNotFound",
]

_NAME_RE = re.compile(r"^[A-Za-z0-9._-]{1,64}$")


class DatasetNotFound(KeyError):
    pass


def builtin_manifest() -> dict:
    """Datasets known out of the box."""
    return {
        "version": 1,
        "datasets": {
            "karate": {
                "kind": "bundled",
                "path": "karate.edges",
                "directed": False,
                "expected": {"n": 34, "l": 78},
                "description": "Zachary karate club social network",
            },
            "dolphin": {
                "kind": "file",
                "path": "dolphin.edges",
                "directed": False,
                "expected": {"n": 62, "l": 159},
                "description": "Lusseau bottlenose dolphin social network "
                "(fetch with scripts/fetch_datasets.py)",
            },
            "p2p-Gnutella08": {
                "kind": "file",
                "path": "p2p-Gnutella08.edges",
                "directed": True,
                "expected": {"n": 6301, "l": 20777},
                "description": "Gnutella peer-to-peer snapshot, Aug 8 2002 "
                "(fetch with scripts/fetch_datasets.py)",
            },
            "lc-multiple": {
                "kind": "file",
                "path": "lc-multiple.edges",
                "directed": False,
                "expected": {"n": 1536, "l": 2925},
                "description": "Literature-curated protein interactions with "
                "multiple supports (fetch with scripts/fetch_datasets.py)",
            },
            "combined-ap-ms": {
                "kind": "file",
                "path": "combined-ap-ms.edges",
                "directed": False,
                "expected": {"n": 1622, "l": 9070},
                "description": "Combined AP-MS protein interaction network "
                "(fetch with scripts/fetch_datasets.py)",
            },
            "price1": {
                "kind": "generator",
                "directed": True,
                "generator": {"kind": "price", "n": 100, "c": 3, "a": 1.0, "seed": 11},
                "expected": {"n": 100, "l": 294},
                "description": "Price preferential attachment, 100 nodes",
            },
            "price2": {
                "kind": "generator",
                "directed": True,
                "generator": {
                    "kind": "price",
                    "n": 6301,
                    "c": 3,
                    "a": 1.0,
                    "seed": 7,
                },
                "expected": {"n": 6301, "l": 18897},
                "description": "Price preferential attachment, 6301 nodes",
            },
            "random1": {
                "kind": "generator",
                "directed": False,
                "generator": {"kind": "gilbert", "n": 100, "p": 0.0952, "seed": 30},
                "expected": {"n": 100, "l": 471},
                "description": "Gilbert random graph G(100, 0.0952)",
            },
            "random2": {
                "kind": "generator",
                "directed": False,
                "generator": {"kind": "gilbert", "n": 100, "p": 0.1061, "seed": 30},
                "expected": {"n": 100, "l": 525},
                "description": "Gilbert random graph G(100, 0.1061)",
            },
        },
    }


def data_dir_from_env(default: str = "data") -> Path:
    return Path(os.environ.get("NETCONTRAST_DATA_DIR", default))


def _merged(data_dir: Path | None) -> dict:
    manifest = builtin_manifest()["datasets"]
    if data_dir is not None:
        local = Path(data_dir) / "manifest.json"
        if local.exists():
            extra = json.loads(local.read_text())
            for name, entry in extra.get("datasets", {}).items():
                manifest[name] = entry
    return manifest


def _is_available(name: str, entry: dict, data_dir: Path | None) -> bool:
    kind = entry["kind"]
    if kind in ("bundled", "generator"):
        return True
    if data_dir is None:
        return False
    return (Path(data_dir) / entry["path"]).exists()


def list_datasets(data_dir: Path | None = None) -> list[dict]:
    """Registry view: one dict per dataset with availability."""
    out = []
    for name, entry in sorted(_merged(data_dir).items()):
        out.append(
            {
                "name": name,
                "kind": entry["kind"],
                "directed": entry.get("directed", False),
                "available": _is_available(name, entry, data_dir),
                "expected": entry.get("expected"),
                "description": entry.get("description", ""),
            }
        )
    return out


def load_dataset(name: str, data_dir: Path | None = None) -> Graph:
    manifest = _merged(data_dir)
    entry = manifest.get(name)
    if entry is None:
        raise DatasetNotFound(name)
    kind = entry["kind"]
    directed = bool(entry.get("directed", False))
    if kind == "generator":
        return generate(entry["generator"])
    if kind == "bundled":
        text = (
            resources.files("netcontrast").joinpath("data", entry["path"]).read_text()
        )
        return load_edge_list(text, directed=directed)
    path = None if data_dir is None else Path(data_dir) / entry["path"]
    if path is None or not path.exists():
        raise DatasetNotFound(
            f"{name}: file {entry['path']!r} not present in the data directory; "
            "see scripts/fetch_datasets.py"
        )
    return load_edge_list(
        path.read_text(),
        directed=directed,
        has_weights=bool(entry.get("weighted", False)),
    )


def save_dataset(
    name: str, graph: Graph, data_dir: Path, description: str = ""
) -> None:
    """Persist a graph and register it in the data-dir manifest."""
    if not _NAME_RE.match(name):
        raise ValueError(
            "dataset names are 1-64 chars from letters, digits, . _ -"
        )
    data_dir = Path(data_dir)
    data_dir.mkdir(parents=True, exist_ok=True)
    path = data_dir / f"{name}.edges"
    lines = [f"# {name}: {graph.n} nodes, {graph.l} links"]
    weighted = bool((graph.weights != 1.0).any()) if graph.l else False
    for (s, t), w in zip(graph.edges, graph.weights):
        if weighted:  # keep the field count uniform for reloading
            lines.append(f"{graph.labels[s]} {graph.labels[t]} {float(w)!r}")
        else:
            lines.append(f"{graph.labels[s]} {graph.labels[t]}")
    path.write_text("\n".join(lines) + "\n")
    manifest_path = data_dir / "manifest.json"
    manifest = (
        json.loads(manifest_path.read_text())
        if manifest_path.exists()
        else {"version": 1, "datasets": {}}
    )
    manifest["datasets"][name] = {
        "kind": "file",
        "path": path.name,
        "directed": graph.directed,
        "weighted": weighted,
        "expected": {"n": graph.n, "l": graph.l},
        "description": description,
    }
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
