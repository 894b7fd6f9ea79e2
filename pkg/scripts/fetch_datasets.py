#!/usr/bin/env python3
"""Download the study datasets that are too large or licensed to vendor.

Each entry downloads from its original host, converts to a plain edge list,
verifies the node and link counts against the registry, and writes the file
into the data directory (./data by default, NETCONTRAST_DATA_DIR wins).
Nothing is written when verification fails.

The protein-interaction hosts are old academic servers; if one has moved,
download the named file manually and pass it with --local NAME=PATH to run
just the conversion and verification steps.
"""

import argparse
import gzip
import io
import re
import sys
import urllib.request
import zipfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from netcontrast import datasets  # noqa: E402
from netcontrast.graph import load_edge_list  # noqa: E402

SOURCES = {
    "dolphin": {
        "url": "http://www-personal.umich.edu/~mejn/netdata/dolphins.zip",
        "note": "Lusseau et al., Doubtful Sound bottlenose dolphins (GML)",
    },
    "p2p-Gnutella08": {
        "url": "https://snap.stanford.edu/data/p2p-Gnutella08.txt.gz",
        "note": "SNAP, Gnutella peer-to-peer snapshot from August 8 2002",
    },
    "lc-multiple": {
        "url": "http://interactome.dfci.harvard.edu/S_cerevisiae/download/LC_multiple.txt",
        "note": "CCSB yeast interactome, literature-curated pairs with "
        "multiple supports",
    },
    "combined-ap-ms": {
        "url": "http://interactome.dfci.harvard.edu/S_cerevisiae/download/Combined-APMS.txt",
        "note": "Collins et al. 2007 merged AP-MS yeast interaction network",
    },
}


def fetch(url: str) -> bytes:
    print(f"  downloading {url}")
    with urllib.request.urlopen(url, timeout=60) as resp:
        return resp.read()


def convert_dolphin(raw: bytes) -> str:
    """dolphins.zip holds a GML file; pull the edge stanzas."""
    with zipfile.ZipFile(io.BytesIO(raw)) as zf:
        name = next(n for n in zf.namelist() if n.endswith(".gml"))
        gml = zf.read(name).decode("utf-8", errors="replace")
    pairs = re.findall(
        r"edge\s*\[\s*source\s+(\d+)\s+target\s+(\d+)", gml)
    if not pairs:
        raise ValueError("no edge stanzas found in GML")
    return "\n".join(f"{s} {t}" for s, t in pairs) + "\n"


def convert_gnutella(raw: bytes) -> str:
    text = gzip.decompress(raw).decode()
    lines = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        src, dst = line.split()
        lines.append(f"{src} {dst}")
    return "\n".join(lines) + "\n"


def convert_protein_pairs(raw: bytes) -> str:
    """Two ORF names per line; drop self-pairs and duplicate pairs."""
    seen = set()
    lines = []
    for line in raw.decode().splitlines():
        parts = line.split()
        if len(parts) < 2 or parts[0].lower().startswith(("gene", "orf")):
            continue
        a, b = parts[0], parts[1]
        if a == b:
            continue
        key = (a, b) if a <= b else (b, a)
        if key in seen:
            continue
        seen.add(key)
        lines.append(f"{key[0]} {key[1]}")
    return "\n".join(lines) + "\n"


CONVERTERS = {
    "dolphin": convert_dolphin,
    "p2p-Gnutella08": convert_gnutella,
    "lc-multiple": convert_protein_pairs,
    "combined-ap-ms": convert_protein_pairs,
}


def verify(name: str, text: str, entry: dict) -> None:
    graph = load_edge_list(text, directed=bool(entry.get("directed")))
    expected = entry["expected"]
    if (graph.n, graph.l) != (expected["n"], expected["l"]):
        raise ValueError(
            f"{name}: got {graph.n} nodes / {graph.l} links, expected "
            f"{expected['n']} / {expected['l']}; source file may have changed"
        )


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("names", nargs="*", default=[],
                        help="datasets to fetch (default: all four)")
    parser.add_argument("--data-dir", default=None,
                        help="target directory (default: ./data or "
                        "NETCONTRAST_DATA_DIR)")
    parser.add_argument("--local", action="append", default=[],
                        metavar="NAME=PATH",
                        help="use an already-downloaded raw file for NAME")
    args = parser.parse_args(argv)

    data_dir = Path(args.data_dir) if args.data_dir else datasets.data_dir_from_env()
    data_dir.mkdir(parents=True, exist_ok=True)
    manifest = datasets.builtin_manifest()["datasets"]
    local = dict(item.split("=", 1) for item in args.local)
    names = args.names or list(SOURCES)

    failures = 0
    for name in names:
        if name not in SOURCES:
            print(f"{name}: not a fetchable dataset "
                  f"(choose from {', '.join(SOURCES)})", file=sys.stderr)
            failures += 1
            continue
        entry = manifest[name]
        target = data_dir / entry["path"]
        if target.exists():
            print(f"{name}: already present at {target}")
            continue
        print(f"{name}: {SOURCES[name]['note']}")
        try:
            if name in local:
                raw = Path(local[name]).read_bytes()
            else:
                raw = fetch(SOURCES[name]["url"])
            text = CONVERTERS[name](raw)
            verify(name, text, entry)
        except Exception as exc:
            print(f"{name}: FAILED: {exc}", file=sys.stderr)
            failures += 1
            continue
        target.write_text(text)
        print(f"  wrote {target} "
              f"({entry['expected']['n']} nodes, {entry['expected']['l']} links)")

    return 1 if failures else 0


if __name__ == "__main__":
    raise SystemExit(main())
