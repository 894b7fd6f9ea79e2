"""Batch command line: run the pipeline headless, generate graphs, serve.

All exports are byte-stable for fixed inputs, flags, and seeds: floats are
written with repr (shortest round-trip), row order follows node/definition
order, and JSON is dumped with sorted keys.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import generators, session as session_mod
from .features import BaseFeature, FeatureConfig, default_config
from .graph import GraphParseError, load_attributes, load_edge_list

__all__ = ["main", "cmd_run", "cmd_generate", "cmd_serve"]

_CSV_HEADER = "# netcontrast export v1"


def _fmt(x: float) -> str:
    return repr(float(x))


def _read_graph(path: str, directed: bool, attributes: str | None):
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"no such file: {path}")
    g = load_edge_list(p.read_text(), directed=directed)
    if attributes:
        ap = Path(attributes)
        if not ap.exists():
            raise FileNotFoundError(f"no such file: {attributes}")
        g = load_attributes(g, ap.read_text())
    return g


def _feature_config(args, directed: bool) -> FeatureConfig:
    base = default_config(directed)
    bases = (
        tuple(BaseFeature.from_token(t.strip()) for t in args.bases.split(","))
        if args.bases
        else base.bases
    )
    summaries = (
        tuple(s.strip() for s in args.summaries.split(","))
        if args.summaries
        else base.summaries
    )
    return FeatureConfig(
        bases=bases,
        summaries=summaries,
        max_hops=args.hops,
        prune_threshold=args.prune_threshold,
    )


def _write_exports(out_dir: Path, sess, target_labels, background_labels):
    out_dir.mkdir(parents=True, exist_ok=True)
    model = sess.model
    scaled = model.scaled_loadings

    lines = [_CSV_HEADER, "network,label,cPC1,cPC2"]
    for tag, labels, coords in (
        ("target", target_labels, sess.embedding.target),
        ("background", background_labels, sess.embedding.background),
    ):
        for lab, (x, y) in zip(labels, coords):
            lines.append(f"{tag},{lab},{_fmt(x)},{_fmt(y)}")
    (out_dir / "embedding.csv").write_text("\n".join(lines) + "\n")

    lines = [_CSV_HEADER, "definition,scaled_loading_cPC1,scaled_loading_cPC2"]
    for i, d in enumerate(sess.definitions):
        defjson = json.dumps(d.to_json_dict(), sort_keys=True).replace('"', '""')
        lines.append(f'"{defjson}",{_fmt(scaled[i, 0])},{_fmt(scaled[i, 1])}')
    (out_dir / "loadings.csv").write_text("\n".join(lines) + "\n")

    for tag, mat, labels in (
        ("T", sess.X_T, target_labels),
        ("B", sess.X_B, background_labels),
    ):
        cols = ",".join(f"f{d.id}" for d in sess.definitions)
        lines = [_CSV_HEADER, f"label,{cols}"]
        for lab, row in zip(labels, mat.values):
            lines.append(f"{lab}," + ",".join(_fmt(v) for v in row))
        (out_dir / f"features_{tag}.csv").write_text("\n".join(lines) + "\n")

    model_doc = model.to_json_dict()
    model_doc["definitions"] = [d.to_json_dict() for d in sess.definitions]
    model_doc["warnings"] = list(sess.warnings)
    (out_dir / "model.json").write_text(
        json.dumps(model_doc, sort_keys=True, indent=2) + "\n"
    )

    plot = {
        "axis_labels": list(sess.embedding.axis_labels),
        "target": sess.embedding.target.tolist(),
        "background": sess.embedding.background.tolist(),
        "current_feature": sess.current_feature,
        "feature_colors": {
            k: v.tolist() for k, v in sess.feature_colors(sess.current_feature).items()
        },
    }
    (out_dir / "plot.json").write_text(
        json.dumps(plot, sort_keys=True, indent=2) + "\n"
    )


def cmd_run(args) -> int:
    try:
        target = _read_graph(args.target, args.directed, args.target_attributes)
        background = _read_graph(
            args.background, args.directed, args.background_attributes
        )
    except (FileNotFoundError, GraphParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        feature_cfg = _feature_config(args, target.directed)
    except ValueError as exc:  # bad base/summary token is a usage error
        print(f"error: {exc}", file=sys.stderr)
        return 2
    config = session_mod.SessionConfig(
        feature=feature_cfg,
        alpha=None if args.auto_alpha else args.alpha,
        standardize=args.standardize,
        layout_seed=args.seed,
        layout_iterations=args.layout_iterations,
    )

    def progress(phase, fraction):
        if args.verbose and fraction in (0.0, 1.0):
            print(f"[{phase}] {'done' if fraction else 'start'}", file=sys.stderr)

    try:
        sess = session_mod.run_pipeline(
            target, background, config, progress=progress
        )
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _write_exports(Path(args.out_dir), sess, target.labels, background.labels)
    for w in sess.warnings:
        print(f"warning: {w}", file=sys.stderr)
    print(
        f"alpha={sess.model.alpha!r} features={len(sess.definitions)} "
        f"out={args.out_dir}"
    )
    return 0


def cmd_generate(args) -> int:
    spec = {"kind": args.kind, "n": args.n, "seed": args.seed}
    if args.kind == "gilbert":
        spec["p"] = args.p
    else:
        spec["c"] = args.c
        spec["a"] = args.a
    try:
        graph = generators.generate(spec)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    lines = [f"# generated {json.dumps(spec, sort_keys=True)}"]
    for s, t in graph.edges:
        lines.append(f"{graph.labels[s]} {graph.labels[t]}")
    text = "\n".join(lines) + "\n"
    if args.out == "-":
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)
        print(f"wrote {graph.n} nodes / {graph.l} links to {args.out}")
    return 0


def cmd_serve(args) -> int:
    from . import service

    try:
        service.serve(port=args.port, data_dir=args.data_dir, host=args.host)
    except OSError as exc:  # port busy and friends
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netcontrast",
        description="Contrastive analysis of a target network against a "
        "background network",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the full pipeline and export results")
    run.add_argument("target", help="target edge-list file")
    run.add_argument("background", help="background edge-list file")
    run.add_argument("--directed", action="store_true")
    run.add_argument("--target-attributes", default=None)
    run.add_argument("--background-attributes", default=None)
    run.add_argument("--alpha", type=float, default=None,
                     help="fixed contrast parameter (default: automatic)")
    run.add_argument("--auto-alpha", action="store_true",
                     help="force automatic alpha selection")
    run.add_argument("--hops", type=int, default=2)
    run.add_argument("--bases", default=None,
                     help="comma-separated base tokens, e.g. total-degree,k-core")
    run.add_argument("--summaries", default=None,
                     help="comma-separated summaries, e.g. mean,sum,max")
    run.add_argument("--prune-threshold", type=float, default=0.9)
    run.add_argument("--standardize", action="store_true")
    run.add_argument("--seed", type=int, default=42)
    run.add_argument("--layout-iterations", type=int, default=500)
    run.add_argument("--out-dir", default="netcontrast-out")
    run.add_argument("--format", choices=["csv"], default="csv")
    run.add_argument("--verbose", action="store_true")
    run.set_defaults(func=cmd_run)

    gen = sub.add_parser("generate", help="write a synthetic edge list")
    gen.add_argument("kind", choices=["gilbert", "price"])
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--p", type=float, default=0.1, help="gilbert edge probability")
    gen.add_argument("--c", type=int, default=3, help="price out-links per node")
    gen.add_argument("--a", type=float, default=1.0, help="price attractiveness")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", default="-", help="output path or - for stdout")
    gen.set_defaults(func=cmd_generate)

    srv = sub.add_parser("serve", help="start the session service")
    srv.add_argument("--port", type=int, default=None)
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--data-dir", default=None)
    srv.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
