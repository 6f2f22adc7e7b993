"""Command-line interface: generate, analyze, sweep, and serve.

Exit codes: 0 success, 1 usage or validation problem, 2 I/O failure.
Every command is deterministic given its flags and seed.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Optional

from . import dataio, sweep as sweeps
from .bigraph import ITEM, USER, Modality
from .generator import GeneratorParams, run

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2


def _add_param_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--m", type=int, default=50, help="initial user-item pairs")
    sp.add_argument("--iters", type=int, default=10_000, help="growth iterations")
    sp.add_argument("--p", type=float, default=0.5, help="probability of adding a user")
    sp.add_argument("--u", type=int, default=7, help="edges per new user")
    sp.add_argument("--v", type=int, default=7, help="edges per new item")
    sp.add_argument("--alpha", type=float, default=0.5,
                    help="uniform-branch weight for new users' edges")
    sp.add_argument("--beta", type=float, default=0.5,
                    help="uniform-branch weight for new items' edges")
    sp.add_argument("--bounce", type=float, default=0.0,
                    help="walk probability inside the preferential branch")
    sp.add_argument("--seed", type=int, default=0)


def _params_from(args: argparse.Namespace) -> GeneratorParams:
    return GeneratorParams(
        m=args.m, iterations=args.iters, p=args.p, u=args.u, v=args.v,
        alpha=args.alpha, beta=args.beta, bounce=args.bounce,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bigraphgen",
        description="Random bipartite user-item graph generator and analyzer",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="grow a graph and write its edge list")
    _add_param_flags(gen)
    gen.add_argument("--out", required=True, help="edge-list output path")
    gen.add_argument("--format", choices=["tab", "comma"], default="tab")

    ana = sub.add_parser("analyze", help="full statistics report for an edge list")
    ana.add_argument("input", help="edge-list path")
    ana.add_argument("--format", choices=["tab", "comma", "whitespace"], default="tab")
    ana.add_argument("--header", action="store_true", help="skip one header line")
    ana.add_argument("--modality", choices=["user", "item"], default="user",
                     help="side whose second neighbors are reported")
    ana.add_argument("--out", default="-", help="report path, '-' for stdout")
    ana.add_argument("--per-node", action="store_true",
                     help="include per-node clustering and neighborhoods")
    ana.add_argument("--name", default=None, help="dataset name for the stats row")

    swp = sub.add_parser("sweep", help="grid of runs aggregated to CSV")
    _add_param_flags(swp)
    swp.add_argument("--axis", action="append", required=True, metavar="NAME=V1,V2,...",
                     help="axis over alpha|beta|b|p|u|v|uv|T; repeat for a 2-D grid")
    swp.add_argument("--seeds-per-cell", type=int, default=10)
    swp.add_argument("--measures", default="blcc_mean",
                     help=f"comma list from {', '.join(sweeps.MEASURES)}")
    swp.add_argument("--modality", choices=["user", "item"], default="user")
    swp.add_argument("--sample-growth", action="store_true",
                     help="also sample neighborhood measures along each run")
    swp.add_argument("--workers", type=int, default=1)
    swp.add_argument("--out", required=True, help="CSV output path, '-' for stdout")

    srv = sub.add_parser("serve", help="run the live steering service")
    srv.add_argument("--port", type=int, default=8765)
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--max-sessions", type=int, default=8)
    srv.add_argument("--snapshot-every", type=int, default=100)
    srv.add_argument("--static", default=None,
                     help="directory with the browser UI, served at /")
    return parser


def _fail(message: str, code: int) -> int:
    print(f"bigraphgen: {message}", file=sys.stderr)
    return code


def _cmd_generate(args: argparse.Namespace) -> int:
    try:
        params = _params_from(args)
    except ValueError as err:
        return _fail(str(err), EXIT_USAGE)
    started = time.perf_counter()
    result = run(params, args.seed)
    try:
        dataio.save_edge_list(
            result.graph, args.out, dataio.EdgeListFormat(args.format)
        )
    except OSError as err:
        return _fail(f"cannot write {args.out}: {err}", EXIT_IO)
    summary = {
        "users": result.graph.user_count,
        "items": result.graph.item_count,
        "edges": result.graph.edge_count,
        "requested_edges": result.requested_edges,
        "realized_edges": result.realized_edges,
        "dropped_edges": result.dropped_edges,
        "seed": args.seed,
        "out": args.out,
        "runtime_seconds": round(time.perf_counter() - started, 3),
    }
    print(json.dumps(summary))
    return EXIT_OK


def _modality(name: str) -> Modality:
    return USER if name == "user" else ITEM


def _cmd_analyze(args: argparse.Namespace) -> int:
    fmt = dataio.EdgeListFormat(args.format, header=args.header)
    try:
        loaded = dataio.load_edge_list(args.input, fmt)
    except OSError as err:
        return _fail(f"cannot read {args.input}: {err}", EXIT_IO)
    except ValueError as err:
        return _fail(f"{args.input}: {err}", EXIT_USAGE)
    if loaded.graph.user_count == 0 or loaded.graph.item_count == 0:
        return _fail(f"{args.input}: no edges found", EXIT_USAGE)
    report = dataio.build_report(
        loaded.graph, modality=_modality(args.modality), per_node=args.per_node
    )
    if args.name:
        row = dataio.dataset_stats(loaded.graph, args.name, _modality(args.modality))
        report["dataset_row"] = row.__dict__.copy()
    try:
        if args.out == "-":
            dataio.write_report(report, sys.stdout)
        else:
            dataio.write_report(report, args.out)
    except OSError as err:
        return _fail(f"cannot write {args.out}: {err}", EXIT_IO)
    return EXIT_OK


def _parse_axis(text: str) -> tuple[str, tuple]:
    name, eq, raw = text.partition("=")
    if not eq or not raw:
        raise ValueError(f"axis {text!r} is not NAME=V1,V2,...")
    name = name.strip()
    values = []
    for chunk in raw.split(","):
        chunk = chunk.strip()
        # integer axes stay integers so params validation sees proper types
        value = float(chunk)
        values.append(int(value) if value.is_integer() and name in
                      ("u", "v", "uv", "T") else value)
    return name, tuple(values)


def _cmd_sweep(args: argparse.Namespace) -> int:
    try:
        base = _params_from(args)
        axes = tuple(_parse_axis(a) for a in args.axis)
        measures = tuple(m.strip() for m in args.measures.split(",") if m.strip())
        spec = sweeps.SweepSpec(
            base=base,
            axes=axes,
            seeds_per_cell=args.seeds_per_cell,
            measures=measures,
            master_seed=args.seed,
            modality=_modality(args.modality),
            sample_growth=args.sample_growth,
            workers=args.workers,
        )
    except ValueError as err:
        return _fail(str(err), EXIT_USAGE)
    rows = sweeps.run_sweep(spec)
    try:
        if args.out == "-":
            sweeps.write_sweep_csv(spec, rows, sys.stdout)
        else:
            sweeps.write_sweep_csv(spec, rows, args.out)
    except OSError as err:
        return _fail(f"cannot write {args.out}: {err}", EXIT_IO)
    return EXIT_OK


def _cmd_serve(args: argparse.Namespace) -> int:
    try:
        import uvicorn

        from .service import create_app
    except ImportError as err:
        return _fail(
            f"service dependencies missing ({err}); install the 'service' extra",
            EXIT_USAGE,
        )
    if args.max_sessions < 1 or args.snapshot_every < 1:
        return _fail("--max-sessions and --snapshot-every must be >= 1", EXIT_USAGE)
    app = create_app(
        max_sessions=args.max_sessions,
        snapshot_every=args.snapshot_every,
        static_dir=args.static,
    )
    try:
        uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    except OSError as err:
        return _fail(f"cannot bind {args.host}:{args.port}: {err}", EXIT_IO)
    return EXIT_OK


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; 0 is --help
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    handler = {
        "generate": _cmd_generate,
        "analyze": _cmd_analyze,
        "sweep": _cmd_sweep,
        "serve": _cmd_serve,
    }[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
