"""Operator command line: ingest, generate, summarize, chord, serve.

Exit codes: 0 success, 1 user or data error, 2 internal error. Diagnostics
go to stderr; data goes to stdout or the requested output path. JSON output
is byte-identical to the corresponding service endpoint body.
"""

from __future__ import annotations

import argparse
import socket
import sys
from pathlib import Path

from . import analytics
from .analytics import SortSpec, build_dataset
from .errors import ClasslensError
from .ingest import (
    SynthSpec,
    parse_image_manifest,
    parse_labels,
    parse_predictions,
    read_snapshot,
    serialize_predictions,
    synthesize,
    write_snapshot,
)
from .service import (
    Registry,
    ServiceConfig,
    chord_payload,
    classes_payload,
    create_app,
    to_json_bytes,
)


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; our contract reserves 2 for bugs
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="classlens", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse prediction files and write a snapshot")
    p.add_argument("predictions", type=Path, help="predictions CSV")
    p.add_argument("--labels", type=Path, help="labels CSV")
    p.add_argument("--images", type=Path, help="image manifest CSV")
    p.add_argument("--out", type=Path, required=True, help="snapshot output path")
    p.add_argument("--json", action="store_true", help="machine-readable summary")

    p = sub.add_parser("generate", help="write a seeded synthetic dataset")
    p.add_argument("--classes", type=int, default=1000)
    p.add_argument("--instances", type=int, default=50_000)
    p.add_argument("--accuracy", type=float, default=0.8)
    p.add_argument("--spread", type=int, default=3, help="cyclic confusion spread")
    p.add_argument("--concentration", type=float, default=4.0)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--snapshot", action="store_true", help="write a snapshot instead of CSV")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("summarize", help="print per-class summaries from a snapshot")
    p.add_argument("snapshot", type=Path)
    p.add_argument("--sort", default="index", choices=analytics.SORT_KEYS)
    p.add_argument("--order", default="asc", choices=analytics.SORT_ORDERS)
    p.add_argument("--top", type=int, default=10, help="number of rows (0 for none)")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("chord", help="write chord flows for a class selection")
    p.add_argument("snapshot", type=Path)
    p.add_argument("--classes", required=True, help="comma-separated class ids")
    p.add_argument("--example-cap", type=int, default=analytics.DEFAULT_EXAMPLE_CAP)
    p.add_argument("--out", type=Path, help="output path (default stdout)")
    p.add_argument("--json", action="store_true", help="accepted for symmetry; output is always JSON")

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--listen", default=None, help="host:port (default 127.0.0.1:8080)")
    p.add_argument("--snapshot-dir", type=Path, default=None)
    p.add_argument("--static-dir", type=Path, default=None, help="webapp bundle directory")
    p.add_argument("--demo", action="store_true", help="register a synthetic demo dataset")
    p.add_argument("--demo-classes", type=int, default=1000)
    p.add_argument("--demo-instances", type=int, default=50_000)
    p.add_argument("--json", action="store_true", help="print the effective config as JSON")

    return parser


def _emit(data: bytes, out: Path | None) -> None:
    if out is None:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.write(b"\n")
    else:
        out.write_bytes(data)


def cmd_ingest(args) -> int:
    with args.predictions.open(encoding="utf-8") as fh:
        records = parse_predictions(fh)
    labels = parse_labels(args.labels.read_text(encoding="utf-8")) if args.labels else None
    images = (
        parse_image_manifest(args.images.read_text(encoding="utf-8")) if args.images else None
    )
    dataset = build_dataset(records, labels=labels, images=images)
    with args.out.open("wb") as fh:
        write_snapshot(dataset, fh)
    if args.json:
        _emit(
            to_json_bytes(
                {
                    "k": dataset.num_classes,
                    "n": dataset.num_instances,
                    "totals": {
                        "correct": dataset.total_correct,
                        "misclassified": dataset.total_misclassified,
                    },
                }
            ),
            None,
        )
    else:
        print(
            f"K={dataset.num_classes} N={dataset.num_instances} "
            f"correct={dataset.total_correct} misclassified={dataset.total_misclassified}"
        )
    return 0


def cmd_generate(args) -> int:
    spec = SynthSpec(
        classes=args.classes,
        instances=args.instances,
        accuracy=args.accuracy,
        confusion_spread=args.spread,
        concentration=args.concentration,
        seed=args.seed,
    )
    records = synthesize(spec)
    if args.snapshot:
        dataset = build_dataset(records)
        with args.out.open("wb") as fh:
            write_snapshot(dataset, fh)
    else:
        with args.out.open("w", encoding="utf-8", newline="") as fh:
            serialize_predictions(records, fh)
    if args.json:
        _emit(
            to_json_bytes(
                {"out": str(args.out), "classes": spec.classes, "instances": spec.instances,
                 "seed": spec.seed, "format": "snapshot" if args.snapshot else "csv"}
            ),
            None,
        )
    else:
        print(f"wrote {spec.instances} instances over {spec.classes} classes to {args.out}",
              file=sys.stderr)
    return 0


def cmd_summarize(args) -> int:
    with args.snapshot.open("rb") as fh:
        dataset = read_snapshot(fh)
    if args.top < 0:
        raise ClasslensError("--top must be non-negative")
    rows = classes_payload(dataset, SortSpec(args.sort, args.order))[: args.top]
    if args.json:
        _emit(to_json_bytes(rows), None)
        return 0
    if rows:
        header = f"{'class':>6} {'label':<24} {'support':>8} {'correct':>8} {'outbound':>9} {'inbound':>8} {'mean_max':>9}"
        print(header)
        for r in rows:
            print(
                f"{r['class_id']:>6} {r['label'][:24]:<24} {r['support']:>8} "
                f"{r['correct']:>8} {r['outbound']:>9} {r['inbound']:>8} {r['mean_max_pred']:>9.4f}"
            )
    return 0


def cmd_chord(args) -> int:
    with args.snapshot.open("rb") as fh:
        dataset = read_snapshot(fh)
    try:
        selection = [int(tok) for tok in args.classes.split(",") if tok != ""]
    except ValueError:
        raise ClasslensError(f"--classes must be a comma-separated integer list, got {args.classes!r}") from None
    cf = analytics.chord_flows(dataset, selection, example_cap=args.example_cap)
    _emit(to_json_bytes(chord_payload(dataset, cf)), args.out)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    config = ServiceConfig.from_env()
    if args.listen:
        host, _, port = args.listen.rpartition(":")
        config.host = host or config.host
        try:
            config.port = int(port)
        except ValueError:
            raise ClasslensError(f"bad --listen value {args.listen!r}") from None
    if args.snapshot_dir is not None:
        config.snapshot_dir = args.snapshot_dir
    if args.static_dir is not None:
        config.static_dir = args.static_dir
    elif config.static_dir is None:
        bundled = Path("frontend/dist")
        if bundled.is_dir():
            config.static_dir = bundled

    # fail fast with a clear message instead of a uvicorn traceback
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    try:
        probe.bind((config.host, config.port))
    except OSError as exc:
        raise ClasslensError(f"cannot listen on {config.host}:{config.port}: {exc}") from None
    finally:
        probe.close()

    registry = Registry(config.snapshot_dir)
    if args.demo:
        spec = SynthSpec(classes=args.demo_classes, instances=args.demo_instances)
        print(
            f"generating demo dataset: K={spec.classes} N={spec.instances} seed={spec.seed}",
            file=sys.stderr,
        )
        registry.add(build_dataset(synthesize(spec)), name=f"demo-{spec.seed}")
    app = create_app(config, registry)

    if args.json:
        _emit(
            to_json_bytes(
                {
                    "listen": f"{config.host}:{config.port}",
                    "snapshot_dir": str(config.snapshot_dir) if config.snapshot_dir else None,
                    "static_dir": str(config.static_dir) if config.static_dir else None,
                    "datasets": len(registry.list()),
                }
            ),
            None,
        )
    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")
    return 0


_COMMANDS = {
    "ingest": cmd_ingest,
    "generate": cmd_generate,
    "summarize": cmd_summarize,
    "chord": cmd_chord,
    "serve": cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ClasslensError as exc:
        print(f"classlens {args.command}: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"classlens {args.command}: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        return 0
    except Exception:  # pragma: no cover - defensive
        import traceback

        traceback.print_exc()
        return 2


if __name__ == "__main__":
    sys.exit(main())
