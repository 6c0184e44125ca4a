"""HTTP/JSON query API over a registry of ingested datasets.

All JSON bodies are produced by the payload builders below, which the CLI
reuses so offline output is byte-identical to endpoint responses. Error
bodies always have the shape ``{"error": {"code", "message", "line"?}}``.

Datasets are immutable: ingestion builds off the request path and publishes
by atomic registry insertion, deletion unlinks from the registry, and
requests already holding a dataset keep reading their snapshot of it.
"""

from __future__ import annotations

import datetime as dt
import json
import os
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, File, Form, Request, Response, UploadFile
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.staticfiles import StaticFiles

from . import analytics
from .analytics import (
    ChordFlows,
    ColorSpec,
    Dataset,
    FilterSpec,
    SortSpec,
    WindowSlice,
)
from .errors import ClasslensError
from .ingest import (
    SynthSpec,
    parse_image_manifest,
    parse_labels,
    parse_predictions,
    read_snapshot,
    synthesize,
    write_snapshot,
)

PLACEHOLDER_IMAGE_URL = "/static/placeholder.svg"

_PLACEHOLDER_SVG = (
    '<svg xmlns="http://www.w3.org/2000/svg" width="96" height="96">'
    '<rect width="96" height="96" fill="#dce3ea"/>'
    '<circle cx="48" cy="38" r="14" fill="#9fb0c0"/>'
    '<path d="M20 82 q28 -30 56 0 z" fill="#9fb0c0"/></svg>'
)


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8080
    snapshot_dir: Path | None = None
    static_dir: Path | None = None
    max_upload_bytes: int = 2 * 1024**3
    max_classes: int = 10_000
    max_instances: int = 10_000_000
    cors_origins: list[str] = field(default_factory=list)

    @classmethod
    def from_env(cls, env: dict[str, str] | None = None) -> "ServiceConfig":
        env = os.environ if env is None else env
        cfg = cls()
        listen = env.get("CLASSLENS_LISTEN")
        if listen:
            host, _, port = listen.rpartition(":")
            cfg.host, cfg.port = host or cfg.host, int(port)
        if env.get("CLASSLENS_SNAPSHOT_DIR"):
            cfg.snapshot_dir = Path(env["CLASSLENS_SNAPSHOT_DIR"])
        if env.get("CLASSLENS_STATIC_DIR"):
            cfg.static_dir = Path(env["CLASSLENS_STATIC_DIR"])
        if env.get("CLASSLENS_MAX_UPLOAD"):
            cfg.max_upload_bytes = int(env["CLASSLENS_MAX_UPLOAD"])
        if env.get("CLASSLENS_MAX_CLASSES"):
            cfg.max_classes = int(env["CLASSLENS_MAX_CLASSES"])
        if env.get("CLASSLENS_MAX_INSTANCES"):
            cfg.max_instances = int(env["CLASSLENS_MAX_INSTANCES"])
        if env.get("CLASSLENS_CORS_ORIGINS"):
            cfg.cors_origins = [
                o.strip() for o in env["CLASSLENS_CORS_ORIGINS"].split(",") if o.strip()
            ]
        return cfg


# --- canonical JSON ----------------------------------------------------------


def to_json_bytes(payload) -> bytes:
    """The one JSON encoding used everywhere (service and CLI)."""
    return json.dumps(payload, separators=(",", ":"), ensure_ascii=False).encode()


def summary_payload(d: Dataset, c: int) -> dict:
    s = d.summaries[c]
    return {
        "class_id": s.class_id,
        "label": d.label(c).label,
        "support": s.support,
        "correct": s.correct,
        "outbound": s.outbound,
        "inbound": s.inbound,
        "mean_max_pred": s.mean_max_pred,
        "is_empty": s.is_empty,
    }


def classes_payload(d: Dataset, spec: SortSpec) -> list[dict]:
    return [summary_payload(d, c) for c in analytics.sort_classes(d, spec)]


def overview_payload(d: Dataset, bins: int) -> dict:
    matrix = d._histogram_matrix(bins)
    return {
        "bins": bins,
        "classes": [
            {"summary": summary_payload(d, c), "histogram": [int(v) for v in matrix[c]]}
            for c in range(d.num_classes)
        ],
    }


def window_payload(d: Dataset, ws: WindowSlice) -> dict:
    return {
        "from": ws.from_class,
        "to": ws.to_class,
        "total_matching": ws.total_matching,
        "instances": [
            {
                "instance_id": w.instance_id,
                "true_class": w.true_class,
                "values": list(w.values),
                "color_group": w.color_group,
            }
            for w in ws.instances
        ],
        "doughnuts": [summary_payload(d, s.class_id) for s in ws.doughnuts],
    }


def chord_payload(d: Dataset, cf: ChordFlows) -> dict:
    size = len(cf.classes)
    nodes = []
    for i, c in enumerate(cf.classes):
        nodes.append(
            {
                "class_id": c,
                "label": d.label(c).label,
                "outbound_within": sum(cf.flows[i][j] for j in range(size)),
                "inbound_within": sum(cf.flows[j][i] for j in range(size)),
            }
        )
    examples = {
        f"{a}->{b}": list(cf.examples[(a, b)])
        for a in cf.classes
        for b in cf.classes
        if a != b
    }
    return {
        "classes": list(cf.classes),
        "nodes": nodes,
        "flows": [list(r) for r in cf.flows],
        "examples": examples,
    }


def instance_payload(d: Dataset, instance_id: str) -> dict:
    row = d.row_of(instance_id)
    if row is None:
        raise KeyError(instance_id)
    r = d.record(row)
    entry = d.label(r.true_class)
    return {
        "instance_id": r.instance_id,
        "true_class": r.true_class,
        "label": entry.label,
        "hierarchy": list(entry.hierarchy),
        "predicted_class": int(d.predicted[row]),
        "max_pred": float(d.max_pred[row]),
        "probs": r.probs.astype(float).tolist(),
        "image_url": d.image_url(instance_id) or PLACEHOLDER_IMAGE_URL,
    }


# --- registry ----------------------------------------------------------------


@dataclass(frozen=True)
class RegistryEntry:
    dataset_id: str
    name: str
    created_at: str
    sequence: int
    dataset: Dataset


def descriptor_payload(entry: RegistryEntry) -> dict:
    d = entry.dataset
    return {
        "dataset_id": entry.dataset_id,
        "name": entry.name,
        "k": d.num_classes,
        "n": d.num_instances,
        "created_at": entry.created_at,
        "totals": {
            "correct": d.total_correct,
            "misclassified": d.total_misclassified,
        },
    }


class Registry:
    """In-memory dataset registry with optional snapshot persistence.

    Insertion is atomic: a dataset becomes visible only after it is fully
    built. Deletion drops the registry reference (and snapshot file);
    readers that already resolved the entry keep a consistent dataset.
    """

    def __init__(self, snapshot_dir: Path | None = None):
        self._lock = threading.Lock()
        self._entries: dict[str, RegistryEntry] = {}
        self._seq = 0
        self._snapshot_dir = snapshot_dir
        if snapshot_dir is not None:
            snapshot_dir.mkdir(parents=True, exist_ok=True)
            self._load_snapshots(snapshot_dir)

    def _load_snapshots(self, directory: Path) -> None:
        for path in sorted(directory.glob("*.mcv1")):
            with path.open("rb") as fh:
                dataset = read_snapshot(fh)
            self._register(dataset, name=path.stem, dataset_id=path.stem, persist=False)

    def _register(
        self,
        dataset: Dataset,
        name: str,
        dataset_id: str | None = None,
        persist: bool = True,
    ) -> RegistryEntry:
        entry_id = dataset_id or uuid.uuid4().hex[:12]
        created = dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds")
        if persist and self._snapshot_dir is not None:
            with (self._snapshot_dir / f"{entry_id}.mcv1").open("wb") as fh:
                write_snapshot(dataset, fh)
        with self._lock:
            self._seq += 1
            entry = RegistryEntry(entry_id, name, created, self._seq, dataset)
            self._entries[entry_id] = entry
        return entry

    def add(self, dataset: Dataset, name: str) -> RegistryEntry:
        return self._register(dataset, name)

    def get(self, dataset_id: str) -> RegistryEntry | None:
        with self._lock:
            return self._entries.get(dataset_id)

    def list(self) -> list[RegistryEntry]:
        with self._lock:
            entries = list(self._entries.values())
        return sorted(entries, key=lambda e: -e.sequence)

    def delete(self, dataset_id: str) -> bool:
        with self._lock:
            entry = self._entries.pop(dataset_id, None)
        if entry is None:
            return False
        if self._snapshot_dir is not None:
            path = self._snapshot_dir / f"{dataset_id}.mcv1"
            if path.exists():
                path.unlink()
        return True


# --- HTTP wiring ---------------------------------------------------------------


class ApiError(Exception):
    """Carries an HTTP status plus the error-envelope fields."""

    def __init__(self, status: int, code: str, message: str, line: int | None = None):
        self.status = status
        self.code = code
        self.message = message
        self.line = line
        super().__init__(message)


def _not_found(code: str, message: str) -> ApiError:
    return ApiError(404, code, message)


def _bad(code: str, message: str) -> ApiError:
    return ApiError(400, code, message)


def error_response(status: int, code: str, message: str, line: int | None = None) -> Response:
    body: dict = {"error": {"code": code, "message": message}}
    if line is not None:
        body["error"]["line"] = line
    return Response(to_json_bytes(body), status_code=status, media_type="application/json")


def json_response(payload, status: int = 200) -> Response:
    return Response(to_json_bytes(payload), status_code=status, media_type="application/json")


def _parse_int(raw: str | None, name: str, default: int | None = None) -> int:
    if raw is None or raw == "":
        if default is None:
            raise _bad("InvalidParameter", f"missing parameter {name!r}")
        return default
    try:
        return int(raw)
    except ValueError:
        raise _bad("InvalidParameter", f"parameter {name!r} must be an integer") from None


def _parse_float(raw: str | None, name: str, default: float) -> float:
    if raw is None or raw == "":
        return default
    try:
        return float(raw)
    except ValueError:
        raise _bad("InvalidParameter", f"parameter {name!r} must be a number") from None


def create_app(config: ServiceConfig | None = None, registry: Registry | None = None) -> FastAPI:
    """Build the application; pass a registry to pre-register datasets."""
    config = config or ServiceConfig()
    registry = registry or Registry(config.snapshot_dir)
    app = FastAPI(title="classlens", version="0.1.0", docs_url=None, redoc_url=None)
    app.state.registry = registry
    app.state.config = config

    if config.cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=config.cors_origins,
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.exception_handler(ApiError)
    async def _api_error(_req: Request, exc: ApiError):
        return error_response(exc.status, exc.code, exc.message, exc.line)

    @app.exception_handler(ClasslensError)
    async def _domain_error(_req: Request, exc: ClasslensError):
        line = getattr(exc, "line", None)
        return error_response(400, exc.code, str(exc), line)

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_req: Request, exc: RequestValidationError):
        return error_response(400, "InvalidParameter", str(exc.errors()[:1]))

    def resolve(dataset_id: str) -> RegistryEntry:
        entry = registry.get(dataset_id)
        if entry is None:
            raise _not_found("UnknownDataset", f"no dataset {dataset_id!r}")
        return entry

    @app.post("/api/datasets")
    async def upload_dataset(
        predictions: UploadFile = File(...),
        labels: UploadFile | None = File(None),
        images: UploadFile | None = File(None),
        name: str | None = Form(None),
    ):
        raw = await predictions.read()
        if len(raw) > config.max_upload_bytes:
            raise ApiError(413, "UploadTooLarge", "predictions file exceeds the upload limit")
        records = parse_predictions(raw)
        if records and len(records[0].probs) > config.max_classes:
            raise ApiError(413, "LimitExceeded", f"more than {config.max_classes} classes")
        if len(records) > config.max_instances:
            raise ApiError(413, "LimitExceeded", f"more than {config.max_instances} instances")
        label_entries = parse_labels(await labels.read()) if labels is not None else None
        manifest = parse_image_manifest(await images.read()) if images is not None else None
        dataset = analytics.build_dataset(records, labels=label_entries, images=manifest)
        entry = registry.add(dataset, name or predictions.filename or "dataset")
        return json_response(descriptor_payload(entry), status=201)

    @app.post("/api/demo")
    def demo_dataset(request: Request):
        q = request.query_params
        spec = SynthSpec(
            classes=_parse_int(q.get("classes"), "classes", 100),
            instances=_parse_int(q.get("instances"), "instances", 5000),
            accuracy=_parse_float(q.get("accuracy"), "accuracy", 0.8),
            confusion_spread=_parse_int(q.get("spread"), "spread", 3),
            concentration=_parse_float(q.get("concentration"), "concentration", 4.0),
            seed=_parse_int(q.get("seed"), "seed", 7),
        )
        dataset = analytics.build_dataset(synthesize(spec))
        entry = registry.add(dataset, q.get("name") or f"demo-{spec.seed}")
        return json_response(descriptor_payload(entry), status=201)

    @app.get("/api/datasets")
    def list_datasets():
        return json_response([descriptor_payload(e) for e in registry.list()])

    @app.delete("/api/datasets/{dataset_id}")
    def delete_dataset(dataset_id: str):
        if not registry.delete(dataset_id):
            raise _not_found("UnknownDataset", f"no dataset {dataset_id!r}")
        return json_response({"deleted": dataset_id})

    @app.get("/api/datasets/{dataset_id}/classes")
    def class_table(dataset_id: str, request: Request):
        entry = resolve(dataset_id)
        q = request.query_params
        key = q.get("sort", "index")
        order = q.get("order", "asc")
        if key not in analytics.SORT_KEYS:
            raise _bad("InvalidParameter", f"unknown sort key {key!r}")
        if order not in analytics.SORT_ORDERS:
            raise _bad("InvalidParameter", f"unknown sort order {order!r}")
        return json_response(classes_payload(entry.dataset, SortSpec(key, order)))

    @app.get("/api/datasets/{dataset_id}/overview")
    def overview(dataset_id: str, request: Request):
        entry = resolve(dataset_id)
        bins = _parse_int(request.query_params.get("bins"), "bins", analytics.DEFAULT_OVERVIEW_BINS)
        if not 1 <= bins <= 100:
            raise _bad("InvalidParameter", "bins must be in [1, 100]")
        return json_response(overview_payload(entry.dataset, bins))

    @app.get("/api/datasets/{dataset_id}/window")
    def window(dataset_id: str, request: Request):
        entry = resolve(dataset_id)
        d = entry.dataset
        q = request.query_params
        from_class = _parse_int(q.get("from"), "from", 0)
        to_class = _parse_int(q.get("to"), "to", analytics.DEFAULT_WINDOW_SIZE - 1)
        to_class = min(to_class, d.num_classes - 1)
        flt, color = _window_specs(q)
        limit = _parse_int(q.get("limit"), "limit", analytics.DEFAULT_POLYLINE_LIMIT)
        if limit < 0:
            raise _bad("InvalidParameter", "limit must be non-negative")
        membership = q.get("membership", analytics.MEMBERSHIP_TRUE)
        if membership not in (analytics.MEMBERSHIP_TRUE, analytics.MEMBERSHIP_EITHER):
            raise _bad("InvalidParameter", f"unknown membership rule {membership!r}")
        scope = q.get("filter_scope", analytics.FILTER_SCOPE_ALL)
        if scope not in (analytics.FILTER_SCOPE_ALL, analytics.FILTER_SCOPE_WINDOW):
            raise _bad("InvalidParameter", f"unknown filter scope {scope!r}")
        ws = analytics.window_slice(
            d, from_class, to_class, flt, color,
            limit=limit, membership=membership, filter_scope=scope,
        )
        return json_response(window_payload(d, ws))

    @app.get("/api/datasets/{dataset_id}/chord")
    def chord(dataset_id: str, request: Request):
        entry = resolve(dataset_id)
        q = request.query_params
        raw = q.get("classes", "")
        if not raw:
            raise _bad("EmptySelection", "no classes selected")
        try:
            selection = [int(tok) for tok in raw.split(",")]
        except ValueError:
            raise _bad("InvalidParameter", "classes must be a comma-separated integer list") from None
        cap = _parse_int(q.get("example_cap"), "example_cap", analytics.DEFAULT_EXAMPLE_CAP)
        if cap < 0:
            raise _bad("InvalidParameter", "example_cap must be non-negative")
        cf = analytics.chord_flows(entry.dataset, selection, example_cap=cap)
        return json_response(chord_payload(entry.dataset, cf))

    @app.get("/api/datasets/{dataset_id}/instances/{instance_id}")
    def instance_detail(dataset_id: str, instance_id: str):
        entry = resolve(dataset_id)
        try:
            payload = instance_payload(entry.dataset, instance_id)
        except KeyError:
            raise _not_found("UnknownInstance", f"no instance {instance_id!r}") from None
        return json_response(payload)

    @app.get("/static/placeholder.svg")
    def placeholder():
        return Response(_PLACEHOLDER_SVG, media_type="image/svg+xml")

    if config.static_dir is not None and config.static_dir.is_dir():
        app.mount("/", StaticFiles(directory=config.static_dir, html=True), name="webapp")

    return app


def _window_specs(q) -> tuple[FilterSpec, ColorSpec]:
    pred_min = _parse_float(q.get("pred_min"), "pred_min", 0.0)
    pred_max = _parse_float(q.get("pred_max"), "pred_max", 1.0)
    try:
        flt = FilterSpec(pred_min, pred_max)
    except ValueError as exc:
        raise _bad("InvalidParameter", str(exc)) from None
    mode = q.get("color_mode", "bins")
    try:
        if mode == "bins":
            color = ColorSpec.bins(_parse_int(q.get("colors"), "colors", 10))
        elif mode == "threshold":
            color = ColorSpec.threshold(
                _parse_float(q.get("lo"), "lo", 0.0),
                _parse_float(q.get("hi"), "hi", 1.0),
            )
        else:
            raise _bad("InvalidParameter", f"unknown color mode {mode!r}")
    except ValueError as exc:
        raise _bad("InvalidParameter", str(exc)) from None
    return flt, color
