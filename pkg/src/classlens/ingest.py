"""Parsing, snapshot persistence, and synthetic generation of prediction data.

File formats
------------
Predictions CSV   header ``instance_id,true_class,p0,...,p{K-1}``, one row per
                  instance, decimal floats, UTF-8, LF or CRLF. No quoting:
                  ids must not contain commas or line breaks.
Labels CSV        header ``class_id,label,hierarchy``; hierarchy is a
                  "/"-separated ancestor path, root first (no escaping, so
                  labels must not contain "/" or ",").
Image manifest    header ``instance_id,image_url``; the URL is everything
                  after the first comma.

Snapshot binary (magic ``MCV1``), little-endian throughout:
  magic (4 bytes) | version u16 | K u32 | N u64
  N records: id length u16, id UTF-8 bytes, true class u32, K float32
  K*K confusion matrix cells as u64
  checksum u64: the first 8 bytes of the SHA-256 digest of all preceding
  bytes, read as an unsigned little-endian integer.

Parsing is fail-fast: the first malformed line aborts with an error naming
its 1-based line number. Probabilities are validated (finite, in [0, 1],
sum within tolerance of 1) before being quantized to float32 for storage.
"""

from __future__ import annotations

import hashlib
import io
import struct
from dataclasses import dataclass
from typing import BinaryIO, Iterable, Iterator, TextIO

import numpy as np

from .analytics import (
    PROB_SUM_TOLERANCE,
    Dataset,
    LabelEntry,
    PredictionRecord,
)
from .errors import (
    BadMagic,
    ChecksumMismatch,
    DuplicateClassId,
    DuplicateInstanceId,
    InvalidSpec,
    MalformedHeader,
    MalformedRow,
    NonFiniteValue,
    ProbabilityOutOfRange,
    RowArityMismatch,
    SumTolerance,
    TrueClassOutOfRange,
    TruncatedStream,
    UnsupportedVersion,
)

SNAPSHOT_MAGIC = b"MCV1"
SNAPSHOT_VERSION = 1


@dataclass(frozen=True)
class SynthSpec:
    """Parameters of the deterministic synthetic dataset generator.

    Each instance draws a uniform true class. With probability ``accuracy``
    the top-1 target is the true class; otherwise it is one of the class's
    ``confusion_spread`` cyclic successors, chosen uniformly. The target
    receives a dominant mass (sharper for larger ``concentration``) and the
    remainder is spread over the other classes by positive random weights.
    """

    classes: int = 1000
    instances: int = 50_000
    accuracy: float = 0.8
    confusion_spread: int = 3
    concentration: float = 4.0
    seed: int = 42

    def validate(self) -> None:
        if self.classes < 2:
            raise InvalidSpec("need at least 2 classes")
        if self.instances < 1:
            raise InvalidSpec("need at least 1 instance")
        if not 0.0 < self.accuracy <= 1.0:
            raise InvalidSpec("accuracy must be in (0, 1]")
        if not 1 <= self.confusion_spread <= self.classes - 1:
            raise InvalidSpec("confusion_spread must be in [1, classes-1]")
        if not self.concentration > 0:
            raise InvalidSpec("concentration must be positive")


def _lines(source: str | bytes | TextIO | BinaryIO) -> Iterator[str]:
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    if isinstance(source, str):
        yield from source.splitlines()
        return
    if isinstance(source, io.TextIOBase):
        for line in source:
            yield line.rstrip("\r\n")
        return
    wrapper = io.TextIOWrapper(source, encoding="utf-8", newline="")
    try:
        for line in wrapper:
            yield line.rstrip("\r\n")
    finally:
        wrapper.detach()


def parse_predictions(
    source: str | bytes | TextIO | BinaryIO,
    expected_k: int | None = None,
    prob_sum_tolerance: float = PROB_SUM_TOLERANCE,
) -> list[PredictionRecord]:
    """Parse and validate a predictions CSV into records.

    K is taken from the header (and must equal ``expected_k`` when given).
    Raises a ParseError subclass carrying the 1-based line number of the
    first offending line.
    """
    lines = _lines(source)
    try:
        header = next(lines)
    except StopIteration:
        raise MalformedHeader(1, "empty predictions file") from None
    fields = header.split(",")
    if len(fields) < 3 or fields[0] != "instance_id" or fields[1] != "true_class":
        raise MalformedHeader(1, f"unexpected header {header!r}")
    k = len(fields) - 2
    for j, name in enumerate(fields[2:]):
        if name != f"p{j}":
            raise MalformedHeader(1, f"probability column {j} is named {name!r}")
    if expected_k is not None and k != expected_k:
        raise MalformedHeader(1, f"header has {k} probability columns, expected {expected_k}")

    records: list[PredictionRecord] = []
    seen: set[str] = set()
    for lineno, line in enumerate(lines, start=2):
        row = line.split(",")
        if len(row) != k + 2:
            raise RowArityMismatch(lineno, f"expected {k + 2} fields, found {len(row)}")
        iid = row[0]
        if iid in seen:
            raise DuplicateInstanceId(iid, line=lineno)
        seen.add(iid)
        try:
            true_class = int(row[1])
        except ValueError:
            raise TrueClassOutOfRange(lineno, f"true class {row[1]!r} is not an integer") from None
        if not 0 <= true_class < k:
            raise TrueClassOutOfRange(lineno, f"true class {true_class} outside [0, {k})")
        try:
            probs = np.asarray(row[2:], dtype=np.float64)
        except ValueError:
            raise NonFiniteValue(lineno, "unparseable probability value") from None
        if not np.isfinite(probs).all():
            raise NonFiniteValue(lineno, "probability is NaN or infinite")
        if probs.min() < 0.0 or probs.max() > 1.0:
            raise ProbabilityOutOfRange(lineno, "probability outside [0, 1]")
        total = float(probs.sum())
        if abs(total - 1.0) > prob_sum_tolerance:
            raise SumTolerance(lineno, total, prob_sum_tolerance)
        # quantize after validation; tolerance applies to the decimal values
        records.append(PredictionRecord(iid, true_class, probs.astype(np.float32)))
    return records


def serialize_predictions(records: Iterable[PredictionRecord], sink: TextIO) -> None:
    """Inverse of parse_predictions; floats keep 9 significant digits so
    32-bit values round-trip exactly."""
    records = list(records)
    if not records:
        raise ValueError("nothing to serialize")
    k = len(records[0].probs)
    fmt = ",".join(["%.9g"] * k)
    sink.write("instance_id,true_class," + ",".join(f"p{j}" for j in range(k)) + "\n")
    for r in records:
        if "," in r.instance_id or "\n" in r.instance_id or "\r" in r.instance_id:
            raise ValueError(f"instance id {r.instance_id!r} not CSV-safe")
        values = fmt % tuple(np.asarray(r.probs, dtype=np.float64).tolist())
        sink.write(f"{r.instance_id},{r.true_class},{values}\n")


def parse_labels(source: str | bytes | TextIO | BinaryIO) -> list[LabelEntry]:
    """Parse the class-label table; hierarchy splits on "/", root first."""
    lines = _lines(source)
    try:
        header = next(lines)
    except StopIteration:
        return []
    if header.split(",") != ["class_id", "label", "hierarchy"]:
        raise MalformedRow(1, f"unexpected labels header {header!r}")
    entries: list[LabelEntry] = []
    seen: set[int] = set()
    for lineno, line in enumerate(lines, start=2):
        row = line.split(",")
        if len(row) != 3:
            raise MalformedRow(lineno, f"expected 3 fields, found {len(row)}")
        try:
            class_id = int(row[0])
        except ValueError:
            raise MalformedRow(lineno, f"class id {row[0]!r} is not an integer") from None
        if class_id < 0:
            raise MalformedRow(lineno, f"negative class id {class_id}")
        if class_id in seen:
            raise DuplicateClassId(class_id, line=lineno)
        seen.add(class_id)
        hierarchy = tuple(row[2].split("/")) if row[2] else ()
        entries.append(LabelEntry(class_id, row[1], hierarchy))
    return entries


def parse_image_manifest(source: str | bytes | TextIO | BinaryIO) -> dict[str, str]:
    """Parse instance-id to image-URL pairs; the URL may contain commas."""
    lines = _lines(source)
    try:
        header = next(lines)
    except StopIteration:
        return {}
    if header != "instance_id,image_url":
        raise MalformedRow(1, f"unexpected manifest header {header!r}")
    mapping: dict[str, str] = {}
    for lineno, line in enumerate(lines, start=2):
        parts = line.split(",", 1)
        if len(parts) != 2 or not parts[0]:
            raise MalformedRow(lineno, "expected instance_id,image_url")
        iid, url = parts
        if iid in mapping:
            raise DuplicateInstanceId(iid, line=lineno)
        mapping[iid] = url
    return mapping


# --- snapshots ---------------------------------------------------------------


def write_snapshot(dataset: Dataset, sink: BinaryIO) -> None:
    """Serialize a dataset (records + confusion matrix) to the binary format."""
    digest = hashlib.sha256()

    def out(chunk: bytes) -> None:
        digest.update(chunk)
        sink.write(chunk)

    out(SNAPSHOT_MAGIC)
    out(struct.pack("<H", SNAPSHOT_VERSION))
    out(struct.pack("<IQ", dataset.num_classes, dataset.num_instances))
    probs = np.ascontiguousarray(dataset.probs, dtype="<f4")
    for row in range(dataset.num_instances):
        idb = dataset.instance_ids[row].encode("utf-8")
        if len(idb) > 0xFFFF:
            raise ValueError(f"instance id too long to snapshot ({len(idb)} bytes)")
        out(
            struct.pack("<H", len(idb))
            + idb
            + struct.pack("<I", int(dataset.true_classes[row]))
            + probs[row].tobytes()
        )
    out(dataset.confusion.astype("<u8").tobytes())
    sink.write(struct.pack("<Q", int.from_bytes(digest.digest()[:8], "little")))


def read_snapshot(source: BinaryIO | bytes) -> Dataset:
    """Rebuild a dataset from write_snapshot output, verifying the checksum."""
    data = source if isinstance(source, bytes) else source.read()

    def take(offset: int, count: int) -> int:
        if offset + count > len(data):
            raise TruncatedStream(f"needed {offset + count} bytes, have {len(data)}")
        return offset + count

    off = take(0, 4)
    if data[:4] != SNAPSHOT_MAGIC:
        raise BadMagic(f"bad magic {data[:4]!r}")
    end = take(off, 2)
    (version,) = struct.unpack_from("<H", data, off)
    if version != SNAPSHOT_VERSION:
        raise UnsupportedVersion(f"snapshot version {version}, supported: {SNAPSHOT_VERSION}")
    off = end
    off_end = take(off, 12)
    k, n = struct.unpack_from("<IQ", data, off)
    off = off_end

    ids: list[str] = []
    true = np.empty(n, dtype=np.int64)
    probs = np.empty((n, k), dtype=np.float32)
    row_bytes = 4 + 4 * k
    for i in range(n):
        end = take(off, 2)
        (id_len,) = struct.unpack_from("<H", data, off)
        off = take(end, id_len + row_bytes)
        ids.append(data[end : end + id_len].decode("utf-8"))
        (true[i],) = struct.unpack_from("<I", data, end + id_len)
        probs[i] = np.frombuffer(data, "<f4", k, end + id_len + 4)
    end = take(off, 8 * k * k)
    stored_confusion = (
        np.frombuffer(data, "<u8", k * k, off).reshape(k, k).astype(np.int64)
    )
    off = end
    take(off, 8)
    (stored_sum,) = struct.unpack_from("<Q", data, off)
    digest = hashlib.sha256(data[:off]).digest()
    if int.from_bytes(digest[:8], "little") != stored_sum:
        raise ChecksumMismatch(
            f"checksum {stored_sum:#018x} does not match stream contents"
        )

    dataset = Dataset(ids, true, probs)
    if not np.array_equal(dataset.confusion, stored_confusion):
        raise ChecksumMismatch("stored confusion matrix disagrees with records")
    return dataset


# --- synthetic data ----------------------------------------------------------

_SYNTH_CHUNK = 4096


def synthesize(spec: SynthSpec) -> list[PredictionRecord]:
    """Generate a seed-deterministic synthetic prediction set.

    The top-1 target always receives mass above 0.5, so it is the strict
    argmax by construction and the empirical accuracy concentrates tightly
    around ``spec.accuracy``.
    """
    spec.validate()
    rng = np.random.default_rng(np.random.PCG64(spec.seed))
    k, n = spec.classes, spec.instances

    true = rng.integers(0, k, size=n)
    hit = rng.random(n) < spec.accuracy
    offsets = rng.integers(1, spec.confusion_spread + 1, size=n)
    target = np.where(hit, true, (true + offsets) % k)
    # target mass in [0.5005, 1]: the 1e-3 margin keeps the argmax strict
    # even after float32 quantization
    sharp = rng.beta(spec.concentration, 1.0, size=n)
    mass = 0.5 + 0.5 * (1e-3 + (1.0 - 1e-3) * sharp)

    width = len(str(n - 1)) if n > 1 else 1
    width = max(width, 6)
    records: list[PredictionRecord] = []
    for start in range(0, n, _SYNTH_CHUNK):
        stop = min(start + _SYNTH_CHUNK, n)
        rows = stop - start
        weights = 1e-6 + rng.random((rows, k))
        local = np.arange(rows)
        weights[local, target[start:stop]] = 0.0
        scale = (1.0 - mass[start:stop]) / weights.sum(axis=1)
        block = weights * scale[:, None]
        block[local, target[start:stop]] = mass[start:stop]
        block /= block.sum(axis=1, keepdims=True)
        quantized = block.astype(np.float32)
        for i in range(rows):
            records.append(
                PredictionRecord(
                    f"s{start + i:0{width}d}", int(true[start + i]), quantized[i]
                )
            )
    return records
