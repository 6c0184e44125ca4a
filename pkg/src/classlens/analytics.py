"""Pure, deterministic derivations over an immutable prediction dataset.

Everything the exploration views consume is computed here: top-1 predictions,
the confusion matrix, per-class correct/inbound/outbound summaries, sort
orders, instance filters, color binning, detail-window slices, chord flows
between selected classes, and per-class prediction histograms.

A :class:`Dataset` is immutable once constructed; all query functions are
read-only and safe to call concurrently.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

import numpy as np

from .errors import (
    ClassOutOfRange,
    DegenerateClassCount,
    DuplicateClassInSelection,
    DuplicateInstanceId,
    EmptyDataset,
    EmptySelection,
    InconsistentVectorLength,
    InvalidRange,
    WindowTooLarge,
)

# Defaults for the interactive surfaces. The detail view starts at ten
# classes and can never exceed WINDOW_CAP axes; polyline truncation is the
# only lossy path and is deterministic (instance-id ascending).
WINDOW_CAP = 50
DEFAULT_WINDOW_SIZE = 10
DEFAULT_POLYLINE_LIMIT = 2000
DEFAULT_EXAMPLE_CAP = 50
DEFAULT_OVERVIEW_BINS = 10
PROB_SUM_TOLERANCE = 1e-3

# Added before floor() when assigning equal-width bins, so values like 0.7
# whose binary representation sits just below the decimal do not fall into
# the bin below.
_BIN_EPSILON = 1e-9

SORT_KEYS = ("index", "correct", "inbound", "outbound", "mean_max")
SORT_ORDERS = ("asc", "desc")

# Detail-window membership rules: an instance belongs to the window when its
# true class lies inside it, or (widened) when either the true or the
# predicted class does.
MEMBERSHIP_TRUE = "true-class"
MEMBERSHIP_EITHER = "either"

# Scope of the existential prediction filter: any of the K classes, or only
# the classes inside the active window.
FILTER_SCOPE_ALL = "all"
FILTER_SCOPE_WINDOW = "window"


@dataclass(frozen=True)
class PredictionRecord:
    """One classified instance: id, ground-truth class, probability vector."""

    instance_id: str
    true_class: int
    probs: np.ndarray


@dataclass(frozen=True)
class LabelEntry:
    """Display name and ancestor path (root first) for one class."""

    class_id: int
    label: str
    hierarchy: tuple[str, ...] = ()


@dataclass(frozen=True)
class ClassSummary:
    class_id: int
    support: int
    correct: int
    outbound: int
    inbound: int
    mean_max_pred: float
    is_empty: bool


@dataclass(frozen=True)
class SortSpec:
    key: str = "index"
    order: str = "asc"

    def __post_init__(self):
        if self.key not in SORT_KEYS:
            raise ValueError(f"unknown sort key {self.key!r}")
        if self.order not in SORT_ORDERS:
            raise ValueError(f"unknown sort order {self.order!r}")


@dataclass(frozen=True)
class FilterSpec:
    """Inclusive prediction-value range; an instance passes when any of its
    K probabilities falls inside."""

    pred_min: float = 0.0
    pred_max: float = 1.0

    def __post_init__(self):
        if not (0.0 <= self.pred_min <= 1.0 and 0.0 <= self.pred_max <= 1.0):
            raise ValueError("filter bounds must lie in [0, 1]")
        if self.pred_min > self.pred_max:
            raise ValueError("pred_min must not exceed pred_max")

    @property
    def is_full_range(self) -> bool:
        return self.pred_min <= 0.0 and self.pred_max >= 1.0


@dataclass(frozen=True)
class ColorSpec:
    """Instance coloring: ``n`` equal-width bins of [0, 1], or a single
    inclusive threshold range that separates group 1 from group 0."""

    mode: str = "bins"
    n: int = 10
    lo: float = 0.0
    hi: float = 1.0

    def __post_init__(self):
        if self.mode not in ("bins", "threshold"):
            raise ValueError(f"unknown color mode {self.mode!r}")
        if self.mode == "bins" and not 1 <= self.n <= 10:
            raise ValueError("bin count must be in [1, 10]")
        if self.mode == "threshold":
            if not (0.0 <= self.lo <= 1.0 and 0.0 <= self.hi <= 1.0):
                raise ValueError("threshold bounds must lie in [0, 1]")
            if self.lo > self.hi:
                raise ValueError("threshold lo must not exceed hi")

    @classmethod
    def bins(cls, n: int) -> "ColorSpec":
        return cls(mode="bins", n=n)

    @classmethod
    def threshold(cls, lo: float, hi: float) -> "ColorSpec":
        return cls(mode="threshold", lo=lo, hi=hi)

    @property
    def group_count(self) -> int:
        return self.n if self.mode == "bins" else 2


@dataclass(frozen=True)
class ChordFlows:
    """Misclassification flows between a selected class subset.

    ``flows[i][j]`` counts instances whose true class is ``classes[i]`` and
    whose top-1 prediction is ``classes[j]``; the diagonal is zero.
    ``examples`` holds up to ``example_cap`` instance ids per ordered class
    pair, ascending by id.
    """

    classes: tuple[int, ...]
    flows: tuple[tuple[int, ...], ...]
    examples: Mapping[tuple[int, int], tuple[str, ...]]


@dataclass(frozen=True)
class Histogram:
    """Counts of all N instances' prediction values for one class axis."""

    class_id: int
    bins: tuple[int, ...]

    @property
    def bin_count(self) -> int:
        return len(self.bins)


@dataclass(frozen=True)
class WindowInstance:
    instance_id: str
    true_class: int
    values: tuple[float, ...]
    color_group: int


@dataclass(frozen=True)
class WindowSlice:
    """Detail-view payload for classes ``from_class..to_class`` inclusive."""

    from_class: int
    to_class: int
    instances: tuple[WindowInstance, ...]
    doughnuts: tuple[ClassSummary, ...]
    total_matching: int


class Dataset:
    """Immutable ingested collection plus every derived table.

    Probabilities are stored as 32-bit floats (ingestion quantizes); all
    counts are exact integers derived from top-1 predictions with ties
    broken toward the lowest class index.
    """

    def __init__(
        self,
        instance_ids: Sequence[str],
        true_classes: np.ndarray,
        probs: np.ndarray,
        labels: Sequence[LabelEntry] | None = None,
        images: Mapping[str, str] | None = None,
        prob_sum_tolerance: float = PROB_SUM_TOLERANCE,
    ):
        probs = np.ascontiguousarray(probs, dtype=np.float32)
        if probs.ndim != 2:
            raise InconsistentVectorLength("probability table must be 2-D")
        n, k = probs.shape
        if n == 0:
            raise EmptyDataset("dataset has no instances")
        if k < 2:
            raise DegenerateClassCount(f"need at least 2 classes, got {k}")
        if len(instance_ids) != n or len(true_classes) != n:
            raise InconsistentVectorLength("ids, true classes, and rows disagree")

        true_classes = np.asarray(true_classes, dtype=np.int64)
        if true_classes.min() < 0 or true_classes.max() >= k:
            raise ClassOutOfRange("true class outside [0, K)")
        if not np.isfinite(probs).all():
            raise ValueError("probabilities must be finite")
        if float(probs.min()) < 0.0 or float(probs.max()) > 1.0:
            raise ValueError("probabilities must lie in [0, 1]")
        sums = probs.sum(axis=1, dtype=np.float64)
        bad = np.abs(sums - 1.0) > prob_sum_tolerance
        if bad.any():
            i = int(np.argmax(bad))
            raise ValueError(
                f"instance {instance_ids[i]!r} probabilities sum to {sums[i]!r}"
            )

        ids = tuple(str(i) for i in instance_ids)
        row_of: dict[str, int] = {}
        for row, iid in enumerate(ids):
            if iid in row_of:
                raise DuplicateInstanceId(iid)
            row_of[iid] = row

        self.instance_ids = ids
        self.true_classes = true_classes
        self.probs = probs
        self.num_instances = n
        self.num_classes = k
        self._row_of = row_of

        self.predicted = probs.argmax(axis=1).astype(np.int64)
        self.max_pred = probs.max(axis=1)
        self.confusion = np.bincount(
            true_classes * k + self.predicted, minlength=k * k
        ).reshape(k, k)

        support = self.confusion.sum(axis=1)
        correct = np.diagonal(self.confusion).copy()
        inbound = self.confusion.sum(axis=0) - correct
        sums_max = np.bincount(
            true_classes, weights=self.max_pred.astype(np.float64), minlength=k
        )
        mean_max = np.where(support > 0, sums_max / np.maximum(support, 1), 0.0)
        self.summaries = tuple(
            ClassSummary(
                class_id=c,
                support=int(support[c]),
                correct=int(correct[c]),
                outbound=int(support[c] - correct[c]),
                inbound=int(inbound[c]),
                mean_max_pred=float(mean_max[c]),
                is_empty=bool(support[c] == 0),
            )
            for c in range(k)
        )

        # Instance rows in ascending id order, globally and per true class.
        order = sorted(range(n), key=ids.__getitem__)
        self._order = np.asarray(order, dtype=np.int64)
        by_true: list[list[int]] = [[] for _ in range(k)]
        for row in order:
            by_true[int(true_classes[row])].append(row)
        self._rows_by_true = [np.asarray(rows, dtype=np.int64) for rows in by_true]

        self._labels = {e.class_id: e for e in labels or ()}
        for cid in self._labels:
            if not 0 <= cid < k:
                raise ClassOutOfRange(f"label table names class {cid}, K={k}")
        self._images = dict(images or {})

        for arr in (self.true_classes, self.probs, self.predicted, self.max_pred,
                    self.confusion, self._order):
            arr.setflags(write=False)

        self._hist_cache: dict[int, np.ndarray] = {}
        self._hist_lock = threading.Lock()
        self._histogram_matrix(DEFAULT_OVERVIEW_BINS)  # warm the common case

    # -- plain data access ---------------------------------------------------

    def record(self, row: int) -> PredictionRecord:
        return PredictionRecord(
            self.instance_ids[row], int(self.true_classes[row]), self.probs[row]
        )

    def records(self) -> Iterator[PredictionRecord]:
        return (self.record(row) for row in range(self.num_instances))

    def row_of(self, instance_id: str) -> int | None:
        return self._row_of.get(instance_id)

    def label(self, class_id: int) -> LabelEntry:
        entry = self._labels.get(class_id)
        if entry is None:
            return LabelEntry(class_id, f"class-{class_id}")
        return entry

    def image_url(self, instance_id: str) -> str | None:
        return self._images.get(instance_id)

    @property
    def total_correct(self) -> int:
        return int(np.diagonal(self.confusion).sum())

    @property
    def total_misclassified(self) -> int:
        return self.num_instances - self.total_correct

    # -- internals -------------------------------------------------------------

    def _histogram_matrix(self, bins: int) -> np.ndarray:
        """K x bins counts of every instance's prediction per class axis."""
        with self._hist_lock:
            cached = self._hist_cache.get(bins)
            if cached is not None:
                return cached
            by_class = np.ascontiguousarray(self.probs.T)
            out = np.empty((self.num_classes, bins), dtype=np.int64)
            for c in range(self.num_classes):
                out[c] = np.bincount(_bin_indices(by_class[c], bins), minlength=bins)
            out.setflags(write=False)
            self._hist_cache[bins] = out
            return out


def _check_class(c: int, k: int) -> None:
    if not 0 <= c < k:
        raise ClassOutOfRange(f"class {c} outside [0, {k})")


def _bin_indices(values: np.ndarray, n: int) -> np.ndarray:
    # The product is taken at float32 precision so that stored values that
    # originated as decimals (0.7 quantized to 0.69999999...) still scale to
    # their intended bin edge before the epsilon nudge and floor.
    scaled = values.astype(np.float32) * np.float32(n)
    idx = np.floor(scaled.astype(np.float64) + _BIN_EPSILON).astype(np.int64)
    return np.minimum(idx, n - 1)


def predicted_class(record: PredictionRecord) -> int:
    """Top-1 class of a prediction vector; ties go to the lowest index."""
    return int(np.argmax(record.probs))


def build_dataset(
    records: Sequence[PredictionRecord],
    labels: Sequence[LabelEntry] | None = None,
    images: Mapping[str, str] | None = None,
    prob_sum_tolerance: float = PROB_SUM_TOLERANCE,
) -> Dataset:
    """Stack validated records into an immutable, fully derived Dataset.

    Raises EmptyDataset for zero records, InconsistentVectorLength when the
    vectors disagree on K, DuplicateInstanceId on repeated ids, and
    DegenerateClassCount for K < 2. Probabilities are quantized to float32.
    """
    if not records:
        raise EmptyDataset("no records")
    k = len(records[0].probs)
    for r in records:
        if len(r.probs) != k:
            raise InconsistentVectorLength(
                f"instance {r.instance_id!r} has {len(r.probs)} probabilities, expected {k}"
            )
    probs = np.empty((len(records), k), dtype=np.float32)
    for i, r in enumerate(records):
        probs[i] = np.asarray(r.probs, dtype=np.float32)
    ids = [r.instance_id for r in records]
    true = np.fromiter((r.true_class for r in records), dtype=np.int64, count=len(records))
    return Dataset(ids, true, probs, labels=labels, images=images,
                   prob_sum_tolerance=prob_sum_tolerance)


def class_summary(d: Dataset, c: int) -> ClassSummary:
    """Correct/outbound/inbound counts and mean max-prediction for class c."""
    _check_class(c, d.num_classes)
    return d.summaries[c]


def sort_classes(d: Dataset, spec: SortSpec) -> list[int]:
    """Permutation of 0..K-1 by the sort key; ties break by ascending index."""
    if spec.key == "index":
        values: Sequence = range(d.num_classes)
    elif spec.key == "correct":
        values = [s.correct for s in d.summaries]
    elif spec.key == "inbound":
        values = [s.inbound for s in d.summaries]
    elif spec.key == "outbound":
        values = [s.outbound for s in d.summaries]
    else:
        values = [s.mean_max_pred for s in d.summaries]
    if spec.order == "asc":
        return sorted(range(d.num_classes), key=lambda c: (values[c], c))
    return sorted(range(d.num_classes), key=lambda c: (-values[c], c))


def filter_instances(
    d: Dataset, f: FilterSpec, classes: Sequence[int] | None = None
) -> set[str]:
    """Ids of instances with any prediction inside the inclusive range.

    ``classes`` restricts the existential check to a subset of class axes
    (used by the window-scoped filter variant); default is all K classes.
    """
    if f.is_full_range and classes is None:
        return set(d.instance_ids)
    sub = d.probs if classes is None else d.probs[:, list(classes)]
    lo, hi = np.float32(f.pred_min), np.float32(f.pred_max)
    mask = ((sub >= lo) & (sub <= hi)).any(axis=1)
    return {d.instance_ids[i] for i in np.nonzero(mask)[0]}


def color_group(p: float, spec: ColorSpec) -> int:
    """Color-group index of a prediction value under the active color spec."""
    if spec.mode == "threshold":
        v = np.float32(p)
        return 1 if np.float32(spec.lo) <= v <= np.float32(spec.hi) else 0
    scaled = float(np.float32(p) * np.float32(spec.n))
    return min(int(math.floor(scaled + _BIN_EPSILON)), spec.n - 1)


def _color_groups(values: np.ndarray, spec: ColorSpec) -> np.ndarray:
    if spec.mode == "threshold":
        v = values.astype(np.float32)
        inside = (v >= np.float32(spec.lo)) & (v <= np.float32(spec.hi))
        return inside.astype(np.int64)
    return _bin_indices(values, spec.n)


def window_slice(
    d: Dataset,
    from_class: int,
    to_class: int,
    f: FilterSpec,
    color: ColorSpec,
    limit: int = DEFAULT_POLYLINE_LIMIT,
    membership: str = MEMBERSHIP_TRUE,
    filter_scope: str = FILTER_SCOPE_ALL,
) -> WindowSlice:
    """Detail-view slice for classes ``from_class..to_class`` inclusive.

    Instances pass when they satisfy the prediction filter and the window
    membership rule (true class inside the window, or either class when
    widened). Polylines are id-ascending and truncated to ``limit``;
    ``total_matching`` and the per-class doughnut summaries are exact
    regardless of the truncation.
    """
    if from_class > to_class:
        raise InvalidRange(f"window [{from_class}, {to_class}] is inverted")
    _check_class(from_class, d.num_classes)
    _check_class(to_class, d.num_classes)
    width = to_class - from_class + 1
    if width > WINDOW_CAP:
        raise WindowTooLarge(f"window spans {width} classes, cap is {WINDOW_CAP}")
    if membership not in (MEMBERSHIP_TRUE, MEMBERSHIP_EITHER):
        raise ValueError(f"unknown membership rule {membership!r}")
    if filter_scope not in (FILTER_SCOPE_ALL, FILTER_SCOPE_WINDOW):
        raise ValueError(f"unknown filter scope {filter_scope!r}")
    if limit < 0:
        raise ValueError("limit must be non-negative")

    member = (d.true_classes >= from_class) & (d.true_classes <= to_class)
    if membership == MEMBERSHIP_EITHER:
        member |= (d.predicted >= from_class) & (d.predicted <= to_class)
    rows = d._order[member[d._order]]

    if not f.is_full_range:
        sub = d.probs[rows]
        if filter_scope == FILTER_SCOPE_WINDOW:
            sub = sub[:, from_class : to_class + 1]
        lo, hi = np.float32(f.pred_min), np.float32(f.pred_max)
        rows = rows[((sub >= lo) & (sub <= hi)).any(axis=1)]

    total_matching = len(rows)
    shown = rows[:limit]
    groups = _color_groups(d.max_pred[shown], color)
    values = d.probs[shown, from_class : to_class + 1]
    instances = tuple(
        WindowInstance(
            instance_id=d.instance_ids[row],
            true_class=int(d.true_classes[row]),
            values=tuple(values[i].tolist()),
            color_group=int(groups[i]),
        )
        for i, row in enumerate(shown)
    )
    return WindowSlice(
        from_class=from_class,
        to_class=to_class,
        instances=instances,
        doughnuts=d.summaries[from_class : to_class + 1],
        total_matching=total_matching,
    )


def chord_flows(
    d: Dataset, selection: Sequence[int], example_cap: int = DEFAULT_EXAMPLE_CAP
) -> ChordFlows:
    """Pairwise misclassification counts within a selected class subset.

    Flows are the confusion submatrix over the selection with a zeroed
    diagonal; each ordered pair carries up to ``example_cap`` example
    instance ids, ascending by id.
    """
    sel = [int(c) for c in selection]
    if not sel:
        raise EmptySelection("chord selection is empty")
    if len(set(sel)) != len(sel):
        raise DuplicateClassInSelection(f"selection {sel} repeats a class")
    for c in sel:
        _check_class(c, d.num_classes)
    if example_cap < 0:
        raise ValueError("example_cap must be non-negative")

    flows = d.confusion[np.ix_(sel, sel)].copy()
    np.fill_diagonal(flows, 0)

    examples: dict[tuple[int, int], tuple[str, ...]] = {}
    for a in sel:
        collected: dict[int, list[str]] = {b: [] for b in sel if b != a}
        unfilled = len(collected) if example_cap > 0 else 0
        if unfilled:
            for row in d._rows_by_true[a]:
                bucket = collected.get(int(d.predicted[row]))
                if bucket is None or len(bucket) >= example_cap:
                    continue
                bucket.append(d.instance_ids[row])
                if len(bucket) == example_cap:
                    unfilled -= 1
                    if unfilled == 0:
                        break
        for b, ids in collected.items():
            examples[(a, b)] = tuple(ids)

    return ChordFlows(
        classes=tuple(sel),
        flows=tuple(tuple(int(v) for v in r) for r in flows),
        examples=examples,
    )


def prediction_histogram(d: Dataset, c: int, bins: int) -> Histogram:
    """Histogram of every instance's prediction value for class axis c."""
    _check_class(c, d.num_classes)
    if bins < 1:
        raise ValueError("bin count must be at least 1")
    matrix = d._histogram_matrix(bins)
    return Histogram(class_id=c, bins=tuple(int(v) for v in matrix[c]))
