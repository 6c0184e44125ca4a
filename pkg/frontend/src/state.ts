/** Exploration state: the single source of truth for every control, the
 * query URLs derived from it, and a sequence-numbered fetch pipeline that
 * discards stale responses.
 */

import { ApiError, type Transport } from "./api.js";
import type {
  ChordPayload,
  ClassSummaryRow,
  OverviewPayload,
  WindowPayload,
} from "./types.js";

export const WINDOW_CAP = 50;
export const DEFAULT_WINDOW_SIZE = 10;
export const SELECTION_CAP = 12;
export const POLYLINE_LIMIT = 2000;
export const OVERVIEW_BINS = 10;

export type SortKey = "index" | "correct" | "inbound" | "outbound" | "mean_max";
export type SortOrder = "asc" | "desc";
export const SORT_KEYS: SortKey[] = ["index", "correct", "inbound", "outbound", "mean_max"];

export type ColorMode =
  | { mode: "bins"; n: number }
  | { mode: "threshold"; lo: number; hi: number };

export type HoverTarget =
  | { kind: "none" }
  | { kind: "instance"; instanceId: string }
  | { kind: "class"; classId: number };

export interface ExplorationState {
  datasetId: string | null;
  k: number;
  from: number;
  to: number;
  predMin: number;
  predMax: number;
  sortKey: SortKey;
  sortOrder: SortOrder;
  color: ColorMode;
  selection: number[];
  chordOpen: boolean;
  hover: HoverTarget;
}

const clampInt = (v: number, lo: number, hi: number) =>
  Math.max(lo, Math.min(hi, Math.round(v)));
const clamp01 = (v: number) => (Number.isFinite(v) ? Math.max(0, Math.min(1, v)) : 0);

/** Detail window clamped into [0, k), non-inverted, at most WINDOW_CAP wide. */
export function clampWindow(from: number, to: number, k: number): [number, number] {
  const top = Math.max(0, k - 1);
  let lo = clampInt(Number.isFinite(from) ? from : 0, 0, top);
  let hi = clampInt(Number.isFinite(to) ? to : lo, 0, top);
  if (hi < lo) {
    [lo, hi] = [hi, lo];
  }
  if (hi - lo + 1 > WINDOW_CAP) {
    hi = lo + WINDOW_CAP - 1;
  }
  return [lo, hi];
}

export function clampColor(color: ColorMode): ColorMode {
  if (color.mode === "bins") {
    return { mode: "bins", n: clampInt(Number.isFinite(color.n) ? color.n : 10, 1, 10) };
  }
  const lo = clamp01(color.lo);
  const hi = clamp01(color.hi);
  return { mode: "threshold", lo: Math.min(lo, hi), hi: Math.max(lo, hi) };
}

export function clampSelection(selection: number[], k: number): number[] {
  const seen = new Set<number>();
  const out: number[] = [];
  for (const c of selection) {
    const v = Math.round(c);
    if (v >= 0 && v < k && !seen.has(v)) {
      seen.add(v);
      out.push(v);
      if (out.length === SELECTION_CAP) {
        break;
      }
    }
  }
  return out;
}

export function normalize(s: ExplorationState): ExplorationState {
  const [from, to] = clampWindow(s.from, s.to, s.k);
  const lo = clamp01(s.predMin);
  const hi = clamp01(s.predMax);
  return {
    ...s,
    from,
    to,
    predMin: Math.min(lo, hi),
    predMax: Math.max(lo, hi),
    sortKey: SORT_KEYS.includes(s.sortKey) ? s.sortKey : "index",
    sortOrder: s.sortOrder === "desc" ? "desc" : "asc",
    color: clampColor(s.color),
    selection: clampSelection(s.selection, s.k),
    chordOpen: s.chordOpen && s.selection.length > 0,
  };
}

/** First load: the first ten classes (or fewer when K is small). */
export function initialState(datasetId: string | null, k: number): ExplorationState {
  return normalize({
    datasetId,
    k,
    from: 0,
    to: DEFAULT_WINDOW_SIZE - 1,
    predMin: 0,
    predMax: 1,
    sortKey: "index",
    sortOrder: "asc",
    color: { mode: "bins", n: 10 },
    selection: [],
    chordOpen: false,
    hover: { kind: "none" },
  });
}

// --- URL encoding of the sharable part of the state --------------------------

export function encodeState(s: ExplorationState): string {
  const q = new URLSearchParams();
  if (s.datasetId) {
    q.set("dataset", s.datasetId);
  }
  q.set("from", String(s.from));
  q.set("to", String(s.to));
  if (s.predMin > 0) q.set("pred_min", String(s.predMin));
  if (s.predMax < 1) q.set("pred_max", String(s.predMax));
  if (s.sortKey !== "index") q.set("sort", s.sortKey);
  if (s.sortOrder !== "asc") q.set("order", s.sortOrder);
  if (s.color.mode === "bins") {
    if (s.color.n !== 10) q.set("colors", String(s.color.n));
  } else {
    q.set("color_mode", "threshold");
    q.set("lo", String(s.color.lo));
    q.set("hi", String(s.color.hi));
  }
  if (s.selection.length > 0) {
    q.set("sel", s.selection.join(","));
  }
  if (s.chordOpen) {
    q.set("chord", "1");
  }
  return q.toString();
}

export function decodeState(query: string, datasetId: string | null, k: number): ExplorationState {
  const q = new URLSearchParams(query);
  const base = initialState(datasetId, k);
  const num = (name: string, fallback: number) => {
    const raw = q.get(name);
    const v = raw === null ? NaN : Number(raw);
    return Number.isFinite(v) ? v : fallback;
  };
  const color: ColorMode =
    q.get("color_mode") === "threshold"
      ? { mode: "threshold", lo: num("lo", 0), hi: num("hi", 1) }
      : { mode: "bins", n: num("colors", 10) };
  const selection = (q.get("sel") ?? "")
    .split(",")
    .filter((t) => t !== "")
    .map(Number)
    .filter(Number.isFinite);
  return normalize({
    ...base,
    from: num("from", base.from),
    to: num("to", base.to),
    predMin: num("pred_min", 0),
    predMax: num("pred_max", 1),
    sortKey: (q.get("sort") ?? "index") as SortKey,
    sortOrder: (q.get("order") ?? "asc") as SortOrder,
    color,
    selection,
    chordOpen: q.get("chord") === "1" && selection.length > 0,
  });
}

// --- query construction -------------------------------------------------------

export type QueryKind = "classes" | "overview" | "window" | "chord";

export function queryPath(kind: QueryKind, s: ExplorationState): string {
  const id = encodeURIComponent(s.datasetId ?? "");
  switch (kind) {
    case "classes":
      return `/api/datasets/${id}/classes?sort=${s.sortKey}&order=${s.sortOrder}`;
    case "overview":
      return `/api/datasets/${id}/overview?bins=${OVERVIEW_BINS}`;
    case "window": {
      const parts = [
        `from=${s.from}`,
        `to=${s.to}`,
        `pred_min=${s.predMin}`,
        `pred_max=${s.predMax}`,
        `limit=${POLYLINE_LIMIT}`,
      ];
      if (s.color.mode === "bins") {
        parts.push("color_mode=bins", `colors=${s.color.n}`);
      } else {
        parts.push("color_mode=threshold", `lo=${s.color.lo}`, `hi=${s.color.hi}`);
      }
      return `/api/datasets/${id}/window?${parts.join("&")}`;
    }
    case "chord":
      return `/api/datasets/${id}/chord?classes=${s.selection.join(",")}`;
  }
}

/** Which query kinds a state transition invalidates. */
export function affectedQueries(prev: ExplorationState, next: ExplorationState): QueryKind[] {
  if (prev.datasetId !== next.datasetId) {
    return ["classes", "overview", "window", ...(next.chordOpen ? ["chord" as const] : [])];
  }
  const kinds: QueryKind[] = [];
  if (prev.sortKey !== next.sortKey || prev.sortOrder !== next.sortOrder) {
    kinds.push("classes"); // both parallel-coordinate views re-order from this
  }
  if (
    prev.from !== next.from ||
    prev.to !== next.to ||
    prev.predMin !== next.predMin ||
    prev.predMax !== next.predMax ||
    JSON.stringify(prev.color) !== JSON.stringify(next.color)
  ) {
    kinds.push("window");
  }
  if (
    next.chordOpen &&
    (!prev.chordOpen || prev.selection.join(",") !== next.selection.join(","))
  ) {
    kinds.push("chord");
  }
  return kinds;
}

export interface StoreData {
  classes?: ClassSummaryRow[];
  overview?: OverviewPayload;
  window?: WindowPayload;
  chord?: ChordPayload;
}

/**
 * Holds the state, issues queries with strictly increasing sequence numbers,
 * and applies a response only when it is newer than the last applied response
 * of its kind — out-of-order arrivals never overwrite fresher data.
 */
export class ExplorationStore {
  state: ExplorationState;
  data: StoreData = {};
  onChange: () => void = () => {};
  onError: (message: string) => void = () => {};

  private sequence = 0;
  private applied: Partial<Record<QueryKind, number>> = {};

  constructor(
    private transport: Transport,
    state: ExplorationState,
  ) {
    this.state = normalize(state);
  }

  get lastSequence(): number {
    return this.sequence;
  }

  async issue(kind: QueryKind): Promise<void> {
    if (!this.state.datasetId) {
      return;
    }
    const seq = ++this.sequence;
    const stateAtIssue = this.state;
    let payload: unknown;
    try {
      payload = await this.transport.get(queryPath(kind, stateAtIssue));
    } catch (err) {
      if ((this.applied[kind] ?? 0) > seq) {
        return; // a newer response already landed; this failure is stale
      }
      if (err instanceof ApiError && kind === "window") {
        // e.g. WindowTooLarge: snap the window back to what is on screen
        const shown = this.data.window;
        if (shown) {
          this.state = normalize({ ...this.state, from: shown.from, to: shown.to });
        }
      }
      this.onError(err instanceof Error ? err.message : String(err));
      this.onChange();
      return;
    }
    if ((this.applied[kind] ?? 0) > seq) {
      return; // stale: discard
    }
    this.applied[kind] = seq;
    (this.data as Record<string, unknown>)[kind] = payload;
    this.onChange();
  }

  async refresh(kinds: QueryKind[]): Promise<void> {
    await Promise.all(kinds.map((kind) => this.issue(kind)));
  }

  async update(patch: Partial<ExplorationState>): Promise<void> {
    const prev = this.state;
    this.state = normalize({ ...prev, ...patch });
    const kinds = affectedQueries(prev, this.state);
    this.onChange();
    await this.refresh(kinds);
  }

  async selectDataset(datasetId: string, k: number): Promise<void> {
    this.state = initialState(datasetId, k);
    this.data = {};
    this.applied = {};
    this.onChange();
    await this.refresh(["classes", "overview", "window"]);
  }
}
