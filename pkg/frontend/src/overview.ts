/** Overview parallel coordinates: one axis per class in the active sort
 * order, each drawing its prediction-histogram envelope, plus the
 * class-window slider strip (in class-id space) that selects the detail
 * window.
 */

import { clear, svg } from "./dom.js";
import { envelopePath } from "./geometry.js";
import type { ExplorationState } from "./state.js";
import { WINDOW_CAP, clampWindow } from "./state.js";
import type { OverviewPayload } from "./types.js";

export interface OverviewCallbacks {
  onWindow(from: number, to: number): void;
}

const WIDTH = 1180;
const PLOT_TOP = 16;
const PLOT_HEIGHT = 150;
const STRIP_TOP = PLOT_TOP + PLOT_HEIGHT + 26;
const STRIP_HEIGHT = 16;
const TOTAL_HEIGHT = STRIP_TOP + STRIP_HEIGHT + 22;
const MARGIN = 24;

export function renderOverview(
  host: HTMLElement,
  payload: OverviewPayload,
  order: number[],
  state: ExplorationState,
  callbacks: OverviewCallbacks,
): void {
  clear(host);
  const k = payload.classes.length;
  const root = svg("svg", {
    viewBox: `0 0 ${WIDTH} ${TOTAL_HEIGHT}`,
    class: "overview-svg",
    preserveAspectRatio: "none",
  });
  const innerWidth = WIDTH - 2 * MARGIN;
  const spacing = innerWidth / Math.max(k, 1);
  const xAt = (position: number) => MARGIN + spacing * (position + 0.5);
  const halfWidth = Math.min(10, spacing * 0.45);

  const axes = svg("g");
  for (let position = 0; position < order.length; position++) {
    const classId = order[position];
    const entry = payload.classes[classId];
    const x = xAt(position);
    const inWindow = classId >= state.from && classId <= state.to;
    const axis = svg("line", {
      x1: x, y1: PLOT_TOP, x2: x, y2: PLOT_TOP + PLOT_HEIGHT,
      class: inWindow ? "axis in-window" : "axis",
    });
    axes.appendChild(axis);
    if (halfWidth > 0.3) {
      const envelope = svg("path", {
        d: envelopePath(entry.histogram, x, PLOT_TOP, PLOT_HEIGHT, halfWidth),
        class: inWindow ? "envelope in-window" : "envelope",
      });
      axes.appendChild(envelope);
      const title = svg("title");
      title.textContent =
        `${entry.summary.label} (class ${classId})\n` +
        `correct ${entry.summary.correct} / inbound ${entry.summary.inbound} / ` +
        `outbound ${entry.summary.outbound}`;
      envelope.appendChild(title);
    }
  }
  root.appendChild(axes);

  root.appendChild(
    svg("text", { x: MARGIN, y: PLOT_TOP + PLOT_HEIGHT + 16, class: "hint" }),
  ).textContent = `all ${k} classes, sorted by ${state.sortKey} ${state.sortOrder}`;

  // window slider: a fixed class-id scale (the detail window is an id range)
  const idToX = (classId: number) => MARGIN + (innerWidth * classId) / Math.max(k - 1, 1);
  const xToId = (x: number) =>
    Math.round(((x - MARGIN) / innerWidth) * Math.max(k - 1, 1));
  const strip = svg("g", { class: "slider-strip" });
  strip.appendChild(
    svg("rect", {
      x: MARGIN, y: STRIP_TOP, width: innerWidth, height: STRIP_HEIGHT, class: "strip-bg",
    }),
  );
  const selection = svg("rect", {
    x: idToX(state.from),
    y: STRIP_TOP,
    width: Math.max(idToX(state.to) - idToX(state.from), 2),
    height: STRIP_HEIGHT,
    class: "strip-selection",
  });
  strip.appendChild(selection);
  const label = svg("text", {
    x: MARGIN, y: STRIP_TOP + STRIP_HEIGHT + 14, class: "hint",
  });
  label.textContent = `detail window: classes ${state.from}–${state.to} (drag to move, max ${WINDOW_CAP})`;
  strip.appendChild(label);
  root.appendChild(strip);

  let dragStartId: number | null = null;
  const toSvgX = (event: PointerEvent): number => {
    const rect = root.getBoundingClientRect();
    return ((event.clientX - rect.left) / rect.width) * WIDTH;
  };
  strip.addEventListener("pointerdown", (event) => {
    dragStartId = xToId(toSvgX(event));
    (event.target as Element).setPointerCapture?.(event.pointerId);
    event.preventDefault();
  });
  strip.addEventListener("pointermove", (event) => {
    if (dragStartId === null) {
      return;
    }
    const [lo, hi] = clampWindow(dragStartId, xToId(toSvgX(event)), k);
    selection.setAttribute("x", String(idToX(lo)));
    selection.setAttribute("width", String(Math.max(idToX(hi) - idToX(lo), 2)));
    label.textContent = `detail window: classes ${lo}–${hi}`;
  });
  strip.addEventListener("pointerup", (event) => {
    if (dragStartId === null) {
      return;
    }
    const [lo, hi] = clampWindow(dragStartId, xToId(toSvgX(event)), k);
    dragStartId = null;
    callbacks.onWindow(lo, hi);
  });

  host.appendChild(root);
}
