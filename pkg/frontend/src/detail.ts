/** Detail parallel coordinates: one axis per window class (in the active
 * sort order), instance polylines colored by group, a correct/inbound/
 * outbound doughnut above each axis, hover inspection, and click-to-select
 * for the chord view.
 */

import { clear, svg } from "./dom.js";
import { annularSectorPath, doughnutSegments, polylinePath } from "./geometry.js";
import { DOUGHNUT_COLORS, instanceColor } from "./palette.js";
import type { ExplorationState } from "./state.js";
import type { WindowPayload } from "./types.js";

export interface DetailCallbacks {
  onHoverInstance(instanceId: string, clientX: number, clientY: number): void;
  onLeaveInstance(): void;
  onToggleClass(classId: number): void;
}

const WIDTH = 1180;
const TOP = 64; // space for doughnuts
const PLOT_HEIGHT = 300;
const BOTTOM = 40;
const MARGIN = 48;
const DOUGHNUT_R = 17;

export function renderDetail(
  host: HTMLElement,
  payload: WindowPayload,
  sortedWindowClasses: number[],
  state: ExplorationState,
  callbacks: DetailCallbacks,
): void {
  clear(host);
  const height = TOP + PLOT_HEIGHT + BOTTOM;
  const root = svg("svg", { viewBox: `0 0 ${WIDTH} ${height}`, class: "detail-svg" });
  const axisClasses = sortedWindowClasses;
  const count = axisClasses.length;
  const xAt = (position: number) =>
    count === 1
      ? WIDTH / 2
      : MARGIN + ((WIDTH - 2 * MARGIN) * position) / (count - 1);
  const yAt = (value: number) => TOP + PLOT_HEIGHT * (1 - value);
  const summaryOf = new Map(payload.doughnuts.map((s) => [s.class_id, s]));

  // polylines under axes
  const lines = svg("g", { class: "polylines" });
  for (const instance of payload.instances) {
    const points: [number, number][] = axisClasses.map((classId, position) => [
      xAt(position),
      yAt(instance.values[classId - payload.from]),
    ]);
    const path = svg("path", {
      d: polylinePath(points),
      class: "polyline",
      stroke: instanceColor(instance.color_group, state.color),
    });
    path.addEventListener("pointerenter", (event) =>
      callbacks.onHoverInstance(instance.instance_id, event.clientX, event.clientY),
    );
    path.addEventListener("pointerleave", () => callbacks.onLeaveInstance());
    lines.appendChild(path);
  }
  root.appendChild(lines);

  for (let position = 0; position < count; position++) {
    const classId = axisClasses[position];
    const summary = summaryOf.get(classId);
    const x = xAt(position);
    const selected = state.selection.includes(classId);
    const group = svg("g", { class: selected ? "axis-group selected" : "axis-group" });
    group.appendChild(
      svg("line", { x1: x, y1: TOP, x2: x, y2: TOP + PLOT_HEIGHT, class: "axis" }),
    );
    const label = svg("text", {
      x, y: TOP + PLOT_HEIGHT + 18, class: "axis-label", "text-anchor": "middle",
    });
    label.textContent = summary ? `${classId} ${summary.label}` : String(classId);
    group.appendChild(label);

    // doughnut above the axis: correct / inbound / outbound shares
    const cy = TOP - DOUGHNUT_R - 8;
    const doughnut = svg("g", { class: "doughnut" });
    if (summary) {
      const segments = doughnutSegments(summary.correct, summary.inbound, summary.outbound);
      if (segments.length === 0) {
        doughnut.appendChild(
          svg("circle", { cx: x, cy, r: DOUGHNUT_R - 4, class: "doughnut-empty" }),
        );
      }
      for (const segment of segments) {
        if (segment.fraction <= 0) {
          continue;
        }
        doughnut.appendChild(
          svg("path", {
            d: annularSectorPath(x, cy, DOUGHNUT_R, DOUGHNUT_R - 7, segment.start, segment.end),
            fill: DOUGHNUT_COLORS[segment.key],
          }),
        );
      }
      if (summary.is_empty) {
        doughnut.appendChild(
          svg("circle", { cx: x, cy, r: 2.5, class: "doughnut-empty-marker" }),
        );
      }
      const title = svg("title");
      title.textContent =
        `class ${classId} (${summary.label})\n` +
        `correct ${summary.correct}, inbound ${summary.inbound}, outbound ${summary.outbound}` +
        (summary.is_empty ? "\n(no instances of this class)" : "");
      doughnut.appendChild(title);
    }
    group.appendChild(doughnut);

    const toggle = () => callbacks.onToggleClass(classId);
    doughnut.addEventListener("click", toggle);
    label.addEventListener("click", toggle);
    root.appendChild(group);
  }

  host.appendChild(root);
}
