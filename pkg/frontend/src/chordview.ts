/** Chord diagram: selected classes as arc nodes, directed misclassification
 * ribbons with count-proportional widths colored by the true (source) class,
 * hover highlighting, and the example-case gallery.
 */

import { galleryFor, highlightFor, ribbonKey, type ChordHoverTarget } from "./chordmodel.js";
import { clear, html, svg } from "./dom.js";
import { annularSectorPath, chordLayout, ribbonPath } from "./geometry.js";
import { nodeColor } from "./palette.js";
import type { ChordPayload } from "./types.js";

export interface ChordCallbacks {
  onHover(target: ChordHoverTarget): void;
  onInstanceClick(instanceId: string): void;
  onClose(): void;
}

const SIZE = 420;
const CENTER = SIZE / 2;
const RADIUS = SIZE / 2 - 64;

export function renderChord(
  host: HTMLElement,
  payload: ChordPayload,
  hover: ChordHoverTarget,
  callbacks: ChordCallbacks,
): void {
  clear(host);

  const head = html("div", { class: "chord-head" });
  const title = html("span", { class: "chord-title" });
  title.textContent = `misclassification flows between ${payload.classes.length} selected classes`;
  head.appendChild(title);
  const close = html("button", { class: "chord-close", type: "button" }, "close");
  close.addEventListener("click", () => callbacks.onClose());
  head.appendChild(close);
  host.appendChild(head);

  const body = html("div", { class: "chord-body" });
  const layout = chordLayout(payload.classes, payload.flows);
  const highlight = highlightFor(payload, hover);
  const labelOf = new Map(payload.nodes.map((n) => [n.class_id, n.label]));

  const root = svg("svg", { viewBox: `0 0 ${SIZE} ${SIZE}`, class: "chord-svg" });
  root.addEventListener("pointerleave", () => callbacks.onHover({ kind: "none" }));

  const ribbons = svg("g");
  for (const ribbon of layout.ribbons) {
    const key = ribbonKey(ribbon.from, ribbon.to);
    const lit = highlight.ribbons.has(key);
    const path = svg("path", {
      d: ribbonPath(ribbon, CENTER, CENTER, RADIUS - 12),
      fill: nodeColor(ribbon.from), // colored by the correct (true) class
      class: highlight.dimOthers && !lit ? "ribbon dim" : "ribbon",
    });
    const tip = svg("title");
    tip.textContent =
      `${labelOf.get(ribbon.from) ?? ribbon.from} → ` +
      `${labelOf.get(ribbon.to) ?? ribbon.to}: ${ribbon.count} instances`;
    path.appendChild(tip);
    path.addEventListener("pointerenter", () =>
      callbacks.onHover({ kind: "ribbon", from: ribbon.from, to: ribbon.to }),
    );
    ribbons.appendChild(path);
  }
  root.appendChild(ribbons);

  for (const node of layout.nodes) {
    const lit = highlight.nodes.has(node.classId);
    const arc = svg("path", {
      d: annularSectorPath(CENTER, CENTER, RADIUS, RADIUS - 10, node.start, node.end),
      fill: nodeColor(node.classId),
      class: highlight.dimOthers && !lit ? "node-arc dim" : "node-arc",
    });
    arc.addEventListener("pointerenter", () =>
      callbacks.onHover({ kind: "node", classId: node.classId }),
    );
    root.appendChild(arc);

    const mid = (node.start + node.end) / 2;
    const lx = CENTER + (RADIUS + 14) * Math.sin(mid);
    const ly = CENTER - (RADIUS + 14) * Math.cos(mid);
    const text = svg("text", {
      x: lx,
      y: ly,
      class: highlight.dimOthers && !lit ? "node-label dim" : "node-label",
      "text-anchor": lx < CENTER - 4 ? "end" : lx > CENTER + 4 ? "start" : "middle",
    });
    text.textContent = `${node.classId} ${labelOf.get(node.classId) ?? ""}`.trim();
    text.addEventListener("pointerenter", () =>
      callbacks.onHover({ kind: "node", classId: node.classId }),
    );
    root.appendChild(text);
  }
  body.appendChild(root);

  // gallery of example cases for the hovered node or chord
  const gallery = html("div", { class: "chord-gallery" });
  const groups = galleryFor(payload, hover);
  if (hover.kind === "none") {
    gallery.appendChild(
      html("p", { class: "hint" }, "hover a node or chord to list its misclassified cases"),
    );
  } else if (groups.length === 0) {
    gallery.appendChild(html("p", { class: "hint" }, "no misclassification cases"));
  }
  for (const group of groups) {
    const section = html("div", { class: "gallery-group" });
    const arrow = `${group.from} → ${group.to}`;
    section.appendChild(
      html(
        "h4",
        {},
        `${group.direction} ${arrow} (${group.count} case${group.count === 1 ? "" : "s"})`,
      ),
    );
    const list = html("div", { class: "gallery-items" });
    for (const instanceId of group.instanceIds) {
      const chip = html("button", { class: "gallery-chip", type: "button" }, instanceId);
      chip.style.borderColor = nodeColor(group.from);
      chip.addEventListener("click", () => callbacks.onInstanceClick(instanceId));
      list.appendChild(chip);
    }
    section.appendChild(list);
    gallery.appendChild(section);
  }
  body.appendChild(gallery);
  host.appendChild(body);
}
