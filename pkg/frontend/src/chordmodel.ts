/** Pure interaction model for the chord view: what a hover highlights and
 * which example instances the side gallery lists. */

import type { ChordPayload } from "./types.js";

export type ChordHoverTarget =
  | { kind: "none" }
  | { kind: "node"; classId: number }
  | { kind: "ribbon"; from: number; to: number };

export function ribbonKey(from: number, to: number): string {
  return `${from}->${to}`;
}

export interface HighlightState {
  /** class ids of nodes kept at full opacity */
  nodes: Set<number>;
  /** ribbon keys ("true->pred") kept at full opacity */
  ribbons: Set<string>;
  /** whether everything else should be dimmed */
  dimOthers: boolean;
}

function flowAt(payload: ChordPayload, from: number, to: number): number {
  const i = payload.classes.indexOf(from);
  const j = payload.classes.indexOf(to);
  if (i < 0 || j < 0) {
    return 0;
  }
  return payload.flows[i][j];
}

export function highlightFor(payload: ChordPayload, hover: ChordHoverTarget): HighlightState {
  if (hover.kind === "none") {
    return { nodes: new Set(payload.classes), ribbons: allRibbonKeys(payload), dimOthers: false };
  }
  if (hover.kind === "ribbon") {
    return {
      nodes: new Set([hover.from, hover.to]),
      ribbons: new Set([ribbonKey(hover.from, hover.to)]),
      dimOthers: true,
    };
  }
  const c = hover.classId;
  const nodes = new Set<number>([c]);
  const ribbons = new Set<string>();
  for (const other of payload.classes) {
    if (other === c) {
      continue;
    }
    if (flowAt(payload, c, other) > 0) {
      nodes.add(other);
      ribbons.add(ribbonKey(c, other));
    }
    if (flowAt(payload, other, c) > 0) {
      nodes.add(other);
      ribbons.add(ribbonKey(other, c));
    }
  }
  return { nodes, ribbons, dimOthers: true };
}

function allRibbonKeys(payload: ChordPayload): Set<string> {
  const keys = new Set<string>();
  for (const a of payload.classes) {
    for (const b of payload.classes) {
      if (a !== b && flowAt(payload, a, b) > 0) {
        keys.add(ribbonKey(a, b));
      }
    }
  }
  return keys;
}

export interface GalleryGroup {
  from: number;
  to: number;
  /** direction relative to the hovered node; "outbound" for ribbon hovers */
  direction: "outbound" | "inbound";
  count: number;
  instanceIds: string[];
}

/** Example-case groups for the gallery, in selection order. */
export function galleryFor(payload: ChordPayload, hover: ChordHoverTarget): GalleryGroup[] {
  const groups: GalleryGroup[] = [];
  const examplesOf = (from: number, to: number) =>
    payload.examples[ribbonKey(from, to)] ?? [];
  if (hover.kind === "ribbon") {
    const count = flowAt(payload, hover.from, hover.to);
    if (count > 0) {
      groups.push({
        from: hover.from,
        to: hover.to,
        direction: "outbound",
        count,
        instanceIds: examplesOf(hover.from, hover.to),
      });
    }
    return groups;
  }
  if (hover.kind === "node") {
    const c = hover.classId;
    for (const other of payload.classes) {
      const count = flowAt(payload, c, other);
      if (other !== c && count > 0) {
        groups.push({
          from: c,
          to: other,
          direction: "outbound",
          count,
          instanceIds: examplesOf(c, other),
        });
      }
    }
    for (const other of payload.classes) {
      const count = flowAt(payload, other, c);
      if (other !== c && count > 0) {
        groups.push({
          from: other,
          to: c,
          direction: "inbound",
          count,
          instanceIds: examplesOf(other, c),
        });
      }
    }
  }
  return groups;
}
