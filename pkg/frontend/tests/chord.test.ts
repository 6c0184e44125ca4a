import { describe, expect, test } from "vitest";

import { galleryFor, highlightFor, ribbonKey } from "../src/chordmodel.js";
import type { ChordPayload } from "../src/types.js";

// /chord payload for the canonical fixture with classes 0 and 1 selected
const T6_CHORD: ChordPayload = {
  classes: [0, 1],
  nodes: [
    { class_id: 0, label: "kit fox", outbound_within: 1, inbound_within: 1 },
    { class_id: 1, label: "red fox", outbound_within: 1, inbound_within: 1 },
  ],
  flows: [
    [0, 1],
    [1, 0],
  ],
  examples: { "0->1": ["i1"], "1->0": ["i3"] },
};

describe("hovering node 0 on the fixture chord view", () => {
  const highlight = highlightFor(T6_CHORD, { kind: "node", classId: 0 });
  const gallery = galleryFor(T6_CHORD, { kind: "node", classId: 0 });

  test("highlights exactly the 0<->1 chords", () => {
    expect(highlight.ribbons).toEqual(new Set([ribbonKey(0, 1), ribbonKey(1, 0)]));
    expect(highlight.nodes).toEqual(new Set([0, 1]));
    expect(highlight.dimOthers).toBe(true);
  });

  test("gallery lists i1 as outbound and i3 as inbound", () => {
    expect(gallery).toEqual([
      { from: 0, to: 1, direction: "outbound", count: 1, instanceIds: ["i1"] },
      { from: 1, to: 0, direction: "inbound", count: 1, instanceIds: ["i3"] },
    ]);
  });
});

describe("hovering a single chord", () => {
  test("0->1 shows only i1", () => {
    const gallery = galleryFor(T6_CHORD, { kind: "ribbon", from: 0, to: 1 });
    expect(gallery).toEqual([
      { from: 0, to: 1, direction: "outbound", count: 1, instanceIds: ["i1"] },
    ]);
    const highlight = highlightFor(T6_CHORD, { kind: "ribbon", from: 0, to: 1 });
    expect(highlight.ribbons).toEqual(new Set([ribbonKey(0, 1)]));
  });
});

describe("hover-out", () => {
  test("restores full opacity everywhere", () => {
    const highlight = highlightFor(T6_CHORD, { kind: "none" });
    expect(highlight.dimOthers).toBe(false);
    expect(highlight.nodes).toEqual(new Set([0, 1]));
    expect(galleryFor(T6_CHORD, { kind: "none" })).toEqual([]);
  });
});

describe("nodes without flows", () => {
  const payload: ChordPayload = {
    classes: [0, 1, 2],
    nodes: [
      { class_id: 0, label: "a", outbound_within: 1, inbound_within: 0 },
      { class_id: 1, label: "b", outbound_within: 0, inbound_within: 1 },
      { class_id: 2, label: "c", outbound_within: 0, inbound_within: 0 },
    ],
    flows: [
      [0, 1, 0],
      [0, 0, 0],
      [0, 0, 0],
    ],
    examples: { "0->1": ["x9"] },
  };

  test("hovering an isolated node highlights only itself, empty gallery", () => {
    const highlight = highlightFor(payload, { kind: "node", classId: 2 });
    expect(highlight.nodes).toEqual(new Set([2]));
    expect(highlight.ribbons.size).toBe(0);
    expect(galleryFor(payload, { kind: "node", classId: 2 })).toEqual([]);
  });

  test("missing example lists fall back to empty arrays", () => {
    const gallery = galleryFor(payload, { kind: "node", classId: 1 });
    expect(gallery).toEqual([
      { from: 0, to: 1, direction: "inbound", count: 1, instanceIds: ["x9"] },
    ]);
  });
});
