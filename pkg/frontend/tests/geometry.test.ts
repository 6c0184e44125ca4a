import { describe, expect, test } from "vitest";

import { chordLayout, doughnutSegments, envelopePath } from "../src/geometry.js";
import { legendSwatches } from "../src/palette.js";

const TAU = Math.PI * 2;

describe("doughnut fidelity", () => {
  // class 0 of the canonical fixture: correct 1, inbound 2, outbound 1
  test("fixture class 0 arcs are proportional to 1:2:1", () => {
    const segments = doughnutSegments(1, 2, 1);
    const fractions = segments.map((s) => (s.end - s.start) / TAU);
    expect(fractions[0]).toBeCloseTo(0.25, 10);
    expect(fractions[1]).toBeCloseTo(0.5, 10);
    expect(fractions[2]).toBeCloseTo(0.25, 10);
  });

  test("arc fractions match count ratios within 0.5% of circumference", () => {
    const cases: [number, number, number][] = [
      [1, 2, 1],
      [1, 1, 1],
      [1, 0, 1],
      [40059, 9941, 9941],
      [3, 17, 5],
    ];
    for (const [c, i, o] of cases) {
      const total = c + i + o;
      const segments = doughnutSegments(c, i, o);
      const byKey = Object.fromEntries(segments.map((s) => [s.key, s]));
      expect(Math.abs(byKey.correct.fraction - c / total)).toBeLessThan(0.005);
      expect(Math.abs(byKey.inbound.fraction - i / total)).toBeLessThan(0.005);
      expect(Math.abs(byKey.outbound.fraction - o / total)).toBeLessThan(0.005);
      const sweep = segments.reduce((acc, s) => acc + (s.end - s.start), 0);
      expect(sweep).toBeCloseTo(TAU, 9);
    }
  });

  test("empty class renders no arcs", () => {
    expect(doughnutSegments(0, 0, 0)).toEqual([]);
  });
});

describe("chord layout", () => {
  test("fixture selection {0,1} yields two ribbons of equal width", () => {
    const layout = chordLayout([0, 1], [
      [0, 1],
      [1, 0],
    ]);
    expect(layout.ribbons).toHaveLength(2);
    const widths = layout.ribbons.map((r) => r.sourceEnd - r.sourceStart);
    expect(widths[0]).toBeCloseTo(widths[1], 10);
  });

  test("ribbon angular widths are proportional to counts at both ends", () => {
    const flows = [
      [0, 4, 1],
      [2, 0, 0],
      [0, 7, 0],
    ];
    const layout = chordLayout([10, 20, 30], flows);
    const perCount = layout.ribbons.map((r) => ({
      source: (r.sourceEnd - r.sourceStart) / r.count,
      target: (r.targetEnd - r.targetStart) / r.count,
    }));
    for (const { source, target } of perCount) {
      expect(source).toBeCloseTo(perCount[0].source, 10);
      expect(target).toBeCloseTo(perCount[0].source, 10);
    }
  });

  test("zero flows draw no ribbon", () => {
    const layout = chordLayout([0, 1, 2], [
      [0, 0, 0],
      [0, 0, 3],
      [0, 0, 0],
    ]);
    expect(layout.ribbons).toHaveLength(1);
    expect(layout.ribbons[0]).toMatchObject({ from: 1, to: 2, count: 3 });
  });

  test("singleton selection yields one node, no ribbons", () => {
    const layout = chordLayout([2], [[0]]);
    expect(layout.nodes).toHaveLength(1);
    expect(layout.ribbons).toHaveLength(0);
    expect(layout.nodes[0].end - layout.nodes[0].start).toBeGreaterThan(0);
  });

  test("node arcs never overlap", () => {
    const flows = [
      [0, 5, 0, 2],
      [1, 0, 3, 0],
      [0, 0, 0, 9],
      [4, 0, 0, 0],
    ];
    const layout = chordLayout([0, 1, 2, 3], flows);
    for (let i = 1; i < layout.nodes.length; i++) {
      expect(layout.nodes[i].start).toBeGreaterThan(layout.nodes[i - 1].end);
    }
    expect(layout.nodes.at(-1)!.end).toBeLessThanOrEqual(TAU);
  });

  test("ribbon sub-arcs stay inside their node arcs", () => {
    const flows = [
      [0, 5, 0],
      [1, 0, 3],
      [2, 0, 0],
    ];
    const layout = chordLayout([7, 8, 9], flows);
    const arcOf = new Map(layout.nodes.map((n) => [n.classId, n]));
    for (const r of layout.ribbons) {
      const source = arcOf.get(r.from)!;
      const target = arcOf.get(r.to)!;
      expect(r.sourceStart).toBeGreaterThanOrEqual(source.start - 1e-9);
      expect(r.sourceEnd).toBeLessThanOrEqual(source.end + 1e-9);
      expect(r.targetStart).toBeGreaterThanOrEqual(target.start - 1e-9);
      expect(r.targetEnd).toBeLessThanOrEqual(target.end + 1e-9);
    }
  });
});

describe("legend", () => {
  test("bins mode shows exactly n swatches", () => {
    for (let n = 1; n <= 10; n++) {
      expect(legendSwatches({ mode: "bins", n })).toHaveLength(n);
    }
  });

  test("threshold mode shows exactly two swatches", () => {
    expect(legendSwatches({ mode: "threshold", lo: 0.3, hi: 0.7 })).toHaveLength(2);
  });
});

describe("histogram envelope", () => {
  test("produces a closed path and scales to the max bin", () => {
    const path = envelopePath([10, 0, 5], 100, 0, 200, 8);
    expect(path.startsWith("M ")).toBe(true);
    expect(path.endsWith("Z")).toBe(true);
    // the dominant bin should reach the full half-width
    expect(path).toContain("108");
  });
});
