/** Pure SVG geometry: doughnut arcs, chord layout, path builders.
 *
 * Angles are radians, 0 at 12 o'clock, increasing clockwise. All widths are
 * exact fractions of the underlying counts so rendered proportions match the
 * server's summaries to floating-point precision.
 */

const TAU = Math.PI * 2;

export interface ArcSegment {
  key: "correct" | "inbound" | "outbound";
  start: number;
  end: number;
  fraction: number;
}

/** Three arcs partitioning the ring proportionally to the counts. */
export function doughnutSegments(
  correct: number,
  inbound: number,
  outbound: number,
): ArcSegment[] {
  const total = correct + inbound + outbound;
  if (total <= 0) {
    return [];
  }
  const parts: [ArcSegment["key"], number][] = [
    ["correct", correct],
    ["inbound", inbound],
    ["outbound", outbound],
  ];
  const segments: ArcSegment[] = [];
  let angle = 0;
  for (const [key, value] of parts) {
    const fraction = value / total;
    segments.push({ key, start: angle, end: angle + fraction * TAU, fraction });
    angle += fraction * TAU;
  }
  return segments;
}

function polar(cx: number, cy: number, r: number, angle: number): [number, number] {
  // angle 0 at 12 o'clock, clockwise
  return [cx + r * Math.sin(angle), cy - r * Math.cos(angle)];
}

function fmt(v: number): string {
  return Number(v.toFixed(3)).toString();
}

/** Annular sector between two radii; handles near-full-circle sweeps. */
export function annularSectorPath(
  cx: number,
  cy: number,
  rOuter: number,
  rInner: number,
  start: number,
  end: number,
): string {
  const sweep = Math.min(end - start, TAU - 1e-6);
  const mid = start + sweep;
  const large = sweep > Math.PI ? 1 : 0;
  const [x0, y0] = polar(cx, cy, rOuter, start);
  const [x1, y1] = polar(cx, cy, rOuter, mid);
  const [x2, y2] = polar(cx, cy, rInner, mid);
  const [x3, y3] = polar(cx, cy, rInner, start);
  return (
    `M ${fmt(x0)} ${fmt(y0)} ` +
    `A ${fmt(rOuter)} ${fmt(rOuter)} 0 ${large} 1 ${fmt(x1)} ${fmt(y1)} ` +
    `L ${fmt(x2)} ${fmt(y2)} ` +
    `A ${fmt(rInner)} ${fmt(rInner)} 0 ${large} 0 ${fmt(x3)} ${fmt(y3)} Z`
  );
}

export function polylinePath(points: [number, number][]): string {
  if (points.length === 0) {
    return "";
  }
  const [first, ...rest] = points;
  return (
    `M ${fmt(first[0])} ${fmt(first[1])}` +
    rest.map(([x, y]) => ` L ${fmt(x)} ${fmt(y)}`).join("")
  );
}

export interface NodeArc {
  classId: number;
  index: number;
  start: number;
  end: number;
}

export interface Ribbon {
  from: number; // class id of the true (source) class
  to: number; // class id of the predicted (target) class
  count: number;
  sourceStart: number;
  sourceEnd: number;
  targetStart: number;
  targetEnd: number;
}

export interface ChordLayout {
  nodes: NodeArc[];
  ribbons: Ribbon[];
}

/**
 * Circular layout for a selection's flow matrix.
 *
 * Node arcs are proportional to each node's total within-selection flow
 * (inbound + outbound), so every ribbon's angular width at both ends equals
 * `available * count / totalFlow`: widths are globally proportional to
 * counts. Zero flows produce no ribbon; when the selection has no flow at
 * all, nodes share the circle equally.
 */
export function chordLayout(
  classes: number[],
  flows: number[][],
  gapFraction = 0.15,
): ChordLayout {
  const n = classes.length;
  if (n === 0) {
    return { nodes: [], ribbons: [] };
  }
  const totals = classes.map((_, i) => {
    let t = 0;
    for (let j = 0; j < n; j++) {
      t += flows[i][j] + flows[j][i];
    }
    return t;
  });
  const grandTotal = totals.reduce((a, b) => a + b, 0);
  const gap = (TAU * gapFraction) / n;
  const available = TAU - gap * n;

  const nodes: NodeArc[] = [];
  const spans: number[] = [];
  let cursor = 0;
  for (let i = 0; i < n; i++) {
    const span = grandTotal > 0 ? (available * totals[i]) / grandTotal : available / n;
    const start = cursor + gap / 2;
    nodes.push({ classId: classes[i], index: i, start, end: start + span });
    spans.push(span);
    cursor = start + span + gap / 2;
  }

  // sub-arc allocation inside each node: outbound flows first, then inbound
  const sourceArcs = new Map<string, [number, number]>();
  const targetArcs = new Map<string, [number, number]>();
  for (let i = 0; i < n; i++) {
    if (totals[i] === 0) {
      continue;
    }
    const unit = spans[i] / totals[i];
    let offset = nodes[i].start;
    for (let j = 0; j < n; j++) {
      if (i !== j && flows[i][j] > 0) {
        sourceArcs.set(`${i}:${j}`, [offset, offset + unit * flows[i][j]]);
        offset += unit * flows[i][j];
      }
    }
    for (let j = 0; j < n; j++) {
      if (i !== j && flows[j][i] > 0) {
        targetArcs.set(`${j}:${i}`, [offset, offset + unit * flows[j][i]]);
        offset += unit * flows[j][i];
      }
    }
  }

  const ribbons: Ribbon[] = [];
  for (let i = 0; i < n; i++) {
    for (let j = 0; j < n; j++) {
      if (i === j || flows[i][j] === 0) {
        continue;
      }
      const source = sourceArcs.get(`${i}:${j}`)!;
      const target = targetArcs.get(`${i}:${j}`)!;
      ribbons.push({
        from: classes[i],
        to: classes[j],
        count: flows[i][j],
        sourceStart: source[0],
        sourceEnd: source[1],
        targetStart: target[0],
        targetEnd: target[1],
      });
    }
  }
  return { nodes, ribbons };
}

/** Closed ribbon path between two arcs, pinched through the center. */
export function ribbonPath(r: Ribbon, cx: number, cy: number, radius: number): string {
  const [ax0, ay0] = polar(cx, cy, radius, r.sourceStart);
  const [ax1, ay1] = polar(cx, cy, radius, r.sourceEnd);
  const [bx0, by0] = polar(cx, cy, radius, r.targetStart);
  const [bx1, by1] = polar(cx, cy, radius, r.targetEnd);
  const largeA = r.sourceEnd - r.sourceStart > Math.PI ? 1 : 0;
  const largeB = r.targetEnd - r.targetStart > Math.PI ? 1 : 0;
  return (
    `M ${fmt(ax0)} ${fmt(ay0)} ` +
    `A ${fmt(radius)} ${fmt(radius)} 0 ${largeA} 1 ${fmt(ax1)} ${fmt(ay1)} ` +
    `Q ${fmt(cx)} ${fmt(cy)} ${fmt(bx0)} ${fmt(by0)} ` +
    `A ${fmt(radius)} ${fmt(radius)} 0 ${largeB} 1 ${fmt(bx1)} ${fmt(by1)} ` +
    `Q ${fmt(cx)} ${fmt(cy)} ${fmt(ax0)} ${fmt(ay0)} Z`
  );
}

/**
 * Mirrored histogram envelope for one overview axis: bin counts become
 * horizontal half-widths at the bin centers along a vertical axis.
 */
export function envelopePath(
  histogram: number[],
  x: number,
  yTop: number,
  height: number,
  maxHalfWidth: number,
): string {
  const maxCount = Math.max(...histogram, 1);
  const bins = histogram.length;
  const right: [number, number][] = [];
  const left: [number, number][] = [];
  for (let b = 0; b < bins; b++) {
    // bin b covers values [b/bins, (b+1)/bins); low values at the bottom
    const yCenter = yTop + height - ((b + 0.5) / bins) * height;
    const half = (histogram[b] / maxCount) * maxHalfWidth;
    right.push([x + half, yCenter]);
    left.push([x - half, yCenter]);
  }
  const bottom: [number, number] = [x, yTop + height];
  const top: [number, number] = [x, yTop];
  const outline = [bottom, ...right, top, ...left.slice().reverse()];
  return polylinePath(outline) + " Z";
}
