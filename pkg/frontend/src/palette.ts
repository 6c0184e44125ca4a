/** Color assignments: doughnut segments, instance groups, chord nodes. */

import type { ColorMode } from "./state.js";

// correct / inbound / outbound, matching the doughnut convention:
// dark blue, light blue, orange.
export const DOUGHNUT_COLORS = {
  correct: "#1d4e89",
  inbound: "#8ecae6",
  outbound: "#fb8500",
} as const;

const THRESHOLD_COLORS = ["#b8c1cc", "#e4572e"] as const; // outside, inside

const NODE_COLORS = [
  "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948",
  "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac", "#2f4b7c", "#a05195",
] as const;

/** Sequential 1..10-step scale: light for low predictions, dark for high. */
export function binColor(group: number, n: number): string {
  const t = n <= 1 ? 1 : group / (n - 1);
  const light = 82 - t * 55; // 82% -> 27%
  const sat = 45 + t * 40; // 45% -> 85%
  return `hsl(210, ${sat.toFixed(0)}%, ${light.toFixed(0)}%)`;
}

export function thresholdColor(group: number): string {
  return THRESHOLD_COLORS[group === 1 ? 1 : 0];
}

export function instanceColor(group: number, color: ColorMode): string {
  return color.mode === "bins" ? binColor(group, color.n) : thresholdColor(group);
}

/** Chord node color, keyed by class index. */
export function nodeColor(classId: number): string {
  return NODE_COLORS[((classId % NODE_COLORS.length) + NODE_COLORS.length) % NODE_COLORS.length];
}

export interface LegendSwatch {
  color: string;
  label: string;
}

/** Exactly n swatches in bins mode, two in threshold mode. */
export function legendSwatches(color: ColorMode): LegendSwatch[] {
  if (color.mode === "bins") {
    const out: LegendSwatch[] = [];
    for (let g = 0; g < color.n; g++) {
      const lo = g / color.n;
      const hi = (g + 1) / color.n;
      out.push({ color: binColor(g, color.n), label: `${lo.toFixed(1)}–${hi.toFixed(1)}` });
    }
    return out;
  }
  return [
    { color: thresholdColor(0), label: `outside [${color.lo}, ${color.hi}]` },
    { color: thresholdColor(1), label: `inside [${color.lo}, ${color.hi}]` },
  ];
}
