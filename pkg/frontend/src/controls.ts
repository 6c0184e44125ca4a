/** Left-side filtering/sorting/coloring panel. Inputs are clamped, never
 * rejected; every change flows through a single onChange callback. */

import { clear, html } from "./dom.js";
import { legendSwatches } from "./palette.js";
import type { ColorMode, ExplorationState, SortKey, SortOrder } from "./state.js";
import { SORT_KEYS } from "./state.js";

export interface ControlsCallbacks {
  onChange(patch: {
    predMin?: number;
    predMax?: number;
    sortKey?: SortKey;
    sortOrder?: SortOrder;
    color?: ColorMode;
  }): void;
  onOpenChord(): void;
  onClearSelection(): void;
}

function numberInput(value: number, onCommit: (v: number) => void): HTMLInputElement {
  const input = html("input", {
    type: "number", min: "0", max: "1", step: "0.05", value: String(value),
  });
  input.addEventListener("change", () => onCommit(Number(input.value)));
  return input;
}

export function renderControls(
  host: HTMLElement,
  state: ExplorationState,
  callbacks: ControlsCallbacks,
): void {
  clear(host);

  const filter = html("fieldset", { class: "panel-group" });
  filter.appendChild(html("legend", {}, "prediction filter"));
  const lo = numberInput(state.predMin, (v) => callbacks.onChange({ predMin: v }));
  const hi = numberInput(state.predMax, (v) => callbacks.onChange({ predMax: v }));
  const filterRow = html("div", { class: "row" });
  filterRow.append(lo, html("span", {}, "to"), hi);
  filter.appendChild(filterRow);
  filter.appendChild(
    html("p", { class: "hint" }, "keep instances with any prediction inside this range"),
  );
  host.appendChild(filter);

  const sort = html("fieldset", { class: "panel-group" });
  sort.appendChild(html("legend", {}, "sort classes"));
  const keySelect = html("select", {});
  for (const key of SORT_KEYS) {
    const option = html("option", { value: key }, key.replace("_", " "));
    if (key === state.sortKey) {
      option.selected = true;
    }
    keySelect.appendChild(option);
  }
  keySelect.addEventListener("change", () =>
    callbacks.onChange({ sortKey: keySelect.value as SortKey }),
  );
  const orderSelect = html("select", {});
  for (const order of ["asc", "desc"] as const) {
    const option = html("option", { value: order }, order);
    if (order === state.sortOrder) {
      option.selected = true;
    }
    orderSelect.appendChild(option);
  }
  orderSelect.addEventListener("change", () =>
    callbacks.onChange({ sortOrder: orderSelect.value as SortOrder }),
  );
  const sortRow = html("div", { class: "row" });
  sortRow.append(keySelect, orderSelect);
  sort.appendChild(sortRow);
  host.appendChild(sort);

  const color = html("fieldset", { class: "panel-group" });
  color.appendChild(html("legend", {}, "instance colors"));
  const binsRadio = html("input", { type: "radio", name: "color-mode", id: "mode-bins" });
  const thresholdRadio = html("input", {
    type: "radio", name: "color-mode", id: "mode-threshold",
  });
  binsRadio.checked = state.color.mode === "bins";
  thresholdRadio.checked = state.color.mode === "threshold";

  const binsRow = html("div", { class: "row" });
  const binsCount = html("input", {
    type: "range", min: "1", max: "10", step: "1",
    value: String(state.color.mode === "bins" ? state.color.n : 10),
  });
  const binsLabel = html("label", { for: "mode-bins" }, `bins (${binsCount.value})`);
  binsRow.append(binsRadio, binsLabel, binsCount);
  color.appendChild(binsRow);

  const thresholdRow = html("div", { class: "row" });
  const tLo = numberInput(state.color.mode === "threshold" ? state.color.lo : 0.4, (v) =>
    callbacks.onChange({
      color: { mode: "threshold", lo: v, hi: Number(tHi.value) },
    }),
  );
  const tHi = numberInput(state.color.mode === "threshold" ? state.color.hi : 0.6, (v) =>
    callbacks.onChange({
      color: { mode: "threshold", lo: Number(tLo.value), hi: v },
    }),
  );
  thresholdRow.append(thresholdRadio, html("label", { for: "mode-threshold" }, "threshold"), tLo, tHi);
  color.appendChild(thresholdRow);

  binsRadio.addEventListener("change", () =>
    callbacks.onChange({ color: { mode: "bins", n: Number(binsCount.value) } }),
  );
  binsCount.addEventListener("change", () =>
    callbacks.onChange({ color: { mode: "bins", n: Number(binsCount.value) } }),
  );
  thresholdRadio.addEventListener("change", () =>
    callbacks.onChange({
      color: { mode: "threshold", lo: Number(tLo.value), hi: Number(tHi.value) },
    }),
  );

  const legend = html("div", { class: "legend" });
  for (const swatch of legendSwatches(state.color)) {
    const item = html("span", { class: "legend-item" });
    const dot = html("i", { class: "swatch" });
    dot.style.background = swatch.color;
    item.append(dot, document.createTextNode(swatch.label));
    legend.appendChild(item);
  }
  color.appendChild(legend);
  host.appendChild(color);

  const chord = html("fieldset", { class: "panel-group" });
  chord.appendChild(html("legend", {}, "chord view"));
  chord.appendChild(
    html(
      "p",
      { class: "hint" },
      state.selection.length
        ? `selected: ${state.selection.join(", ")}`
        : "click class axes in the detail view to select (max 12)",
    ),
  );
  const buttons = html("div", { class: "row" });
  const open = html("button", { type: "button" }, `open chord view (${state.selection.length})`);
  open.disabled = state.selection.length === 0;
  open.addEventListener("click", () => callbacks.onOpenChord());
  const clearBtn = html("button", { type: "button" }, "clear");
  clearBtn.disabled = state.selection.length === 0;
  clearBtn.addEventListener("click", () => callbacks.onClearSelection());
  buttons.append(open, clearBtn);
  chord.appendChild(buttons);
  host.appendChild(chord);
}
