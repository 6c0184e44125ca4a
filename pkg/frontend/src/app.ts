/** Application shell: dataset picker, view wiring, hover popover, error
 * banner, and URL synchronization of the exploration state. */

import { ApiError, HttpTransport, type Transport } from "./api.js";
import { renderChord } from "./chordview.js";
import type { ChordHoverTarget } from "./chordmodel.js";
import { renderControls } from "./controls.js";
import { clear, html } from "./dom.js";
import { renderDetail } from "./detail.js";
import { renderOverview } from "./overview.js";
import {
  ExplorationStore,
  SELECTION_CAP,
  decodeState,
  encodeState,
} from "./state.js";
import type { DatasetDescriptor, InstanceDetail } from "./types.js";

const transport: Transport = new HttpTransport();
const instanceCache = new Map<string, Promise<InstanceDetail>>();

function el(id: string): HTMLElement {
  const found = document.getElementById(id);
  if (!found) {
    throw new Error(`missing #${id}`);
  }
  return found;
}

function showBanner(message: string): void {
  const banner = el("banner");
  banner.textContent = "";
  banner.appendChild(html("span", {}, message));
  const dismiss = html("button", { type: "button" }, "dismiss");
  dismiss.addEventListener("click", () => banner.classList.add("hidden"));
  banner.appendChild(dismiss);
  banner.classList.remove("hidden");
}

function fetchInstance(datasetId: string, instanceId: string): Promise<InstanceDetail> {
  const key = `${datasetId}/${instanceId}`;
  let cached = instanceCache.get(key);
  if (!cached) {
    cached = transport.get(
      `/api/datasets/${encodeURIComponent(datasetId)}/instances/${encodeURIComponent(instanceId)}`,
    ) as Promise<InstanceDetail>;
    instanceCache.set(key, cached);
  }
  return cached;
}

function showPopover(detail: InstanceDetail, x: number, y: number): void {
  const pop = el("popover");
  clear(pop);
  const img = html("img", { src: detail.image_url, alt: detail.instance_id });
  img.addEventListener("error", () => {
    img.src = "/static/placeholder.svg";
  });
  pop.appendChild(img);
  const info = html("div", { class: "popover-info" });
  info.appendChild(html("strong", {}, detail.label));
  if (detail.hierarchy.length) {
    info.appendChild(html("div", { class: "hint" }, detail.hierarchy.join(" / ")));
  }
  info.appendChild(html("div", {}, `instance ${detail.instance_id}`));
  info.appendChild(
    html(
      "div",
      {},
      `true class ${detail.true_class}, predicted ${detail.predicted_class}` +
        (detail.predicted_class === detail.true_class ? " (correct)" : " (incorrect)"),
    ),
  );
  info.appendChild(html("div", {}, `max prediction ${detail.max_pred.toFixed(4)}`));
  pop.appendChild(info);
  pop.style.left = `${Math.min(x + 14, window.innerWidth - 280)}px`;
  pop.style.top = `${y + 14}px`;
  pop.classList.remove("hidden");
}

async function loadDescriptors(): Promise<DatasetDescriptor[]> {
  return (await transport.get("/api/datasets")) as DatasetDescriptor[];
}

async function boot(): Promise<void> {
  let descriptors = await loadDescriptors();
  const params = new URLSearchParams(window.location.search);
  const wanted = params.get("dataset");
  let active: DatasetDescriptor | null =
    descriptors.find((d) => d.dataset_id === wanted) ?? descriptors[0] ?? null;

  const store = new ExplorationStore(
    transport,
    decodeState(window.location.search, active?.dataset_id ?? null, active?.k ?? 0),
  );
  let chordHover: ChordHoverTarget = { kind: "none" };

  const picker = el("dataset-picker") as unknown as HTMLSelectElement;
  const renderPicker = () => {
    clear(picker);
    if (descriptors.length === 0) {
      picker.appendChild(html("option", {}, "no datasets yet"));
      picker.disabled = true;
      return;
    }
    picker.disabled = false;
    for (const d of descriptors) {
      const option = html(
        "option",
        { value: d.dataset_id },
        `${d.name} (K=${d.k}, N=${d.n})`,
      );
      option.selected = active !== null && d.dataset_id === active.dataset_id;
      picker.appendChild(option);
    }
  };
  renderPicker();

  picker.addEventListener("change", async () => {
    active = descriptors.find((d) => d.dataset_id === picker.value) ?? null;
    if (active) {
      instanceCache.clear();
      await store.selectDataset(active.dataset_id, active.k);
    }
  });

  el("demo-button").addEventListener("click", async () => {
    try {
      showBanner("generating demo dataset…");
      const desc = (await transport.post("/api/demo")) as DatasetDescriptor;
      descriptors = await loadDescriptors();
      active = descriptors.find((d) => d.dataset_id === desc.dataset_id) ?? null;
      renderPicker();
      el("banner").classList.add("hidden");
      if (active) {
        await store.selectDataset(active.dataset_id, active.k);
      }
    } catch (err) {
      showBanner(err instanceof Error ? err.message : String(err));
    }
  });

  const uploadForm = el("upload-form") as unknown as HTMLFormElement;
  uploadForm.addEventListener("submit", async (event) => {
    event.preventDefault();
    const data = new FormData(uploadForm);
    for (const field of ["labels", "images"]) {
      const file = data.get(field);
      if (file instanceof File && file.size === 0) {
        data.delete(field); // unset optional inputs
      }
    }
    try {
      const desc = (await transport.post("/api/datasets", data)) as DatasetDescriptor;
      descriptors = await loadDescriptors();
      active = descriptors.find((d) => d.dataset_id === desc.dataset_id) ?? null;
      renderPicker();
      uploadForm.reset();
      if (active) {
        instanceCache.clear();
        await store.selectDataset(active.dataset_id, active.k);
      }
    } catch (err) {
      if (err instanceof ApiError) {
        showBanner(
          `upload failed: ${err.message}${err.line !== undefined ? ` (line ${err.line})` : ""}`,
        );
      } else {
        showBanner(String(err));
      }
    }
  });

  store.onError = showBanner;
  store.onChange = () => {
    const s = store.state;
    window.history.replaceState(null, "", `?${encodeState(s)}`);

    renderControls(el("controls"), s, {
      onChange: (patch) => void store.update(patch),
      onOpenChord: () => void store.update({ chordOpen: true }),
      onClearSelection: () => void store.update({ selection: [], chordOpen: false }),
    });

    const order =
      store.data.classes?.map((row) => row.class_id) ??
      Array.from({ length: s.k }, (_, i) => i);

    if (store.data.overview) {
      renderOverview(el("overview"), store.data.overview, order, s, {
        onWindow: (from, to) => void store.update({ from, to }),
      });
    }

    if (store.data.window) {
      const windowPayload = store.data.window;
      const sortedWindowClasses = order.filter(
        (c) => c >= windowPayload.from && c <= windowPayload.to,
      );
      renderDetail(el("detail"), windowPayload, sortedWindowClasses, s, {
        onHoverInstance: (instanceId, x, y) => {
          if (!s.datasetId) {
            return;
          }
          fetchInstance(s.datasetId, instanceId)
            .then((detail) => showPopover(detail, x, y))
            .catch(() => showBanner(`could not load instance ${instanceId}`));
        },
        onLeaveInstance: () => el("popover").classList.add("hidden"),
        onToggleClass: (classId) => {
          const current = s.selection;
          const next = current.includes(classId)
            ? current.filter((c) => c !== classId)
            : [...current, classId];
          if (next.length > SELECTION_CAP) {
            showBanner(`chord selection is capped at ${SELECTION_CAP} classes`);
            return;
          }
          void store.update({ selection: next });
        },
      });
      const notice = el("truncation-notice");
      if (windowPayload.instances.length < windowPayload.total_matching) {
        notice.textContent =
          `showing ${windowPayload.instances.length} of ` +
          `${windowPayload.total_matching} matching instances`;
        notice.classList.remove("hidden");
      } else {
        notice.classList.add("hidden");
      }
    }

    const chordHost = el("chord");
    if (s.chordOpen && store.data.chord) {
      chordHost.classList.remove("hidden");
      renderChord(chordHost, store.data.chord, chordHover, {
        onHover: (target) => {
          chordHover = target;
          store.onChange();
        },
        onInstanceClick: (instanceId) => {
          if (s.datasetId) {
            fetchInstance(s.datasetId, instanceId)
              .then((detail) =>
                showPopover(detail, window.innerWidth / 2, window.innerHeight / 3),
              )
              .catch(() => showBanner(`could not load instance ${instanceId}`));
          }
        },
        onClose: () => void store.update({ chordOpen: false }),
      });
    } else {
      chordHost.classList.add("hidden");
    }
  };

  store.onChange();
  if (active) {
    await store.refresh(["classes", "overview", "window"]);
    if (store.state.chordOpen) {
      await store.refresh(["chord"]);
    }
  }
}

boot().catch((err) => showBanner(`failed to load: ${err}`));
