/**
 * DOM wiring for the what-if dashboard. All decision logic lives in the
 * pure modules (allocation, client, heatmap, reports); this file only
 * connects them to elements in index.html.
 */
import {
  AllocationState,
  fractionsOf,
  fromFractions,
  initialState,
  setPercent,
  toggleLock,
} from "./allocation.js";
import { rawNumberToken, WhatIfClient, WhatIfResult } from "./client.js";
import { debounce } from "./debounce.js";
import { cellFractions, findCell, renderCells } from "./heatmap.js";
import { importanceBars, monthlyPoints } from "./reports.js";
import { HeatmapResponse, ImportanceResponse, MonthlyResponse } from "./types.js";

const API = "";
const DEBOUNCE_MS = 200;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

let state: AllocationState = { wells: [] };
let grid: HeatmapResponse | undefined;

const client = new WhatIfClient(
  API,
  (url, init) => fetch(url, init),
  showWhatIf,
  showError,
);
const requestWhatIf = debounce(() => void client.request(fractionsOf(state)), DEBOUNCE_MS);

function showError(message: string): void {
  const banner = el<HTMLDivElement>("error-banner");
  banner.textContent = message;
  banner.hidden = false;
}

function clearError(): void {
  el<HTMLDivElement>("error-banner").hidden = true;
}

function showWhatIf(result: WhatIfResult): void {
  clearError();
  el<HTMLSpanElement>("predicted-total").textContent = rawNumberToken(
    result.raw,
    "predicted_total",
  );
  const improvement = result.body.improvement;
  el<HTMLSpanElement>("improvement").textContent = `${(improvement * 100).toFixed(1)}%`;
  el<HTMLSpanElement>("artifact-hash").textContent = result.body.artifact_hash;
}

function renderSliders(): void {
  const host = el<HTMLDivElement>("sliders");
  host.replaceChildren();
  for (const control of state.wells) {
    const row = document.createElement("div");
    row.className = "slider-row";

    const label = document.createElement("label");
    label.textContent = control.well;

    const slider = document.createElement("input");
    slider.type = "range";
    slider.min = "0";
    slider.max = "100";
    slider.step = "1";
    slider.value = String(control.percent);
    slider.disabled = control.locked;
    slider.addEventListener("input", () => {
      state = setPercent(state, control.well, Number(slider.value));
      renderSliders();
      requestWhatIf();
    });

    const value = document.createElement("span");
    value.className = "percent";
    value.textContent = `${control.percent}%`;

    const lock = document.createElement("button");
    lock.textContent = control.locked ? "\u{1F512}" : "\u{1F513}";
    lock.title = control.locked ? "unlock" : "lock";
    lock.addEventListener("click", () => {
      state = toggleLock(state, control.well);
      renderSliders();
      requestWhatIf();
    });

    row.append(label, slider, value, lock);
    host.append(row);
  }
}

function renderHeatmap(): void {
  if (!grid) return;
  const host = el<HTMLDivElement>("heatmap");
  host.replaceChildren();
  const n = Math.round(1 / grid.step);
  host.style.gridTemplateColumns = `repeat(${n + 1}, 10px)`;
  const byKey = new Map(
    renderCells(grid).map((c) => [`${Math.round(c.fractionI * n)}:${Math.round(c.fractionJ * n)}`, c]),
  );
  for (let j = n; j >= 0; j--) {
    for (let i = 0; i <= n; i++) {
      const cell = document.createElement("div");
      const rendered = byKey.get(`${i}:${j}`);
      if (rendered) {
        cell.className = "cell";
        cell.style.backgroundColor = rendered.color;
        cell.title = `${grid.well_i} ${Math.round(rendered.fractionI * 100)}%, ${grid.well_j} ${Math.round(rendered.fractionJ * 100)}% → ${rendered.value}`;
        if (rendered.isCurrent) cell.classList.add("current");
        if (rendered.isOptimal) cell.classList.add("optimal");
        cell.addEventListener("click", () => {
          const clicked = findCell(grid!, rendered.fractionI, rendered.fractionJ);
          if (!clicked) return;
          state = fromFractions(state, cellFractions(grid!, clicked));
          renderSliders();
          requestWhatIf();
        });
      } else {
        cell.className = "cell empty";
      }
      host.append(cell);
    }
  }
  el<HTMLSpanElement>("heatmap-axes").textContent = `x: ${grid.well_i}, y: ${grid.well_j}`;
}

function renderImportance(response: ImportanceResponse): void {
  const host = el<HTMLDivElement>("importance");
  host.replaceChildren();
  for (const bar of importanceBars(response)) {
    const row = document.createElement("div");
    row.className = "bar-row";
    const label = document.createElement("span");
    label.className = "bar-label";
    label.textContent = bar.feature;
    const track = document.createElement("div");
    track.className = "bar-track";
    const fill = document.createElement("div");
    fill.className = "bar-fill";
    fill.style.width = `${bar.width * 100}%`;
    fill.title = bar.gainShare.toFixed(4);
    track.append(fill);
    row.append(label, track);
    host.append(row);
  }
}

function renderMonthly(response: MonthlyResponse): void {
  const host = el<HTMLTableSectionElement>("monthly-body");
  host.replaceChildren();
  for (const point of monthlyPoints(response)) {
    const row = document.createElement("tr");
    if (point.flagged) row.className = "out-of-band";
    const cells = [
      point.month,
      point.actual.toFixed(1),
      point.predicted.toFixed(1),
      point.zeroActual ? "—" : `${point.bandLow.toFixed(1)} .. ${point.bandHigh.toFixed(1)}`,
      point.zeroActual ? "no production" : point.flagged ? "outside ±10%" : "ok",
    ];
    for (const text of cells) {
      const td = document.createElement("td");
      td.textContent = text;
      row.append(td);
    }
    host.append(row);
  }
}

async function getJson<T>(url: string): Promise<T> {
  const response = await fetch(url);
  if (!response.ok) {
    throw new Error(`${url}: ${response.status} ${await response.text()}`);
  }
  return (await response.json()) as T;
}

async function boot(): Promise<void> {
  try {
    grid = await getJson<HeatmapResponse>(`${API}/heatmap?i=0&j=1`);
    const wells = [grid.well_i, grid.well_j, ...Object.keys(grid.residual_policy)].sort();
    state = initialState(wells);
    const current = findCell(grid, grid.current_cell[0], grid.current_cell[1]);
    if (current) state = fromFractions(state, cellFractions(grid, current));
    renderSliders();
    renderHeatmap();
    void client.request(fractionsOf(state));

    renderImportance(await getJson<ImportanceResponse>(`${API}/model/importance?top=8`));
    renderMonthly(await getJson<MonthlyResponse>(`${API}/report/monthly`));
  } catch (err) {
    showError(err instanceof Error ? err.message : String(err));
  }
}

void boot();
