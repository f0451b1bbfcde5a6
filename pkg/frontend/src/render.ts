/**
 * Pure HTML renderers for the three UI regions.
 *
 * Every function maps state to an HTML string; DOM wiring lives in
 * main.ts. Colors always come from the service catalog, never from
 * hard-coded values.
 */

import { Catalog, SceneSummary } from "./api.js";
import { HistoryEntry, DEFAULT_SIZE_CODE, SessionSnapshot } from "./state.js";

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderScenePicker(
  scenes: SceneSummary[],
  selectedId: string | null,
  baseUrl: string,
): string {
  if (scenes.length === 0) {
    return `<p class="empty">No fixture scenes available. Start the service with a fixtures directory.</p>`;
  }
  const cells = scenes
    .map((scene) => {
      const cls = scene.id === selectedId ? "scene selected" : "scene";
      return (
        `<button class="${cls}" data-scene-id="${esc(scene.id)}">` +
        `<img src="${esc(baseUrl + scene.thumbnail)}" alt="${esc(scene.room_type)}" width="96" height="96">` +
        `<span>${esc(scene.id)} · ${esc(scene.room_type)}</span></button>`
      );
    })
    .join("");
  return `<div class="scene-grid">${cells}</div>`;
}

export function renderSizeCodePanel(
  catalog: Catalog | null,
  pending: { category_id: number; size_code: string }[],
): string {
  if (!catalog) {
    return `<p class="empty">Catalog not loaded.</p>`;
  }
  const chosen = new Map(pending.map((r) => [r.category_id, r.size_code]));
  const rows = catalog.categories
    .filter((c) => c.customized)
    .map((c) => {
      const current = chosen.get(c.id) ?? DEFAULT_SIZE_CODE;
      const options = catalog.size_codes
        .map(
          (code) =>
            `<option value="${esc(code)}"${code === current ? " selected" : ""}>${esc(code)}</option>`,
        )
        .join("");
      const swatch = `rgb(${c.color[0]},${c.color[1]},${c.color[2]})`;
      return (
        `<label class="code-row"><span class="swatch" style="background:${swatch}"></span>` +
        `${esc(c.name)} <select data-category-id="${c.id}">${options}</select></label>`
      );
    })
    .join("");
  return `<div class="code-panel">${rows}</div>`;
}

export function renderHistoryStrip(history: HistoryEntry[]): string {
  if (history.length === 0) {
    return `<p class="empty">No results yet. Pick a scene, choose size codes, and generate.</p>`;
  }
  const panels = history
    .map((entry, i) => {
      const labels = entry.labels.length
        ? entry.labels.map(esc).join(", ")
        : "no size requests";
      const img = entry.imageBase64
        ? `<img src="data:image/png;base64,${entry.imageBase64}" alt="layout ${i}" width="256" height="256">`
        : `<span class="no-image">no render</span>`;
      const note =
        entry.response.warnings.length > 0
          ? `<span class="warning">${esc(entry.response.warnings[0].message)}</span>`
          : "";
      return (
        `<figure class="panel" data-panel-index="${i}">${img}` +
        `<figcaption>#${i + 1} ${esc(entry.sceneId)} — ${labels}` +
        ` <span class="latency">${entry.response.latency_ms.toFixed(0)} ms</span>${note}</figcaption></figure>`
      );
    })
    .join("");
  return `<div class="history-strip">${panels}</div>`;
}

export function renderStatus(state: SessionSnapshot): string {
  if (state.error) {
    return `<div class="banner error">${esc(state.error)} <button data-action="retry">Retry</button></div>`;
  }
  if (state.busy) {
    return `<div class="banner busy">Generating…</div>`;
  }
  return "";
}
