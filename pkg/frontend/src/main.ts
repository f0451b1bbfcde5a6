/**
 * Bootstrap: wire the store to the DOM.
 *
 * Service base URL comes from the `?service=` query parameter or defaults
 * to same-origin (useful behind a reverse proxy).
 */

import { ApiClient } from "./api.js";
import { SessionStore } from "./state.js";
import {
  renderHistoryStrip,
  renderScenePicker,
  renderSizeCodePanel,
  renderStatus,
} from "./render.js";

const params = new URLSearchParams(window.location.search);
const baseUrl = params.get("service") ?? "";
const api = new ApiClient(baseUrl);
const store = new SessionStore(api);

const $ = (id: string): HTMLElement => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el;
};

function redraw(): void {
  const state = store.snapshot();
  $("status").innerHTML = renderStatus(state);
  $("scenes").innerHTML = renderScenePicker(state.scenes, state.selectedSceneId, baseUrl);
  $("codes").innerHTML = renderSizeCodePanel(state.catalog, state.pending);
  $("history").innerHTML = renderHistoryStrip(state.history);
  const button = $("generate") as HTMLButtonElement;
  button.disabled = state.busy || state.selectedSceneId === null;
}

store.subscribe(redraw);

$("scenes").addEventListener("click", (ev) => {
  const button = (ev.target as HTMLElement).closest("[data-scene-id]");
  if (button) store.selectScene(button.getAttribute("data-scene-id")!);
});

$("codes").addEventListener("change", (ev) => {
  const select = ev.target as HTMLSelectElement;
  const categoryId = select.getAttribute("data-category-id");
  if (categoryId) store.setSizeCode(Number(categoryId), select.value);
});

$("generate").addEventListener("click", () => {
  void store.generate();
});

$("status").addEventListener("click", (ev) => {
  if ((ev.target as HTMLElement).getAttribute("data-action") === "retry") {
    void store.loadScenes();
    void store.loadCatalog();
  }
});

void store.loadScenes();
void store.loadCatalog();
redraw();
