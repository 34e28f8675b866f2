// Browser bootstrap: fetch the augmented view, render, and map every user
// gesture to exactly one server event. All scoring comes from the server;
// the only optimistic change is the save -> red flip, reconciled by the
// next fetch.

import { ApiClient } from "./api.js";
import { ReaderModel, SchemaMismatchError } from "./model.js";
import {
  renderCard,
  renderDocument,
  renderErrorBanner,
  renderHistoryPanel,
  renderOverviewPanel,
} from "./render.js";
import { MaxScrollReporter } from "./scroll.js";

function q<T extends HTMLElement>(selector: string): T {
  const el = document.querySelector(selector);
  if (!el) throw new Error(`missing element ${selector}`);
  return el as T;
}

export async function boot(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const apiBase = params.get("api") ?? "http://127.0.0.1:8080";
  const paperId = params.get("paper");
  const api = new ApiClient(apiBase);
  const model = new ReaderModel();
  const docHost = q<HTMLElement>("#document");
  const overviewHost = q<HTMLElement>("#overview");
  const historyHost = q<HTMLElement>("#history");
  const cardHost = q<HTMLElement>("#card");

  if (!paperId) {
    docHost.innerHTML = renderErrorBanner("pass ?paper=<id>&api=<base> in the URL");
    return;
  }

  let activeMarker: string | null = null;

  async function refresh(): Promise<void> {
    try {
      model.load(await api.view(paperId!));
    } catch (e) {
      if (e instanceof SchemaMismatchError) {
        docHost.innerHTML = renderErrorBanner(e.message);
        overviewHost.innerHTML = "";
        return; // schema mismatch: banner only, no partial render
      }
      throw e;
    }
    renderAll();
    const hist = await api.history();
    historyHost.innerHTML = renderHistoryPanel(hist.history, Date.now() / 1000);
  }

  function renderAll(): void {
    docHost.innerHTML = renderDocument(model);
    overviewHost.innerHTML = renderOverviewPanel(model);
    bindOverview();
    bindMarkers();
  }

  function bindMarkers(): void {
    docHost.querySelectorAll<HTMLElement>(".cite").forEach((el) => {
      el.addEventListener("click", () => openCard(el.dataset.marker!));
    });
  }

  async function openCard(markerId: string): Promise<void> {
    activeMarker = markerId;
    try {
      // the card fetch itself records the card_open event server-side
      const response = await api.card(paperId!, markerId);
      cardHost.innerHTML = renderCard(response, Date.now() / 1000);
      cardHost.classList.add("open");
      const bookmark = cardHost.querySelector<HTMLElement>(".bookmark");
      bookmark?.addEventListener("click", () => onBookmark(bookmark));
    } catch {
      cardHost.innerHTML =
        `<div class="card card-error">Could not load the card. ` +
        `<button class="retry">retry</button></div>`;
      cardHost.classList.add("open");
      cardHost.querySelector(".retry")?.addEventListener("click", () => openCard(markerId));
    }
  }

  async function onBookmark(button: HTMLElement): Promise<void> {
    const subject = button.dataset.paper!;
    if (button.classList.contains("saved")) {
      await api.unsave(subject);
    } else {
      await api.postEvent({
        kind: "save",
        paper_id: subject,
        payload: { source_paper_id: paperId!, marker_id: activeMarker ?? undefined },
      });
      // optimistic: flip the inline citation to red without reloading
      model.applyLocalSave(subject);
      renderAll();
    }
    await refresh(); // reconcile against the server
    if (activeMarker) await openCard(activeMarker);
  }

  function bindOverview(): void {
    const slider = overviewHost.querySelector<HTMLInputElement>(".window-slider");
    slider?.addEventListener("change", async () => {
      await api.updateSettings({ window_size: Number(slider.value) });
      await refresh();
    });
    overviewHost.querySelectorAll<HTMLInputElement>("[data-toggle]").forEach((box) => {
      box.addEventListener("change", async () => {
        await api.updateSettings({ type_toggles: { [box.dataset.toggle!]: box.checked } });
        await refresh();
      });
    });
  }

  const reporter = new MaxScrollReporter(1000);
  async function maybePostScroll(event: { fraction: number } | null): Promise<void> {
    if (event) {
      await api.postEvent({ kind: "scroll", paper_id: paperId!, payload: { fraction: event.fraction } });
    }
  }
  window.addEventListener("scroll", () => {
    const el = document.documentElement;
    const denominator = el.scrollHeight - el.clientHeight;
    const fraction = denominator > 0 ? el.scrollTop / denominator : 1;
    void maybePostScroll(reporter.record(fraction, Date.now()));
  });
  setInterval(() => void maybePostScroll(reporter.poll(Date.now())), 1000);

  await api.postEvent({ kind: "open", paper_id: paperId });
  await refresh();
}

if (typeof document !== "undefined" && document.getElementById("document")) {
  void boot();
}
