// Acceptance tests for the reader against a live primary server: the save
// flip, the window-slider eviction fixture, and the display toggles, all
// driven through the same ApiClient/ReaderModel/render stack the browser
// app uses.

import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { ApiClient } from "../src/api.js";
import { ReaderModel } from "../src/model.js";
import { renderDocument, renderOverviewPanel } from "../src/render.js";

const PORT = 8779;
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;
const api = new ApiClient(BASE);

const CITER_BUNDLE = {
  title: "Citing History Paper",
  sections: [{ name: "Introduction", body: "Prior art [1] anchors this work." }],
  references_block: "[1] A. Author. Shared Target. Venue, 2015.",
  style_hint: "numeric",
};

const FILLER_BUNDLE = {
  title: "Filler History Paper",
  sections: [{ name: "Introduction", body: "Nothing relevant here, only [1]." }],
  references_block: "[1] Z. Zed. Unrelated Matter. Venue, 2018.",
  style_hint: "numeric",
};

const READER_BUNDLE = {
  title: "Document Being Read",
  sections: [{ name: "Introduction", body: "We extend the shared target [1] further." }],
  references_block: "[1] A. Author. Shared Target. Venue, 2015.",
  style_hint: "numeric",
};

let citerId: string;
let fillerId: string;
let readerId: string;

async function waitForServer(): Promise<void> {
  for (let attempt = 0; attempt < 100; attempt++) {
    try {
      await api.settings();
      return;
    } catch {
      await new Promise((resolve) => setTimeout(resolve, 100));
    }
  }
  throw new Error("primary server did not come up");
}

beforeAll(async () => {
  const dataDir = mkdtempSync(join(tmpdir(), "citelens-ui-"));
  server = spawn(
    "python3",
    ["-m", "citelens.cli", "--data-dir", dataDir, "serve", "--port", String(PORT)],
    { stdio: "ignore" },
  );
  await waitForServer();
  citerId = (await api.ingest(CITER_BUNDLE)).paper_id;
  fillerId = (await api.ingest(FILLER_BUNDLE)).paper_id;
  readerId = (await api.ingest(READER_BUNDLE)).paper_id;
  // history: the citing paper first, the filler most recent
  await api.postEvent({ kind: "open", paper_id: citerId });
  await api.postEvent({ kind: "scroll", paper_id: citerId, payload: { fraction: 0.5 } });
  await api.postEvent({ kind: "open", paper_id: fillerId });
}, 30_000);

afterAll(() => {
  server?.kill("SIGKILL");
});

async function loadModel(): Promise<ReaderModel> {
  const model = new ReaderModel();
  model.load(await api.view(readerId));
  return model;
}

describe("reader against the live server", () => {
  it("renders the server decoration verbatim (UI computes nothing)", async () => {
    await api.updateSettings({ window_size: 20, type_toggles: { reencountered: true } });
    const model = await loadModel();
    const dec = model.view.decorations[0];
    expect(dec.class.color).toBe("reencountered_yellow");
    expect(dec.score!.value).toBe(1.5); // 1 + 0.5 progress + 0 saved
    const html = renderDocument(model);
    expect(html).toContain("cite-reencountered");
  });

  it("window slider 20 -> 1 evicts the citing paper and removes the yellow", async () => {
    await api.updateSettings({ window_size: 1 });
    const narrow = await loadModel();
    expect(narrow.view.window).toBe(1);
    expect(renderDocument(narrow)).not.toContain("cite-reencountered");

    await api.updateSettings({ window_size: 20 });
    const wide = await loadModel();
    expect(renderDocument(wide)).toContain("cite-reencountered");
  });

  it("toggling reencountered off hides the inline highlight but keeps the list view", async () => {
    await api.updateSettings({ type_toggles: { reencountered: false } });
    const model = await loadModel();
    const html = renderDocument(model);
    expect(html).not.toContain("cite-reencountered");
    // list view still shows the scored citation
    expect(model.scoredCitations().length).toBe(1);
    expect(model.scoredCitations()[0].value).toBe(1.5);
    expect(renderOverviewPanel(model)).toContain("scored-citation");
    await api.updateSettings({ type_toggles: { reencountered: true } });
  });

  it("save from the card flips the citation to red without a reload", async () => {
    const model = await loadModel();
    const marker = model.view.markers[0];
    const card = await api.card(readerId, marker.marker_id); // logs the card_open
    expect(card.degraded).toBe(false);
    expect(card.card!.meta.title).toBe("Shared Target");
    expect(card.card!.history_mentions[0].citing_sentence).toBe("Prior art [1] anchors this work.");

    const subject = model.view.decorations[0].cited_paper_id;
    await api.postEvent({
      kind: "save",
      paper_id: subject,
      payload: { source_paper_id: readerId, marker_id: marker.marker_id },
    });
    // optimistic local flip: red immediately, no view refetch
    model.applyLocalSave(subject);
    expect(renderDocument(model)).toContain("cite-saved");

    // reconciliation: the server agrees on the next fetch
    const fresh = await loadModel();
    const freshDec = fresh.view.decorations.find((d) => d.cited_paper_id === subject)!;
    expect(freshDec.class.color).toBe("saved_red");
    expect(renderDocument(fresh)).toContain("cite-saved");

    // saved-from provenance is recorded from the reading document
    const libraries = await api.library();
    expect(libraries.library[0].provenance!.citing_sentence).toBe(
      "We extend the shared target [1] further.",
    );
    const cardAfter = await api.card(readerId, marker.marker_id);
    expect(cardAfter.card!.saved_from!.citing_sentence).toBe(
      "We extend the shared target [1] further.",
    );
    expect(cardAfter.card!.library_state).toBe(true);
  });

  it("stateless rendering: refetching reproduces the identical markup", async () => {
    const html1 = renderDocument(await loadModel());
    const html2 = renderDocument(await loadModel());
    expect(html1).toBe(html2);
  });

  it("card opens were recorded with their class at click time", async () => {
    const usage = (await api.usage()) as {
      card_opens: { total: number; by_class: Record<string, number> };
    };
    expect(usage.card_opens.total).toBe(2); // the two card fetches above
    expect(usage.card_opens.by_class.reencountered).toBe(1); // before the save
    expect(usage.card_opens.by_class.familiar).toBe(1); // after the save
  });

  it("history panel data carries progress and recency for ages", async () => {
    const hist = (await api.history()).history;
    const citer = hist.find((h) => h.paper_id === citerId)!;
    expect(citer.progress).toBe(0.5);
    expect(hist[0].last_opened).toBeGreaterThanOrEqual(citer.last_opened);
  });
});
