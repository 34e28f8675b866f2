// Pure HTML-string renderers. Keeping these DOM-free makes the whole visual
// layer assertable in node tests; app.ts only assigns the results to
// innerHTML and binds listeners.

import type { CardResponse, HistoryItemPayload, MarkerPayload, ViewPayload } from "./types.js";
import type { ReaderModel } from "./model.js";

// Yellow-to-orange ramp, one stop per shade bucket; bucket 5 is darkest.
export const SHADE_RAMP = ["#fff3bf", "#ffe08a", "#ffc94d", "#ffab2e", "#ff8c1a"];

export function shadeColor(bucket: number): string {
  const idx = Math.max(1, Math.min(5, bucket)) - 1;
  return SHADE_RAMP[idx];
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

export function formatAge(deltaSeconds: number): string {
  if (deltaSeconds < 60) return "just now";
  const minutes = Math.floor(deltaSeconds / 60);
  if (minutes < 60) return `${minutes} minute${minutes === 1 ? "" : "s"} ago`;
  const hours = Math.floor(minutes / 60);
  if (hours < 24) return `${hours} hour${hours === 1 ? "" : "s"} ago`;
  const days = Math.floor(hours / 24);
  return `${days} day${days === 1 ? "" : "s"} ago`;
}

const OVERLAY_GLYPHS: Record<string, string> = {
  own_heart: "❤️", // heart emoji over citations to your own papers
  cited_quote: "❝", // red quotation mark for papers cited by your papers
};

function markerHtml(model: ReaderModel, marker: MarkerPayload): string {
  const dec = model.dominantDecoration(marker.marker_id);
  const color = dec?.class.color ?? "none";
  const classes = ["cite"];
  let style = "";
  if (color === "saved_red") classes.push("cite-saved");
  else if (color === "visited_green") classes.push("cite-visited");
  else if (color === "reencountered_yellow") {
    classes.push("cite-reencountered");
    if (dec?.shade_bucket) style = ` style="background-color:${shadeColor(dec.shade_bucket)}"`;
  } else classes.push("cite-plain");
  if (!marker.resolved) classes.push("cite-unresolved");

  const overlays = (dec?.class.overlays ?? [])
    .map((o) => OVERLAY_GLYPHS[o])
    .filter(Boolean)
    .map((g) => `<sup class="overlay">${g}</sup>`)
    .join("");
  return (
    `<span class="${classes.join(" ")}" data-marker="${escapeHtml(marker.marker_id)}"${style}>` +
    `${escapeHtml(marker.raw_text)}${overlays}</span>`
  );
}

function sectionHtml(model: ReaderModel, sectionIndex: number): string {
  const view = model.view;
  const section = view.sections[sectionIndex];
  const markers = view.markers
    .filter((m) => m.section_index === sectionIndex)
    .sort((a, b) => a.char_span[0] - b.char_span[0]);
  let html = "";
  let cursor = 0;
  for (const marker of markers) {
    const [start, end] = marker.char_span;
    html += escapeHtml(section.body.slice(cursor, start));
    html += markerHtml(model, marker);
    cursor = end;
  }
  html += escapeHtml(section.body.slice(cursor));
  return `<section><h2>${escapeHtml(section.name)}</h2><p class="section-body">${html}</p></section>`;
}

export function renderDocument(model: ReaderModel): string {
  const view = model.view;
  const sections = view.sections.map((_, i) => sectionHtml(model, i)).join("\n");
  return `<article class="paper"><h1>${escapeHtml(view.title)}</h1>\n${sections}</article>`;
}

export function renderOverviewPanel(model: ReaderModel): string {
  const view = model.view;
  const rows = model
    .overviewRows()
    .map(
      ([label, count]) =>
        `<li class="overview-row"><span class="count">${count}</span> ${escapeHtml(label)}</li>`,
    )
    .join("");
  const toggles = Object.entries(view.toggles)
    .map(
      ([name, on]) =>
        `<label class="toggle"><input type="checkbox" data-toggle="${escapeHtml(name)}"` +
        `${on ? " checked" : ""}/> ${escapeHtml(name.replace(/_/g, " "))}</label>`,
    )
    .join("");
  const scored = model
    .scoredCitations()
    .map(
      (s) =>
        `<li class="scored-citation" data-paper="${escapeHtml(s.cited_paper_id)}" ` +
        `data-marker="${escapeHtml(s.marker_id)}">score ${s.value.toFixed(2)}</li>`,
    )
    .join("");
  return (
    `<div class="overview">` +
    `<p class="overview-total">${view.overview.total_citations} citations` +
    (view.overview.unresolved ? ` (${view.overview.unresolved} unresolved)` : "") +
    `</p>` +
    `<ul class="overview-counts">${rows}</ul>` +
    `<div class="toggles">${toggles}</div>` +
    `<div class="window-control"><label>history window ` +
    `<input type="range" min="1" max="50" value="${view.window}" class="window-slider"/>` +
    `<span class="window-value">${view.window}</span></label></div>` +
    `<ul class="scored-list">${scored}</ul>` +
    `</div>`
  );
}

export function renderCard(response: CardResponse, nowSeconds: number): string {
  if (response.degraded || !response.card) {
    return (
      `<div class="card card-degraded"><p class="raw-entry">${escapeHtml(response.raw_text ?? "")}</p>` +
      `<p class="degraded-note">No personalized context for this citation.</p></div>`
    );
  }
  const card = response.card;
  const meta = card.meta;
  const counts =
    `<span class="card-counts">${meta.citation_count ?? "?"} citations · ` +
    `${meta.reference_count ?? "?"} refs</span>`;
  const bookmark = `<button class="bookmark${card.library_state ? " saved" : ""}" data-paper="${escapeHtml(
    meta.paper_id,
  )}">${card.library_state ? "⭐ saved" : "☆ save"}</button>`;
  const mentions = card.history_mentions
    .map(
      (m) =>
        `<li class="mention"><span class="mention-title">${escapeHtml(m.title)}</span>` +
        ` <span class="mention-age">${formatAge(nowSeconds - m.last_opened)}</span>` +
        ` <span class="mention-progress">${Math.round(m.progress * 100)}% read</span>` +
        `<blockquote>${escapeHtml(m.citing_sentence)}</blockquote></li>`,
    )
    .join("");
  const savedFrom = card.saved_from
    ? `<p class="saved-from">Saved from: <q>${escapeHtml(card.saved_from.citing_sentence)}</q></p>`
    : "";
  const similarity =
    card.similarity !== null && card.similarity !== undefined
      ? `<p class="similarity">similarity ${card.similarity.toFixed(3)}</p>`
      : "";
  const score = card.score ? `<p class="card-score">relevance score ${card.score.value.toFixed(2)}</p>` : "";
  return (
    `<div class="card">` +
    `<div class="card-top">${bookmark}${counts}</div>` +
    `<h3>${escapeHtml(meta.title)}${meta.year ? ` (${meta.year})` : ""}</h3>` +
    `<p class="authors">${escapeHtml(meta.authors.join(", "))}</p>` +
    (meta.summary ? `<p class="summary">${escapeHtml(meta.summary)}</p>` : "") +
    `<p class="abstract">${escapeHtml(meta.abstract)}</p>` +
    score +
    similarity +
    savedFrom +
    (mentions ? `<h4>In your recent reading</h4><ul class="mentions">${mentions}</ul>` : "") +
    `</div>`
  );
}

export function renderHistoryPanel(items: HistoryItemPayload[], nowSeconds: number): string {
  const rows = items
    .map(
      (h) =>
        `<li class="history-item${h.saved ? " saved" : ""}" data-paper="${escapeHtml(h.paper_id)}">` +
        `<span class="history-age">${formatAge(nowSeconds - h.last_opened)}</span> ` +
        `${escapeHtml(h.title)} <span class="history-progress">${Math.round(h.progress * 100)}%</span></li>`,
    )
    .join("");
  return `<ul class="history-panel">${rows}</ul>`;
}

export function renderErrorBanner(message: string): string {
  return `<div class="error-banner">${escapeHtml(message)}</div>`;
}
