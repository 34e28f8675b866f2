// Client-side view model. It never computes scoring or precedence itself:
// every decoration comes from the server payload. The only local mutation is
// the optimistic save flip, which is reconciled against the next fetch.

import type { DecorationPayload, ViewPayload } from "./types.js";
import { SUPPORTED_SCHEMA_VERSION } from "./types.js";

export class SchemaMismatchError extends Error {
  constructor(got: string) {
    super(`unsupported schema_version ${got} (expected ${SUPPORTED_SCHEMA_VERSION})`);
  }
}

const COLOR_RANK: Record<string, number> = {
  saved_red: 3,
  visited_green: 2,
  reencountered_yellow: 1,
  none: 0,
};

export interface ScoredCitation {
  cited_paper_id: string;
  marker_id: string;
  value: number;
}

export class ReaderModel {
  private view_: ViewPayload | null = null;

  load(view: ViewPayload): void {
    if (view.schema_version !== SUPPORTED_SCHEMA_VERSION) {
      throw new SchemaMismatchError(view.schema_version);
    }
    this.view_ = view;
  }

  get view(): ViewPayload {
    if (!this.view_) throw new Error("no document loaded");
    return this.view_;
  }

  get loaded(): boolean {
    return this.view_ !== null;
  }

  decorationsFor(markerId: string): DecorationPayload[] {
    return this.view.decorations.filter((d) => d.marker_id === markerId);
  }

  /** Multi-paper markers render the strongest decoration of the group. */
  dominantDecoration(markerId: string): DecorationPayload | null {
    const all = this.decorationsFor(markerId);
    if (all.length === 0) return null;
    return all.reduce((best, d) => {
      const rank = COLOR_RANK[d.class.color] ?? 0;
      const bestRank = COLOR_RANK[best.class.color] ?? 0;
      if (rank !== bestRank) return rank > bestRank ? d : best;
      return (d.shade_bucket ?? 0) > (best.shade_bucket ?? 0) ? d : best;
    });
  }

  /**
   * Optimistic save: flip every decoration of the cited paper to red locally
   * so the inline citation changes without a page reload.
   */
  applyLocalSave(citedPaperId: string): void {
    const view = this.view;
    view.decorations = view.decorations.map((d) =>
      d.cited_paper_id === citedPaperId
        ? { ...d, class: { color: "saved_red", overlays: d.class.overlays }, shade_bucket: null }
        : d,
    );
  }

  /** Scored citations for the list view; includes classes toggled off inline. */
  scoredCitations(): ScoredCitation[] {
    const seen = new Set<string>();
    const out: ScoredCitation[] = [];
    for (const d of this.view.decorations) {
      if (d.score && !seen.has(d.cited_paper_id)) {
        seen.add(d.cited_paper_id);
        out.push({ cited_paper_id: d.cited_paper_id, marker_id: d.marker_id, value: d.score.value });
      }
    }
    out.sort((a, b) => b.value - a.value || a.cited_paper_id.localeCompare(b.cited_paper_id));
    return out;
  }

  /** Overview counts in display order: own, cited-by-own, reencountered, saved, visited. */
  overviewRows(): Array<[string, number]> {
    const o = this.view.overview;
    return [
      ["own papers", o.own],
      ["cited by your papers", o.cited_by_own],
      ["reencountered", o.reencountered],
      ["saved", o.saved],
      ["visited", o.visited],
    ];
  }
}
