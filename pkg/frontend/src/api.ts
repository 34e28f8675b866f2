// Thin typed client over the reading service HTTP API. The UI consumes the
// server exclusively through this module; it never touches stores directly.

import type {
  CardResponse,
  EventBody,
  HistoryItemPayload,
  LibraryItemPayload,
  SettingsPayload,
  ViewPayload,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly code: string,
    message: string,
    public readonly status: number,
  ) {
    super(message);
  }
}

export class ApiClient {
  constructor(private readonly baseUrl: string) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const resp = await fetch(this.baseUrl + path, {
      method,
      headers: body !== undefined ? { "Content-Type": "application/json" } : undefined,
      body: body !== undefined ? JSON.stringify(body) : undefined,
    });
    const payload = await resp.json();
    if (!resp.ok) {
      throw new ApiError(payload.code ?? "internal", payload.message ?? resp.statusText, resp.status);
    }
    return payload as T;
  }

  ingest(bundle: Record<string, unknown>): Promise<{ paper_id: string; parse_report: Record<string, unknown> }> {
    return this.request("POST", "/papers", bundle);
  }

  view(paperId: string, window?: number): Promise<ViewPayload> {
    const query = window !== undefined ? `?window=${window}` : "";
    return this.request("GET", `/papers/${encodeURIComponent(paperId)}/view${query}`);
  }

  card(paperId: string, markerId: string, cited?: string): Promise<CardResponse> {
    const query = cited ? `?cited=${encodeURIComponent(cited)}` : "";
    return this.request(
      "GET",
      `/papers/${encodeURIComponent(paperId)}/markers/${encodeURIComponent(markerId)}/card${query}`,
    );
  }

  postEvent(event: EventBody): Promise<{ seq: number }> {
    return this.request("POST", "/events", event);
  }

  history(window?: number): Promise<{ history: HistoryItemPayload[] }> {
    const query = window !== undefined ? `?window=${window}` : "";
    return this.request("GET", `/history${query}`);
  }

  library(): Promise<{ library: LibraryItemPayload[] }> {
    return this.request("GET", "/library");
  }

  unsave(paperId: string): Promise<{ seq: number }> {
    return this.request("DELETE", `/library/${encodeURIComponent(paperId)}`);
  }

  settings(): Promise<SettingsPayload> {
    return this.request("GET", "/settings");
  }

  updateSettings(update: {
    window_size?: number;
    type_toggles?: Record<string, boolean>;
  }): Promise<SettingsPayload> {
    return this.request("PUT", "/settings", update);
  }

  usage(): Promise<Record<string, unknown>> {
    return this.request("GET", "/stats/usage");
  }
}
