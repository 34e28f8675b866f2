// Wire types mirroring the server's JSON payloads (snake_case preserved).

export interface SectionPayload {
  name: string;
  body: string;
}

export interface SentencePayload {
  section_index: number;
  char_span: [number, number];
  text: string;
}

export interface MarkerPayload {
  marker_id: string;
  section_index: number;
  char_span: [number, number];
  raw_text: string;
  keys: string[];
  resolved: boolean;
}

export interface AugmentationClass {
  color: string; // saved_red | visited_green | reencountered_yellow | none
  overlays: string[]; // own_heart, cited_quote
}

export interface ScorePayload {
  value: number;
  contributors: Array<[string, number]>;
}

export interface DecorationPayload {
  marker_id: string;
  cited_paper_id: string;
  class: AugmentationClass;
  score: ScorePayload | null;
  shade_bucket: number | null;
  intensity: number | null;
}

export interface OverviewPayload {
  total_citations: number;
  own: number;
  cited_by_own: number;
  reencountered: number;
  saved: number;
  visited: number;
  unresolved: number;
}

export interface ViewPayload {
  schema_version: string;
  paper_id: string;
  title: string;
  window: number;
  toggles: Record<string, boolean>;
  sections: SectionPayload[];
  sentences: SentencePayload[];
  markers: MarkerPayload[];
  decorations: DecorationPayload[];
  overview: OverviewPayload;
}

export interface ProvenancePayload {
  source_paper_id: string;
  citing_sentence: string;
  saved_at: number;
}

export interface HistoryMentionPayload {
  paper_id: string;
  title: string;
  last_opened: number;
  progress: number;
  citing_sentence: string;
}

export interface CardMetaPayload {
  paper_id: string;
  title: string;
  authors: string[];
  year: number | null;
  abstract: string;
  summary: string | null;
  citation_count: number | null;
  reference_count: number | null;
  outgoing_refs: string[];
}

export interface CardPayload {
  meta: CardMetaPayload;
  history_mentions: HistoryMentionPayload[];
  saved_from: ProvenancePayload | null;
  class: AugmentationClass;
  score: ScorePayload | null;
  library_state: boolean;
  similarity: number | null;
}

export interface CardResponse {
  schema_version: string;
  degraded: boolean;
  raw_text?: string;
  card: CardPayload | null;
}

export interface HistoryItemPayload {
  paper_id: string;
  title: string;
  last_opened: number;
  progress: number;
  saved: boolean;
}

export interface LibraryItemPayload {
  paper_id: string;
  title: string;
  provenance: ProvenancePayload | null;
}

export interface SettingsPayload {
  schema_version: string;
  window_size: number;
  type_toggles: Record<string, boolean>;
}

export interface EventBody {
  kind: string;
  paper_id?: string;
  payload?: Record<string, unknown>;
}

export const SUPPORTED_SCHEMA_VERSION = "1";
