"""ReadingService: wires parsing, corpus, activity, augmentation, and cards.

This is the single engine behind both the HTTP server and the CLI; neither
reimplements any scoring or classification logic. All state lives under one
data directory:

    corpus/            one JSON file per paper + index.json
    cache/             parsed documents keyed by content hash
    docs/              per-document resolution records
    events.log         append-only activity log
    settings.json      display toggles
    profile.json       the user's own publication ids
"""

import json
import os
import time
from dataclasses import dataclass
from typing import Optional

from citelens import SCHEMA_VERSION
from citelens.activity import (
    KIND_CARD_OPEN,
    KIND_SAVE,
    KIND_SET_WINDOW,
    KIND_SUPPRESS,
    KIND_UNSUPPRESS,
    ActivityStore,
    Provenance,
    validate_event,
)
from citelens.analytics import usage_stats
from citelens.augment import (
    augment_document,
    build_profile,
    classify_citation,
    default_toggles,
    overview,
    stats_class,
)
from citelens.cards import build_card, card_for_library_item
from citelens.citeparse import (
    DocumentBundle,
    ParsedDocument,
    extract_citing_sentence,
    parse_bundle_cached,
    parsed_document_from_json,
)
from citelens.corpus import Corpus, PaperMetadata
from citelens.errors import InvalidEvent, UnknownPaper, UnparsedDocument
from citelens.strategies import LexicalEmbeddingProvider, pool_topk

DEFAULT_DATA_DIR = "./data"
ENV_DATA_DIR = "CITELENS_DATA_DIR"


def data_dir_from_env() -> str:
    return os.environ.get(ENV_DATA_DIR, DEFAULT_DATA_DIR)


@dataclass
class IngestResult:
    paper_id: str
    report: dict
    resolved_entries: int
    unresolved_entries: int


class ReadingService:
    def __init__(
        self,
        data_dir: Optional[str] = None,
        external_client=None,
        embedding_provider=None,
        fsync: bool = True,
        clock=time.time,
    ):
        self.data_dir = data_dir or data_dir_from_env()
        os.makedirs(self.data_dir, exist_ok=True)
        self.corpus = Corpus(self.data_dir, external_client=external_client)
        self.store = ActivityStore(
            self.data_dir, paper_exists=self.corpus.__contains__, fsync=fsync, clock=clock
        )
        self.embedding_provider = embedding_provider
        self._docs = {}  # paper_id -> (ParsedDocument, entry_to_paper)
        self._toggles = default_toggles()
        self._own_paper_ids = []
        self._load_auxiliary()

    def close(self) -> None:
        self.store.close()

    # -- persistence of auxiliary state ------------------------------------

    def _settings_path(self):
        return os.path.join(self.data_dir, "settings.json")

    def _profile_path(self):
        return os.path.join(self.data_dir, "profile.json")

    def _docs_dir(self):
        return os.path.join(self.data_dir, "docs")

    def _cache_dir(self):
        return os.path.join(self.data_dir, "cache")

    def _load_auxiliary(self):
        if os.path.exists(self._settings_path()):
            with open(self._settings_path(), "r", encoding="utf-8") as f:
                raw = json.load(f)
            toggles = default_toggles()
            toggles.update({k: bool(v) for k, v in raw.get("type_toggles", {}).items() if k in toggles})
            self._toggles = toggles
        if os.path.exists(self._profile_path()):
            with open(self._profile_path(), "r", encoding="utf-8") as f:
                self._own_paper_ids = list(json.load(f).get("own_paper_ids", []))
        docs_dir = self._docs_dir()
        if os.path.isdir(docs_dir):
            for name in sorted(os.listdir(docs_dir)):
                if not name.endswith(".json"):
                    continue
                with open(os.path.join(docs_dir, name), "r", encoding="utf-8") as f:
                    rec = json.load(f)
                cache_file = os.path.join(self._cache_dir(), f"{rec['content_hash']}.parsed.json")
                if not os.path.exists(cache_file):
                    continue
                with open(cache_file, "r", encoding="utf-8") as f:
                    doc = parsed_document_from_json(f.read())
                self._docs[rec["paper_id"]] = (doc, rec["entry_to_paper"])

    def _persist_doc_record(self, paper_id: str, doc: ParsedDocument, entry_to_paper: dict):
        os.makedirs(self._docs_dir(), exist_ok=True)
        path = os.path.join(self._docs_dir(), f"{paper_id}.json")
        tmp = path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as f:
            json.dump(
                {
                    "paper_id": paper_id,
                    "content_hash": doc.bundle.content_hash,
                    "entry_to_paper": entry_to_paper,
                },
                f,
                ensure_ascii=False,
                indent=2,
            )
        os.replace(tmp, path)

    # -- profile / settings -------------------------------------------------

    @property
    def profile(self):
        return build_profile(self._own_paper_ids, self.corpus)

    def set_own_papers(self, paper_ids) -> None:
        for pid in paper_ids:
            if pid not in self.corpus:
                raise UnknownPaper(pid)
        self._own_paper_ids = list(paper_ids)
        tmp = self._profile_path() + ".tmp"
        with open(tmp, "w", encoding="utf-8") as f:
            json.dump({"own_paper_ids": self._own_paper_ids}, f, ensure_ascii=False, indent=2)
        os.replace(tmp, self._profile_path())

    def settings(self) -> dict:
        return {"window_size": self.store.state.window, "type_toggles": dict(self._toggles)}

    def update_settings(self, window_size=None, type_toggles=None) -> dict:
        if window_size is not None and int(window_size) != self.store.state.window:
            self.store.append(KIND_SET_WINDOW, "", {"window_size": int(window_size)})
        if type_toggles is not None:
            unknown = set(type_toggles) - set(self._toggles)
            if unknown:
                raise InvalidEvent(f"unknown toggle classes: {sorted(unknown)}")
            self._toggles.update({k: bool(v) for k, v in type_toggles.items()})
            tmp = self._settings_path() + ".tmp"
            with open(tmp, "w", encoding="utf-8") as f:
                json.dump({"type_toggles": self._toggles}, f, ensure_ascii=False, indent=2)
            os.replace(tmp, self._settings_path())
        return self.settings()

    # -- ingestion ------------------------------------------------------------

    def ingest_bundle(self, bundle: DocumentBundle) -> IngestResult:
        """Parse, resolve references to corpus papers, and register the document.

        Entries that resolve nowhere (corpus, external client) are upserted
        from their parsed guesses so that the same cited work converges to
        one paper id across documents; entries without a usable title stay
        unresolved and receive no augmentation.
        """
        doc = parse_bundle_cached(bundle, self._cache_dir())
        title = bundle.title.strip() or f"untitled {bundle.content_hash[:8]}"
        doc_pid = self.corpus.upsert_paper(PaperMetadata(paper_id="", title=title))

        entry_to_paper = {}
        unresolved = 0
        for entry in doc.entries:
            match = self.corpus.resolve_entry(entry)
            pid = match.paper_id
            if pid is None and entry.title_guess.strip():
                pid = self.corpus.upsert_paper(
                    PaperMetadata(
                        paper_id="",
                        title=entry.title_guess,
                        authors=list(entry.authors_guess),
                        year=entry.year_guess,
                    )
                )
            if pid is None:
                unresolved += 1
            entry_to_paper[entry.entry_key] = pid

        outgoing, seen = [], set()
        for entry in doc.entries:
            pid = entry_to_paper.get(entry.entry_key)
            # self-citations would distort local in-degree counts
            if pid and pid != doc_pid and pid not in seen:
                seen.add(pid)
                outgoing.append(pid)
        self.corpus.upsert_paper(
            PaperMetadata(
                paper_id=doc_pid,
                title=title,
                reference_count=len(doc.entries),
                outgoing_refs=outgoing,
            )
        )
        self._docs[doc_pid] = (doc, entry_to_paper)
        self._persist_doc_record(doc_pid, doc, entry_to_paper)
        return IngestResult(
            paper_id=doc_pid,
            report=doc.report.to_dict(),
            resolved_entries=len(doc.entries) - unresolved,
            unresolved_entries=unresolved,
        )

    def document_ids(self) -> list:
        return sorted(self._docs)

    def first_marker_citing(self, reading_paper_id: str, cited_paper_id: str) -> Optional[str]:
        """Id of the first marker in the reading doc that links to the cited paper."""
        doc, entry_to_paper = self._require_doc(reading_paper_id)
        for marker in doc.markers:
            for key in doc.links.get(marker.marker_id, []):
                if entry_to_paper.get(key) == cited_paper_id:
                    return marker.marker_id
        return None

    def _doc_lookup(self, paper_id: str):
        return self._docs.get(paper_id)

    def _require_doc(self, paper_id: str):
        found = self._docs.get(paper_id)
        if found is None:
            if paper_id in self.corpus:
                raise UnparsedDocument(paper_id)
            raise UnknownPaper(paper_id)
        return found

    # -- reading views -----------------------------------------------------------

    def augmented_view(self, paper_id: str, window: Optional[int] = None, toggles: Optional[dict] = None) -> dict:
        doc, entry_to_paper = self._require_doc(paper_id)
        state = self.store.state
        w = window if window is not None else state.window
        toggles = toggles if toggles is not None else dict(self._toggles)
        profile = self.profile
        decorations = augment_document(
            doc, entry_to_paper, profile, state, self.corpus,
            window=w, toggles=toggles, reading_paper_id=paper_id,
        )
        stats = overview(
            doc, entry_to_paper, profile, state, self.corpus,
            window=w, reading_paper_id=paper_id,
        )
        meta = self.corpus.get(paper_id)
        return {
            "schema_version": SCHEMA_VERSION,
            "paper_id": paper_id,
            "title": meta.title,
            "window": w,
            "toggles": toggles,
            "sections": [{"name": s.name, "body": s.body} for s in doc.bundle.sections],
            "sentences": [
                {"section_index": s.section_index, "char_span": list(s.char_span), "text": s.text}
                for s in doc.sentences
            ],
            "markers": [
                {
                    "marker_id": m.marker_id,
                    "section_index": m.section_index,
                    "char_span": list(m.char_span),
                    "raw_text": m.raw_text,
                    "keys": list(m.keys),
                    "resolved": any(
                        entry_to_paper.get(k) for k in doc.links.get(m.marker_id, [])
                    ),
                }
                for m in doc.markers
            ],
            "decorations": [d.to_dict() for d in decorations],
            "overview": stats.to_dict(),
        }

    def paper_card(self, reading_paper_id: str, marker_id: str, cited_paper_id: Optional[str] = None):
        self._require_doc(reading_paper_id)
        return build_card(
            reading_paper_id,
            marker_id,
            docs=self._doc_lookup,
            corpus=self.corpus,
            state=self.store.state,
            profile=self.profile,
            window=self.store.state.window,
            cited_paper_id=cited_paper_id,
            embedding_provider=self.embedding_provider,
            activity_store=self.store,
        )

    def library_card(self, paper_id: str):
        return card_for_library_item(
            paper_id,
            docs=self._doc_lookup,
            corpus=self.corpus,
            state=self.store.state,
            profile=self.profile,
            window=self.store.state.window,
        )

    # -- events --------------------------------------------------------------

    def record_event(self, kind: str, paper_id: str = "", payload: Optional[dict] = None, ts: Optional[float] = None) -> int:
        """Append one event; fills in server-known context first.

        card_open events get the augmentation class at click time when the
        client did not supply one. Saves may reference a (source paper,
        marker) pair instead of a full provenance; the citing sentence is
        extracted here.
        """
        payload = dict(payload or {})
        if kind == KIND_CARD_OPEN and "augmentation_class" not in payload:
            reading = payload.get("reading_paper_id", "")
            klass = classify_citation(
                self.profile,
                self.store.state,
                self.corpus,
                paper_id,
                window=self.store.state.window,
                exclude_paper=reading or None,
            )
            payload["augmentation_class"] = stats_class(klass)
        if kind == KIND_SAVE and "provenance" not in payload and payload.get("marker_id"):
            source = payload.get("source_paper_id", "")
            found = self._docs.get(source)
            if found is None:
                raise InvalidEvent(f"save references unknown source paper {source!r}")
            sentence = extract_citing_sentence(found[0], payload["marker_id"])
            payload = {
                "provenance": Provenance(
                    source_paper_id=source,
                    citing_sentence=sentence,
                    saved_at=ts if ts is not None else self.store._clock(),
                ).to_dict()
            }
        validate_event(kind, paper_id, payload)
        return self.store.append(kind, paper_id, payload, ts=ts)

    def save_paper(self, paper_id: str, provenance: Optional[Provenance] = None) -> int:
        return self.store.save_paper(paper_id, provenance)

    def unsave_paper(self, paper_id: str) -> int:
        return self.store.unsave_paper(paper_id)

    def suppress_highlight(self, paper_id: str) -> int:
        return self.store.append(KIND_SUPPRESS, paper_id)

    def unsuppress_highlight(self, paper_id: str) -> int:
        return self.store.append(KIND_UNSUPPRESS, paper_id)

    # -- listings ------------------------------------------------------------

    def history(self, window: Optional[int] = None) -> list:
        out = []
        for entry in self.store.state.reading_history(window):
            meta = self.corpus.get_optional(entry.paper_id)
            out.append(
                {
                    "paper_id": entry.paper_id,
                    "title": meta.title if meta else "",
                    "last_opened": entry.last_opened,
                    "progress": entry.progress,
                    "saved": entry.saved,
                }
            )
        return out

    def library(self) -> list:
        state = self.store.state
        out = []
        for pid in sorted(state.library):
            meta = self.corpus.get_optional(pid)
            prov = state.library[pid]
            out.append(
                {
                    "paper_id": pid,
                    "title": meta.title if meta else "",
                    "provenance": prov.to_dict() if prov else None,
                }
            )
        return out

    def usage_stats(self) -> dict:
        return usage_stats(self.store.events()).to_dict()

    # -- strategy harness ----------------------------------------------------

    def strategy_report(self, doc_id: str, peer_ids: list, k: int = 5, seed: int = 0):
        doc, entry_to_paper = self._require_doc(doc_id)
        peers = [self._require_doc(pid) for pid in peer_ids]
        provider = self.embedding_provider or LexicalEmbeddingProvider.from_corpus(self.corpus)
        return pool_topk(
            doc,
            entry_to_paper,
            peers,
            self.corpus,
            provider=provider,
            k=k,
            seed=seed,
            topic_paper_ids=[doc_id, *peer_ids],
            doc_paper_id=doc_id,
        )
