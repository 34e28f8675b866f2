"""Canonical paper identity: metadata index, entry resolution, citation stats.

The corpus stands in for a global scholarly index at desk scale. Papers are
keyed by a stable opaque id derived from (normalized title, year), persisted
one JSON file per paper plus an index file. An optional external metadata
client (HTTP or in-process stub) backstops resolution misses.
"""

import hashlib
import json
import logging
import os
import threading
from dataclasses import dataclass, field, replace
from typing import Optional

from citelens.errors import InvalidMetadata, UnknownPaper
from citelens.textnorm import normalize_title, title_tokens

logger = logging.getLogger(__name__)

# Fuzzy matches below this token-set Jaccard are rejected: a false
# augmentation in a reading tool is worse than a miss.
FUZZY_JACCARD_THRESHOLD = 0.9
YEAR_TOLERANCE = 1

MATCH_EXACT = "exact_norm"
MATCH_FUZZY = "fuzzy"
MATCH_EXTERNAL = "external"
MATCH_NONE = "none"


@dataclass
class PaperMetadata:
    paper_id: str
    title: str
    authors: list = field(default_factory=list)
    year: Optional[int] = None
    abstract: str = ""
    summary: Optional[str] = None
    citation_count: Optional[int] = None
    reference_count: Optional[int] = None
    outgoing_refs: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "paper_id": self.paper_id,
            "title": self.title,
            "authors": list(self.authors),
            "year": self.year,
            "abstract": self.abstract,
            "summary": self.summary,
            "citation_count": self.citation_count,
            "reference_count": self.reference_count,
            "outgoing_refs": list(self.outgoing_refs),
        }


def metadata_from_dict(raw: dict) -> PaperMetadata:
    return PaperMetadata(
        paper_id=raw.get("paper_id", ""),
        title=raw["title"],
        authors=list(raw.get("authors", [])),
        year=raw.get("year"),
        abstract=raw.get("abstract", ""),
        summary=raw.get("summary"),
        citation_count=raw.get("citation_count"),
        reference_count=raw.get("reference_count"),
        outgoing_refs=list(raw.get("outgoing_refs", [])),
    )


@dataclass(frozen=True)
class MatchResult:
    paper_id: Optional[str]
    confidence: float
    method: str


@dataclass(frozen=True)
class CitationStats:
    citation_count: int
    reference_count: int
    citation_mode: str  # "stored" or "derived" (in-degree over the local corpus)


class ExternalMetadataClient:
    """Wire contract: request {title, year?} -> PaperMetadata or nothing."""

    def lookup(self, title: str, year: Optional[int] = None) -> Optional[PaperMetadata]:
        raise NotImplementedError


class StubMetadataClient(ExternalMetadataClient):
    """Deterministic in-process client backed by a fixed metadata list."""

    def __init__(self, papers=()):
        self._by_title = {normalize_title(p.title): p for p in papers}

    def lookup(self, title, year=None):
        hit = self._by_title.get(normalize_title(title))
        if hit is None:
            return None
        if year is not None and hit.year is not None and abs(hit.year - year) > YEAR_TOLERANCE:
            return None
        return hit


class HttpMetadataClient(ExternalMetadataClient):
    """HTTP transport for the same contract: POST {title, year?} -> metadata JSON.

    Any non-200, empty body, or malformed response reads as "no match";
    exceptions propagate to fetch_external, which logs and degrades to None.
    """

    def __init__(self, endpoint: str, timeout: float = 5.0):
        self.endpoint = endpoint
        self.timeout = timeout

    def lookup(self, title, year=None):
        import urllib.request

        body = {"title": title}
        if year is not None:
            body["year"] = year
        request = urllib.request.Request(
            self.endpoint,
            data=json.dumps(body).encode("utf-8"),
            headers={"Content-Type": "application/json"},
            method="POST",
        )
        with urllib.request.urlopen(request, timeout=self.timeout) as resp:
            raw = resp.read()
        if not raw:
            return None
        payload = json.loads(raw)
        if not payload or not payload.get("title"):
            return None
        return metadata_from_dict(payload)


def _identity_key(title: str, year: Optional[int]) -> str:
    return f"{normalize_title(title)}|{year if year is not None else 'none'}"


def derive_paper_id(title: str, year: Optional[int]) -> str:
    digest = hashlib.sha1(_identity_key(title, year).encode("utf-8")).hexdigest()
    return f"p{digest[:12]}"


class Corpus:
    """Multi-reader single-writer paper store.

    Upserts are serialized behind a lock; lookups read plain dicts, which
    readers only ever observe fully-applied (mutations build the new record
    before publishing it).
    """

    def __init__(self, data_dir: Optional[str] = None, external_client: Optional[ExternalMetadataClient] = None):
        self._papers = {}
        self._index = {}  # normalized-title|year -> paper_id
        self._lock = threading.RLock()
        self._data_dir = data_dir
        self.external_client = external_client
        if data_dir:
            self._load()

    # -- persistence ------------------------------------------------------

    def _paper_dir(self):
        return os.path.join(self._data_dir, "corpus")

    def _load(self):
        pdir = self._paper_dir()
        if not os.path.isdir(pdir):
            return
        for name in os.listdir(pdir):
            if name == "index.json" or not name.endswith(".json"):
                continue
            with open(os.path.join(pdir, name), "r", encoding="utf-8") as f:
                meta = metadata_from_dict(json.load(f))
            self._papers[meta.paper_id] = meta
        index_path = os.path.join(pdir, "index.json")
        if os.path.exists(index_path):
            with open(index_path, "r", encoding="utf-8") as f:
                self._index = json.load(f)
        else:
            self._index = {_identity_key(m.title, m.year): pid for pid, m in self._papers.items()}

    def _persist(self, meta: PaperMetadata):
        if not self._data_dir:
            return
        pdir = self._paper_dir()
        os.makedirs(pdir, exist_ok=True)
        path = os.path.join(pdir, f"{meta.paper_id}.json")
        tmp = path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as f:
            json.dump(meta.to_dict(), f, ensure_ascii=False, indent=2)
        os.replace(tmp, path)
        index_path = os.path.join(pdir, "index.json")
        tmp = index_path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as f:
            json.dump(self._index, f, ensure_ascii=False, indent=2, sort_keys=True)
        os.replace(tmp, index_path)

    # -- core operations --------------------------------------------------

    def __contains__(self, paper_id: str) -> bool:
        return paper_id in self._papers

    def __len__(self) -> int:
        return len(self._papers)

    def paper_ids(self) -> list:
        return sorted(self._papers)

    def get(self, paper_id: str) -> PaperMetadata:
        meta = self._papers.get(paper_id)
        if meta is None:
            raise UnknownPaper(paper_id)
        return meta

    def get_optional(self, paper_id: str) -> Optional[PaperMetadata]:
        return self._papers.get(paper_id)

    def upsert_paper(self, meta: PaperMetadata) -> str:
        """Insert or update; idempotent on (normalized title, year).

        Re-upserting refreshes fields but keeps the original id. Fields set
        to None on the incoming record do not clobber stored values.
        """
        if not meta.title or not meta.title.strip():
            raise InvalidMetadata("paper title must be non-empty")
        key = _identity_key(meta.title, meta.year)
        with self._lock:
            paper_id = self._index.get(key)
            if paper_id is None:
                paper_id = meta.paper_id or derive_paper_id(meta.title, meta.year)
                self._index[key] = paper_id
                stored = replace(meta, paper_id=paper_id)
            else:
                old = self._papers[paper_id]
                stored = PaperMetadata(
                    paper_id=paper_id,
                    title=meta.title,
                    authors=list(meta.authors) or list(old.authors),
                    year=meta.year if meta.year is not None else old.year,
                    abstract=meta.abstract or old.abstract,
                    summary=meta.summary if meta.summary is not None else old.summary,
                    citation_count=meta.citation_count
                    if meta.citation_count is not None
                    else old.citation_count,
                    reference_count=meta.reference_count
                    if meta.reference_count is not None
                    else old.reference_count,
                    outgoing_refs=list(meta.outgoing_refs) or list(old.outgoing_refs),
                )
            self._papers[paper_id] = stored
            self._persist(stored)
            return paper_id

    def resolve_entry(self, entry) -> MatchResult:
        """Match a ReferenceEntry to a corpus paper.

        Exact normalized-title match (year within +-1) wins with confidence
        1.0; else the best token-set Jaccard >= 0.9 with year within +-1;
        else the external client, whose hits are cached into the corpus.
        A 'none' result just means the citation gets no augmentation.
        """
        title = entry.title_guess
        if not title:
            return MatchResult(paper_id=None, confidence=0.0, method=MATCH_NONE)
        norm = normalize_title(title)
        year = entry.year_guess

        exact = None
        for key, pid in self._index.items():
            k_title, _, k_year = key.rpartition("|")
            if k_title != norm:
                continue
            stored_year = self._papers[pid].year
            if _years_close(year, stored_year):
                exact = pid
                break
        if exact is not None:
            return MatchResult(paper_id=exact, confidence=1.0, method=MATCH_EXACT)

        tokens = title_tokens(title)
        best_pid, best_j = None, 0.0
        if tokens:
            for pid, meta in self._papers.items():
                if not _years_close(year, meta.year):
                    continue
                other = title_tokens(meta.title)
                if not other:
                    continue
                inter = len(tokens & other)
                union = len(tokens | other)
                j = inter / union if union else 0.0
                if j > best_j or (j == best_j and best_pid is not None and pid < best_pid):
                    best_pid, best_j = pid, j
        if best_pid is not None and best_j >= FUZZY_JACCARD_THRESHOLD:
            return MatchResult(paper_id=best_pid, confidence=best_j, method=MATCH_FUZZY)

        fetched = self.fetch_external(entry)
        if fetched is not None:
            return MatchResult(paper_id=fetched.paper_id, confidence=1.0, method=MATCH_EXTERNAL)
        return MatchResult(paper_id=None, confidence=0.0, method=MATCH_NONE)

    def fetch_external(self, entry) -> Optional[PaperMetadata]:
        """Consult the external client; failures degrade to None, never raise."""
        if self.external_client is None or not entry.title_guess:
            return None
        try:
            meta = self.external_client.lookup(entry.title_guess, entry.year_guess)
        except Exception as e:  # network/timeouts must never reach the reader
            logger.warning("external metadata lookup failed for %r: %s", entry.title_guess, e)
            return None
        if meta is None:
            return None
        pid = self.upsert_paper(replace(meta, paper_id=meta.paper_id or ""))
        return self.get(pid)

    def citation_stats(self, paper_id: str) -> CitationStats:
        """Stored counts, falling back to local in-degree / out-degree."""
        meta = self.get(paper_id)
        if meta.citation_count is not None:
            count, mode = meta.citation_count, "stored"
        else:
            count = sum(
                1 for other in self._papers.values() if paper_id in other.outgoing_refs
            )
            mode = "derived"
        refs = meta.reference_count if meta.reference_count is not None else len(meta.outgoing_refs)
        return CitationStats(citation_count=count, reference_count=refs, citation_mode=mode)


def _years_close(a: Optional[int], b: Optional[int]) -> bool:
    if a is None or b is None:
        return True
    return abs(a - b) <= YEAR_TOLERANCE
