"""Domain types for parsed document bundles.

A DocumentBundle is the ingestion unit: plain-text sections plus the raw
references block. Parsing produces character-addressed sentence spans,
citation markers, reference entries, and marker->entry links. All offsets
are unicode scalar offsets into the section body, half-open [start, end).
"""

import hashlib
import json
from dataclasses import dataclass, field
from typing import Optional

from citelens.errors import InvalidBundle

STYLE_NUMERIC = "numeric"
STYLE_AUTHOR_YEAR = "author_year"
STYLE_AUTO = "auto"
STYLES = (STYLE_NUMERIC, STYLE_AUTHOR_YEAR, STYLE_AUTO)


@dataclass(frozen=True)
class Section:
    name: str
    body: str


@dataclass(frozen=True)
class DocumentBundle:
    content_hash: str
    title: str
    sections: tuple
    references_block: str
    style_hint: str = STYLE_AUTO
    digest_algo: str = "sha1"

    def content_dict(self) -> dict:
        return {
            "title": self.title,
            "sections": [{"name": s.name, "body": s.body} for s in self.sections],
            "references_block": self.references_block,
            "style_hint": self.style_hint,
        }


def _canonical_json(obj) -> bytes:
    return json.dumps(obj, ensure_ascii=False, sort_keys=True, separators=(",", ":")).encode("utf-8")


def make_bundle(title, sections, references_block, style_hint=STYLE_AUTO) -> DocumentBundle:
    """Build a bundle from parts; the content hash covers the canonical JSON form.

    `sections` is a list of (name, body) pairs or {"name","body"} dicts.
    """
    secs = []
    for s in sections:
        if isinstance(s, Section):
            secs.append(s)
        elif isinstance(s, dict):
            secs.append(Section(name=str(s["name"]), body=str(s["body"])))
        else:
            name, body = s
            secs.append(Section(name=str(name), body=str(body)))
    if not secs:
        raise InvalidBundle("bundle must have at least one section")
    if style_hint not in STYLES:
        raise InvalidBundle(f"unknown style_hint: {style_hint!r}")
    content = {
        "title": title,
        "sections": [{"name": s.name, "body": s.body} for s in secs],
        "references_block": references_block,
        "style_hint": style_hint,
    }
    digest = hashlib.sha1(_canonical_json(content)).hexdigest()
    return DocumentBundle(
        content_hash=digest,
        title=title,
        sections=tuple(secs),
        references_block=references_block,
        style_hint=style_hint,
    )


def bundle_from_json(text: str) -> DocumentBundle:
    """Load the on-disk bundle format: {"title","sections","references_block","style_hint"}."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise InvalidBundle(f"bundle is not valid JSON: {e}") from e
    if not isinstance(raw, dict) or "sections" not in raw:
        raise InvalidBundle("bundle JSON must be an object with a 'sections' list")
    return make_bundle(
        title=str(raw.get("title", "")),
        sections=raw["sections"],
        references_block=str(raw.get("references_block", "")),
        style_hint=raw.get("style_hint", STYLE_AUTO),
    )


def bundle_from_file(path) -> DocumentBundle:
    with open(path, "r", encoding="utf-8") as f:
        return bundle_from_json(f.read())


def bundle_to_json(bundle: DocumentBundle) -> str:
    return json.dumps(bundle.content_dict(), ensure_ascii=False, indent=2)


@dataclass(frozen=True)
class SentenceSpan:
    """One sentence of a section body.

    Char spans of the sentences in a section partition the body exactly
    (inter-sentence whitespace rides along with the span); `text` is the
    trimmed sentence as shown to readers.
    """

    section_index: int
    char_span: tuple
    text: str


@dataclass(frozen=True)
class CitationMarker:
    """An inline citation occurrence, e.g. "[3, 7-9]" or "(Smith et al., 2020)".

    `raw_text` equals the body substring at `char_span`. `keys` enumerates
    every cited key, ranges expanded; numeric keys are canonical decimal
    strings, author-year keys are normalized surname+year ("smith2020").
    """

    marker_id: str
    section_index: int
    char_span: tuple
    raw_text: str
    keys: tuple


@dataclass(frozen=True)
class ReferenceEntry:
    entry_key: str
    raw_text: str
    title_guess: str
    authors_guess: tuple
    year_guess: Optional[int] = None


@dataclass
class ParseReport:
    sections: int = 0
    sentences: int = 0
    markers: int = 0
    entries: int = 0
    linked: int = 0
    unlinked: int = 0
    skipped: int = 0
    style: str = STYLE_NUMERIC
    warnings: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "sections": self.sections,
            "sentences": self.sentences,
            "markers": self.markers,
            "entries": self.entries,
            "linked": self.linked,
            "unlinked": self.unlinked,
            "skipped": self.skipped,
            "style": self.style,
            "warnings": list(self.warnings),
        }


@dataclass
class ParsedDocument:
    """Aggregate parse result; deterministic for identical bundles.

    `links` maps marker_id to the list of entry keys that resolved, in the
    marker's key order; keys that found no entry are in `unresolved` as
    (marker_id, key) pairs.
    """

    bundle: DocumentBundle
    sentences: list
    markers: list
    entries: list
    links: dict
    unresolved: list
    report: ParseReport

    def marker_by_id(self, marker_id: str) -> Optional[CitationMarker]:
        for m in self.markers:
            if m.marker_id == marker_id:
                return m
        return None

    def entry_by_key(self, entry_key: str) -> Optional[ReferenceEntry]:
        for e in self.entries:
            if e.entry_key == entry_key:
                return e
        return None

    def to_dict(self) -> dict:
        return {
            "bundle": {
                "content_hash": self.bundle.content_hash,
                "digest_algo": self.bundle.digest_algo,
                **self.bundle.content_dict(),
            },
            "sentences": [
                {"section_index": s.section_index, "char_span": list(s.char_span), "text": s.text}
                for s in self.sentences
            ],
            "markers": [
                {
                    "marker_id": m.marker_id,
                    "section_index": m.section_index,
                    "char_span": list(m.char_span),
                    "raw_text": m.raw_text,
                    "keys": list(m.keys),
                }
                for m in self.markers
            ],
            "entries": [
                {
                    "entry_key": e.entry_key,
                    "raw_text": e.raw_text,
                    "title_guess": e.title_guess,
                    "authors_guess": list(e.authors_guess),
                    "year_guess": e.year_guess,
                }
                for e in self.entries
            ],
            "links": {mid: list(keys) for mid, keys in self.links.items()},
            "unresolved": [[mid, key] for mid, key in self.unresolved],
            "report": self.report.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def parsed_document_from_dict(raw: dict) -> ParsedDocument:
    b = raw["bundle"]
    bundle = DocumentBundle(
        content_hash=b["content_hash"],
        title=b["title"],
        sections=tuple(Section(name=s["name"], body=s["body"]) for s in b["sections"]),
        references_block=b["references_block"],
        style_hint=b["style_hint"],
        digest_algo=b.get("digest_algo", "sha1"),
    )
    report = ParseReport(**{k: v for k, v in raw["report"].items()})
    return ParsedDocument(
        bundle=bundle,
        sentences=[
            SentenceSpan(section_index=s["section_index"], char_span=tuple(s["char_span"]), text=s["text"])
            for s in raw["sentences"]
        ],
        markers=[
            CitationMarker(
                marker_id=m["marker_id"],
                section_index=m["section_index"],
                char_span=tuple(m["char_span"]),
                raw_text=m["raw_text"],
                keys=tuple(m["keys"]),
            )
            for m in raw["markers"]
        ],
        entries=[
            ReferenceEntry(
                entry_key=e["entry_key"],
                raw_text=e["raw_text"],
                title_guess=e["title_guess"],
                authors_guess=tuple(e["authors_guess"]),
                year_guess=e["year_guess"],
            )
            for e in raw["entries"]
        ],
        links={mid: list(keys) for mid, keys in raw["links"].items()},
        unresolved=[(mid, key) for mid, key in raw["unresolved"]],
        report=report,
    )


def parsed_document_from_json(text: str) -> ParsedDocument:
    return parsed_document_from_dict(json.loads(text))
