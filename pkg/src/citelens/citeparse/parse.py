"""Full bundle parsing: sentences + markers + entries + links, with caching."""

import os

from citelens.citeparse.linking import link_markers
from citelens.citeparse.markers import scan_markers
from citelens.citeparse.references import parse_reference_section
from citelens.citeparse.sentences import segment_sentences, sentence_containing
from citelens.citeparse.types import (
    STYLE_AUTHOR_YEAR,
    STYLE_AUTO,
    STYLE_NUMERIC,
    DocumentBundle,
    ParsedDocument,
    ParseReport,
    parsed_document_from_json,
)
from citelens.errors import MalformedReferences, UnknownMarker


def _scan_all_sections(bundle: DocumentBundle, style: str):
    markers = []
    skipped = 0
    for idx, section in enumerate(bundle.sections):
        scan = scan_markers(section.body, style, section_index=idx)
        markers.extend(scan.markers)
        skipped += scan.skipped
    return markers, skipped


def _fully_linked_count(markers, links):
    return sum(1 for m in markers if all(k in links.get(m.marker_id, ()) for k in m.keys))


def resolve_auto_style(bundle: DocumentBundle, entries: list) -> str:
    """Pick the concrete style that links more markers; ties go numeric."""
    best_style, best_linked = STYLE_NUMERIC, -1
    for style in (STYLE_NUMERIC, STYLE_AUTHOR_YEAR):
        markers, _ = _scan_all_sections(bundle, style)
        links, _ = link_markers(markers, entries)
        linked = _fully_linked_count(markers, links)
        if linked > best_linked:
            best_style, best_linked = style, linked
    return best_style


def parse_bundle(bundle: DocumentBundle) -> ParsedDocument:
    """Parse a bundle deterministically; a bad references block degrades to a warning."""
    warnings = []
    try:
        entries = parse_reference_section(bundle.references_block)
    except MalformedReferences as e:
        entries = []
        warnings.append(f"references: {e}")

    style = bundle.style_hint
    if style == STYLE_AUTO:
        style = resolve_auto_style(bundle, entries)

    sentences = []
    for idx, section in enumerate(bundle.sections):
        sentences.extend(segment_sentences(section.body, section_index=idx))
    markers, skipped = _scan_all_sections(bundle, style)
    links, unresolved = link_markers(markers, entries)

    linked = _fully_linked_count(markers, links)
    report = ParseReport(
        sections=len(bundle.sections),
        sentences=len(sentences),
        markers=len(markers),
        entries=len(entries),
        linked=linked,
        unlinked=len(markers) - linked,
        skipped=skipped,
        style=style,
        warnings=warnings,
    )
    return ParsedDocument(
        bundle=bundle,
        sentences=sentences,
        markers=markers,
        entries=entries,
        links=links,
        unresolved=unresolved,
        report=report,
    )


def extract_citing_sentence(doc: ParsedDocument, marker_id: str) -> str:
    """Text of the sentence containing the marker's span start."""
    marker = doc.marker_by_id(marker_id)
    if marker is None:
        raise UnknownMarker(marker_id)
    spans = [s for s in doc.sentences if s.section_index == marker.section_index]
    span = sentence_containing(spans, marker.char_span[0])
    if span is None:
        raise UnknownMarker(f"{marker_id}: no sentence covers offset {marker.char_span[0]}")
    return span.text


def cache_path(cache_dir: str, content_hash: str) -> str:
    return os.path.join(cache_dir, f"{content_hash}.parsed.json")


def parse_bundle_cached(bundle: DocumentBundle, cache_dir: str) -> ParsedDocument:
    """parse_bundle with a content-hash-keyed JSON cache directory."""
    path = cache_path(cache_dir, bundle.content_hash)
    if os.path.exists(path):
        with open(path, "r", encoding="utf-8") as f:
            return parsed_document_from_json(f.read())
    doc = parse_bundle(bundle)
    os.makedirs(cache_dir, exist_ok=True)
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as f:
        f.write(doc.to_json())
    os.replace(tmp, path)
    return doc
