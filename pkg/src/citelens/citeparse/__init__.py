"""Document bundle parsing: sentences, citation markers, references, links."""

from citelens.citeparse.linking import link_markers
from citelens.citeparse.markers import MarkerScan, detect_markers, expand_numeric_keys, scan_markers
from citelens.citeparse.parse import (
    extract_citing_sentence,
    parse_bundle,
    parse_bundle_cached,
    resolve_auto_style,
)
from citelens.citeparse.references import parse_reference_section
from citelens.citeparse.sentences import segment_sentences, sentence_containing
from citelens.citeparse.types import (
    STYLE_AUTHOR_YEAR,
    STYLE_AUTO,
    STYLE_NUMERIC,
    STYLES,
    CitationMarker,
    DocumentBundle,
    ParsedDocument,
    ParseReport,
    ReferenceEntry,
    Section,
    SentenceSpan,
    bundle_from_file,
    bundle_from_json,
    bundle_to_json,
    make_bundle,
    parsed_document_from_dict,
    parsed_document_from_json,
)

__all__ = [
    "CitationMarker",
    "DocumentBundle",
    "MarkerScan",
    "ParseReport",
    "ParsedDocument",
    "ReferenceEntry",
    "STYLES",
    "STYLE_AUTHOR_YEAR",
    "STYLE_AUTO",
    "STYLE_NUMERIC",
    "Section",
    "SentenceSpan",
    "bundle_from_file",
    "bundle_from_json",
    "bundle_to_json",
    "detect_markers",
    "expand_numeric_keys",
    "extract_citing_sentence",
    "link_markers",
    "make_bundle",
    "parse_bundle",
    "parse_bundle_cached",
    "parse_reference_section",
    "parsed_document_from_dict",
    "parsed_document_from_json",
    "resolve_auto_style",
    "scan_markers",
    "segment_sentences",
    "sentence_containing",
]
