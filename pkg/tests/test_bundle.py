import json

import pytest

from citelens.citeparse import (
    bundle_from_file,
    bundle_from_json,
    bundle_to_json,
    extract_citing_sentence,
    make_bundle,
    parse_bundle,
    parse_bundle_cached,
    parsed_document_from_json,
)
from citelens.errors import InvalidBundle, UnknownMarker


def five_marker_bundle():
    """2 sections, 5 markers, 4 entries, one out-of-range key (12)."""
    return make_bundle(
        "Fixture Paper",
        [
            ("Introduction", "We start from [1] and [2]. Later [3] helped."),
            ("Related Work", "Also [4] matters. But [12] is missing."),
        ],
        "\n".join(f"[{i}] A. Author. Topic Number {i}. Venue, 201{i}." for i in range(1, 5)),
        style_hint="numeric",
    )


def test_fixture_report_counts():
    doc = parse_bundle(five_marker_bundle())
    assert doc.report.markers == 5
    assert doc.report.entries == 4
    assert doc.report.linked == 4
    assert doc.report.unlinked == 1
    assert len(doc.unresolved) == 1
    assert doc.unresolved[0][1] == "12"


def test_unlinked_matches_invariant():
    doc = parse_bundle(five_marker_bundle())
    markers_with_missing = sum(
        1 for m in doc.markers if any(k not in doc.links.get(m.marker_id, []) for k in m.keys)
    )
    assert doc.report.unlinked == markers_with_missing


def test_determinism_byte_identical():
    b = five_marker_bundle()
    assert parse_bundle(b).to_json() == parse_bundle(b).to_json()


def test_roundtrip_serialization():
    doc = parse_bundle(five_marker_bundle())
    again = parsed_document_from_json(doc.to_json())
    assert again == doc


def test_empty_references_block_degrades_with_warning():
    bundle = make_bundle("No Refs", [("Body", "Cites [1] anyway.")], "", style_hint="numeric")
    doc = parse_bundle(bundle)
    assert doc.entries == []
    assert doc.links == {}
    assert doc.report.unlinked == 1
    assert doc.report.warnings


def test_bundle_requires_sections():
    with pytest.raises(InvalidBundle):
        make_bundle("Empty", [], "refs")


def test_bundle_rejects_unknown_style():
    with pytest.raises(InvalidBundle):
        make_bundle("Bad", [("A", "text")], "", style_hint="fancy")


def test_content_hash_stable_and_algo_recorded(tmp_path):
    b1 = five_marker_bundle()
    b2 = five_marker_bundle()
    assert b1.content_hash == b2.content_hash
    assert b1.digest_algo == "sha1"
    path = tmp_path / "bundle.json"
    path.write_text(bundle_to_json(b1), encoding="utf-8")
    loaded1 = bundle_from_file(path)
    loaded2 = bundle_from_file(path)
    assert loaded1.content_hash == loaded2.content_hash
    assert loaded1.sections == b1.sections


def test_bundle_json_shape():
    raw = json.loads(bundle_to_json(five_marker_bundle()))
    assert set(raw) == {"title", "sections", "references_block", "style_hint"}
    assert raw["sections"][0] == {
        "name": "Introduction",
        "body": "We start from [1] and [2]. Later [3] helped.",
    }


def test_bundle_from_json_validates():
    with pytest.raises(InvalidBundle):
        bundle_from_json("not json at all {")
    with pytest.raises(InvalidBundle):
        bundle_from_json('{"title": "x"}')


def test_cache_roundtrip(tmp_path):
    bundle = five_marker_bundle()
    cache_dir = str(tmp_path / "cache")
    first = parse_bundle_cached(bundle, cache_dir)
    second = parse_bundle_cached(bundle, cache_dir)
    assert first == second
    assert (tmp_path / "cache" / f"{bundle.content_hash}.parsed.json").exists()


def test_auto_style_prefers_more_links():
    ay = make_bundle(
        "AY Paper",
        [("Introduction", "Per (Smith, 2020) and [not a citation] text.")],
        "Smith, A. (2020). Linked Work. Conf.",
    )
    doc = parse_bundle(ay)
    assert doc.report.style == "author_year"
    assert doc.report.linked == 1

    numeric = make_bundle(
        "Numeric Paper",
        [("Introduction", "Per [1] and (Smith, 2020) text.")],
        "[1] A. Author. Linked Work. Venue, 2020.",
    )
    doc = parse_bundle(numeric)
    assert doc.report.style == "numeric"
    assert doc.report.linked == 1


def test_auto_style_tie_goes_numeric():
    bundle = make_bundle("Tie Paper", [("Body", "No citations here at all.")], "")
    assert parse_bundle(bundle).report.style == "numeric"


def test_extract_citing_sentence():
    doc = parse_bundle(five_marker_bundle())
    marker = doc.markers[2]  # "[3]" in "Later [3] helped."
    assert marker.raw_text == "[3]"
    assert extract_citing_sentence(doc, marker.marker_id) == "Later [3] helped."
    with pytest.raises(UnknownMarker):
        extract_citing_sentence(doc, "m99-99")


def test_extract_citing_sentence_with_abbreviation_guard():
    bundle = make_bundle(
        "Guard Paper",
        [("Body", "Earlier work by Smith et al. [3] showed this. More text.")],
        "[3] A. Smith. Something. Venue, 2019.",
        style_hint="numeric",
    )
    doc = parse_bundle(bundle)
    assert (
        extract_citing_sentence(doc, doc.markers[0].marker_id)
        == "Earlier work by Smith et al. [3] showed this."
    )
