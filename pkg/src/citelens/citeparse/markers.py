"""Inline citation marker detection.

Two concrete styles: numeric bracket lists with ranges ("[3]", "[3, 7-9]",
en-dash accepted) and author-year (parenthesized clusters plus narrative
"Smith et al. (2020)" forms). Bracket or citation-like paren groups that
fail to parse are counted as skipped, never raised.
"""

import re
from dataclasses import dataclass, field

from citelens.citeparse.types import (
    STYLE_AUTHOR_YEAR,
    STYLE_AUTO,
    STYLE_NUMERIC,
    CitationMarker,
)
from citelens.textnorm import normalize_surname

_BRACKET_RE = re.compile(r"\[([^\[\]\n]{1,120})\]")
_NUM_ITEM_RE = re.compile(r"^\s*(\d{1,4})\s*(?:[-–]\s*(\d{1,4}))?\s*$")

_NAME = r"[A-Z][\w'’-]+"
_NARRATIVE_RE = re.compile(
    rf"(?<![\w.])(?P<surname>{_NAME})"
    rf"(?:\s+et\s+al\.?|\s+(?:and|&)\s+{_NAME})?"
    rf"\s+\((?P<year>(?:19|20)\d{{2}})[a-z]?\)"
)
_PAREN_RE = re.compile(r"\(([^()\n]{1,300})\)")
_AY_ITEM_RE = re.compile(
    rf"^\s*(?:e\.g\.,?\s+|see\s+(?:also\s+)?|cf\.\s+)?"
    rf"(?P<surname>{_NAME})"
    rf"(?:\s+et\s+al\.?|(?:\s*,)?\s+(?:and|&)\s+{_NAME})*"
    rf"\s*,\s*(?P<year>(?:19|20)\d{{2}})[a-z]?\s*$"
)
_YEAR_TOKEN_RE = re.compile(r"(?:19|20)\d{2}")


@dataclass
class MarkerScan:
    markers: list = field(default_factory=list)
    skipped: int = 0


def _dedup(keys):
    seen = set()
    out = []
    for k in keys:
        if k not in seen:
            seen.add(k)
            out.append(k)
    return out


def expand_numeric_keys(contents: str):
    """Parse bracket contents into citation keys, or None if not a citation.

    Items are comma/semicolon separated integers or a-b ranges (hyphen or
    en-dash); indices start at 1, so "[0, 1]" is not a citation.
    """
    items = re.split(r"[,;]", contents)
    if not items or all(not it.strip() for it in items):
        return None
    keys = []
    for item in items:
        m = _NUM_ITEM_RE.match(item)
        if not m:
            return None
        lo = int(m.group(1))
        hi = int(m.group(2)) if m.group(2) else lo
        if lo < 1 or hi < lo:
            return None
        keys.extend(str(v) for v in range(lo, hi + 1))
    return _dedup(keys)


def _scan_numeric(body: str, section_index: int) -> MarkerScan:
    scan = MarkerScan()
    for m in _BRACKET_RE.finditer(body):
        keys = expand_numeric_keys(m.group(1))
        if keys is None:
            scan.skipped += 1
            continue
        scan.markers.append(
            CitationMarker(
                marker_id=f"m{section_index}-{m.start()}",
                section_index=section_index,
                char_span=(m.start(), m.end()),
                raw_text=m.group(0),
                keys=tuple(keys),
            )
        )
    return scan


def author_year_key(surname: str, year: str) -> str:
    return f"{normalize_surname(surname)}{year}"


def _parse_cluster(contents: str):
    """All ';'-separated items must parse as "Name(, co-authors), year"."""
    keys = []
    for item in contents.split(";"):
        m = _AY_ITEM_RE.match(item)
        if not m:
            return None
        keys.append(author_year_key(m.group("surname"), m.group("year")))
    return _dedup(keys) if keys else None


def _scan_author_year(body: str, section_index: int) -> MarkerScan:
    scan = MarkerScan()
    taken = []
    for m in _NARRATIVE_RE.finditer(body):
        taken.append((m.start(), m.end()))
        scan.markers.append(
            CitationMarker(
                marker_id=f"m{section_index}-{m.start()}",
                section_index=section_index,
                char_span=(m.start(), m.end()),
                raw_text=m.group(0),
                keys=(author_year_key(m.group("surname"), m.group("year")),),
            )
        )
    for m in _PAREN_RE.finditer(body):
        if any(m.start() < e and s < m.end() for s, e in taken):
            continue
        keys = _parse_cluster(m.group(1))
        if keys:
            scan.markers.append(
                CitationMarker(
                    marker_id=f"m{section_index}-{m.start()}",
                    section_index=section_index,
                    char_span=(m.start(), m.end()),
                    raw_text=m.group(0),
                    keys=tuple(keys),
                )
            )
        elif _YEAR_TOKEN_RE.search(m.group(1)):
            # citation-looking paren group that failed the grammar
            scan.skipped += 1
    scan.markers.sort(key=lambda mk: mk.char_span[0])
    return scan


def scan_markers(body: str, style: str, section_index: int = 0) -> MarkerScan:
    """Detect markers in one section body; also reports skipped candidates.

    `auto` means "style with more linked markers downstream, ties numeric";
    with no reference entries in sight both styles link zero, so the tie
    rule applies and auto scans as numeric. parse_bundle resolves auto
    properly against the parsed reference entries.
    """
    if style == STYLE_NUMERIC or style == STYLE_AUTO:
        return _scan_numeric(body, section_index)
    if style == STYLE_AUTHOR_YEAR:
        return _scan_author_year(body, section_index)
    raise ValueError(f"unknown citation style: {style!r}")


def detect_markers(body: str, style: str = STYLE_AUTO, section_index: int = 0) -> list:
    return scan_markers(body, style, section_index).markers
