"""Reference-section parsing into keyed entries with title/author/year guesses."""

import re

from citelens.citeparse.types import ReferenceEntry
from citelens.errors import MalformedReferences
from citelens.textnorm import normalize_surname

_NUMERIC_HEAD_RE = re.compile(r"^\s*\[(\d+)\]\s*(.*)$")
_YEAR_RE = re.compile(r"\b(19\d{2}|20\d{2})\b")
_AY_PREFIX_RE = re.compile(
    r"^(?P<authors>.*?)\(\s*(?P<year>(?:19|20)\d{2})[a-z]?\s*\)[.,]?\s*(?P<rest>.*)$",
    re.DOTALL,
)
_INITIALS_RE = re.compile(r"^[A-Z]\.?(?:\s*-?\s*[A-Z]\.?)*$")
_WS_RE = re.compile(r"\s+")


def _clean(text: str) -> str:
    return _WS_RE.sub(" ", text).strip()


def _split_segments(text: str) -> list:
    """Split on sentence-ish periods; single-letter initials do not split."""
    segments = []
    start = 0
    for i, ch in enumerate(text):
        if ch != "." or i + 1 < len(text) and not text[i + 1].isspace():
            continue
        word = text[start:i + 1].rstrip()
        # "A." style initial: single letter before the period
        if len(word) >= 2 and word[-2].isupper() and (len(word) == 2 or not word[-3].isalnum()):
            continue
        seg = text[start : i + 1].strip().rstrip(".").strip()
        if seg:
            segments.append(seg)
        start = i + 1
    tail = text[start:].strip().rstrip(".").strip()
    if tail:
        segments.append(tail)
    return segments


def _looks_like_authors(segment: str) -> bool:
    if re.search(r"\b[A-Z]\.", segment):
        return True
    if re.search(r"\bet al\b", segment):
        return True
    if re.search(r"\b(?:and|&)\s+[A-Z]", segment):
        return True
    # "Doe, J" or "Doe, John" comma-name shape
    return bool(re.match(r"^[A-Z][\w'’-]+\s*,", segment))


def _split_authors(text: str) -> list:
    """Best-effort author list split; keeps "Surname, I." units together."""
    text = _clean(text).strip(".,; ")
    if not text:
        return []
    chunks = re.split(r"\s+(?:and|&)\s+|;", text)
    names = []
    for chunk in chunks:
        tokens = [t.strip() for t in chunk.split(",") if t.strip()]
        i = 0
        while i < len(tokens):
            if i + 1 < len(tokens) and _INITIALS_RE.match(tokens[i + 1]):
                names.append(f"{tokens[i]}, {tokens[i + 1]}")
                i += 2
            else:
                names.append(tokens[i])
                i += 1
    return [n for n in names if n]


def _first_surname(authors: list) -> str:
    if not authors:
        return ""
    first = authors[0]
    if "," in first:
        return first.split(",", 1)[0].strip()
    words = [w for w in re.split(r"\s+", first) if w and not _INITIALS_RE.match(w)]
    return words[-1] if words else ""


def _parse_entry_text(text: str):
    """Return (title, authors, year, surname) guesses for one entry string."""
    text = _clean(text)
    year = None
    ym = _YEAR_RE.search(text)
    if ym:
        year = int(ym.group(1))

    m = _AY_PREFIX_RE.match(text)
    if m and m.group("authors").strip() and m.group("rest").strip():
        authors = _split_authors(m.group("authors"))
        segments = _split_segments(m.group("rest"))
        title = segments[0] if segments else _clean(m.group("rest"))
        return title, authors, int(m.group("year")), _first_surname(authors)

    segments = _split_segments(text)
    if not segments:
        return text, [], year, ""
    if _looks_like_authors(segments[0]) and len(segments) > 1:
        authors = _split_authors(segments[0])
        return segments[1], authors, year, _first_surname(authors)
    return segments[0], [], year, ""


def _group_author_year_lines(lines: list) -> list:
    stripped = [ln.rstrip() for ln in lines]
    has_blank = any(not ln.strip() for ln in stripped)
    if has_blank:
        groups, current = [], []
        for ln in stripped:
            if not ln.strip():
                if current:
                    groups.append(" ".join(current))
                    current = []
            else:
                current.append(ln.strip())
        if current:
            groups.append(" ".join(current))
        return groups
    nonempty = [ln for ln in stripped if ln.strip()]
    has_hanging = any(ln[:1].isspace() for ln in nonempty) and any(
        not ln[:1].isspace() for ln in nonempty
    )
    if has_hanging:
        groups, current = [], []
        for ln in nonempty:
            if not ln[:1].isspace() and current:
                groups.append(" ".join(p.strip() for p in current))
                current = []
            current.append(ln)
        if current:
            groups.append(" ".join(p.strip() for p in current))
        return groups
    return [ln.strip() for ln in nonempty]


def parse_reference_section(block: str) -> list:
    """Split a references block into entries and guess metadata for each.

    Numeric blocks are split on leading "[n]" tokens; author-year blocks on
    blank lines, hanging indents, or one entry per line. Raises
    MalformedReferences when no entry can be recovered at all.
    """
    if not block or not block.strip():
        raise MalformedReferences("empty references block")
    lines = block.splitlines()
    entries = []
    seen_keys = set()

    if any(_NUMERIC_HEAD_RE.match(ln) for ln in lines):
        current_key, current = None, []
        groups = []
        for ln in lines:
            m = _NUMERIC_HEAD_RE.match(ln)
            if m:
                if current_key is not None:
                    groups.append((current_key, " ".join(current)))
                current_key = str(int(m.group(1)))
                current = [m.group(2)]
            elif current_key is not None and ln.strip():
                current.append(ln.strip())
        if current_key is not None:
            groups.append((current_key, " ".join(current)))
        for key, text in groups:
            if key in seen_keys:
                continue  # duplicate index: keep the first occurrence
            seen_keys.add(key)
            title, authors, year, _ = _parse_entry_text(text)
            entries.append(
                ReferenceEntry(
                    entry_key=key,
                    raw_text=_clean(f"[{key}] {text}"),
                    title_guess=title or _clean(text),
                    authors_guess=tuple(authors),
                    year_guess=year,
                )
            )
    else:
        for i, text in enumerate(_group_author_year_lines(lines)):
            title, authors, year, surname = _parse_entry_text(text)
            if year is None:
                continue  # no year anywhere: treat as stray prose, not an entry
            if surname:
                key = f"{normalize_surname(surname)}{year}"
            else:
                key = f"x{i + 1}"  # unmatchable positional key; entry kept for metadata
            if key in seen_keys:
                # same surname+year twice: suffix to keep keys unique
                suffix = ord("b")
                while f"{key}{chr(suffix)}" in seen_keys:
                    suffix += 1
                key = f"{key}{chr(suffix)}"
            seen_keys.add(key)
            entries.append(
                ReferenceEntry(
                    entry_key=key,
                    raw_text=_clean(text),
                    title_guess=title or _clean(text),
                    authors_guess=tuple(authors),
                    year_guess=year,
                )
            )

    if not entries:
        raise MalformedReferences("no reference entries found")
    return entries
