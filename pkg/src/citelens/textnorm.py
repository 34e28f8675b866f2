"""Text normalization helpers shared by the parser and the corpus index."""

import re
import unicodedata

_WS_RE = re.compile(r"\s+")
_NON_ALNUM_SPACE_RE = re.compile(r"[^0-9a-z ]+")


def strip_diacritics(text: str) -> str:
    """Drop combining marks: 'Müller' -> 'Muller', 'É' -> 'E'."""
    decomposed = unicodedata.normalize("NFKD", text)
    return "".join(ch for ch in decomposed if not unicodedata.combining(ch))


def normalize_title(title: str) -> str:
    """Canonical form used for paper identity and matching.

    Lowercase, diacritics stripped, punctuation replaced by spaces,
    whitespace collapsed, trimmed.
    """
    text = strip_diacritics(title).lower()
    text = _NON_ALNUM_SPACE_RE.sub(" ", text)
    return _WS_RE.sub(" ", text).strip()


def normalize_surname(surname: str) -> str:
    """Surname key component: lowercase, diacritics and non-alphanumerics removed."""
    text = strip_diacritics(surname).lower()
    return re.sub(r"[^0-9a-z]+", "", text)


def title_tokens(title: str) -> frozenset:
    """Token set over the normalized title, for Jaccard overlap."""
    return frozenset(normalize_title(title).split())
