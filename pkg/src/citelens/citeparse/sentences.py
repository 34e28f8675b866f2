"""Sentence segmentation for section bodies.

Boundaries occur only at a terminator (., !, ?) followed by whitespace and
an uppercase letter, or at end of text. An abbreviation guard suppresses
boundaries after common scholarly abbreviations and after author initials
in name-like contexts.
"""

import re

from citelens.citeparse.types import SentenceSpan

# Checked case-insensitively against the text ending at the terminator.
ABBREVIATIONS = (
    "et al.",
    "e.g.",
    "i.e.",
    "fig.",
    "figs.",
    "eq.",
    "eqs.",
    "vs.",
    "cf.",
    "resp.",
    "sec.",
)

_TERMINATORS = {".", "!", "?"}
_NEXT_INITIAL_RE = re.compile(r"\s*[A-Z]\.(?=\s|$)")
# A capitalized word whose follower marks a name context: another initial,
# "et (al.)", and/or/&, or a parenthesized year.
_NAME_CONTEXT_RE = re.compile(
    r"\s*[A-Z][\w'’-]*[,.]?\s+(?:[A-Z]\.(?:\s|$)|et\s|and\s|&\s|\(\s*(?:19|20)\d{2})"
)


def _is_abbreviation(body: str, term_index: int) -> bool:
    prefix = body[: term_index + 1].lower()
    for abbr in ABBREVIATIONS:
        if not prefix.endswith(abbr):
            continue
        start = term_index + 1 - len(abbr)
        if start == 0 or not body[start - 1].isalnum():
            return True
    return False


def _ends_with_initial(text: str) -> bool:
    """True iff `text` ends with a standalone single uppercase letter + '.'."""
    if len(text) < 2 or text[-1] != "." or not text[-2].isupper():
        return False
    return len(text) == 2 or not text[-3].isalnum()


def _is_guarded_initial(body: str, term_index: int, sentence_start: int) -> bool:
    """Single uppercase letter + period that belongs to a name, not a sentence end.

    "We build on X. See [2]." must split after "X.", so a lone capital only
    counts as an initial when the surroundings look like a name: an adjacent
    initial ("J. R. Smith"), a following surname in citation context
    ("J. Smith et al.", "J. Smith (2020)"), or a sentence that would consist
    of nothing but the initial itself.
    """
    before = body[sentence_start : term_index + 1]
    if not _ends_with_initial(before):
        return False
    if len(before.strip()) == 2:
        return True  # sentence would be a bare "J."
    if _ends_with_initial(before[:-2].rstrip()):
        return True  # run of initials: "J. R."
    after = body[term_index + 1 :]
    if _NEXT_INITIAL_RE.match(after):
        return True
    if _NAME_CONTEXT_RE.match(after):
        return True
    return False


def segment_sentences(body: str, section_index: int = 0) -> list:
    """Split a section body into sentence spans that partition it exactly.

    Each span's char range runs to the start of the next sentence, so
    inter-sentence whitespace is covered; `text` is the trimmed sentence.
    Empty body yields an empty list.
    """
    if body == "":
        return []
    starts = [0]
    i = 0
    n = len(body)
    while i < n:
        ch = body[i]
        if ch in _TERMINATORS:
            j = i + 1
            while j < n and body[j].isspace():
                j += 1
            if j < n and j > i + 1 and body[j].isupper():
                if not _is_abbreviation(body, i) and not _is_guarded_initial(body, i, starts[-1]):
                    starts.append(j)
                    i = j
                    continue
        i += 1
    spans = []
    for idx, start in enumerate(starts):
        end = starts[idx + 1] if idx + 1 < len(starts) else n
        spans.append(
            SentenceSpan(section_index=section_index, char_span=(start, end), text=body[start:end].strip())
        )
    return spans


def sentence_containing(spans: list, offset: int):
    """The unique span whose char range contains `offset`, or None."""
    for span in spans:
        if span.char_span[0] <= offset < span.char_span[1]:
            return span
    return None
