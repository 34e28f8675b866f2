"""Paper Cards: cited-paper metadata plus persistent personalized context.

A card combines corpus metadata with how the user has met the paper before:
citing sentences from recent history papers, the provenance recorded when it
was saved from a card, reading progress, and the current augmentation class.
Cards for the same subject are identical across reading documents except for
marker-local fields.
"""

from dataclasses import dataclass, replace
from typing import Optional

from citelens.activity import KIND_CARD_OPEN, ActivityState, Provenance
from citelens.augment import (
    AugmentationClass,
    ReencounterScore,
    UserProfile,
    classify_citation,
    reencounter_score,
    stats_class,
)
from citelens.citeparse import extract_citing_sentence
from citelens.errors import NotInLibrary, UnknownMarker, UnresolvedCitation
from citelens.strategies import cosine, paper_text


@dataclass(frozen=True)
class HistoryMention:
    paper_id: str
    title: str
    last_opened: float
    progress: float
    citing_sentence: str

    def to_dict(self) -> dict:
        return {
            "paper_id": self.paper_id,
            "title": self.title,
            "last_opened": self.last_opened,
            "progress": self.progress,
            "citing_sentence": self.citing_sentence,
        }


@dataclass
class PaperCard:
    meta: "object"  # PaperMetadata
    history_mentions: list
    saved_from: Optional[Provenance]
    klass: AugmentationClass
    score: Optional[ReencounterScore]
    library_state: bool
    similarity: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "meta": self.meta.to_dict(),
            "history_mentions": [m.to_dict() for m in self.history_mentions],
            "saved_from": self.saved_from.to_dict() if self.saved_from else None,
            "class": self.klass.to_dict(),
            "score": self.score.to_dict() if self.score else None,
            "library_state": self.library_state,
            "similarity": self.similarity,
        }


def first_sentence_summary(meta) -> Optional[str]:
    """Default summarizer: the first sentence of the abstract."""
    from citelens.citeparse import segment_sentences

    if not meta.abstract:
        return None
    spans = segment_sentences(meta.abstract)
    return spans[0].text if spans else None


def _first_mention(doc, entry_to_paper: dict, subject: str) -> Optional[str]:
    """Citing sentence of the first marker in `doc` that links to `subject`."""
    for marker in doc.markers:
        for key in doc.links.get(marker.marker_id, []):
            if entry_to_paper.get(key) == subject:
                return extract_citing_sentence(doc, marker.marker_id)
    return None


def history_mentions_for(
    subject: str,
    state: ActivityState,
    corpus,
    doc_lookup,
    window: Optional[int] = None,
    exclude_paper: Optional[str] = None,
) -> list:
    """In-window history papers whose documents cite the subject, newest first."""
    mentions = []
    for entry in state.reading_history(window):
        if entry.paper_id == exclude_paper or entry.paper_id == subject:
            continue
        found = doc_lookup(entry.paper_id)
        if found is None:
            continue
        doc, entry_to_paper = found
        sentence = _first_mention(doc, entry_to_paper, subject)
        if sentence is None:
            continue
        meta = corpus.get_optional(entry.paper_id)
        mentions.append(
            HistoryMention(
                paper_id=entry.paper_id,
                title=meta.title if meta else "",
                last_opened=entry.last_opened,
                progress=entry.progress,
                citing_sentence=sentence,
            )
        )
    return mentions


def _meta_with_summary(meta, summarizer) -> "object":
    if meta.summary is not None:
        return meta
    summary = summarizer(meta) if summarizer else first_sentence_summary(meta)
    return replace(meta, summary=summary) if summary else meta


def build_card(
    reading_paper_id: str,
    marker_id: str,
    *,
    docs,
    corpus,
    state: ActivityState,
    profile: UserProfile,
    window: Optional[int] = None,
    cited_paper_id: Optional[str] = None,
    summarizer=None,
    embedding_provider=None,
    activity_store=None,
) -> PaperCard:
    """Assemble the card for a citation click and log one card_open event.

    `docs` maps a paper id to (parsed_doc, entry_to_paper) or None. When the
    marker links several papers the subject defaults to the first resolved
    one; pass `cited_paper_id` to pick another.
    """
    found = docs(reading_paper_id)
    if found is None:
        raise UnknownMarker(f"paper {reading_paper_id} has no parsed document")
    doc, entry_to_paper = found
    marker = doc.marker_by_id(marker_id)
    if marker is None:
        raise UnknownMarker(marker_id)

    resolved = [
        entry_to_paper.get(key)
        for key in doc.links.get(marker_id, [])
        if entry_to_paper.get(key) is not None
    ]
    if cited_paper_id is not None:
        subject = cited_paper_id if cited_paper_id in resolved else None
    else:
        subject = resolved[0] if resolved else None
    if subject is None:
        entry = None
        for key in marker.keys:
            entry = doc.entry_by_key(key)
            if entry is not None:
                break
        raise UnresolvedCitation(
            f"marker {marker_id} has no resolved cited paper",
            raw_text=entry.raw_text if entry else marker.raw_text,
        )

    score = reencounter_score(state, corpus, subject, window, exclude_paper=reading_paper_id)
    klass = classify_citation(
        profile, state, corpus, subject, window, reading_paper_id, score=score
    )
    mentions = history_mentions_for(
        subject, state, corpus, docs, window, exclude_paper=reading_paper_id
    )
    meta = _meta_with_summary(corpus.get(subject), summarizer)

    similarity = None
    if embedding_provider is not None:
        reading_meta = corpus.get_optional(reading_paper_id)
        if reading_meta is not None:
            vecs = embedding_provider.embed([paper_text(meta), paper_text(reading_meta)])
            similarity = cosine(vecs[0], vecs[1])

    if activity_store is not None:
        activity_store.append(
            KIND_CARD_OPEN,
            subject,
            {
                "reading_paper_id": reading_paper_id,
                "augmentation_class": stats_class(klass),
            },
        )

    return PaperCard(
        meta=meta,
        history_mentions=mentions,
        saved_from=state.provenance(subject),
        klass=klass,
        score=score if score.value > 0 else None,
        library_state=state.saved(subject),
        similarity=similarity,
    )


def card_for_library_item(
    paper_id: str,
    *,
    docs,
    corpus,
    state: ActivityState,
    profile: UserProfile,
    window: Optional[int] = None,
    summarizer=None,
) -> PaperCard:
    """Card for a saved paper viewed from the library; no marker context."""
    if not state.saved(paper_id):
        raise NotInLibrary(paper_id)
    score = reencounter_score(state, corpus, paper_id, window)
    klass = classify_citation(profile, state, corpus, paper_id, window, score=score)
    mentions = history_mentions_for(paper_id, state, corpus, docs, window)
    return PaperCard(
        meta=_meta_with_summary(corpus.get(paper_id), summarizer),
        history_mentions=mentions,
        saved_from=state.provenance(paper_id),
        klass=klass,
        score=score if score.value > 0 else None,
        library_state=True,
    )
