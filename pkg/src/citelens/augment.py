"""Citation augmentation: engagement scoring, color precedence, overview stats.

Coloring rules: saved papers are red; otherwise visited papers are green;
otherwise a paper co-cited by recent reading history gets a yellow shade,
unless it is the user's own, cited by their own publications, or explicitly
suppressed. Own/cited-by-own render as overlays independent of color.

Scores are computed in integer centipoints (progress is quantized to 2
decimals at event ingest), so incremental and from-scratch recomputation
agree exactly.
"""

from dataclasses import dataclass
from typing import Optional

from citelens.activity import ActivityState, TOGGLE_CLASSES

COLOR_SAVED = "saved_red"
COLOR_VISITED = "visited_green"
COLOR_REENCOUNTERED = "reencountered_yellow"
COLOR_NONE = "none"

OVERLAY_OWN = "own_heart"
OVERLAY_CITED = "cited_quote"

SCORE_CAP_CENTI = 500


@dataclass(frozen=True)
class UserProfile:
    """Publication record: the user's own papers and everything they cite."""

    own_paper_ids: frozenset = frozenset()
    cited_by_own: frozenset = frozenset()


def build_profile(own_paper_ids, corpus) -> UserProfile:
    """Recompute cited_by_own as the union of outgoing refs of own papers."""
    own = frozenset(own_paper_ids)
    cited = set()
    for pid in own:
        meta = corpus.get_optional(pid)
        if meta is not None:
            cited.update(meta.outgoing_refs)
    return UserProfile(own_paper_ids=own, cited_by_own=frozenset(cited))


@dataclass(frozen=True)
class AugmentationClass:
    color: str = COLOR_NONE
    overlays: tuple = ()

    def to_dict(self) -> dict:
        return {"color": self.color, "overlays": list(self.overlays)}


@dataclass(frozen=True)
class ReencounterScore:
    value: float
    contributors: tuple  # ((paper_id, points), ...) one per citing history paper

    def to_dict(self) -> dict:
        return {"value": self.value, "contributors": [[p, pts] for p, pts in self.contributors]}


@dataclass(frozen=True)
class AugmentationDecoration:
    marker_id: str
    cited_paper_id: str
    klass: AugmentationClass
    score: Optional[ReencounterScore] = None
    shade_bucket: Optional[int] = None
    intensity: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "marker_id": self.marker_id,
            "cited_paper_id": self.cited_paper_id,
            "class": self.klass.to_dict(),
            "score": self.score.to_dict() if self.score else None,
            "shade_bucket": self.shade_bucket,
            "intensity": self.intensity,
        }


@dataclass
class OverviewStats:
    """Per-class citation counts shown on the overview page, in display order."""

    total_citations: int = 0
    own: int = 0
    cited_by_own: int = 0
    reencountered: int = 0
    saved: int = 0
    visited: int = 0
    unresolved: int = 0

    def to_dict(self) -> dict:
        return {
            "total_citations": self.total_citations,
            "own": self.own,
            "cited_by_own": self.cited_by_own,
            "reencountered": self.reencountered,
            "saved": self.saved,
            "visited": self.visited,
            "unresolved": self.unresolved,
        }


def default_toggles() -> dict:
    return {name: True for name in TOGGLE_CLASSES}


def contribution_centi(progress: float, saved: bool) -> int:
    """One citing history paper's points: 1 + progress + 2*saved, in centipoints."""
    return 100 + round(progress * 100) + (200 if saved else 0)


def reencounter_score(
    state: ActivityState,
    corpus,
    cited: str,
    window: Optional[int] = None,
    exclude_paper: Optional[str] = None,
) -> ReencounterScore:
    """Sum contributions from in-window history papers citing `cited`, capped at 5.

    The currently open paper never contributes to scores in its own view;
    each history paper contributes once no matter how many of its markers
    cite the target.
    """
    contributors = []
    total = 0
    for entry in state.reading_history(window):
        if entry.paper_id == exclude_paper:
            continue
        meta = corpus.get_optional(entry.paper_id)
        if meta is None or cited not in meta.outgoing_refs:
            continue
        centi = contribution_centi(entry.progress, entry.saved)
        contributors.append((entry.paper_id, centi / 100.0))
        total += centi
    return ReencounterScore(value=min(SCORE_CAP_CENTI, total) / 100.0, contributors=tuple(contributors))


def classify_citation(
    profile: UserProfile,
    state: ActivityState,
    corpus,
    cited: str,
    window: Optional[int] = None,
    exclude_paper: Optional[str] = None,
    score: Optional[ReencounterScore] = None,
) -> AugmentationClass:
    """Assign the color (saved > visited > reencountered > none) and overlays.

    Yellow is withheld for papers the user already knows: their own papers,
    papers cited by their publications, and anything visited, saved, or
    explicitly suppressed.
    """
    overlays = []
    if cited in profile.own_paper_ids:
        overlays.append(OVERLAY_OWN)
    if cited in profile.cited_by_own:
        overlays.append(OVERLAY_CITED)

    if state.saved(cited):
        color = COLOR_SAVED
    elif state.visited(cited):
        color = COLOR_VISITED
    else:
        if score is None:
            score = reencounter_score(state, corpus, cited, window, exclude_paper)
        known = cited in profile.own_paper_ids or cited in profile.cited_by_own
        if score.value > 0 and not known and cited not in state.suppressed:
            color = COLOR_REENCOUNTERED
        else:
            color = COLOR_NONE
    return AugmentationClass(color=color, overlays=tuple(overlays))


def stats_class(klass: AugmentationClass) -> str:
    """Mutually exclusive bucket for overview counts and card-open analytics.

    Overlay classes claim the paper first (own before cited-by-own), the
    rest fall to the post-precedence color; this keeps the per-class counts
    summing to at most the total.
    """
    if OVERLAY_OWN in klass.overlays:
        return "own"
    if OVERLAY_CITED in klass.overlays:
        return "cited_by_own"
    if klass.color == COLOR_SAVED:
        return "saved"
    if klass.color == COLOR_VISITED:
        return "visited"
    if klass.color == COLOR_REENCOUNTERED:
        return "reencountered"
    return "none"


def shade_bucket_for(score: ReencounterScore) -> int:
    """ceil(score) in integer arithmetic, clamped to [1, 5]."""
    centi = round(score.value * 100)
    return max(1, min(5, (centi + 99) // 100))


def _apply_toggles(klass: AugmentationClass, toggles: dict) -> AugmentationClass:
    color = klass.color
    if color == COLOR_SAVED and not toggles.get("saved", True):
        color = COLOR_NONE
    elif color == COLOR_VISITED and not toggles.get("visited", True):
        color = COLOR_NONE
    elif color == COLOR_REENCOUNTERED and not toggles.get("reencountered", True):
        color = COLOR_NONE
    overlays = tuple(
        o
        for o in klass.overlays
        if (o != OVERLAY_OWN or toggles.get("own", True))
        and (o != OVERLAY_CITED or toggles.get("cited_by_own", True))
    )
    return AugmentationClass(color=color, overlays=overlays)


def marker_citations(doc, entry_to_paper: dict):
    """Per marker, the ordered distinct resolved cited paper ids.

    Yields (marker, [paper_id, ...], [unresolved_key, ...]).
    """
    for marker in doc.markers:
        linked = doc.links.get(marker.marker_id, [])
        papers, unresolved, seen = [], [], set()
        for key in marker.keys:
            pid = entry_to_paper.get(key) if key in linked else None
            if pid is None:
                unresolved.append(key)
            elif pid not in seen:
                seen.add(pid)
                papers.append(pid)
        yield marker, papers, unresolved


def augment_document(
    doc,
    entry_to_paper: dict,
    profile: UserProfile,
    state: ActivityState,
    corpus,
    window: Optional[int] = None,
    toggles: Optional[dict] = None,
    reading_paper_id: Optional[str] = None,
) -> list:
    """One decoration per (marker, resolved cited paper), deterministic.

    Toggled-off classes degrade to no color / no overlay but keep their
    scores so list views can still rank them.
    """
    toggles = toggles if toggles is not None else default_toggles()
    score_cache = {}
    decorations = []
    for marker, papers, _ in marker_citations(doc, entry_to_paper):
        for pid in papers:
            if pid not in score_cache:
                score_cache[pid] = reencounter_score(
                    state, corpus, pid, window, exclude_paper=reading_paper_id
                )
            score = score_cache[pid]
            klass = classify_citation(
                profile, state, corpus, pid, window, reading_paper_id, score=score
            )
            shown = _apply_toggles(klass, toggles)
            decorations.append(
                AugmentationDecoration(
                    marker_id=marker.marker_id,
                    cited_paper_id=pid,
                    klass=shown,
                    score=score if score.value > 0 else None,
                    shade_bucket=shade_bucket_for(score) if shown.color == COLOR_REENCOUNTERED else None,
                    intensity=score.value / 5 if score.value > 0 else None,
                )
            )
    return decorations


def overview(
    doc,
    entry_to_paper: dict,
    profile: UserProfile,
    state: ActivityState,
    corpus,
    window: Optional[int] = None,
    reading_paper_id: Optional[str] = None,
) -> OverviewStats:
    """Counts over distinct resolved cited papers, ignoring display toggles."""
    resolved, unresolved_keys = [], set()
    seen = set()
    for _, papers, unresolved in marker_citations(doc, entry_to_paper):
        unresolved_keys.update(unresolved)
        for pid in papers:
            if pid not in seen:
                seen.add(pid)
                resolved.append(pid)
    stats = OverviewStats(total_citations=len(resolved), unresolved=len(unresolved_keys))
    for pid in resolved:
        klass = classify_citation(profile, state, corpus, pid, window, reading_paper_id)
        bucket = stats_class(klass)
        if bucket != "none":
            setattr(stats, bucket, getattr(stats, bucket) + 1)
    return stats
