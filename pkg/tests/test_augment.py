import itertools

import pytest
from hypothesis import given, settings, strategies as st

from citelens.activity import ActivityStore
from citelens.augment import (
    AugmentationClass,
    UserProfile,
    augment_document,
    build_profile,
    classify_citation,
    contribution_centi,
    default_toggles,
    overview,
    reencounter_score,
    shade_bucket_for,
    stats_class,
)
from citelens.citeparse import make_bundle, parse_bundle
from citelens.corpus import Corpus, PaperMetadata


def make_store(tmp_path, name="act"):
    ts = iter(range(1, 100000))
    return ActivityStore(str(tmp_path / name), fsync=False, clock=lambda: float(next(ts)))


def corpus_with(papers):
    """papers: {paper_id: [outgoing ids]} with titles equal to the ids."""
    corpus = Corpus()
    for pid, refs in papers.items():
        corpus.upsert_paper(PaperMetadata(paper_id=pid, title=pid, year=2020, outgoing_refs=list(refs)))
    return corpus


def test_contribution_formula():
    assert contribution_centi(0.0, False) == 100  # 1 point for citing
    assert contribution_centi(0.5, False) == 150  # + up to 1 for progress
    assert contribution_centi(0.5, True) == 350  # + 2 for saved
    assert contribution_centi(1.0, True) == 400


def test_score_single_open_only_citing_paper(tmp_path):
    corpus = corpus_with({"H": ["C"], "C": []})
    store = make_store(tmp_path)
    store.append("open", "H")
    score = reencounter_score(store.state, corpus, "C")
    assert score.value == 1.0  # 1 + 0 + 0
    assert score.contributors == (("H", 1.0),)


def test_score_half_read_and_saved(tmp_path):
    corpus = corpus_with({"H": ["C"], "C": []})
    store = make_store(tmp_path)
    store.append("open", "H")
    store.append("scroll", "H", {"fraction": 0.5})
    store.append("save", "H")
    score = reencounter_score(store.state, corpus, "C")
    assert score.value == 3.5  # 1 + 0.5 + 2


def test_score_capped_at_five(tmp_path):
    corpus = corpus_with({"H1": ["C"], "H2": ["C"], "H3": ["C"], "C": []})
    store = make_store(tmp_path)
    for pid in ("H1", "H2", "H3"):
        store.append("open", pid)
        store.append("mark_read", pid)
        store.append("save", pid)
    score = reencounter_score(store.state, corpus, "C")
    assert score.value == 5.0  # min(5, 3 * 4)
    assert len(score.contributors) == 3


def test_currently_open_paper_excluded(tmp_path):
    corpus = corpus_with({"T": ["C"], "C": []})
    store = make_store(tmp_path)
    store.append("open", "T")
    score = reencounter_score(store.state, corpus, "C", exclude_paper="T")
    assert score.value == 0.0


def test_window_eviction(tmp_path):
    corpus = corpus_with({"H1": ["C"], "H2": [], "C": []})
    store = make_store(tmp_path)
    store.append("open", "H1")
    store.append("open", "H2")
    assert reencounter_score(store.state, corpus, "C", window=1).value == 0.0
    assert reencounter_score(store.state, corpus, "C", window=2).value == 1.0


def test_window_eviction_at_5_and_20(tmp_path):
    # citer opened first, then k more papers push it out of a window of k
    for w in (5, 20):
        corpus = corpus_with({"CITER": ["C"], "C": [], **{f"F{i}": [] for i in range(w)}})
        store = make_store(tmp_path, name=f"w{w}")
        store.append("open", "CITER")
        for i in range(w):
            store.append("open", f"F{i}")
        assert reencounter_score(store.state, corpus, "C", window=w).value == 0.0
        assert reencounter_score(store.state, corpus, "C", window=w + 1).value == 1.0


def test_deletion_zeroes_contribution(tmp_path):
    corpus = corpus_with({"H": ["C"], "C": []})
    store = make_store(tmp_path)
    store.append("open", "H")
    store.append("mark_read", "H")
    assert reencounter_score(store.state, corpus, "C").value == 2.0
    store.append("delete_history", "H")
    assert reencounter_score(store.state, corpus, "C").value == 0.0


def test_contributor_dedup_single_entry_per_history_paper(tmp_path):
    # one history paper citing the target via several markers still counts once:
    # outgoing_refs are already per-paper, so the contributor list has one entry
    corpus = corpus_with({"H": ["C", "C2"], "C": [], "C2": []})
    store = make_store(tmp_path)
    store.append("open", "H")
    score = reencounter_score(store.state, corpus, "C")
    assert score.contributors == (("H", 1.0),)


def test_classify_visited_and_saved_is_saved(tmp_path):
    corpus = corpus_with({"C": []})
    store = make_store(tmp_path)
    store.append("open", "C")
    store.append("save", "C")
    klass = classify_citation(UserProfile(), store.state, corpus, "C")
    assert klass.color == "saved_red"


def test_classify_cited_by_own_never_yellow(tmp_path):
    corpus = corpus_with({"H": ["C"], "C": []})
    store = make_store(tmp_path)
    store.append("open", "H")  # positive score for C
    profile = UserProfile(cited_by_own=frozenset({"C"}))
    klass = classify_citation(profile, store.state, corpus, "C")
    assert klass.color == "none"
    assert klass.overlays == ("cited_quote",)
    # but saved still wins the color
    store.append("save", "C")
    klass = classify_citation(profile, store.state, corpus, "C")
    assert klass.color == "saved_red"
    assert klass.overlays == ("cited_quote",)


def test_classify_unknown_paper_no_augmentation(tmp_path):
    corpus = corpus_with({"C": []})
    store = make_store(tmp_path)
    klass = classify_citation(UserProfile(), store.state, corpus, "C")
    assert klass == AugmentationClass(color="none", overlays=())


def test_suppression_only_affects_yellow(tmp_path):
    corpus = corpus_with({"H": ["C"], "C": []})
    store = make_store(tmp_path)
    store.append("open", "H")
    store.append("suppress_highlight", "C")
    assert classify_citation(UserProfile(), store.state, corpus, "C").color == "none"
    store.append("save", "C")
    assert classify_citation(UserProfile(), store.state, corpus, "C").color == "saved_red"


def test_unsuppress_restores_exactly(tmp_path):
    corpus = corpus_with({"H": ["C"], "C": []})
    store = make_store(tmp_path)
    store.append("open", "H")
    before = classify_citation(UserProfile(), store.state, corpus, "C")
    assert before.color == "reencountered_yellow"
    store.append("suppress_highlight", "C")
    store.append("unsuppress_highlight", "C")
    after = classify_citation(UserProfile(), store.state, corpus, "C")
    assert after == before


EXPECTED_RULES_CASES = list(itertools.product([False, True], repeat=6))


def expected_color(visited, saved, own, cited_by_own, positive, suppressed):
    # written straight from the precedence prose, independent of the engine
    if saved:
        return "saved_red"
    if visited:
        return "visited_green"
    if positive and not own and not cited_by_own and not suppressed:
        return "reencountered_yellow"
    return "none"


@pytest.mark.parametrize("visited,saved,own,cited_by_own,positive,suppressed", EXPECTED_RULES_CASES)
def test_precedence_truth_table(tmp_path, visited, saved, own, cited_by_own, positive, suppressed):
    corpus = corpus_with({"H": ["C"], "C": []})
    store = make_store(
        tmp_path, name=f"t{int(visited)}{int(saved)}{int(own)}{int(cited_by_own)}{int(positive)}{int(suppressed)}"
    )
    if positive:
        store.append("open", "H")
    if visited:
        store.append("open", "C")
    if saved:
        store.append("save", "C")
    if suppressed:
        store.append("suppress_highlight", "C")
    profile = UserProfile(
        own_paper_ids=frozenset({"C"} if own else ()),
        cited_by_own=frozenset({"C"} if cited_by_own else ()),
    )
    klass = classify_citation(profile, store.state, corpus, "C")
    assert klass.color == expected_color(visited, saved, own, cited_by_own, positive, suppressed)
    assert ("own_heart" in klass.overlays) == own
    assert ("cited_quote" in klass.overlays) == cited_by_own


def test_shade_bucket_ceiling():
    def score_of(value):
        from citelens.augment import ReencounterScore

        return ReencounterScore(value=value, contributors=())

    assert shade_bucket_for(score_of(0.01)) == 1
    assert shade_bucket_for(score_of(1.0)) == 1
    assert shade_bucket_for(score_of(1.01)) == 2
    assert shade_bucket_for(score_of(3.5)) == 4
    assert shade_bucket_for(score_of(5.0)) == 5


def doc_citing(n):
    """A parsed doc citing [1..n] with entry keys '1'..'n'."""
    body = " ".join(f"Cites [{i}]." for i in range(1, n + 1))
    refs = "\n".join(f"[{i}] A. Author. Topic {i}. Venue, 2020." for i in range(1, n + 1))
    return parse_bundle(make_bundle("Reading Doc", [("Introduction", body)], refs, style_hint="numeric"))


def test_augment_document_flips_to_saved_red_after_save(tmp_path):
    corpus = corpus_with({"C1": [], "T": ["C1"]})
    store = make_store(tmp_path)
    doc = doc_citing(1)
    e2p = {"1": "C1"}
    decs = augment_document(doc, e2p, UserProfile(), store.state, corpus, reading_paper_id="T")
    assert decs[0].klass.color == "none"
    store.append("save", "C1")
    decs = augment_document(doc, e2p, UserProfile(), store.state, corpus, reading_paper_id="T")
    assert decs[0].klass.color == "saved_red"


def test_augment_document_yellow_bucket_fixture(tmp_path):
    # current paper cites {A, B}; two history papers cite A (progress 1, saved):
    # score A = min(5, 2 * (1 + 1 + 2)) = 5 -> bucket 5; B scores nothing
    corpus = corpus_with({"H1": ["A"], "H2": ["A"], "A": [], "B": [], "T": ["A", "B"]})
    store = make_store(tmp_path)
    for pid in ("H1", "H2"):
        store.append("open", pid)
        store.append("mark_read", pid)
        store.append("save", pid)
    doc = doc_citing(2)
    e2p = {"1": "A", "2": "B"}
    decs = augment_document(doc, e2p, UserProfile(), store.state, corpus, reading_paper_id="T")
    by_pid = {d.cited_paper_id: d for d in decs}
    assert by_pid["A"].klass.color == "reencountered_yellow"
    assert by_pid["A"].score.value == 5.0
    assert by_pid["A"].shade_bucket == 5
    assert by_pid["A"].intensity == 1.0
    assert by_pid["B"].klass.color == "none"
    assert by_pid["B"].score is None


def test_toggles_all_off_degrade_but_keep_scores(tmp_path):
    corpus = corpus_with({"H": ["A"], "A": [], "T": ["A"]})
    store = make_store(tmp_path)
    store.append("open", "H")
    store.append("save", "A")
    doc = doc_citing(1)
    toggles = {name: False for name in default_toggles()}
    decs = augment_document(
        doc, {"1": "A"}, UserProfile(own_paper_ids=frozenset({"A"})), store.state, corpus,
        toggles=toggles, reading_paper_id="T",
    )
    d = decs[0]
    assert d.klass.color == "none"
    assert d.klass.overlays == ()
    assert d.score is not None  # list views still see the score
    assert d.score.value == 1.0


def test_toggled_off_color_does_not_fall_through(tmp_path):
    # saved toggled off must not degrade to green even though the paper was visited
    corpus = corpus_with({"A": [], "T": ["A"]})
    store = make_store(tmp_path)
    store.append("open", "A")
    store.append("save", "A")
    toggles = default_toggles()
    toggles["saved"] = False
    decs = augment_document(
        doc_citing(1), {"1": "A"}, UserProfile(), store.state, corpus, toggles=toggles, reading_paper_id="T"
    )
    assert decs[0].klass.color == "none"


def test_overview_empty_state(tmp_path):
    corpus = corpus_with({f"C{i}": [] for i in range(1, 4)})
    store = make_store(tmp_path)
    doc = doc_citing(3)
    e2p = {"1": "C1", "2": "C2", "3": "C3"}
    stats = overview(doc, e2p, UserProfile(), store.state, corpus)
    assert stats.total_citations == 3
    assert (stats.own, stats.cited_by_own, stats.reencountered, stats.saved, stats.visited) == (0, 0, 0, 0, 0)
    assert stats.unresolved == 0


def test_overview_fixture_counts(tmp_path):
    # 10 refs: 2 saved, 3 visited-only, 1 own, 4 positive score (one also saved)
    cited = {f"C{i}": [] for i in range(1, 11)}
    corpus = corpus_with({**cited, "H": ["C7", "C8", "C9", "C1"]})
    store = make_store(tmp_path)
    store.append("open", "H")
    store.append("save", "C1")
    store.append("save", "C2")
    for pid in ("C3", "C4", "C5"):
        store.append("open", pid)
    profile = UserProfile(own_paper_ids=frozenset({"C6"}))
    doc = doc_citing(10)
    e2p = {str(i): f"C{i}" for i in range(1, 11)}
    stats = overview(doc, e2p, profile, store.state, corpus, reading_paper_id="T")
    assert stats.total_citations == 10
    assert stats.saved == 2
    assert stats.visited == 3
    assert stats.own == 1
    assert stats.reencountered == 3
    assert stats.cited_by_own == 0
    assert stats.unresolved == 0
    total_classified = stats.own + stats.cited_by_own + stats.reencountered + stats.saved + stats.visited
    assert total_classified <= stats.total_citations


def test_overview_counts_unresolved_keys(tmp_path):
    corpus = corpus_with({"C1": []})
    store = make_store(tmp_path)
    doc = parse_bundle(
        make_bundle(
            "Doc",
            [("Introduction", "See [1] and [2] and [9].")],
            "[1] A. Author. Topic 1. Venue, 2020.\n[2] B. Writer. Topic 2. Venue, 2020.",
            style_hint="numeric",
        )
    )
    # entry 2 parsed but resolved nowhere; key 9 has no entry at all
    e2p = {"1": "C1", "2": None}
    stats = overview(doc, e2p, UserProfile(), store.state, corpus)
    assert stats.total_citations == 1
    assert stats.unresolved == 2


def test_overview_dict_order_matches_display():
    from citelens.augment import OverviewStats

    rendered = list(OverviewStats().to_dict())
    assert rendered == [
        "total_citations",
        "own",
        "cited_by_own",
        "reencountered",
        "saved",
        "visited",
        "unresolved",
    ]


def test_stats_class_priority():
    assert stats_class(AugmentationClass("saved_red", ("own_heart",))) == "own"
    assert stats_class(AugmentationClass("saved_red", ("cited_quote",))) == "cited_by_own"
    assert stats_class(AugmentationClass("saved_red", ())) == "saved"
    assert stats_class(AugmentationClass("visited_green", ())) == "visited"
    assert stats_class(AugmentationClass("reencountered_yellow", ())) == "reencountered"
    assert stats_class(AugmentationClass("none", ())) == "none"


def test_build_profile_unions_outgoing_refs():
    corpus = corpus_with({"own1": ["A", "B"], "own2": ["B", "C"], "A": [], "B": [], "C": []})
    profile = build_profile(["own1", "own2"], corpus)
    assert profile.own_paper_ids == frozenset({"own1", "own2"})
    assert profile.cited_by_own == frozenset({"A", "B", "C"})


@settings(max_examples=30, deadline=None)
@given(
    st.lists(
        st.one_of(
            st.tuples(st.just("scroll"), st.floats(0, 1, allow_nan=False)),
            st.tuples(st.just("mark_read"), st.none()),
            st.tuples(st.just("save"), st.none()),
            st.tuples(st.just("open"), st.none()),
        ),
        max_size=30,
    )
)
def test_score_monotone_while_citer_stays_in_window(tmp_path_factory, actions):
    corpus = corpus_with({"H": ["C"], "C": []})
    store = make_store(tmp_path_factory.mktemp("mono"), name="m")
    store.append("open", "H")
    last = reencounter_score(store.state, corpus, "C").value
    for kind, extra in actions:
        if kind == "scroll":
            store.append(kind, "H", {"fraction": extra})
        else:
            store.append(kind, "H")
        now = reencounter_score(store.state, corpus, "C").value
        assert now >= last
        last = now
