"""Citation-selection strategies, top-k pooling, and the lexical embedding baseline.

Four strategies rank a document's resolved citations: linear (first-mention
order in the intro/related-work sections), global (citation counts),
reencountered (co-citation count across peer documents), and embedding
(cosine similarity to the mean vector of the topic papers). Pooling takes
each strategy's top k with seeded tie shuffles and unions the picks.
"""

import math
import random
import re
from dataclasses import dataclass
from typing import Optional

from citelens.augment import marker_citations
from citelens.errors import ProviderUnavailable

STRATEGY_LINEAR = "linear"
STRATEGY_GLOBAL = "global"
STRATEGY_REENCOUNTERED = "reencountered"
STRATEGY_EMBEDDING = "embedding"
STRATEGY_NAMES = (STRATEGY_EMBEDDING, STRATEGY_GLOBAL, STRATEGY_LINEAR, STRATEGY_REENCOUNTERED)

_TOKEN_RE = re.compile(r"[0-9a-z]+")


def tokenize(text: str) -> list:
    return _TOKEN_RE.findall(text.lower())


class EmbeddingProvider:
    """Contract: a batch of texts maps to equal-length finite vectors."""

    def embed(self, texts: list) -> list:
        raise NotImplementedError


class LexicalEmbeddingProvider(EmbeddingProvider):
    """tf-idf vectors over the corpus vocabulary, L2-normalized.

    idf is smoothed (ln((1+N)/(1+df)) + 1) so tokens shared by every
    document still carry weight and self-similarity stays 1.
    """

    def __init__(self, documents: list):
        self.num_docs = len(documents)
        df = {}
        for text in documents:
            for token in set(tokenize(text)):
                df[token] = df.get(token, 0) + 1
        self.vocabulary = sorted(df)
        self._index = {tok: i for i, tok in enumerate(self.vocabulary)}
        self.idf = [
            math.log((1 + self.num_docs) / (1 + df[tok])) + 1.0 for tok in self.vocabulary
        ]

    @classmethod
    def from_corpus(cls, corpus) -> "LexicalEmbeddingProvider":
        texts = [paper_text(corpus.get(pid)) for pid in corpus.paper_ids()]
        return cls(texts)

    def embed_one(self, text: str) -> list:
        vec = [0.0] * len(self.vocabulary)
        for token in tokenize(text):
            i = self._index.get(token)
            if i is not None:
                vec[i] += 1.0
        for i, w in enumerate(vec):
            if w:
                vec[i] = w * self.idf[i]
        norm = math.sqrt(sum(w * w for w in vec))
        if norm > 0:
            vec = [w / norm for w in vec]
        return vec

    def embed(self, texts: list) -> list:
        return [self.embed_one(t) for t in texts]


def cosine(a: list, b: list) -> float:
    if len(a) != len(b):
        raise ValueError("vector dimensions differ")
    dot = sum(x * y for x, y in zip(a, b))
    na = math.sqrt(sum(x * x for x in a))
    nb = math.sqrt(sum(y * y for y in b))
    if na == 0 or nb == 0:
        return 0.0
    return dot / (na * nb)


def mean_vector(vectors: list) -> list:
    if not vectors:
        return []
    dim = len(vectors[0])
    out = [0.0] * dim
    for v in vectors:
        for i in range(dim):
            out[i] += v[i]
    return [x / len(vectors) for x in out]


def paper_text(meta) -> str:
    return f"{meta.title} {meta.abstract}".strip()


def cited_paper_order(doc, entry_to_paper: dict, section_filter=None) -> list:
    """Distinct resolved cited papers in first-mention order."""
    seen, ordered = set(), []
    for marker, papers, _ in marker_citations(doc, entry_to_paper):
        if section_filter is not None:
            name = doc.bundle.sections[marker.section_index].name
            if not section_filter(name):
                continue
        for pid in papers:
            if pid not in seen:
                seen.add(pid)
                ordered.append(pid)
    return ordered


def default_section_filter(name: str) -> bool:
    lowered = name.lower()
    return "introduction" in lowered or "related" in lowered


def rank_linear(doc, entry_to_paper: dict, section_filter=default_section_filter) -> list:
    """First-mention order within the filtered sections; earlier is better.

    Scores are negated mention positions so that, like every other
    strategy, a larger score means a better rank.
    """
    ordered = cited_paper_order(doc, entry_to_paper, section_filter)
    return [(pid, float(-i)) for i, pid in enumerate(ordered)]


def rank_global(doc, entry_to_paper: dict, corpus) -> list:
    """Descending global citation count; ties in stable paper-id order."""
    cited = cited_paper_order(doc, entry_to_paper)
    scored = [(pid, float(corpus.citation_stats(pid).citation_count)) for pid in cited]
    scored.sort(key=lambda item: (-item[1], item[0]))
    return scored


def rank_reencountered(doc, entry_to_paper: dict, peers: list) -> list:
    """Number of peer documents citing each paper; zero-score papers excluded.

    `peers` holds (parsed_doc, entry_to_paper) pairs and must not include
    the document being ranked.
    """
    peer_sets = [set(cited_paper_order(pd, pe)) for pd, pe in peers]
    scored = []
    for pid in cited_paper_order(doc, entry_to_paper):
        count = sum(1 for s in peer_sets if pid in s)
        if count > 0:
            scored.append((pid, float(count)))
    scored.sort(key=lambda item: (-item[1], item[0]))
    return scored


def rank_embedding(doc, entry_to_paper: dict, topic_paper_ids: list, corpus, provider) -> list:
    """Cosine similarity of each cited paper to the mean topic vector."""
    if provider is None:
        raise ProviderUnavailable("no embedding provider configured")
    cited = cited_paper_order(doc, entry_to_paper)
    try:
        topic_vecs = provider.embed([paper_text(corpus.get(pid)) for pid in topic_paper_ids])
        cited_vecs = provider.embed([paper_text(corpus.get(pid)) for pid in cited])
    except ProviderUnavailable:
        raise
    except Exception as e:
        raise ProviderUnavailable(str(e)) from e
    query = mean_vector(topic_vecs)
    scored = [(pid, cosine(query, vec)) for pid, vec in zip(cited, cited_vecs)]
    scored.sort(key=lambda item: (-item[1], item[0]))
    return scored


@dataclass
class StrategyReport:
    per_strategy: dict  # name -> [(paper_id, score), ...] top-k, best first
    pooled: set
    attribution: dict  # paper_id -> set of strategy names
    overlap_histogram: dict  # 1..4 -> count of pooled papers picked by exactly k strategies

    def to_dict(self) -> dict:
        return {
            "per_strategy": {
                name: [[pid, score] for pid, score in ranked]
                for name, ranked in sorted(self.per_strategy.items())
            },
            "pooled": sorted(self.pooled),
            "attribution": {pid: sorted(names) for pid, names in sorted(self.attribution.items())},
            "overlap_histogram": {str(k): self.overlap_histogram.get(k, 0) for k in (1, 2, 3, 4)},
        }


def take_topk(ranked: list, k: int, rng: random.Random) -> list:
    """Top k entries with each rank-tie group shuffled by the seeded rng."""
    out = []
    i = 0
    while i < len(ranked):
        j = i
        while j < len(ranked) and ranked[j][1] == ranked[i][1]:
            j += 1
        group = ranked[i:j]
        rng.shuffle(group)
        out.extend(group)
        i = j
    return out[:k]


def pool_topk(
    doc,
    entry_to_paper: dict,
    peers: list,
    corpus,
    provider=None,
    k: int = 5,
    seed: int = 0,
    topic_paper_ids: Optional[list] = None,
    doc_paper_id: Optional[str] = None,
    section_filter=default_section_filter,
) -> StrategyReport:
    """Union of each strategy's top k, with seeded tie-breaking.

    One generator per call, consumed in strategy-name alphabetical order,
    makes the whole report a pure function of (inputs, seed). Without an
    explicit provider a lexical baseline is built from the corpus.
    """
    if provider is None:
        provider = LexicalEmbeddingProvider.from_corpus(corpus)
    if topic_paper_ids is None:
        # callers normally pass the full topic set (reading doc + peers)
        topic_paper_ids = [doc_paper_id] if doc_paper_id else []

    rankings = {
        STRATEGY_EMBEDDING: rank_embedding(doc, entry_to_paper, topic_paper_ids, corpus, provider),
        STRATEGY_GLOBAL: rank_global(doc, entry_to_paper, corpus),
        STRATEGY_LINEAR: rank_linear(doc, entry_to_paper, section_filter),
        STRATEGY_REENCOUNTERED: rank_reencountered(doc, entry_to_paper, peers),
    }
    rng = random.Random(seed)
    per_strategy = {}
    for name in sorted(rankings):
        per_strategy[name] = take_topk(rankings[name], k, rng)

    attribution = {}
    for name, picks in per_strategy.items():
        for pid, _ in picks:
            attribution.setdefault(pid, set()).add(name)
    pooled = set(attribution)
    histogram = {n: 0 for n in (1, 2, 3, 4)}
    for names in attribution.values():
        histogram[len(names)] += 1
    return StrategyReport(
        per_strategy=per_strategy,
        pooled=pooled,
        attribution=attribution,
        overlap_histogram=histogram,
    )
