"""Shared fixtures: planted corpora and exhaustive ranking oracles.

The oracle functions score every candidate with the package's own scoring
function and then fully sort, independent of the inverted-index search
path they are used to check.
"""
from __future__ import annotations

import json
from collections import Counter
from pathlib import Path

import pytest

from citescout.corpus import PaperRecord, Snippet, record_to_dict
from citescout.corpus.text import CollectionStats, bm25_score, tokenize

BANDIT_ID = "4f0d485cbcde840533f23f0c8b0f3fa1ca2d74df"
INPAINT_ID = "fdf7012ebe9d4c4d2d93004613e7a19f69a83a93"
CAM_SOURCE_ID = "cam-source-paper"
DEEP_NET_ID = "cbb19236820a96038d000dc629225d36e0b6294a"
SPP_ID = "spp-net-2014"
PETS_2012_ID = "oxford-pets-2012"
PETS_2011_ID = "truth-cats-dogs-2011"
LONG_PAPER_ID = "long-paper"

CAM_CONTEXT_BLOCK = (
    "3. Weakly-supervised Object Localization\n"
    "In this section, we evaluate the localization ability of CAM when trained "
    "on the ILSVRC 2014 benchmark dataset [20]. We first describe the "
    "experimental setup and the various CNNs used in Sec. 3.1. Then, in Sec. "
    "3.2 we verify that our technique does not adversely impact the "
    "classification performance when learning to localize and provide detailed "
    "results on weakly-supervised object localization."
)


def make_paper(
    paper_id: str,
    title: str,
    abstract: str = "",
    citation_count: int = 0,
    year: int | None = None,
    snippets: list | None = None,
    references: list | None = None,
) -> PaperRecord:
    """Snippets may be plain strings or (section, text) pairs."""
    built = []
    for i, entry in enumerate(snippets or []):
        if isinstance(entry, tuple):
            section, text = entry
        else:
            section, text = None, entry
        built.append(Snippet(paper_id=paper_id, ordinal=i, section=section, text=text))
    return PaperRecord(
        paper_id=paper_id,
        title=title,
        abstract=abstract,
        citation_count=citation_count,
        year=year,
        snippets=built,
        references=references or [],
    )


def bandit_papers() -> list[PaperRecord]:
    """Five papers; exactly one title carries both query tokens."""
    return [
        make_paper(
            BANDIT_ID,
            "Sequential Experimental Design for Transductive Linear Bandits",
            "We introduce the transductive linear bandit problem, where the set "
            "of measurement vectors and the set of items are allowed to differ. "
            "The learner must identify the best item using measurements of its "
            "choosing.",
            citation_count=120,
            year=2019,
            snippets=[
                "We introduce the transductive linear bandit problem.",
                "Measurement vectors (actions) and items (answers) can be "
                "different sets in our setting.",
            ],
        ),
        make_paper(
            "transductive-text",
            "Transductive Learning for Text Classification",
            "Applying transductive inference to document categorization with "
            "support vector machines.",
            citation_count=900,
            year=1999,
        ),
        make_paper(
            "federated-bandits",
            "Federated Bandits with Communication Constraints",
            "Regret bounds for multi-armed bandit learners that collaborate "
            "across devices.",
            citation_count=45,
            year=2021,
        ),
        make_paper(
            "transductive-video",
            "Transductive Inference for Video Object Segmentation",
            "A label propagation approach to segmenting objects in video.",
            citation_count=210,
            year=2020,
        ),
        make_paper(
            "pure-exploration",
            "Pure Exploration in Multi-Armed Models",
            "Sample complexity of best arm identification.",
            citation_count=310,
            year=2016,
        ),
    ]


def inpainting_papers() -> list[PaperRecord]:
    return [
        make_paper(
            INPAINT_ID,
            "Resolution-robust Large Mask Inpainting with Fourier Convolutions",
            "We introduce an image inpainting network that uses fast Fourier "
            "convolutions to obtain an image-wide receptive field for filling "
            "large holes.",
            citation_count=640,
            year=2021,
            snippets=[
                "Fast Fourier convolutions give the generator an image-wide "
                "receptive field early in the network.",
            ],
        ),
        make_paper(
            "fourier-features",
            "Fourier Features Let Networks Learn High Frequency Functions",
            "A study of Fourier feature mappings for coordinate MLPs.",
            citation_count=1500,
            year=2020,
        ),
        make_paper(
            "partial-conv",
            "Image Inpainting for Irregular Holes Using Partial Convolutions",
            "Inpainting with convolutions masked to valid pixels only.",
            citation_count=2100,
            year=2018,
        ),
    ]


def cam_papers() -> list[PaperRecord]:
    """Source paper with one context paragraph, plus the papers it leads to."""
    return [
        make_paper(
            CAM_SOURCE_ID,
            "Learning Deep Features for Discriminative Localization",
            "Class activation mapping exposes the discriminative regions used "
            "by classification CNNs.",
            citation_count=9000,
            year=2016,
            snippets=[
                (
                    "3. Weakly-supervised Object Localization",
                    "In this section, we evaluate the localization ability of CAM "
                    "when trained on the ILSVRC 2014 benchmark dataset [20]. We "
                    "first describe the experimental setup and the various CNNs "
                    "used in Sec. 3.1. Then, in Sec. 3.2 we verify that our "
                    "technique does not adversely impact the classification "
                    "performance when learning to localize and provide detailed "
                    "results on weakly-supervised object localization.",
                ),
            ],
        ),
        make_paper(
            DEEP_NET_ID,
            "Very Deep Convolutional Networks for Large-Scale Visual Recognition",
            "We evaluate very deep networks on the ILSVRC 2014 benchmark and "
            "analyze the effect of depth on accuracy.",
            citation_count=45000,
            year=2014,
            snippets=[
                "Increasing depth using small convolution filters brings "
                "significant accuracy gains.",
                "Based on this work, we attended the competition of ILSVRC 2014 "
                "[26] and secured top placements.",
                "Training used scale jittering and momentum.",
            ],
            references=[
                ("imagenet-paper", "ImageNet Large Scale Visual Recognition Challenge"),
            ],
        ),
        make_paper(
            SPP_ID,
            "Spatial Pyramid Pooling in Deep Convolutional Networks for Visual "
            "Recognition",
            "Spatial pyramid pooling removes the fixed-size input constraint of "
            "CNNs.",
            citation_count=11000,
            year=2014,
            snippets=[
                (
                    "Abstract",
                    "In ImageNet Large Scale Visual Recognition Challenge (ILSVRC) "
                    "2014, our methods rank #2 in object detection and #3 in image "
                    "classification among all 38 teams.",
                ),
                (
                    "Introduction",
                    "Pooling feature maps at multiple scales yields fixed-length "
                    "representations for variable-sized images.",
                ),
            ],
        ),
        make_paper(
            "imagenet-paper",
            "ImageNet Large Scale Visual Recognition Challenge",
            "The ILSVRC benchmark dataset and competition, including the 2014 "
            "edition.",
            citation_count=30000,
            year=2015,
            snippets=["ILSVRC spans classification, localization and detection."],
        ),
    ]


def pets_papers() -> list[PaperRecord]:
    return [
        make_paper(
            PETS_2012_ID,
            "Cats and dogs",
            "A 37-category pet dataset with breed annotations for fine-grained "
            "classification.",
            citation_count=3200,
            year=2012,
            snippets=["The Oxford pets dataset covers 37 cat and dog breeds."],
        ),
        make_paper(
            PETS_2011_ID,
            "The truth about cats and dogs",
            "Deformable part models and segmentation for pet categorization.",
            citation_count=400,
            year=2011,
            snippets=["We study cat and dog categorization with template models."],
        ),
    ]


def long_paper() -> PaperRecord:
    sentences = []
    for i in range(40):
        sentences.append(
            (
                f"Section {i // 10}",
                f"Passage {i} discusses aspect number {i} of the proposed "
                f"retrieval pipeline in considerable depth, covering ablation "
                f"{i} together with deployment notes, caveats, measurements, "
                f"hardware details, dataset bookkeeping and tuning folklore "
                f"accumulated across iteration {i}.",
            )
        )
    sentences[7] = (
        "Section 0",
        "Passage 7 reports the headline benchmark comparison against kernel "
        "baselines across splits.",
    )
    return make_paper(
        LONG_PAPER_ID,
        "An Exhaustive Study of Retrieval Pipelines",
        "A long systems paper used to contrast whole-paper reading with "
        "targeted snippet retrieval.",
        citation_count=12,
        year=2023,
        snippets=sentences,
    )


def demo_papers() -> list[PaperRecord]:
    """Everything, for end-to-end runs."""
    return (
        bandit_papers()
        + inpainting_papers()
        + cam_papers()
        + pets_papers()
        + [long_paper()]
    )


@pytest.fixture
def bandit_corpus():
    from citescout.corpus import LocalCorpus

    return LocalCorpus(bandit_papers())


@pytest.fixture
def demo_corpus():
    from citescout.corpus import LocalCorpus

    return LocalCorpus(demo_papers())


def write_corpus_jsonl(path: Path, records: list[PaperRecord]) -> Path:
    lines = [json.dumps(record_to_dict(r), ensure_ascii=False) for r in records]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


# -- scripted two-turn runs -------------------------------------------------------

DEEPSEEK_EXCERPT = (
    "In the spirit of transductive bandits [CITATION] we consider a more "
    "general setting where answers are sets of arms. The set of actions and "
    "the set of answers can be different."
)

DEEPSEEK_RESPONSES = [
    '{"reason": "The masked citation follows the phrase transductive bandits, '
    "so that specific term is the concept being credited. I will search for "
    'papers about it first.", "action": {"name": "search_relevance", '
    '"query": "transductive bandits"}}',
    '{"reason": "Result ' + BANDIT_ID + " defines the transductive linear "
    "bandit problem where measurement vectors and items are allowed to be "
    "different sets, matching the excerpt's distinct action and answer sets. "
    'The other results only apply transduction elsewhere.", '
    '"action": {"name": "select", "paper_id": "' + BANDIT_ID + '"}}',
]

KIMI_EXCERPT = (
    "Our evaluation follows the protocol of [CITATION], a recent inpainting "
    "model that introduces a specialized architecture relying on Fast Fourier "
    "Convolutions [8]"
)

KIMI_RESPONSES = [
    "Okay, I need an image-inpainting model whose architecture centers on "
    "Fast Fourier Convolutions, so a targeted search combining both phrases "
    'comes first.{"reason": "Combining the inpainting task with the Fast '
    'Fourier Convolution architecture should pin down the exact paper.", '
    '"action": {"name": "search_relevance", "query": "Fast Fourier '
    'Convolution inpainting model"}}',
    '{"reason": "Abstract ' + INPAINT_ID + " describes an inpainting network "
    "built on fast Fourier convolutions with an image-wide receptive field "
    'for large holes, exactly the cited architecture.", '
    '"action": {"name": "select", "paper_id": "' + INPAINT_ID + '"}}',
]


# -- exhaustive oracles ---------------------------------------------------------


def _admits(record: PaperRecord, year_cutoff, excluded) -> bool:
    if record.paper_id in excluded:
        return False
    if year_cutoff is not None and record.year is not None and record.year > year_cutoff:
        return False
    return True


def brute_relevance(
    records: list[PaperRecord],
    query_text: str,
    year_cutoff=None,
    excluded=frozenset(),
) -> list[str]:
    query = tokenize(query_text)
    docs = {r.paper_id: tokenize(r.searchable_text) for r in records}
    stats = CollectionStats.from_documents(docs.values())
    scored = []
    for record in records:
        if not _admits(record, year_cutoff, excluded):
            continue
        tokens = docs[record.paper_id]
        score = bm25_score(query, Counter(tokens), len(tokens), stats)
        if score > 0:
            scored.append((record.paper_id, score))
    scored.sort(key=lambda x: (-x[1], x[0]))
    return [pid for pid, _ in scored]


def brute_citation_count(
    records: list[PaperRecord],
    query_text: str,
    year_cutoff=None,
    excluded=frozenset(),
) -> list[str]:
    matching = set(brute_relevance(records, query_text, year_cutoff, excluded))
    ranked = sorted(
        (r for r in records if r.paper_id in matching),
        key=lambda r: (-r.citation_count, r.paper_id),
    )
    return [r.paper_id for r in ranked]


def _snippet_stats(records: list[PaperRecord]) -> CollectionStats:
    return CollectionStats.from_documents(
        tokenize(s.text) for r in records for s in r.snippets
    )


def brute_find_in_text(
    records: list[PaperRecord], paper_id: str, query_text: str
) -> list[int]:
    query = tokenize(query_text)
    stats = _snippet_stats(records)
    target = next(r for r in records if r.paper_id == paper_id)
    scored = []
    for snippet in target.snippets:
        tokens = tokenize(snippet.text)
        score = bm25_score(query, Counter(tokens), len(tokens), stats)
        if score > 0:
            scored.append((snippet.ordinal, score))
    scored.sort(key=lambda x: (-x[1], x[0]))
    return [ordinal for ordinal, _ in scored]


def brute_snippet_search(
    records: list[PaperRecord],
    query_text: str,
    year_cutoff=None,
    excluded=frozenset(),
) -> list[tuple[str, int]]:
    query = tokenize(query_text)
    stats = _snippet_stats(records)
    scored = []
    for record in records:
        if not _admits(record, year_cutoff, excluded):
            continue
        for snippet in record.snippets:
            tokens = tokenize(snippet.text)
            score = bm25_score(query, Counter(tokens), len(tokens), stats)
            if score > 0:
                scored.append((record.paper_id, snippet.ordinal, score))
    scored.sort(key=lambda x: (-x[2], x[0], x[1]))
    return [(pid, ordinal) for pid, ordinal, _ in scored]


def random_corpus(rng, n_papers: int, max_snippets: int = 6) -> list[PaperRecord]:
    """Random small corpus over a compact vocabulary (ties are common)."""
    vocabulary = [
        "bandit", "retrieval", "graph", "neural", "kernel", "sparse",
        "citation", "agent", "search", "policy", "transformer", "optimal",
        "bound", "sample", "deep", "convex",
    ]

    def words(k):
        return " ".join(rng.choice(vocabulary) for _ in range(k))

    records = []
    for i in range(n_papers):
        n_snippets = rng.randrange(0, max_snippets + 1)
        records.append(
            make_paper(
                f"p{i:03d}",
                title=words(rng.randrange(2, 6)),
                abstract=words(rng.randrange(4, 15)),
                citation_count=rng.randrange(0, 40),
                year=rng.randrange(1995, 2025),
                snippets=[words(rng.randrange(3, 12)) for _ in range(n_snippets)],
            )
        )
    return records
