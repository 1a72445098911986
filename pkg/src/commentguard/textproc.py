"""Tokenization and tf-idf featurization for comment text.

The tokenizer lowercases and splits on whitespace and punctuation, with four
carve-outs that matter for Instagram comments: @mentions and #hashtags keep
their sigil, currency amounts keep the leading $, and emoji survive as
standalone tokens.  Vectors are L2-normalized tf-idf over a sorted
vocabulary, so featurization is deterministic given the same corpus.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import EmptyCorpusError

# A token is a plain lowercase string; only tokenize() constructs them.
Token = str

# Emoji and pictograph ranges kept as single-character tokens.  Covers the
# symbol blocks seen in the wild plus the variation selector used by many
# emoji sequences.
_EMOJI_CLASS = (
    "\U0001F000-\U0001FAFF"
    "←-⇿"
    "☀-➿"
    "⬀-⯿"
    "️"
)

# Alternation order matters: sigil and currency forms must win over the bare
# word-character run that would otherwise split them.
_TOKEN_RE = re.compile(
    r"[@#]\w+"
    r"|\$\d+(?:[.,]\d+)*"
    r"|\w+"
    f"|[{_EMOJI_CLASS}]"
)


def tokenize(text: str) -> list[Token]:
    """Lowercase and split text into tokens; empty input yields an empty list."""
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class Vocabulary:
    """Immutable term list, sorted lexicographically, with a reverse index."""

    terms: tuple[str, ...]
    index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if list(self.terms) != sorted(set(self.terms)):
            raise ValueError("vocabulary terms must be sorted and distinct")
        object.__setattr__(self, "index", {t: i for i, t in enumerate(self.terms)})

    def __len__(self) -> int:
        return len(self.terms)

    def __contains__(self, term: str) -> bool:
        return term in self.index


def build_vocabulary(
    documents: Sequence[Sequence[Token]], min_df: int = 2, max_size: int = 50_000
) -> Vocabulary:
    """Collect terms with document frequency >= min_df, capped at max_size.

    When the cap bites, the most frequent terms are kept, with ties broken
    lexicographically; the surviving terms are then re-sorted so the final
    ordering is always lexicographic.
    """
    if not documents:
        raise EmptyCorpusError("cannot build a vocabulary from zero documents")
    df: Counter[str] = Counter()
    for doc in documents:
        df.update(set(doc))
    qualified = [term for term, count in df.items() if count >= min_df]
    if len(qualified) > max_size:
        qualified.sort(key=lambda term: (-df[term], term))
        qualified = qualified[:max_size]
    return Vocabulary(terms=tuple(sorted(qualified)))


@dataclass(frozen=True)
class IdfTable:
    """Smoothed inverse document frequencies for a vocabulary's terms.

    idf(t) = ln((1 + N) / (1 + df(t))) + 1, which keeps every weight
    strictly positive even for terms present in all documents.
    """

    values: tuple[float, ...]
    doc_count: int

    def __post_init__(self) -> None:
        if any(v <= 0.0 for v in self.values):
            raise ValueError("idf values must be strictly positive")


def fit_idf(documents: Sequence[Sequence[Token]], vocabulary: Vocabulary) -> IdfTable:
    """Compute smoothed idf values over documents for each vocabulary term."""
    if not documents:
        raise EmptyCorpusError("cannot fit idf on zero documents")
    df: Counter[str] = Counter()
    for doc in documents:
        for term in set(doc):
            if term in vocabulary:
                df[term] += 1
    n = len(documents)
    values = tuple(
        math.log((1 + n) / (1 + df[term])) + 1.0 for term in vocabulary.terms
    )
    return IdfTable(values=values, doc_count=n)


@dataclass(frozen=True)
class SparseVector:
    """Sparse feature vector: (index, weight) pairs, indices strictly increasing."""

    entries: tuple[tuple[int, float], ...]

    def __post_init__(self) -> None:
        last = -1
        for index, weight in self.entries:
            if index <= last:
                raise ValueError("sparse vector indices must strictly increase")
            if weight == 0.0:
                raise ValueError("sparse vector entries must be nonzero")
            last = index

    def l2_norm(self) -> float:
        return math.sqrt(sum(w * w for _, w in self.entries))

    def to_dense(self, size: int) -> list[float]:
        dense = [0.0] * size
        for index, weight in self.entries:
            dense[index] = weight
        return dense


def count_vectorize(tokens: Iterable[Token], vocabulary: Vocabulary) -> SparseVector:
    """Raw in-vocabulary token counts; out-of-vocabulary tokens are dropped."""
    counts: Counter[int] = Counter()
    for token in tokens:
        index = vocabulary.index.get(token)
        if index is not None:
            counts[index] += 1
    entries = tuple((index, float(counts[index])) for index in sorted(counts))
    return SparseVector(entries=entries)


def tfidf_vectorize(
    tokens: Iterable[Token], vocabulary: Vocabulary, idf: IdfTable
) -> SparseVector:
    """L2-normalized tf-idf vector; all-OOV input yields the empty vector."""
    counts = count_vectorize(tokens, vocabulary)
    if not counts.entries:
        return counts
    weighted = [(index, count * idf.values[index]) for index, count in counts.entries]
    norm = math.sqrt(sum(w * w for _, w in weighted))
    entries = tuple((index, weight / norm) for index, weight in weighted)
    return SparseVector(entries=entries)
