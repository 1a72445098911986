"""Shared builders for test data."""

from __future__ import annotations

import random

from commentguard.corpus import Comment, LabeledComment, RawLabel

_FRAUD_PHRASES = [
    "dm me for guaranteed profit",
    "invest now double your money fast",
    "click my bio for free bitcoin giveaway",
    "send $100 get $500 back instantly",
    "whatsapp me for forex trading signals",
    "earn passive income join my telegram",
]

_GENUINE_PHRASES = [
    "love this photo so much",
    "congrats on the launch friend",
    "this recipe looks amazing thanks",
    "great shot where was this taken",
    "haha this made my day",
    "beautiful colors in this one",
]


def make_comment(cid: str, text: str) -> Comment:
    return Comment(id=cid, text=text)


def make_labeled(cid: str, text: str, label: RawLabel) -> LabeledComment:
    return LabeledComment(comment=Comment(id=cid, text=text), raw=label)


def synthetic_corpus(
    n_fraud: int, n_genuine: int, seed: int = 7, spam_share: float = 0.5
) -> list[LabeledComment]:
    """Separable labeled corpus: fraud and genuine texts draw from disjoint
    phrase pools plus a little shared filler."""
    rng = random.Random(seed)
    items: list[LabeledComment] = []
    for i in range(n_fraud):
        phrase = rng.choice(_FRAUD_PHRASES)
        filler = rng.choice(["wow", "yes", "ok", ""])
        label = RawLabel.SPAM if rng.random() < spam_share else RawLabel.SCAM
        items.append(make_labeled(f"f{i}", f"{phrase} {filler}".strip(), label))
    for i in range(n_genuine):
        phrase = rng.choice(_GENUINE_PHRASES)
        filler = rng.choice(["wow", "yes", "ok", ""])
        items.append(make_labeled(f"g{i}", f"{phrase} {filler}".strip(), RawLabel.GENUINE))
    rng.shuffle(items)
    return items
