"""Multi-rater annotation sessions with an append-only event log.

A session is defined entirely by its log: register_rater, add_item, and
rate events replay into identical state, so a crash can lose at most the
event being written.  Overwrites keep the prior label in an audit trail;
nothing is ever deleted.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Union

from .corpus import Comment, RawLabel, collapse_label, comment_from_dict, record_to_dict
from .errors import (
    DuplicateRatingError,
    NoFullyRatedItemsError,
    TooFewRatersError,
    UnknownItemError,
    UnknownRaterError,
)
from .metrics import RatingMatrix, fleiss_kappa

THREE_WAY = ("genuine", "spam", "scam")
BINARY = ("genuine", "fraud")


class RaterGroup(str, enum.Enum):
    EXPERT = "expert"
    AMATEUR = "amateur"
    UNSPECIFIED = "unspecified"


@dataclass(frozen=True)
class Rater:
    id: str
    group: RaterGroup = RaterGroup.UNSPECIFIED


@dataclass(frozen=True)
class AuditEntry:
    """Record of an overwritten rating; the superseded label is kept."""

    rater_id: str
    item_id: str
    previous: RawLabel


def _timestamp() -> str:
    return datetime.now(timezone.utc).isoformat()


class AnnotationSession:
    """Raters, items, and their ratings, optionally persisted as JSONL."""

    def __init__(self, log_path: Union[str, Path, None] = None):
        self.items: list[Comment] = []
        self.raters: dict[str, Rater] = {}
        self.ratings: dict[tuple[str, str], RawLabel] = {}
        self.audit: list[AuditEntry] = []
        self.created_at = _timestamp()
        self._item_ids: set[str] = set()
        self._log_path = Path(log_path) if log_path is not None else None

    # -- persistence ---------------------------------------------------------

    @classmethod
    def open(cls, log_path: Union[str, Path]) -> "AnnotationSession":
        """Rebuild a session by replaying its event log."""
        session = cls.__new__(cls)
        session.items = []
        session.raters = {}
        session.ratings = {}
        session.audit = []
        session.created_at = _timestamp()
        session._item_ids = set()
        session._log_path = None
        path = Path(log_path)
        if path.exists():
            with open(path, "r", encoding="utf-8") as handle:
                for line in handle:
                    line = line.strip()
                    if line:
                        session._apply(json.loads(line))
        session._log_path = path
        return session

    def _append(self, event: dict) -> None:
        if self._log_path is None:
            return
        with open(self._log_path, "a", encoding="utf-8") as handle:
            handle.write(json.dumps(event, ensure_ascii=False) + "\n")
            handle.flush()

    def _apply(self, event: dict) -> None:
        kind = event["event"]
        if kind == "register_rater":
            self.raters[event["id"]] = Rater(
                id=event["id"], group=RaterGroup(event["group"])
            )
        elif kind == "add_item":
            comment = comment_from_dict(event["comment"])
            self.items.append(comment)
            self._item_ids.add(comment.id)
        elif kind == "rate":
            key = (event["rater"], event["item"])
            if key in self.ratings:
                self.audit.append(
                    AuditEntry(
                        rater_id=key[0], item_id=key[1], previous=self.ratings[key]
                    )
                )
            self.ratings[key] = RawLabel(event["label"])
        else:
            raise ValueError(f"unknown session event: {kind!r}")

    # -- mutations -----------------------------------------------------------

    def register_rater(self, rater: Rater) -> None:
        if rater.id in self.raters:
            if self.raters[rater.id] != rater:
                raise ValueError(f"rater {rater.id!r} already registered differently")
            return
        self.raters[rater.id] = rater
        self._append(
            {
                "event": "register_rater",
                "id": rater.id,
                "group": rater.group.value,
                "ts": _timestamp(),
            }
        )

    def add_item(self, comment: Comment) -> None:
        if comment.id in self._item_ids:
            return
        self.items.append(comment)
        self._item_ids.add(comment.id)
        self._append(
            {"event": "add_item", "comment": record_to_dict(comment), "ts": _timestamp()}
        )

    def next_item(self, rater_id: str) -> Comment | None:
        """Lowest-indexed item the rater has not rated; None when done."""
        if rater_id not in self.raters:
            raise UnknownRaterError(f"rater {rater_id!r} is not registered")
        for item in self.items:
            if (rater_id, item.id) not in self.ratings:
                return item
        return None

    def record_rating(
        self, rater_id: str, item_id: str, label: RawLabel, overwrite: bool = False
    ) -> None:
        if rater_id not in self.raters:
            raise UnknownRaterError(f"rater {rater_id!r} is not registered")
        if item_id not in self._item_ids:
            raise UnknownItemError(f"item {item_id!r} is not in this session")
        key = (rater_id, item_id)
        if key in self.ratings:
            if not overwrite:
                raise DuplicateRatingError(
                    f"rater {rater_id!r} already rated item {item_id!r}"
                )
            self.audit.append(
                AuditEntry(rater_id=rater_id, item_id=item_id, previous=self.ratings[key])
            )
        self.ratings[key] = label
        self._append(
            {
                "event": "rate",
                "rater": rater_id,
                "item": item_id,
                "label": label.value,
                "ts": _timestamp(),
            }
        )


@dataclass(frozen=True)
class MatrixBuild:
    """A rating matrix plus the items that had to be left out of it."""

    matrix: RatingMatrix
    item_ids: tuple[str, ...]
    excluded_item_ids: tuple[str, ...]
    rater_count: int


def build_rating_matrix(
    session: AnnotationSession,
    scheme: str = "three",
    rater_ids: tuple[str, ...] | None = None,
) -> MatrixBuild:
    """Counts matrix over items rated by every requested rater.

    Fleiss' formulation needs a constant number of raters per item, so
    items missing any rating from the rater set are excluded and reported
    rather than imputed.  scheme "binary" merges spam and scam counts into
    one fraud column.
    """
    if scheme not in ("three", "binary"):
        raise ValueError(f"unknown category scheme: {scheme!r}")
    raters = tuple(sorted(rater_ids)) if rater_ids is not None else tuple(sorted(session.raters))
    for rater_id in raters:
        if rater_id not in session.raters:
            raise UnknownRaterError(f"rater {rater_id!r} is not registered")
    categories = THREE_WAY if scheme == "three" else BINARY
    rows: list[tuple[int, ...]] = []
    included: list[str] = []
    excluded: list[str] = []
    for item in session.items:
        labels = []
        complete = True
        for rater_id in raters:
            label = session.ratings.get((rater_id, item.id))
            if label is None:
                complete = False
                break
            labels.append(label)
        if not complete:
            excluded.append(item.id)
            continue
        counts = [0] * len(categories)
        for label in labels:
            if scheme == "three":
                counts[categories.index(label.value)] += 1
            else:
                counts[int(collapse_label(label))] += 1
        rows.append(tuple(counts))
        included.append(item.id)
    if not rows:
        raise NoFullyRatedItemsError(
            f"no item is rated by all {len(raters)} requested raters"
        )
    matrix = RatingMatrix(counts=tuple(rows), categories=tuple(categories))
    return MatrixBuild(
        matrix=matrix,
        item_ids=tuple(included),
        excluded_item_ids=tuple(excluded),
        rater_count=len(raters),
    )


@dataclass(frozen=True)
class GroupAgreement:
    kappa: float
    item_count: int
    rater_count: int


def agreement_by_group(
    session: AnnotationSession, scheme: str = "three"
) -> dict[RaterGroup, GroupAgreement]:
    """Fleiss' kappa per rater group (experts vs. amateurs vs. unspecified).

    Every present group must have at least two raters; a one-rater group
    has no pairwise agreement to measure and raises TooFewRaters.
    """
    groups: dict[RaterGroup, list[str]] = {}
    for rater in session.raters.values():
        groups.setdefault(rater.group, []).append(rater.id)
    out: dict[RaterGroup, GroupAgreement] = {}
    for group in sorted(groups, key=lambda g: g.value):
        members = groups[group]
        if len(members) < 2:
            raise TooFewRatersError(
                f"group {group.value!r} has {len(members)} rater(s); need at least 2"
            )
        build = build_rating_matrix(session, scheme=scheme, rater_ids=tuple(members))
        out[group] = GroupAgreement(
            kappa=fleiss_kappa(build.matrix),
            item_count=build.matrix.n_items,
            rater_count=build.rater_count,
        )
    return out
