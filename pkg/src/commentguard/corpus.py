"""Comment records, JSONL corpus ingestion, and deterministic dataset splits.

A corpus is a JSONL stream with one comment object per line.  Parsing is
salvage-oriented: bad lines are recorded with a reason and a line number
instead of aborting the whole file.  Splitting is seeded and stratified by
default so that every run over the same corpus reproduces the same parts.
"""

from __future__ import annotations

import enum
import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import IO, Iterable, Iterator, Sequence, Union

from .errors import DegenerateSplitError, EmptyInputError


class RawLabel(str, enum.Enum):
    """Three-way annotation label as it appears on the wire."""

    GENUINE = "genuine"
    SPAM = "spam"
    SCAM = "scam"


class BinaryLabel(enum.IntEnum):
    """Collapsed two-way label: genuine encodes as 0, fraud as 1."""

    GENUINE = 0
    FRAUD = 1

    @property
    def wire(self) -> str:
        return self.name.lower()

    @classmethod
    def from_wire(cls, value: str) -> "BinaryLabel":
        try:
            return cls[value.upper()]
        except KeyError:
            raise ValueError(f"unknown binary label: {value!r}") from None


def collapse_label(raw: RawLabel) -> BinaryLabel:
    """Fold the three-way label into the binary scheme (spam and scam are fraud)."""
    if raw is RawLabel.GENUINE:
        return BinaryLabel.GENUINE
    return BinaryLabel.FRAUD


@dataclass(frozen=True)
class Comment:
    """One comment record.  Unknown wire fields ride along in ``extra``."""

    id: str
    text: str
    post_id: str | None = None
    author: str | None = None
    created_at: str | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not isinstance(self.id, str) or not self.id:
            raise ValueError("comment id must be a non-empty string")
        if not isinstance(self.text, str) or not self.text.strip():
            raise ValueError("comment text must be non-empty after trimming")


@dataclass(frozen=True)
class LabeledComment:
    """A comment with its raw annotation; the binary view is derived."""

    comment: Comment
    raw: RawLabel

    @property
    def binary(self) -> BinaryLabel:
        return collapse_label(self.raw)


class RejectReason(str, enum.Enum):
    MALFORMED_LINE = "malformed_line"
    MISSING_FIELD = "missing_field"
    UNKNOWN_LABEL = "unknown_label"
    DUPLICATE_ID = "duplicate_id"


@dataclass(frozen=True)
class RejectedLine:
    line_number: int
    reason: RejectReason
    detail: str


@dataclass
class ParseResult:
    """Salvaged records plus a reject log; blank lines count for line numbers."""

    records: list[Union[Comment, LabeledComment]]
    rejected: list[RejectedLine]

    @property
    def labeled(self) -> list[LabeledComment]:
        return [r for r in self.records if isinstance(r, LabeledComment)]

    @property
    def comments(self) -> list[Comment]:
        return [r.comment if isinstance(r, LabeledComment) else r for r in self.records]


_KNOWN_FIELDS = ("id", "post_id", "author", "text", "label", "created_at")
_RAW_LABEL_VALUES = {label.value for label in RawLabel}


def _record_from_object(obj: dict) -> Union[Comment, LabeledComment]:
    """Build a record from a decoded JSON object.  Raises on contract breaks."""
    if "id" not in obj:
        raise _FieldError("missing field: id")
    if "text" not in obj:
        raise _FieldError("missing field: text")
    extra = {k: v for k, v in obj.items() if k not in _KNOWN_FIELDS}
    try:
        comment = Comment(
            id=obj["id"],
            text=obj["text"],
            post_id=_optional_str(obj, "post_id"),
            author=_optional_str(obj, "author"),
            created_at=_optional_str(obj, "created_at"),
            extra=extra,
        )
    except ValueError as exc:
        raise _FieldError(str(exc)) from None
    label = obj.get("label")
    if label is None:
        return comment
    if not isinstance(label, str) or label not in _RAW_LABEL_VALUES:
        raise _LabelError(f"unknown label: {label!r}")
    return LabeledComment(comment=comment, raw=RawLabel(label))


class _FieldError(ValueError):
    pass


class _LabelError(ValueError):
    pass


def _optional_str(obj: dict, key: str) -> str | None:
    value = obj.get(key)
    if value is None:
        return None
    if not isinstance(value, str):
        raise _FieldError(f"field {key} must be a string")
    return value


def parse_corpus(source: Union[IO[bytes], IO[str], Iterable[str], Iterable[bytes]]) -> ParseResult:
    """Parse a JSONL stream of comments, keeping good lines and logging bad ones.

    Line numbers are 1-based and count blank lines, which are skipped
    silently.  The first record wins on duplicate ids.
    """
    records: list[Union[Comment, LabeledComment]] = []
    rejected: list[RejectedLine] = []
    seen_ids: set[str] = set()
    for line_number, raw_line in enumerate(source, start=1):
        if isinstance(raw_line, bytes):
            raw_line = raw_line.decode("utf-8")
        line = raw_line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            rejected.append(RejectedLine(line_number, RejectReason.MALFORMED_LINE, str(exc)))
            continue
        if not isinstance(obj, dict):
            rejected.append(
                RejectedLine(line_number, RejectReason.MALFORMED_LINE, "line is not a JSON object")
            )
            continue
        try:
            record = _record_from_object(obj)
        except _LabelError as exc:
            rejected.append(RejectedLine(line_number, RejectReason.UNKNOWN_LABEL, str(exc)))
            continue
        except _FieldError as exc:
            rejected.append(RejectedLine(line_number, RejectReason.MISSING_FIELD, str(exc)))
            continue
        comment_id = record.comment.id if isinstance(record, LabeledComment) else record.id
        if comment_id in seen_ids:
            rejected.append(
                RejectedLine(line_number, RejectReason.DUPLICATE_ID, f"duplicate id: {comment_id}")
            )
            continue
        seen_ids.add(comment_id)
        records.append(record)
    return ParseResult(records=records, rejected=rejected)


def load_corpus(path: Union[str, Path]) -> ParseResult:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_corpus(handle)


def comment_from_dict(data: dict) -> Comment:
    """Rebuild a Comment from its wire dict, ignoring any label field."""
    record = _record_from_object({k: v for k, v in data.items() if k != "label"})
    assert isinstance(record, Comment)
    return record


def record_to_dict(record: Union[Comment, LabeledComment]) -> dict:
    """Wire-shaped dict for one record; known fields first, extras after."""
    if isinstance(record, LabeledComment):
        comment, label = record.comment, record.raw.value
    else:
        comment, label = record, None
    out: dict = {"id": comment.id}
    if comment.post_id is not None:
        out["post_id"] = comment.post_id
    if comment.author is not None:
        out["author"] = comment.author
    out["text"] = comment.text
    if label is not None:
        out["label"] = label
    if comment.created_at is not None:
        out["created_at"] = comment.created_at
    out.update(comment.extra)
    return out


def dump_corpus(records: Iterable[Union[Comment, LabeledComment]]) -> str:
    lines = [json.dumps(record_to_dict(r), ensure_ascii=False) for r in records]
    return "".join(line + "\n" for line in lines)


def save_corpus(records: Iterable[Union[Comment, LabeledComment]], path: Union[str, Path]) -> None:
    Path(path).write_text(dump_corpus(records), encoding="utf-8")


@dataclass(frozen=True)
class SplitSpec:
    """Fractions for train/val/test plus the seed that fixes the shuffle."""

    train_fraction: float = 0.8
    val_fraction: float = 0.1
    test_fraction: float = 0.1
    seed: int = 42
    stratified: bool = True

    def __post_init__(self) -> None:
        for name in ("train_fraction", "val_fraction", "test_fraction"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise ValueError(f"{name} must lie strictly between 0 and 1")
        total = self.train_fraction + self.val_fraction + self.test_fraction
        if abs(total - 1.0) > 1e-9:
            raise ValueError("split fractions must sum to 1")


@dataclass(frozen=True)
class DatasetSplit:
    train: tuple[LabeledComment, ...]
    val: tuple[LabeledComment, ...]
    test: tuple[LabeledComment, ...]


def split_sizes(n: int, spec: SplitSpec) -> tuple[int, int, int]:
    """Part sizes: floored train and val fractions, remainder to test.

    A tiny epsilon guards the floor against float artifacts such as
    0.8 * 345 = 275.99999999999997.
    """
    n_train = math.floor(spec.train_fraction * n + 1e-9)
    n_val = math.floor(spec.val_fraction * n + 1e-9)
    n_test = n - n_train - n_val
    return n_train, n_val, n_test


def _allocate_per_class(
    class_sizes: dict[BinaryLabel, int], part_sizes: tuple[int, int, int], n: int
) -> dict[BinaryLabel, list[int]]:
    """Largest-remainder allocation of each class across the three parts.

    Exact quotas n_c * n_p / n are floored, then part deficits are filled in
    order of descending fractional remainder.  Ties prefer the fraud class so
    the minority class is never starved, then fall back to class value order.
    """
    floors: dict[BinaryLabel, list[int]] = {}
    remainders: dict[BinaryLabel, list[Fraction]] = {}
    for cls, n_c in class_sizes.items():
        floors[cls] = []
        remainders[cls] = []
        for n_p in part_sizes:
            quota = Fraction(n_c * n_p, n)
            whole = math.floor(quota)
            floors[cls].append(whole)
            remainders[cls].append(quota - whole)
    for part_index, n_p in enumerate(part_sizes):
        deficit = n_p - sum(floors[cls][part_index] for cls in class_sizes)
        candidates = sorted(
            class_sizes,
            key=lambda cls: (-remainders[cls][part_index], -cls.value),
        )
        for cls in candidates:
            if deficit == 0:
                break
            assigned = sum(floors[cls])
            if assigned < class_sizes[cls]:
                floors[cls][part_index] += 1
                deficit -= 1
    return floors


def split_dataset(items: Sequence[LabeledComment], spec: SplitSpec) -> DatasetSplit:
    """Partition items into train/val/test deterministically.

    Stratified mode shuffles each class separately with a single seeded RNG
    and fills parts per class by largest-remainder quota, keeping each part's
    fraud share within one item of the corpus share.  Output order inside a
    part follows the original corpus order.
    """
    if not items:
        raise EmptyInputError("cannot split an empty dataset")
    n = len(items)
    part_sizes = split_sizes(n, spec)
    for size, fraction in zip(part_sizes, (spec.train_fraction, spec.val_fraction, spec.test_fraction)):
        if size == 0 and fraction > 0:
            raise DegenerateSplitError(
                f"split of {n} items leaves a part empty (sizes {part_sizes})"
            )
    rng = random.Random(spec.seed)
    assignments: list[list[int]] = [[], [], []]
    if spec.stratified:
        by_class: dict[BinaryLabel, list[int]] = {}
        for index, item in enumerate(items):
            by_class.setdefault(item.binary, []).append(index)
        class_sizes = {cls: len(indices) for cls, indices in by_class.items()}
        allocation = _allocate_per_class(class_sizes, part_sizes, n)
        for cls in sorted(by_class, key=lambda c: -c.value):
            indices = list(by_class[cls])
            rng.shuffle(indices)
            cursor = 0
            for part_index, count in enumerate(allocation[cls]):
                assignments[part_index].extend(indices[cursor : cursor + count])
                cursor += count
    else:
        indices = list(range(n))
        rng.shuffle(indices)
        cursor = 0
        for part_index, count in enumerate(part_sizes):
            assignments[part_index].extend(indices[cursor : cursor + count])
            cursor += count
    parts = [tuple(items[i] for i in sorted(chunk)) for chunk in assignments]
    return DatasetSplit(train=parts[0], val=parts[1], test=parts[2])
