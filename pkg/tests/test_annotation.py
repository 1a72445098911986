from __future__ import annotations

import pytest

from commentguard.annotation import (
    AnnotationSession,
    Rater,
    RaterGroup,
    agreement_by_group,
    build_rating_matrix,
)
from commentguard.corpus import Comment, RawLabel
from commentguard.errors import (
    DuplicateRatingError,
    NoFullyRatedItemsError,
    TooFewRatersError,
    UnknownItemError,
    UnknownRaterError,
)
from commentguard.metrics import fleiss_kappa

from oracles import fleiss_kappa_reference


def _session_with(n_items: int = 3, raters: tuple[Rater, ...] = ()) -> AnnotationSession:
    session = AnnotationSession()
    for rater in raters:
        session.register_rater(rater)
    for i in range(n_items):
        session.add_item(Comment(id=f"c{i}", text=f"comment number {i}"))
    return session


def test_register_rater_is_idempotent_for_identical_data():
    session = AnnotationSession()
    rater = Rater(id="r1", group=RaterGroup.EXPERT)
    session.register_rater(rater)
    session.register_rater(rater)
    assert list(session.raters) == ["r1"]
    with pytest.raises(ValueError):
        session.register_rater(Rater(id="r1", group=RaterGroup.AMATEUR))


def test_add_item_deduplicates_by_id():
    session = _session_with(0)
    session.add_item(Comment(id="x", text="hello"))
    session.add_item(Comment(id="x", text="hello"))
    assert len(session.items) == 1


def test_next_item_walks_unrated_items_in_order():
    session = _session_with(3, raters=(Rater(id="r1"),))
    assert session.next_item("r1").id == "c0"
    session.record_rating("r1", "c0", RawLabel.GENUINE)
    assert session.next_item("r1").id == "c1"
    session.record_rating("r1", "c1", RawLabel.SPAM)
    session.record_rating("r1", "c2", RawLabel.SCAM)
    assert session.next_item("r1") is None


def test_next_item_unknown_rater():
    session = _session_with(1)
    with pytest.raises(UnknownRaterError):
        session.next_item("ghost")


def test_record_rating_validates_rater_and_item():
    session = _session_with(1, raters=(Rater(id="r1"),))
    with pytest.raises(UnknownRaterError):
        session.record_rating("ghost", "c0", RawLabel.SPAM)
    with pytest.raises(UnknownItemError):
        session.record_rating("r1", "missing", RawLabel.SPAM)


def test_duplicate_rating_needs_overwrite_flag():
    session = _session_with(1, raters=(Rater(id="r1"),))
    session.record_rating("r1", "c0", RawLabel.SPAM)
    with pytest.raises(DuplicateRatingError):
        session.record_rating("r1", "c0", RawLabel.SCAM)
    session.record_rating("r1", "c0", RawLabel.SCAM, overwrite=True)
    assert session.ratings[("r1", "c0")] is RawLabel.SCAM


def test_overwrite_leaves_audit_trail():
    session = _session_with(1, raters=(Rater(id="r1"),))
    session.record_rating("r1", "c0", RawLabel.SPAM)
    session.record_rating("r1", "c0", RawLabel.GENUINE, overwrite=True)
    assert len(session.audit) == 1
    entry = session.audit[0]
    assert entry.rater_id == "r1"
    assert entry.item_id == "c0"
    assert entry.previous is RawLabel.SPAM


def test_session_log_round_trip(tmp_path):
    path = tmp_path / "session.jsonl"
    session = AnnotationSession(log_path=path)
    session.register_rater(Rater(id="r1", group=RaterGroup.EXPERT))
    session.register_rater(Rater(id="r2", group=RaterGroup.AMATEUR))
    session.add_item(Comment(id="a", text="great shot", post_id="p1"))
    session.add_item(Comment(id="b", text="dm me for $$$"))
    session.record_rating("r1", "a", RawLabel.GENUINE)
    session.record_rating("r2", "a", RawLabel.GENUINE)
    session.record_rating("r1", "b", RawLabel.SPAM)
    session.record_rating("r1", "b", RawLabel.SCAM, overwrite=True)

    reloaded = AnnotationSession.open(path)
    assert reloaded.items == session.items
    assert reloaded.raters == session.raters
    assert reloaded.ratings == session.ratings
    assert reloaded.audit == session.audit
    assert reloaded.items[0].post_id == "p1"


def test_reopened_session_appends_to_same_log(tmp_path):
    path = tmp_path / "session.jsonl"
    first = AnnotationSession(log_path=path)
    first.register_rater(Rater(id="r1"))
    first.add_item(Comment(id="a", text="hello"))

    second = AnnotationSession.open(path)
    second.record_rating("r1", "a", RawLabel.GENUINE)

    third = AnnotationSession.open(path)
    assert third.ratings == {("r1", "a"): RawLabel.GENUINE}


def test_open_on_missing_path_starts_empty(tmp_path):
    session = AnnotationSession.open(tmp_path / "fresh.jsonl")
    assert session.items == []
    assert session.raters == {}


def _rated_session() -> AnnotationSession:
    raters = (Rater(id="r1"), Rater(id="r2"), Rater(id="r3"))
    session = _session_with(3, raters=raters)
    votes = {
        "c0": (RawLabel.GENUINE, RawLabel.GENUINE, RawLabel.GENUINE),
        "c1": (RawLabel.SPAM, RawLabel.SPAM, RawLabel.SPAM),
        "c2": (RawLabel.GENUINE, RawLabel.SPAM, RawLabel.SCAM),
    }
    for item_id, labels in votes.items():
        for rater, label in zip(("r1", "r2", "r3"), labels):
            session.record_rating(rater, item_id, label)
    return session


def test_build_rating_matrix_three_way():
    build = build_rating_matrix(_rated_session(), scheme="three")
    assert build.matrix.counts == ((3, 0, 0), (0, 3, 0), (1, 1, 1))
    assert build.matrix.categories == ("genuine", "spam", "scam")
    assert build.item_ids == ("c0", "c1", "c2")
    assert build.excluded_item_ids == ()
    assert build.rater_count == 3


def test_build_rating_matrix_binary_merges_fraud():
    build = build_rating_matrix(_rated_session(), scheme="binary")
    assert build.matrix.counts == ((3, 0), (0, 3), (1, 2))
    assert build.matrix.categories == ("genuine", "fraud")


def test_binary_matrix_is_column_merge_of_three_way():
    session = _rated_session()
    three = build_rating_matrix(session, scheme="three").matrix
    binary = build_rating_matrix(session, scheme="binary").matrix
    for row3, row2 in zip(three.counts, binary.counts):
        assert row2 == (row3[0], row3[1] + row3[2])


def test_build_rating_matrix_excludes_partially_rated_items():
    session = _rated_session()
    session.add_item(Comment(id="c3", text="only one rating"))
    session.record_rating("r1", "c3", RawLabel.SPAM)
    build = build_rating_matrix(session)
    assert build.excluded_item_ids == ("c3",)
    assert len(build.matrix.counts) == 3


def test_build_rating_matrix_row_sums_equal_rater_count():
    build = build_rating_matrix(_rated_session())
    for row in build.matrix.counts:
        assert sum(row) == build.rater_count


def test_build_rating_matrix_no_fully_rated_items():
    session = _session_with(2, raters=(Rater(id="r1"), Rater(id="r2")))
    session.record_rating("r1", "c0", RawLabel.SPAM)
    with pytest.raises(NoFullyRatedItemsError):
        build_rating_matrix(session)


def test_build_rating_matrix_rejects_unknown_rater_subset():
    with pytest.raises(UnknownRaterError):
        build_rating_matrix(_rated_session(), rater_ids=("r1", "ghost"))


def test_build_rating_matrix_rejects_unknown_scheme():
    with pytest.raises(ValueError):
        build_rating_matrix(_rated_session(), scheme="five")


def test_session_kappa_matches_hand_value():
    build = build_rating_matrix(_rated_session())
    assert fleiss_kappa(build.matrix) == 0.4375


def test_agreement_by_group_orders_perfect_above_split():
    session = AnnotationSession()
    experts = [Rater(id=f"e{i}", group=RaterGroup.EXPERT) for i in range(3)]
    amateurs = [Rater(id=f"a{i}", group=RaterGroup.AMATEUR) for i in range(3)]
    for rater in experts + amateurs:
        session.register_rater(rater)
    for i in range(3):
        session.add_item(Comment(id=f"c{i}", text=f"item {i}"))
    labels = (RawLabel.GENUINE, RawLabel.SPAM, RawLabel.SCAM)
    for i in range(3):
        for expert in experts:
            session.record_rating(expert.id, f"c{i}", labels[i])
        # amateurs split every item three ways: zero observed agreement
        for amateur, label in zip(amateurs, labels):
            session.record_rating(amateur.id, f"c{i}", label)
    result = agreement_by_group(session)
    assert result[RaterGroup.EXPERT].kappa == 1.0
    amateur_rows = [(1, 1, 1)] * 3
    expected = fleiss_kappa_reference(amateur_rows)
    assert result[RaterGroup.AMATEUR].kappa == pytest.approx(expected, abs=1e-12)
    assert result[RaterGroup.EXPERT].kappa > result[RaterGroup.AMATEUR].kappa
    assert result[RaterGroup.EXPERT].item_count == 3
    assert result[RaterGroup.EXPERT].rater_count == 3


def test_agreement_by_group_rejects_single_rater_group():
    session = _session_with(
        1,
        raters=(
            Rater(id="e1", group=RaterGroup.EXPERT),
            Rater(id="e2", group=RaterGroup.EXPERT),
            Rater(id="solo", group=RaterGroup.AMATEUR),
        ),
    )
    for rid in ("e1", "e2", "solo"):
        session.record_rating(rid, "c0", RawLabel.GENUINE)
    with pytest.raises(TooFewRatersError):
        agreement_by_group(session)
