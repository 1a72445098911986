"""Acceptance gate: one check per headline claim the package stands behind.

Every test prints a single "ACCEPTANCE <name>: PASS/FAIL" line so a full run
doubles as a scorecard.  Checks that depend only on published score rows are
exact-tolerance replays; model-quality checks that would need the original
private corpus instead run against synthetic separable data or hand-computed
oracles.
"""

from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import numpy as np
import pytest
from fastapi.testclient import TestClient

from commentguard.classifiers import (
    TrainConfig,
    predict,
    save_model,
    train_from_comments,
    train_naive_bayes,
)
from commentguard.classifiers.linear import logistic_gradient, logistic_loss
from commentguard.corpus import BinaryLabel, SplitSpec, split_dataset, split_sizes
from commentguard.errors import UnmappableReplyError
from commentguard.llm_backend import (
    LlmConfig,
    ReplayTransport,
    chat_request,
    parse_reply,
    record_reply,
)
from commentguard.metrics import (
    ConfusionMatrix,
    MetricSet,
    RatingMatrix,
    aggregate,
    confusion,
    derive_metrics,
    f1_score,
    fleiss_kappa,
    reconstruct_confusion,
    roc_auc,
)
from commentguard.service import ModelHandle, ServiceConfig, create_app
from commentguard.textproc import build_vocabulary, count_vectorize, tokenize

from helpers import synthetic_corpus
from oracles import central_difference_gradient

G = BinaryLabel.GENUINE
F = BinaryLabel.FRAUD


def _report(name: str, ok: bool, detail: str = "") -> None:
    line = f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f" ({detail})"
    print(line)
    assert ok, f"{name}: {detail}"


# Published headline rows for the deployed Instagram filter and each compared
# model: (recall, precision, F1) as printed in the source report.
PUBLISHED_ROWS = [
    ("instagram_filter", 0.1151, 0.9836, 0.2061),
    ("decision_tree", 0.8032, 0.7692, 0.7859),
    ("random_forest", 0.8093, 0.9244, 0.8631),
    ("logistic_regression", 0.8353, 0.9163, 0.8740),
    ("gpt3_zero_shot", 0.3739, 0.3660, 0.3699),
    ("gpt4_zero_shot", 0.6348, 0.5530, 0.5911),
    ("bert_fine_tuned", 0.9213, 0.9286, 0.9249),
]


@pytest.mark.parametrize(
    "row_name,recall,precision,published_f1",
    PUBLISHED_ROWS,
    ids=[row[0] for row in PUBLISHED_ROWS],
)
def test_f1_identity_on_published_rows(row_name, recall, precision, published_f1):
    """F1 recomputed from each published (precision, recall) pair must land
    within rounding distance (half of the last printed digit) of the
    published F1."""
    derived = f1_score(precision, recall)
    deviation = abs(derived - published_f1)
    _report(
        f"f1_identity[{row_name}]",
        deviation <= 0.00005,
        f"derived {derived:.7f} vs published {published_f1:.4f}, "
        f"deviation {deviation:.7f}, tolerance 0.00005",
    )


# Per-post confusion counts from the manual audit of the deployed filter,
# in (tp, fp, fn, tn) reading.
AUDIT_MATRICES = [
    ConfusionMatrix(tp=8, fp=0, fn=9, tn=5),
    ConfusionMatrix(tp=0, fp=0, fn=32, tn=6),
    ConfusionMatrix(tp=8, fp=1, fn=50, tn=43),
    ConfusionMatrix(tp=0, fp=0, fn=32, tn=6),
]


def test_filter_audit_micro_aggregation():
    """Summing the audited per-post counts reproduces the published 11.51%
    recall; the two candidate precision readings are both printed because the
    published 98.36% figure matches tn/(tn+fp), not tp/(tp+fp)."""
    total = aggregate(AUDIT_MATRICES)
    metrics = derive_metrics(total)
    specificity = total.tn / (total.tn + total.fp)
    print(
        f"filter audit precision candidates: tp/(tp+fp) = {metrics.precision:.4f}, "
        f"tn/(tn+fp) = {specificity:.4f}"
    )
    ok = (
        total == ConfusionMatrix(tp=16, fp=1, fn=123, tn=60)
        and abs(metrics.recall - 0.1151) <= 0.00005
        and abs(metrics.precision - 0.9412) <= 0.00005
        and abs(specificity - 0.9836) <= 0.00005
    )
    _report(
        "filter_audit_aggregate",
        ok,
        f"aggregate ({total.tp},{total.fp},{total.fn},{total.tn}), "
        f"recall {metrics.recall:.6f} vs 0.1151",
    )


# Published zero-shot evaluation rows over the 345-item test part
# (115 fraud, 230 genuine): (accuracy, precision, recall, roc_auc).
ZERO_SHOT_ROWS = [
    ("gpt3_run1", 0.5747, 0.3660, 0.3739, 0.5246),
    ("gpt3_run2", 0.5689, 0.3550, 0.3565, 0.5160),
    ("gpt3_run3", 0.5660, 0.3506, 0.3522, 0.5127),
    ("gpt4_run1", 0.7068, 0.5530, 0.6348, 0.6889),
    ("gpt4_run2", 0.6328, 0.4566, 0.5261, 0.6062),
    ("gpt4_run3", 0.5704, 0.3553, 0.3522, 0.5160),
]


@pytest.mark.parametrize(
    "row_name,accuracy,precision,recall,published_auc",
    ZERO_SHOT_ROWS,
    ids=[row[0] for row in ZERO_SHOT_ROWS],
)
def test_confusion_reconstruction_of_zero_shot_rows(
    row_name, accuracy, precision, recall, published_auc
):
    """Brute-force inversion of each published (accuracy, precision, recall)
    triple into an integer confusion matrix over the known test-part class
    sizes must land within half of the last rounded digit."""
    target = MetricSet.from_precision_recall(
        precision=precision, recall=recall, accuracy=accuracy
    )
    result = reconstruct_confusion(target, n_pos=115, n_neg=230)
    m = result.matrix
    detail = (
        f"best ({m.tp},{m.fp},{m.fn},{m.tn}), "
        f"deviation {result.deviation:.6f}, tolerance 0.0005"
    )
    if row_name == "gpt4_run1":
        tpr = m.tp / 115
        tnr = m.tn / 230
        balanced = (tpr + tnr) / 2
        ok = (
            result.deviation <= 0.0005
            and m == ConfusionMatrix(tp=73, fp=59, fn=42, tn=171)
            and abs(balanced - published_auc) <= 0.0005
        )
        detail += f", balanced accuracy {balanced:.4f} vs published AUC {published_auc}"
    else:
        ok = result.deviation <= 0.0005
    _report(f"confusion_reconstruction[{row_name}]", ok, detail)


def test_split_sizes_match_published_counts():
    sizes = split_sizes(3445, SplitSpec())
    _report(
        "split_sizes",
        sizes == (2756, 344, 345),
        f"3445 at 0.8/0.1/0.1 -> {sizes}, expected (2756, 344, 345)",
    )


def test_stratified_split_preserves_class_ratio():
    """With the published corpus composition (33.4% fraud of 3,445), every
    stratified part must hold the fraud share within one item of ideal."""
    labeled = synthetic_corpus(1151, 2294, seed=23)
    split = split_dataset(labeled, SplitSpec())
    overall = Fraction(1151, 3445)
    ok = True
    details = []
    for part_name, part in (("train", split.train), ("val", split.val), ("test", split.test)):
        fraud = sum(1 for item in part if item.binary is F)
        ideal = overall * len(part)
        off = abs(Fraction(fraud) - ideal)
        details.append(f"{part_name} {fraud}/{len(part)}")
        if off > 1:
            ok = False
    _report("stratified_ratio", ok, ", ".join(details))


def test_synthetic_separable_logistic_f1():
    """Published model scores are not reproducible without the private
    corpus; the substitute check trains the native logistic model on a
    400-item separable synthetic corpus and requires held-out F1 >= 0.95."""
    labeled = synthetic_corpus(200, 200, seed=29)
    split = split_dataset(labeled, SplitSpec())
    model = train_from_comments("logistic_regression", list(split.train))
    predictions = [predict(model, item.comment.text) for item in split.test]
    matrix = confusion([p.label for p in predictions], [item.binary for item in split.test])
    metrics = derive_metrics(matrix)
    _report(
        "synthetic_lr_f1",
        metrics.f1 >= 0.95,
        f"held-out F1 {metrics.f1:.4f} on 400-item synthetic corpus, floor 0.95",
    )


def test_naive_bayes_hand_oracle():
    texts = [("buy crypto now", F), ("nice post", G), ("crypto scam dm me", F), ("love this", G)]
    docs = [tokenize(text) for text, _ in texts]
    vocabulary = build_vocabulary(docs, min_df=1)
    train = [(count_vectorize(doc, vocabulary), label) for doc, (_, label) in zip(docs, texts)]
    model = train_naive_bayes(train, TrainConfig(), vocabulary)
    score = predict(model, "crypto now").score
    expected = 1176 / 1465
    _report(
        "nb_hand_oracle",
        score == pytest.approx(expected, abs=1e-12),
        f"posterior {score!r} vs hand-computed {expected!r}",
    )


def test_logistic_gradient_check():
    rng = np.random.default_rng(17)
    worst = 0.0
    for _ in range(5):
        x = rng.normal(size=(6, 4))
        x /= np.maximum(np.linalg.norm(x, axis=1, keepdims=True), 1e-9)
        y = rng.integers(0, 2, size=6).astype(np.float64)
        w = rng.normal(scale=0.5, size=4)
        b = float(rng.normal(scale=0.5))
        grad_w, grad_b = logistic_gradient(w, b, x, y, 1e-4)
        packed = np.concatenate([w, [b]])

        def loss_at(p: np.ndarray) -> float:
            return logistic_loss(p[:-1], float(p[-1]), x, y, 1e-4)

        numeric = central_difference_gradient(loss_at, packed, h=1e-5)
        analytic = np.concatenate([grad_w, [grad_b]])
        rel = np.linalg.norm(analytic - numeric) / max(np.linalg.norm(numeric), 1e-12)
        worst = max(worst, rel)
    _report(
        "lr_gradient_check",
        worst <= 1e-4,
        f"worst relative error {worst:.2e}, tolerance 1e-4",
    )


def test_forest_training_is_bit_deterministic(tmp_path):
    labeled = synthetic_corpus(40, 40, seed=31)
    cfg = TrainConfig(n_trees=10)
    paths = []
    for run in range(2):
        model = train_from_comments("random_forest", labeled, cfg)
        path = tmp_path / f"forest-{run}.json"
        save_model(model, path)
        paths.append(path)
    identical = paths[0].read_bytes() == paths[1].read_bytes()
    _report(
        "forest_determinism",
        identical,
        "two seeded training runs must serialize to identical bytes",
    )


def test_fleiss_perfect_agreement():
    matrix = RatingMatrix(counts=((4, 0, 0), (0, 4, 0), (0, 0, 4)))
    kappa = fleiss_kappa(matrix)
    _report("fleiss_perfect", kappa == 1.0, f"kappa {kappa!r}, expected 1.0")


def test_fleiss_hand_case():
    matrix = RatingMatrix(counts=((3, 0, 0), (0, 3, 0), (1, 1, 1)))
    kappa = fleiss_kappa(matrix)
    _report("fleiss_hand_case", kappa == 0.4375, f"kappa {kappa!r}, expected exactly 0.4375")


def test_fleiss_category_permutation_invariance():
    rng = random.Random(41)
    ok = True
    detail = "100 randomized matrices"
    for trial in range(100):
        n_items = rng.randint(2, 8)
        n_raters = rng.randint(2, 6)
        counts = []
        for _ in range(n_items):
            row = [0, 0, 0]
            for _ in range(n_raters):
                row[rng.randrange(3)] += 1
            counts.append(tuple(row))
        base = fleiss_kappa(RatingMatrix(counts=tuple(counts)))
        order = [0, 1, 2]
        rng.shuffle(order)
        permuted = tuple(tuple(row[i] for i in order) for row in counts)
        shuffled = fleiss_kappa(RatingMatrix(counts=permuted))
        if shuffled != pytest.approx(base, abs=1e-12):
            ok = False
            detail = f"trial {trial}: {base!r} != {shuffled!r} after column permutation"
            break
    _report("fleiss_permutation_invariance", ok, detail)


def test_f1_lies_between_precision_and_recall():
    rng = random.Random(43)
    ok = True
    detail = "1000 randomized confusion matrices"
    for trial in range(1000):
        matrix = ConfusionMatrix(
            tp=rng.randint(1, 50),
            fp=rng.randint(0, 50),
            fn=rng.randint(0, 50),
            tn=rng.randint(1, 50),
        )
        metrics = derive_metrics(matrix)
        low = min(metrics.precision, metrics.recall) - 1e-12
        high = max(metrics.precision, metrics.recall) + 1e-12
        if not low <= metrics.f1 <= high:
            ok = False
            detail = f"trial {trial}: F1 {metrics.f1} outside [{low}, {high}]"
            break
    _report("f1_between_p_and_r", ok, detail)


def test_aggregate_matches_pooled_labels():
    rng = random.Random(47)
    matrices = []
    pooled_predicted: list[BinaryLabel] = []
    pooled_gold: list[BinaryLabel] = []
    for _ in range(6):
        predicted = [rng.choice((G, F)) for _ in range(rng.randint(5, 30))]
        gold = [rng.choice((G, F)) for _ in predicted]
        matrices.append(confusion(predicted, gold))
        pooled_predicted.extend(predicted)
        pooled_gold.extend(gold)
    combined = aggregate(matrices)
    pooled = confusion(pooled_predicted, pooled_gold)
    _report(
        "aggregate_matches_pooled",
        combined == pooled,
        f"aggregated {combined} vs pooled {pooled}",
    )


def test_roc_auc_monotone_transform_invariance():
    rng = random.Random(53)
    ok = True
    detail = "50 randomized score sets under exp/affine transforms"
    for trial in range(50):
        n = rng.randint(4, 40)
        gold = [rng.choice((G, F)) for _ in range(n)]
        if len(set(gold)) < 2:
            continue
        scores = [rng.random() for _ in range(n)]
        base = roc_auc(scores, gold)
        stretched = roc_auc([3.0 * s + 2.0 for s in scores], gold)
        curved = roc_auc([float(np.exp(s)) for s in scores], gold)
        if stretched != pytest.approx(base, abs=1e-12) or curved != pytest.approx(
            base, abs=1e-12
        ):
            ok = False
            detail = f"trial {trial}: {base} vs {stretched} / {curved}"
            break
    _report("roc_monotone_invariance", ok, detail)


def _stub_handle() -> ModelHandle:
    from commentguard.classifiers import Prediction

    def classify(text: str) -> Prediction:
        fraud = "$" in text
        return Prediction(label=F if fraud else G, score=0.9 if fraud else 0.1)

    return ModelHandle(name="stub", kind="naive_bayes", classify=classify)


def test_service_contract(tmp_path):
    config = ServiceConfig(
        report_store_path=str(tmp_path / "reports.jsonl"), rate_limit_enabled=False
    )
    client = TestClient(create_app(_stub_handle(), config))
    checks = []

    single = client.post("/scam", json={"comment": "win $500 now"})
    checks.append(
        single.status_code == 200
        and single.json() == {"label": "fraud", "score": 0.9, "model": "stub"}
    )

    batch = client.post(
        "/scam/batch", json={"comments": ["hello", "$ prize", "", "fine"]}
    )
    body = batch.json()
    checks.append(
        batch.status_code == 200
        and [r.get("label") for r in body["results"]] == ["genuine", "fraud", None, "genuine"]
        and "error" in body["results"][2]
    )

    accepted = client.post(
        "/report",
        json={"comment": "dm me", "predicted": "genuine", "reported": "fraud"},
    )
    checks.append(accepted.status_code == 202)

    # durability: a fresh app over the same store path still sees the report
    restarted = TestClient(create_app(_stub_handle(), config))
    checks.append(restarted.app.state.report_store.count() == 1)

    health = client.get("/health")
    checks.append(health.status_code == 200 and health.json()["status"] == "ok")

    _report(
        "service_contract",
        all(checks),
        f"golden checks {['ok' if c else 'FAIL' for c in checks]}",
    )


def test_service_concurrent_matches_sequential(tmp_path):
    config = ServiceConfig(
        report_store_path=str(tmp_path / "reports.jsonl"), rate_limit_enabled=False
    )
    client = TestClient(create_app(_stub_handle(), config))
    comments = [f"comment {i}" + (" $" if i % 2 else "") for i in range(64)]
    sequential = [client.post("/scam", json={"comment": c}).content for c in comments]
    with ThreadPoolExecutor(max_workers=64) as pool:
        concurrent = list(
            pool.map(lambda c: client.post("/scam", json={"comment": c}).content, comments)
        )
    _report(
        "service_concurrency",
        concurrent == sequential,
        "64-way concurrent classification must match single-threaded bytes",
    )


def test_replayed_remote_evaluation_is_reproducible(tmp_path):
    from commentguard.llm_backend import evaluate_remote

    labeled = synthetic_corpus(25, 25, seed=59)[:50]
    cfg = LlmConfig()
    fixture = tmp_path / "replies.jsonl"
    rng = random.Random(62)
    for item in labeled:
        # scripted replies agree with gold most of the time but not always,
        # so the reproducibility check is not trivially all-genuine
        if rng.random() < 0.8:
            reply = item.raw.value
        else:
            reply = rng.choice(("genuine", "spam", "scam"))
        record_reply(fixture, chat_request(item.comment.text, cfg), reply)

    transport = ReplayTransport(fixture)
    first = evaluate_remote(labeled, cfg, transport, sleep=lambda _: None)
    second = evaluate_remote(labeled, cfg, transport, sleep=lambda _: None)
    _report(
        "llm_replay_reproducible",
        first == second and first.matrix.total == 50,
        f"run one {first.matrix}, run two {second.matrix}",
    )


def test_reply_normalization_table():
    cases_ok = (
        parse_reply("Spam.") == "spam"
        and parse_reply("genuine") == "genuine"
        and parse_reply(" SCAM!! ") == "scam"
    )
    free_text_rejected = True
    for free_text in ("I cannot classify this comment", "sure, here is my answer"):
        try:
            parse_reply(free_text)
            free_text_rejected = False
        except UnmappableReplyError:
            pass
    _report(
        "llm_reply_normalization",
        cases_ok and free_text_rejected,
        "trim/lowercase/punctuation table plus free-text rejection",
    )
