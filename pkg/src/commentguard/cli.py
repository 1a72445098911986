"""Command-line entry point.

Subcommands cover the whole workflow: train a model from a JSONL corpus,
evaluate or compare models (optionally against a zero-shot chat backend),
serve verdicts over HTTP, run annotation sessions, compute agreement, and
audit per-post filter confusion matrices.

Exit codes: 0 success, 1 operational error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from . import annotation as annotation_mod
from .classifiers import (
    KIND_DECISION_TREE,
    KIND_LOGISTIC_REGRESSION,
    KIND_NAIVE_BAYES,
    KIND_RANDOM_FOREST,
    ClassifierModel,
    TrainConfig,
    load_model,
    predict,
    save_model,
    select_threshold,
    train_from_comments,
)
from .corpus import LabeledComment, RawLabel, SplitSpec, load_corpus, split_dataset
from .errors import CommentGuardError
from .llm_backend import (
    HttpChatTransport,
    LlmConfig,
    ReplayTransport,
    evaluate_remote,
)
from .metrics import (
    ConfusionMatrix,
    MetricSet,
    confusion,
    derive_metrics,
    render_filter_audit,
    render_report,
    roc_auc,
)

MODEL_ALIASES = {
    "nb": KIND_NAIVE_BAYES,
    "lr": KIND_LOGISTIC_REGRESSION,
    "tree": KIND_DECISION_TREE,
    "forest": KIND_RANDOM_FOREST,
}


def _parse_split(text: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise ValueError("--split expects three comma-separated fractions")
    train, val, test = (float(p) for p in parts)
    return train, val, test


def _split_spec(args: argparse.Namespace) -> SplitSpec:
    train, val, test = _parse_split(args.split)
    return SplitSpec(
        train_fraction=train,
        val_fraction=val,
        test_fraction=test,
        seed=args.seed,
        stratified=not args.no_stratify,
    )


def _load_labeled(path: str) -> list[LabeledComment]:
    result = load_corpus(path)
    for reject in result.rejected:
        print(
            f"warning: line {reject.line_number} rejected "
            f"({reject.reason.value}): {reject.detail}",
            file=sys.stderr,
        )
    labeled = result.labeled
    if not labeled:
        raise CommentGuardError(f"corpus {path} contains no labeled comments")
    return labeled


def _select_part(labeled: list[LabeledComment], args: argparse.Namespace) -> list[LabeledComment]:
    if args.split_part == "all":
        return labeled
    split = split_dataset(labeled, _split_spec(args))
    return list(getattr(split, args.split_part))


def _evaluate_model(model: ClassifierModel, items: Sequence[LabeledComment]) -> MetricSet:
    predictions = [predict(model, item.comment.text) for item in items]
    predicted = [p.label for p in predictions]
    gold = [item.binary for item in items]
    matrix = confusion(predicted, gold)
    auc = None
    if len(set(gold)) == 2:
        auc = roc_auc([p.score for p in predictions], gold)
    return derive_metrics(matrix, roc_auc=auc)


def _train_config(args: argparse.Namespace) -> TrainConfig:
    return TrainConfig(
        learning_rate=args.learning_rate,
        epochs=args.epochs,
        l2=args.l2,
        alpha=args.alpha,
        max_depth=args.max_depth,
        min_leaf=args.min_leaf,
        n_trees=args.n_trees,
        feature_subsample=args.feature_subsample,
        bootstrap=not args.no_bootstrap,
        seed=args.seed,
    )


def _cmd_train(args: argparse.Namespace) -> int:
    labeled = _load_labeled(args.corpus)
    split = split_dataset(labeled, _split_spec(args))
    kind = MODEL_ALIASES[args.model]
    model = train_from_comments(
        kind,
        list(split.train),
        _train_config(args),
        min_df=args.min_df,
        max_size=args.max_vocab,
    )
    if args.tune_threshold:
        scores = [predict(model, item.comment.text).score for item in split.val]
        gold = [item.binary for item in split.val]
        model.threshold = select_threshold(scores, gold)
        print(f"threshold tuned on validation part: {model.threshold}")
    save_model(model, args.out)
    print(
        f"trained {kind} on {len(split.train)} items "
        f"(val {len(split.val)}, test {len(split.test)}), "
        f"vocabulary {len(model.vocabulary)} terms -> {args.out}"
    )
    return 0


def _write_csv(report_csv: str, path: str | None) -> None:
    if path:
        Path(path).write_text(report_csv, encoding="utf-8")


def _cmd_eval(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    labeled = _load_labeled(args.corpus)
    items = _select_part(labeled, args)
    metrics = _evaluate_model(model, items)
    report = render_report([(model.name or model.kind, metrics)])
    print(report.text, end="")
    _write_csv(report.csv, args.csv)
    return 0


def _llm_rows(
    args: argparse.Namespace, items: Sequence[LabeledComment]
) -> tuple[list[tuple[str, MetricSet]], list[str]]:
    spec = json.loads(Path(args.llm).read_text(encoding="utf-8"))
    if not isinstance(spec, dict):
        raise CommentGuardError("llm config must be a JSON object")
    transport_spec = spec.pop("transport", {"kind": "http"})
    cfg = LlmConfig(**spec)
    kind = transport_spec.get("kind", "http")
    if kind == "replay":
        transport = ReplayTransport(transport_spec["path"])
    elif kind == "http":
        transport = HttpChatTransport(cfg)
    else:
        raise CommentGuardError(f"unknown llm transport kind: {kind!r}")
    rows: list[tuple[str, MetricSet]] = []
    notes: list[str] = []
    for run in range(1, args.runs + 1):
        evaluation = evaluate_remote(list(items), cfg, transport)
        name = cfg.model_name if args.runs == 1 else f"{cfg.model_name} (run {run})"
        rows.append((name, evaluation.metrics))
        if evaluation.unmappable:
            notes.append(f"{name}: {evaluation.unmappable} unmappable replies scored genuine")
    return rows, notes


def _cmd_compare(args: argparse.Namespace) -> int:
    if not args.models and not args.llm:
        raise CommentGuardError("compare needs --models and/or --llm")
    labeled = _load_labeled(args.corpus)
    items = _select_part(labeled, args)
    rows: list[tuple[str, MetricSet]] = []
    notes: list[str] = []
    if args.models:
        for path in args.models.split(","):
            model = load_model(path.strip())
            rows.append((model.name or model.kind, _evaluate_model(model, items)))
    if args.llm:
        llm_rows, llm_notes = _llm_rows(args, items)
        rows.extend(llm_rows)
        notes.extend(llm_notes)
    report = render_report(rows)
    print(report.text, end="")
    for note in notes:
        print(note)
    _write_csv(report.csv, args.csv)
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import ModelHandle, ServiceConfig, create_app, load_service_config

    config = load_service_config(args.config)
    overrides: dict = {}
    if args.host is not None:
        overrides["host"] = args.host
    if args.port is not None:
        overrides["port"] = args.port
    if args.report_store is not None:
        overrides["report_store_path"] = args.report_store
    if args.no_rate_limit:
        overrides["rate_limit_enabled"] = False
    if overrides:
        config = ServiceConfig(
            **{**config.__dict__, **overrides}
        )
    model = load_model(args.model)
    app = create_app(ModelHandle.from_model(model), config)
    print(f"serving model {model.name!r} ({model.kind}) on {config.host}:{config.port}")
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
    return 0


_PROMPT = "label [g]enuine / [s]pam / s[c]am, or [q]uit: "
_LETTER_LABELS = {
    "g": RawLabel.GENUINE,
    "genuine": RawLabel.GENUINE,
    "s": RawLabel.SPAM,
    "spam": RawLabel.SPAM,
    "c": RawLabel.SCAM,
    "scam": RawLabel.SCAM,
}


def _cmd_annotate(args: argparse.Namespace) -> int:
    session = annotation_mod.AnnotationSession.open(args.session)
    rater = annotation_mod.Rater(id=args.rater, group=annotation_mod.RaterGroup(args.group))
    session.register_rater(rater)
    if args.items:
        result = load_corpus(args.items)
        for comment in result.comments:
            session.add_item(comment)
    rated = 0
    while True:
        item = session.next_item(args.rater)
        if item is None:
            print("all items rated")
            break
        print(f"[{item.id}] {item.text}")
        try:
            answer = input(_PROMPT).strip().lower()
        except EOFError:
            break
        if answer == "q":
            break
        label = _LETTER_LABELS.get(answer)
        if label is None:
            print(f"unrecognized answer {answer!r}", file=sys.stderr)
            continue
        session.record_rating(args.rater, item.id, label)
        rated += 1
    print(f"recorded {rated} ratings for rater {args.rater!r}")
    return 0


def _cmd_kappa(args: argparse.Namespace) -> int:
    from .metrics import fleiss_kappa, round4

    session = annotation_mod.AnnotationSession.open(args.session)
    build = annotation_mod.build_rating_matrix(session, scheme=args.scheme)
    kappa = fleiss_kappa(build.matrix)
    print(
        f"fleiss kappa ({args.scheme}): {round4(kappa)}  "
        f"items {build.matrix.n_items}  raters {build.rater_count}  "
        f"excluded {len(build.excluded_item_ids)}"
    )
    if args.by_group:
        for group, result in annotation_mod.agreement_by_group(
            session, scheme=args.scheme
        ).items():
            print(
                f"  group {group.value}: kappa {round4(result.kappa)}  "
                f"items {result.item_count}  raters {result.rater_count}"
            )
    return 0


def _cmd_audit_filter(args: argparse.Namespace) -> int:
    matrices = []
    with open(args.matrices, "r", encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            try:
                matrices.append(
                    ConfusionMatrix(
                        tp=record["tp"], fp=record["fp"], fn=record["fn"], tn=record["tn"]
                    )
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise CommentGuardError(
                    f"bad matrix on line {line_number}: {exc}"
                ) from exc
    print(render_filter_audit(matrices), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="commentguard",
        description="Train, evaluate, serve, and audit comment-fraud classifiers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_split_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--split", default="0.8,0.1,0.1", help="train,val,test fractions")
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--no-stratify", action="store_true")

    train = sub.add_parser("train", help="train a native model from a labeled corpus")
    train.add_argument("--model", choices=sorted(MODEL_ALIASES), required=True)
    train.add_argument("--corpus", required=True)
    train.add_argument("--out", required=True)
    add_split_flags(train)
    train.add_argument("--min-df", type=int, default=2)
    train.add_argument("--max-vocab", type=int, default=50_000)
    train.add_argument("--learning-rate", type=float, default=0.1)
    train.add_argument("--epochs", type=int, default=200)
    train.add_argument("--l2", type=float, default=1e-4)
    train.add_argument("--alpha", type=float, default=1.0)
    train.add_argument("--max-depth", type=int, default=12)
    train.add_argument("--min-leaf", type=int, default=2)
    train.add_argument("--n-trees", type=int, default=100)
    train.add_argument("--feature-subsample", type=float, default=None)
    train.add_argument("--no-bootstrap", action="store_true")
    train.add_argument(
        "--tune-threshold",
        action="store_true",
        help="pick the F1-maximizing threshold on the validation part",
    )
    train.set_defaults(func=_cmd_train)

    evaluate = sub.add_parser("eval", help="evaluate a saved model on a corpus part")
    evaluate.add_argument("--model", required=True)
    evaluate.add_argument("--corpus", required=True)
    evaluate.add_argument(
        "--split-part", choices=("train", "val", "test", "all"), default="test"
    )
    add_split_flags(evaluate)
    evaluate.add_argument("--csv", help="also write the CSV report here")
    evaluate.set_defaults(func=_cmd_eval)

    compare = sub.add_parser("compare", help="compare saved models and/or an LLM backend")
    compare.add_argument("--models", help="comma-separated model file paths")
    compare.add_argument("--corpus", required=True)
    compare.add_argument(
        "--split-part", choices=("train", "val", "test", "all"), default="test"
    )
    add_split_flags(compare)
    compare.add_argument("--llm", help="LLM backend config JSON path")
    compare.add_argument(
        "--runs", type=int, default=1, help="evaluation runs per LLM backend"
    )
    compare.add_argument("--csv", help="also write the CSV report here")
    compare.set_defaults(func=_cmd_compare)

    serve = sub.add_parser("serve", help="serve a model over HTTP")
    serve.add_argument("--model", required=True)
    serve.add_argument("--config", help="service config JSON path")
    serve.add_argument("--host")
    serve.add_argument("--port", type=int)
    serve.add_argument("--report-store")
    serve.add_argument("--no-rate-limit", action="store_true")
    serve.set_defaults(func=_cmd_serve)

    annotate = sub.add_parser("annotate", help="rate items in an annotation session")
    annotate.add_argument("--session", required=True)
    annotate.add_argument("--rater", required=True)
    annotate.add_argument(
        "--group", choices=("expert", "amateur", "unspecified"), default="unspecified"
    )
    annotate.add_argument("--items", help="corpus JSONL whose comments seed the session")
    annotate.set_defaults(func=_cmd_annotate)

    kappa = sub.add_parser("kappa", help="agreement statistics for a session")
    kappa.add_argument("--session", required=True)
    kappa.add_argument("--scheme", choices=("three", "binary"), default="three")
    kappa.add_argument("--by-group", action="store_true")
    kappa.set_defaults(func=_cmd_kappa)

    audit = sub.add_parser(
        "audit-filter", help="aggregate per-post confusion matrices from JSONL"
    )
    audit.add_argument("--matrices", required=True)
    audit.set_defaults(func=_cmd_audit_filter)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CommentGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename or exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
