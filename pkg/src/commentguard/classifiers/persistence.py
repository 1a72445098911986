"""Model file save/load.

One self-describing JSON document per model: format_version, kind,
threshold, vocabulary, idf, parameters.  Floats are serialized at full
repr precision, so a loaded model predicts bit-identically to the saved
one.  Output is deterministic: the same model always produces the same
bytes.
"""

from __future__ import annotations

import json
import math
import os
from pathlib import Path
from typing import IO, Union

from ..errors import CorruptModelError, KindMismatchError, UnsupportedVersionError
from ..textproc import IdfTable, Vocabulary
from .model import (
    ALL_KINDS,
    KIND_DECISION_TREE,
    KIND_LOGISTIC_REGRESSION,
    KIND_NAIVE_BAYES,
    KIND_RANDOM_FOREST,
    KIND_REMOTE,
    NATIVE_KINDS,
    ClassifierModel,
    DecisionTreeParameters,
    LogisticParameters,
    NaiveBayesParameters,
    RandomForestParameters,
    RemoteParameters,
)
from .tree import nodes_to_tree, tree_to_nodes

FORMAT_VERSION = "1.0"

Source = Union[str, Path, IO[str]]


def _parameters_to_dict(model: ClassifierModel) -> dict:
    params = model.parameters
    if model.kind == KIND_NAIVE_BAYES:
        return {
            "log_prior": list(params.log_prior),
            "log_likelihood": [list(row) for row in params.log_likelihood],
        }
    if model.kind == KIND_LOGISTIC_REGRESSION:
        return {"weights": list(params.weights), "bias": params.bias}
    if model.kind == KIND_DECISION_TREE:
        return {"nodes": tree_to_nodes(params.root)}
    if model.kind == KIND_RANDOM_FOREST:
        return {"trees": [tree_to_nodes(tree) for tree in params.trees]}
    return {"endpoint_url": params.endpoint_url, "timeout": params.timeout}


def model_to_document(model: ClassifierModel) -> dict:
    document: dict = {
        "format_version": FORMAT_VERSION,
        "kind": model.kind,
        "threshold": model.threshold,
        "vocabulary": list(model.vocabulary.terms) if model.vocabulary else None,
        "idf": (
            {"doc_count": model.idf.doc_count, "values": list(model.idf.values)}
            if model.idf
            else None
        ),
        "parameters": _parameters_to_dict(model),
    }
    return document


def save_model(model: ClassifierModel, sink: Source) -> None:
    # allow_nan=False turns any non-finite parameter into a hard error
    # instead of silently writing invalid JSON.
    text = json.dumps(model_to_document(model), indent=2, allow_nan=False) + "\n"
    if hasattr(sink, "write"):
        sink.write(text)
    else:
        Path(sink).write_text(text, encoding="utf-8")


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise CorruptModelError(message)


def _float_list(value: object, message: str) -> tuple[float, ...]:
    _require(isinstance(value, list), message)
    out = []
    for item in value:
        _require(isinstance(item, (int, float)) and math.isfinite(item), message)
        out.append(float(item))
    return tuple(out)


def _parameters_from_dict(kind: str, raw: object):
    _require(isinstance(raw, dict), "parameters must be an object")
    try:
        if kind == KIND_NAIVE_BAYES:
            prior = _float_list(raw["log_prior"], "log_prior must be a list of reals")
            _require(len(prior) == 2, "log_prior must have two entries")
            likelihood = raw["log_likelihood"]
            _require(
                isinstance(likelihood, list) and len(likelihood) == 2,
                "log_likelihood must have two rows",
            )
            rows = tuple(
                _float_list(row, "log_likelihood rows must be lists of reals")
                for row in likelihood
            )
            _require(len(rows[0]) == len(rows[1]), "log_likelihood rows must align")
            return NaiveBayesParameters(log_prior=(prior[0], prior[1]), log_likelihood=rows)
        if kind == KIND_LOGISTIC_REGRESSION:
            weights = _float_list(raw["weights"], "weights must be a list of reals")
            bias = raw["bias"]
            _require(
                isinstance(bias, (int, float)) and math.isfinite(bias),
                "bias must be a finite real",
            )
            return LogisticParameters(weights=weights, bias=float(bias))
        if kind == KIND_DECISION_TREE:
            return DecisionTreeParameters(root=nodes_to_tree(raw["nodes"]))
        if kind == KIND_RANDOM_FOREST:
            trees = raw["trees"]
            _require(isinstance(trees, list) and trees, "trees must be a non-empty list")
            return RandomForestParameters(
                trees=tuple(nodes_to_tree(nodes) for nodes in trees)
            )
        url = raw["endpoint_url"]
        _require(isinstance(url, str) and bool(url), "endpoint_url must be a string")
        timeout = raw.get("timeout", 10.0)
        _require(
            isinstance(timeout, (int, float)) and timeout > 0,
            "timeout must be a positive real",
        )
        return RemoteParameters(endpoint_url=url, timeout=float(timeout))
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise CorruptModelError(f"invalid {kind} parameters: {exc}") from exc


def load_model(source: Source, expect_kind: str | None = None) -> ClassifierModel:
    """Read a model file; the model name is taken from the file stem."""
    if hasattr(source, "read"):
        text = source.read()
        name_hint = getattr(source, "name", "")
    else:
        text = Path(source).read_text(encoding="utf-8")
        name_hint = os.fspath(source)
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorruptModelError(f"model file is not valid JSON: {exc}") from exc
    _require(isinstance(document, dict), "model file must hold a JSON object")
    _require("format_version" in document, "model file lacks format_version")
    version = document["format_version"]
    if version != FORMAT_VERSION:
        raise UnsupportedVersionError(
            f"model format {version!r} unsupported (expected {FORMAT_VERSION!r})"
        )
    kind = document.get("kind")
    if kind not in ALL_KINDS:
        raise KindMismatchError(f"unknown model kind: {kind!r}")
    if expect_kind is not None and kind != expect_kind:
        raise KindMismatchError(f"expected kind {expect_kind!r}, file holds {kind!r}")
    threshold = document.get("threshold", 0.5)
    _require(
        isinstance(threshold, (int, float)) and 0.0 <= threshold <= 1.0,
        "threshold must be a real in [0, 1]",
    )
    vocabulary = None
    raw_vocab = document.get("vocabulary")
    if raw_vocab is not None:
        _require(
            isinstance(raw_vocab, list) and all(isinstance(t, str) for t in raw_vocab),
            "vocabulary must be a list of strings",
        )
        try:
            vocabulary = Vocabulary(terms=tuple(raw_vocab))
        except ValueError as exc:
            raise CorruptModelError(str(exc)) from exc
    idf = None
    raw_idf = document.get("idf")
    if raw_idf is not None:
        _require(isinstance(raw_idf, dict), "idf must be an object")
        values = _float_list(raw_idf.get("values"), "idf values must be reals")
        doc_count = raw_idf.get("doc_count")
        _require(
            isinstance(doc_count, int) and doc_count > 0,
            "idf doc_count must be a positive integer",
        )
        _require(
            vocabulary is not None and len(values) == len(vocabulary),
            "idf values must align with the vocabulary",
        )
        try:
            idf = IdfTable(values=values, doc_count=doc_count)
        except ValueError as exc:
            raise CorruptModelError(str(exc)) from exc
    if kind in NATIVE_KINDS:
        _require(vocabulary is not None, f"{kind} model files must embed a vocabulary")
    else:
        _require(vocabulary is None, "remote model files carry no vocabulary")
    parameters = _parameters_from_dict(kind, document.get("parameters"))
    if kind == KIND_NAIVE_BAYES:
        _require(
            len(parameters.log_likelihood[0]) == len(vocabulary),
            "log_likelihood must align with the vocabulary",
        )
    if kind == KIND_LOGISTIC_REGRESSION:
        _require(
            len(parameters.weights) == len(vocabulary),
            "weights must align with the vocabulary",
        )
    name = Path(name_hint).stem if name_hint else ""
    return ClassifierModel(
        kind=kind,
        parameters=parameters,
        vocabulary=vocabulary,
        idf=idf,
        threshold=float(threshold),
        version=version,
        name=name,
    )
