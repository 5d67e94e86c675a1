"""Versioned JSON schemas for states, channels, classifiers, datasets and
reports.

Complex numbers are serialized as two-element ``[re, im]`` arrays
everywhere; matrices are dense row-major nested lists of those pairs.
All documents carry ``"format": "qrv/1"``.  Floats use Python's
shortest-round-trip representation, so parse(emit(x)) == x bit for bit.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .channels import KrausChannel
from .classifiers import Classifier, LabeledDataset, Measurement
from .config import DEFAULT_POLICY, NumericPolicy
from .errors import SchemaError
from .states import DensityMatrix, PureState
from .verifier import AdversarialWitness, VerificationReport

__all__ = [
    "FORMAT_TAG",
    "emit_state",
    "parse_state",
    "emit_channel",
    "parse_channel",
    "emit_classifier",
    "parse_classifier",
    "emit_dataset",
    "parse_dataset",
    "emit_report",
    "emit_adversarial_sidecar",
    "write_json",
    "read_json",
    "load_classifier",
    "load_dataset",
    "load_state",
    "save_classifier",
    "save_dataset",
    "save_state",
]

FORMAT_TAG = "qrv/1"


# ---------------------------------------------------------------------------
# Low-level encoding


def _pair(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def vector_to_json(v: np.ndarray) -> list:
    return [_pair(z) for z in np.asarray(v).ravel()]


def matrix_to_json(m: np.ndarray) -> list:
    return [[_pair(z) for z in row] for row in np.asarray(m)]


def _parse_pair(obj: Any, path: str) -> complex:
    if (
        not isinstance(obj, (list, tuple))
        or len(obj) != 2
        or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in obj)
    ):
        raise SchemaError("complex numbers must be [re, im] number pairs", path)
    return complex(obj[0], obj[1])


def parse_vector(obj: Any, path: str) -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise SchemaError("expected a non-empty array of [re, im] pairs", path)
    return np.array([_parse_pair(x, f"{path}[{i}]") for i, x in enumerate(obj)])


def parse_matrix(obj: Any, path: str) -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise SchemaError("expected a non-empty array of rows", path)
    rows = []
    width = None
    for i, row in enumerate(obj):
        if not isinstance(row, list) or not row:
            raise SchemaError("matrix rows must be non-empty arrays", f"{path}[{i}]")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise SchemaError(
                f"row has {len(row)} entries, expected {width}", f"{path}[{i}]"
            )
        rows.append([_parse_pair(x, f"{path}[{i}][{j}]") for j, x in enumerate(row)])
    return np.array(rows)


def _require_key(doc: dict, key: str, path: str) -> Any:
    if not isinstance(doc, dict):
        raise SchemaError("expected an object", path)
    if key not in doc:
        raise SchemaError(f"missing required key {key!r}", path)
    return doc[key]


def _check_format(doc: dict, kind: str, path: str) -> None:
    tag = _require_key(doc, "format", path)
    if tag != FORMAT_TAG:
        raise SchemaError(f"unsupported format {tag!r}, expected {FORMAT_TAG!r}", path)
    found = _require_key(doc, "kind", path)
    if found != kind:
        raise SchemaError(f"expected kind {kind!r}, found {found!r}", path)


# ---------------------------------------------------------------------------
# States


def _state_entry(state) -> dict:
    if isinstance(state, PureState):
        return {"kind": "pure", "data": vector_to_json(state.amplitudes)}
    return {"kind": "density", "data": matrix_to_json(state.matrix)}


def _parse_state_entry(obj: Any, path: str, policy: NumericPolicy):
    kind = _require_key(obj, "kind", path)
    data = _require_key(obj, "data", path)
    if kind == "pure":
        try:
            return PureState(parse_vector(data, f"{path}.data"), policy=policy)
        except SchemaError:
            raise
        except ValueError as exc:
            raise SchemaError(str(exc), f"{path}.data") from exc
    if kind == "density":
        try:
            return DensityMatrix(parse_matrix(data, f"{path}.data"), policy=policy)
        except SchemaError:
            raise
        except ValueError as exc:
            raise SchemaError(str(exc), f"{path}.data") from exc
    raise SchemaError(f"state kind must be 'pure' or 'density', got {kind!r}", path)


def emit_state(state) -> dict:
    return {"format": FORMAT_TAG, "kind": "state", "state": _state_entry(state)}


def parse_state(doc: dict, *, policy: NumericPolicy = DEFAULT_POLICY):
    _check_format(doc, "state", "$")
    return _parse_state_entry(_require_key(doc, "state", "$"), "state", policy)


# ---------------------------------------------------------------------------
# Channels, measurements, classifiers


def emit_channel(channel: KrausChannel) -> dict:
    return {
        "format": FORMAT_TAG,
        "kind": "channel",
        "dim": channel.dim_in,
        "kraus": [matrix_to_json(e) for e in channel.kraus],
    }


def _parse_channel_body(doc: dict, path: str, policy: NumericPolicy) -> KrausChannel:
    dim = _require_key(doc, "dim", path)
    kraus_doc = _require_key(doc, "kraus", path)
    if not isinstance(kraus_doc, list) or not kraus_doc:
        raise SchemaError("kraus must be a non-empty array of matrices", f"{path}.kraus")
    kraus = [
        parse_matrix(m, f"{path}.kraus[{i}]") for i, m in enumerate(kraus_doc)
    ]
    try:
        channel = KrausChannel(kraus, policy=policy)
    except ValueError as exc:
        raise SchemaError(str(exc), f"{path}.kraus") from exc
    if channel.dim_in != dim:
        raise SchemaError(
            f"declared dim {dim} does not match Kraus matrices of dim "
            f"{channel.dim_in}",
            f"{path}.dim",
        )
    return channel


def parse_channel(doc: dict, *, policy: NumericPolicy = DEFAULT_POLICY) -> KrausChannel:
    _check_format(doc, "channel", "$")
    return _parse_channel_body(doc, "$", policy)


def emit_classifier(classifier: Classifier) -> dict:
    return {
        "format": FORMAT_TAG,
        "kind": "classifier",
        "labels": list(classifier.labels),
        "channel": {
            "dim": classifier.channel.dim_in,
            "kraus": [matrix_to_json(e) for e in classifier.channel.kraus],
        },
        "measurement": {
            "operators": [matrix_to_json(m) for m in classifier.measurement.operators]
        },
    }


def parse_classifier(
    doc: dict, *, policy: NumericPolicy = DEFAULT_POLICY
) -> Classifier:
    _check_format(doc, "classifier", "$")
    labels = _require_key(doc, "labels", "$")
    if not isinstance(labels, list) or not all(isinstance(x, str) for x in labels):
        raise SchemaError("labels must be an array of strings", "labels")
    channel = _parse_channel_body(_require_key(doc, "channel", "$"), "channel", policy)
    meas_doc = _require_key(doc, "measurement", "$")
    ops_doc = _require_key(meas_doc, "operators", "measurement")
    if not isinstance(ops_doc, list) or len(ops_doc) < 2:
        raise SchemaError(
            "operators must be an array of at least two matrices",
            "measurement.operators",
        )
    operators = [
        parse_matrix(m, f"measurement.operators[{i}]") for i, m in enumerate(ops_doc)
    ]
    try:
        measurement = Measurement(operators, policy=policy)
        return Classifier(channel, measurement, labels)
    except ValueError as exc:
        raise SchemaError(str(exc), "measurement") from exc


# ---------------------------------------------------------------------------
# Datasets


def emit_dataset(dataset: LabeledDataset) -> dict:
    states = []
    for state, label in dataset:
        entry = _state_entry(state)
        entry["label"] = int(label)
        states.append(entry)
    return {"format": FORMAT_TAG, "kind": "dataset", "states": states}


def parse_dataset(
    doc: dict, *, policy: NumericPolicy = DEFAULT_POLICY
) -> LabeledDataset:
    _check_format(doc, "dataset", "$")
    states_doc = _require_key(doc, "states", "$")
    if not isinstance(states_doc, list) or not states_doc:
        raise SchemaError("states must be a non-empty array", "states")
    entries = []
    for i, entry in enumerate(states_doc):
        path = f"states[{i}]"
        state = _parse_state_entry(entry, path, policy)
        label = _require_key(entry, "label", path)
        if not isinstance(label, int) or isinstance(label, bool) or label < 0:
            raise SchemaError("label must be a nonnegative integer", f"{path}.label")
        entries.append((state, label))
    return LabeledDataset(entries)


def emit_adversarial_sidecar(
    witnesses: list[AdversarialWitness], dataset: LabeledDataset
) -> dict:
    """Adversarial examples in the dataset schema, labeled with the true
    label of their source entry and annotated with the source index."""
    states = []
    for w in witnesses:
        entry = _state_entry(w.sigma)
        entry["label"] = int(dataset.entries[w.source_index][1])
        entry["source_index"] = int(w.source_index)
        entry["target_class"] = int(w.target_class)
        entry["distance"] = float(w.distance)
        states.append(entry)
    return {"format": FORMAT_TAG, "kind": "dataset", "states": states}


# ---------------------------------------------------------------------------
# Reports


def emit_report(report: VerificationReport, *, include_timings: bool = True) -> dict:
    """Report document; timings are wall-clock and can be omitted when a
    byte-reproducible document is needed."""
    doc = {
        "format": FORMAT_TAG,
        "kind": "verification_report",
        "epsilon": report.epsilon,
        "mode": report.mode,
        "seed": report.seed,
        "n_states": report.n_states,
        "n_correct": report.n_correct,
        "accuracy": report.accuracy,
        "robust_accuracy": report.robust_accuracy,
        "under_approx_robust_accuracy": report.under_approx_robust_accuracy,
        "adversarial_count": report.adversarial_count,
        "verdicts": [
            {
                "index": v.index,
                "label": v.label,
                "predicted": v.predicted,
                "correct": v.correct,
                "margin": v.margin,
                "tie": v.tie,
                "margin_certified": v.margin_certified,
                "status": v.status,
                "delta": v.delta,
                "delta_unbounded": v.delta_unbounded,
                "robust": v.robust,
                "adversarial_class": v.adversarial_class,
                "adversarial_distance": v.adversarial_distance,
            }
            for v in report.verdicts
        ],
        "solver_stats": dict(report.solver_stats),
        "warnings": list(report.warnings),
    }
    if include_timings:
        doc["timings"] = dict(report.timings)
    return doc


# ---------------------------------------------------------------------------
# Files


def write_json(path, doc: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def read_json(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}", "$") from exc


def load_classifier(path, *, policy: NumericPolicy = DEFAULT_POLICY) -> Classifier:
    return parse_classifier(read_json(path), policy=policy)


def load_dataset(path, *, policy: NumericPolicy = DEFAULT_POLICY) -> LabeledDataset:
    return parse_dataset(read_json(path), policy=policy)


def load_state(path, *, policy: NumericPolicy = DEFAULT_POLICY):
    return parse_state(read_json(path), policy=policy)


def save_classifier(path, classifier: Classifier) -> None:
    write_json(path, emit_classifier(classifier))


def save_dataset(path, dataset: LabeledDataset) -> None:
    write_json(path, emit_dataset(dataset))


def save_state(path, state) -> None:
    write_json(path, emit_state(state))
