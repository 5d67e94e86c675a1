"""Quantum classifiers and labeled datasets.

A classifier is a channel followed by a measurement family {M_k}, one
operator per class.  Class probabilities are ``p_k = tr(M_k^dag M_k
channel(rho))`` and the predicted label is the argmax, with ties broken
toward the lowest index and flagged.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channels import KrausChannel
from .config import DEFAULT_POLICY, NumericPolicy
from .errors import DimensionMismatch, ValidationError
from .states import DensityMatrix, PureState, as_complex_matrix, state_matrix

__all__ = [
    "Measurement",
    "Classifier",
    "Classification",
    "LabeledDataset",
    "class_probabilities",
    "classify",
    "accuracy",
    "WELL_TRAINED_THRESHOLD",
]

# Classifiers are conventionally trusted when train/validation accuracy
# reaches this level; verification still runs below it, with a warning.
WELL_TRAINED_THRESHOLD = 0.95


class Measurement:
    """An ordered measurement family {M_k}, one operator per class label."""

    __slots__ = ("operators", "dim", "_effects")

    def __init__(self, operators, *, policy: NumericPolicy = DEFAULT_POLICY):
        mats = [as_complex_matrix(m, square=True) for m in operators]
        if len(mats) < 2:
            raise ValidationError("a measurement needs at least two operators")
        dim = mats[0].shape[0]
        for m in mats:
            if m.shape[0] != dim:
                raise ValidationError("measurement operators have mixed dims")
        acc = np.zeros((dim, dim), dtype=complex)
        for m in mats:
            acc += m.conj().T @ m
        defect = float(np.max(np.abs(acc - np.eye(dim))))
        if defect > policy.completeness_tol:
            raise ValidationError(
                f"measurement is not complete: max |sum M^dag M - I| = {defect:.3e}"
            )
        self.operators = tuple(mats)
        self.dim = dim
        self._effects = None

    @property
    def effects(self) -> tuple[np.ndarray, ...]:
        """The POVM effects M_k^dag M_k (cached)."""
        if self._effects is None:
            self._effects = tuple(m.conj().T @ m for m in self.operators)
        return self._effects

    def __len__(self) -> int:
        return len(self.operators)

    def __repr__(self) -> str:
        return f"Measurement(dim={self.dim}, outcomes={len(self.operators)})"


def computational_measurement(dim: int = 2) -> Measurement:
    """Projective measurement onto the computational basis states."""
    ops = []
    for k in range(dim):
        m = np.zeros((dim, dim), dtype=complex)
        m[k, k] = 1.0
        ops.append(m)
    return Measurement(ops)


class Classifier:
    """A channel plus a measurement, with one string label per class."""

    __slots__ = ("channel", "measurement", "labels", "_dual_effects")

    def __init__(
        self,
        channel: KrausChannel,
        measurement: Measurement,
        labels: Sequence[str] | None = None,
    ):
        if channel.dim_out != measurement.dim:
            raise DimensionMismatch(
                f"channel output dim {channel.dim_out} does not match "
                f"measurement dim {measurement.dim}"
            )
        if channel.dim_in != channel.dim_out:
            raise ValidationError(
                "classifier channels must preserve the dimension; model "
                "qubit-discarding pooling by measuring a subsystem instead"
            )
        if labels is None:
            labels = [str(k) for k in range(len(measurement))]
        labels = [str(x) for x in labels]
        if len(labels) != len(measurement):
            raise ValidationError(
                f"{len(labels)} labels for {len(measurement)} measurement operators"
            )
        self.channel = channel
        self.measurement = measurement
        self.labels = tuple(labels)
        self._dual_effects = None

    @property
    def dim(self) -> int:
        return self.channel.dim_in

    @property
    def n_classes(self) -> int:
        return len(self.measurement)

    @property
    def dual_effects(self) -> tuple[np.ndarray, ...]:
        """Heisenberg-picture effects N_k = channel^dag(M_k^dag M_k).

        With these cached, p_k = tr(N_k rho) costs one inner product per
        class, which is what makes margin filtering over a large dataset
        cheap.
        """
        if self._dual_effects is None:
            self._dual_effects = tuple(
                self.channel.dual_apply(e) for e in self.measurement.effects
            )
        return self._dual_effects

    def class_gap_operator(self, winner: int, rival: int) -> np.ndarray:
        """N_winner - N_rival; states with tr(G sigma) <= 0 lose the argmax."""
        return self.dual_effects[winner] - self.dual_effects[rival]

    def __repr__(self) -> str:
        return f"Classifier(dim={self.dim}, labels={list(self.labels)})"


@dataclass(frozen=True)
class Classification:
    """Argmax outcome for one state."""

    label_index: int
    probabilities: np.ndarray
    margin: float  # sqrt(p_1) - sqrt(p_2) over the top two probabilities
    tie: bool


def class_probabilities(
    classifier: Classifier, state, *, policy: NumericPolicy = DEFAULT_POLICY
) -> np.ndarray:
    """Outcome distribution p_k = tr(M_k^dag M_k channel(rho)), clamped to [0,1]."""
    effects = classifier.dual_effects
    if isinstance(state, PureState):
        if state.dim != classifier.dim:
            raise DimensionMismatch(
                f"state dim {state.dim} does not match classifier dim {classifier.dim}"
            )
        v = state.amplitudes
        probs = np.array([float(np.real(np.vdot(v, n @ v))) for n in effects])
    else:
        m = state_matrix(state)
        if m.shape[0] != classifier.dim:
            raise DimensionMismatch(
                f"state dim {m.shape[0]} does not match classifier dim {classifier.dim}"
            )
        probs = np.array([float(np.real(np.trace(n @ m))) for n in effects])
    return np.clip(probs, 0.0, 1.0)


def classify(
    classifier: Classifier, state, *, policy: NumericPolicy = DEFAULT_POLICY
) -> Classification:
    """Argmax classification with margin and tie flag.

    The margin is sqrt(p_1) - sqrt(p_2) where p_1 >= p_2 are the two
    largest outcome probabilities; a tie (within ``policy.tie_tol``) is
    broken toward the lowest index and flagged.
    """
    probs = class_probabilities(classifier, state, policy=policy)
    order = np.argsort(-probs, kind="stable")
    top, second = int(order[0]), int(order[1])
    margin = float(np.sqrt(probs[top]) - np.sqrt(probs[second]))
    tie = bool(probs[top] - probs[second] <= policy.tie_tol)
    return Classification(
        label_index=top, probabilities=probs, margin=margin, tie=tie
    )


class LabeledDataset:
    """States paired with class indices."""

    __slots__ = ("entries",)

    def __init__(self, entries):
        items = []
        for state, label in entries:
            label = int(label)
            if label < 0:
                raise ValidationError(f"negative label index {label}")
            if not isinstance(state, (PureState, DensityMatrix)):
                raise ValidationError(
                    "dataset states must be PureState or DensityMatrix, got "
                    f"{type(state).__name__}"
                )
            items.append((state, label))
        self.entries = tuple(items)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def check_compatible(self, classifier: Classifier) -> None:
        for i, (state, label) in enumerate(self.entries):
            dim = state.dim
            if dim != classifier.dim:
                raise DimensionMismatch(
                    f"entry {i} has dim {dim}, classifier expects {classifier.dim}"
                )
            if label >= classifier.n_classes:
                raise ValidationError(
                    f"entry {i} has label {label} but the classifier only has "
                    f"{classifier.n_classes} classes"
                )


def accuracy(
    classifier: Classifier,
    dataset: LabeledDataset,
    *,
    policy: NumericPolicy = DEFAULT_POLICY,
) -> float:
    """Fraction of dataset entries the classifier labels correctly."""
    if len(dataset) == 0:
        raise ValidationError("cannot compute accuracy of an empty dataset")
    dataset.check_compatible(classifier)
    hits = sum(
        1
        for state, label in dataset
        if classify(classifier, state, policy=policy).label_index == label
    )
    return hits / len(dataset)
