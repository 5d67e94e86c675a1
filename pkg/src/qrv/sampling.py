"""Seeded random states, channels and classifiers.

Used by the probabilistic oracle, the demos and the test suite.  All
draws go through an explicit ``numpy.random.Generator`` so that fixed
seeds reproduce identical objects bit for bit.
"""

from __future__ import annotations

import numpy as np

from .channels import KrausChannel, unitary_channel
from .classifiers import Classifier, Measurement
from .config import DEFAULT_POLICY
from .states import DensityMatrix, PureState, matrix_sqrt_psd

__all__ = [
    "random_unitary",
    "random_pure_state",
    "random_density_matrix",
    "random_kraus_channel",
    "random_measurement",
    "random_classifier",
]


def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return rng.normal(size=(rows, cols)) + 1j * rng.normal(size=(rows, cols))


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR with phase correction."""
    q, r = np.linalg.qr(_ginibre(rng, dim, dim))
    phases = np.diag(r).copy()
    phases /= np.abs(phases)
    return q * phases


def random_pure_state(dim: int, rng: np.random.Generator) -> PureState:
    v = _ginibre(rng, dim, 1).ravel()
    return PureState(v / np.linalg.norm(v))


def random_density_matrix(
    dim: int, rng: np.random.Generator, rank: int | None = None
) -> DensityMatrix:
    """Hilbert-Schmidt-style random state G G^dag / tr, optionally low rank."""
    g = _ginibre(rng, dim, rank or dim)
    m = g @ g.conj().T
    return DensityMatrix(m / float(np.real(np.trace(m))))


def random_kraus_channel(
    dim: int, rng: np.random.Generator, kraus_rank: int = 2
) -> KrausChannel:
    """Random CPTP map from a Haar isometry split into Kraus blocks."""
    if kraus_rank == 1:
        return unitary_channel(random_unitary(dim, rng))
    q, r = np.linalg.qr(_ginibre(rng, dim * kraus_rank, dim))
    phases = np.diag(r).copy()
    phases /= np.abs(phases)
    isometry = q * phases
    kraus = [isometry[i * dim : (i + 1) * dim, :] for i in range(kraus_rank)]
    return KrausChannel(kraus)


def random_measurement(
    dim: int, n_outcomes: int, rng: np.random.Generator
) -> Measurement:
    """Random complete measurement from normalized Ginibre effects."""
    raws = [(_ginibre(rng, dim, dim),) for _ in range(n_outcomes)]
    gram = [g[0] @ g[0].conj().T for g in raws]
    total = np.sum(gram, axis=0)
    w, v = np.linalg.eigh(total)
    inv_sqrt = (v / np.sqrt(np.clip(w, 1e-14, None))) @ v.conj().T
    operators = []
    for g in gram:
        effect = inv_sqrt @ g @ inv_sqrt
        operators.append(matrix_sqrt_psd(0.5 * (effect + effect.conj().T)))
    return Measurement(operators)


def random_classifier(
    dim: int,
    rng: np.random.Generator,
    n_classes: int = 2,
    kraus_rank: int = 1,
) -> Classifier:
    """Random classifier: a channel plus a random complete measurement."""
    channel = (
        unitary_channel(random_unitary(dim, rng))
        if kraus_rank == 1
        else random_kraus_channel(dim, rng, kraus_rank)
    )
    measurement = random_measurement(dim, n_classes, rng)
    return Classifier(channel, measurement)
