"""Quantum channels in Kraus form.

A channel is a completely positive trace-preserving map represented by
Kraus matrices {E_k}: it acts as ``rho -> sum_k E_k rho E_k^dag``.
Complete positivity is guaranteed structurally by the representation;
trace preservation (``sum_k E_k^dag E_k = I``) is validated numerically.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import DEFAULT_POLICY, NumericPolicy, check_dimension
from .errors import DimensionMismatch, ValidationError
from .states import (
    DensityMatrix,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    as_complex_matrix,
    require_hermitian,
    state_matrix,
)

__all__ = [
    "KrausChannel",
    "ChannelDiagnostics",
    "diagnose",
    "unitary_channel",
    "identity_channel",
    "depolarizing",
    "measure_and_control",
    "compose",
]


def _trace_preserving_defect(kraus: Sequence[np.ndarray], dim_in: int) -> float:
    acc = np.zeros((dim_in, dim_in), dtype=complex)
    for e in kraus:
        acc += e.conj().T @ e
    return float(np.max(np.abs(acc - np.eye(dim_in))))


class KrausChannel:
    """A CPTP map stored as a list of Kraus matrices.

    Each matrix has shape (dim_out, dim_in).  Construction validates trace
    preservation against ``policy.trace_preserving_tol``.
    """

    __slots__ = ("kraus", "dim_in", "dim_out")

    def __init__(self, kraus, *, policy: NumericPolicy = DEFAULT_POLICY):
        mats = [as_complex_matrix(e) for e in kraus]
        if not mats:
            raise ValidationError("channel needs at least one Kraus matrix")
        dim_out, dim_in = mats[0].shape
        for e in mats:
            if e.shape != (dim_out, dim_in):
                raise ValidationError(
                    f"inconsistent Kraus shapes: {e.shape} vs {(dim_out, dim_in)}"
                )
        check_dimension(max(dim_in, dim_out))
        defect = _trace_preserving_defect(mats, dim_in)
        if defect > policy.trace_preserving_tol:
            raise ValidationError(
                f"channel is not trace-preserving: "
                f"max |sum E^dag E - I| = {defect:.3e}"
            )
        self.kraus = tuple(mats)
        self.dim_in = dim_in
        self.dim_out = dim_out

    def apply(self, rho, *, policy: NumericPolicy = DEFAULT_POLICY) -> DensityMatrix:
        """Channel action sum_k E_k rho E_k^dag on a state."""
        m = state_matrix(rho)
        if m.shape[0] != self.dim_in:
            raise DimensionMismatch(
                f"state dim {m.shape[0]} does not match channel input {self.dim_in}"
            )
        out = np.zeros((self.dim_out, self.dim_out), dtype=complex)
        for e in self.kraus:
            out += e @ m @ e.conj().T
        return DensityMatrix(0.5 * (out + out.conj().T), policy=policy)

    def dual_apply(self, obs, *, policy: NumericPolicy = DEFAULT_POLICY) -> np.ndarray:
        """Adjoint action sum_k E_k^dag A E_k on a Hermitian observable.

        Satisfies tr(A * channel(rho)) = tr(dual(A) * rho).
        """
        a = require_hermitian(obs, policy.herm_tol, "observable")
        if a.shape[0] != self.dim_out:
            raise DimensionMismatch(
                f"observable dim {a.shape[0]} does not match channel output "
                f"{self.dim_out}"
            )
        out = np.zeros((self.dim_in, self.dim_in), dtype=complex)
        for e in self.kraus:
            out += e.conj().T @ a @ e
        return 0.5 * (out + out.conj().T)

    def validate(self) -> "ChannelDiagnostics":
        """Diagnostics on the CPTP conditions.

        Complete positivity holds by Kraus construction and is reported,
        not re-verified.
        """
        return diagnose(self.kraus)

    def __repr__(self) -> str:
        return (
            f"KrausChannel(dim_in={self.dim_in}, dim_out={self.dim_out}, "
            f"kraus={len(self.kraus)})"
        )


@dataclass(frozen=True)
class ChannelDiagnostics:
    trace_preserving_defect: float
    trace_preserving: bool
    kraus_count: int
    note: str = "complete positivity holds structurally for any Kraus set"


def diagnose(kraus, *, policy: NumericPolicy = DEFAULT_POLICY) -> ChannelDiagnostics:
    """Diagnostics for an arbitrary Kraus set, valid or not."""
    mats = [as_complex_matrix(e) for e in kraus]
    if not mats:
        raise ValidationError("need at least one Kraus matrix")
    defect = _trace_preserving_defect(mats, mats[0].shape[1])
    return ChannelDiagnostics(
        trace_preserving_defect=defect,
        trace_preserving=defect <= policy.trace_preserving_tol,
        kraus_count=len(mats),
    )


def unitary_channel(u, *, policy: NumericPolicy = DEFAULT_POLICY) -> KrausChannel:
    """Channel rho -> U rho U^dag for a unitary U."""
    u = as_complex_matrix(u, square=True)
    defect = float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))
    if defect > policy.unitary_tol:
        raise ValidationError(f"matrix is not unitary: max |U^dag U - I| = {defect:.3e}")
    return KrausChannel([u], policy=policy)


def identity_channel(dim: int, *, policy: NumericPolicy = DEFAULT_POLICY) -> KrausChannel:
    return KrausChannel([np.eye(dim, dtype=complex)], policy=policy)


def depolarizing(p: float, *, policy: NumericPolicy = DEFAULT_POLICY) -> KrausChannel:
    """Single-qubit depolarizing channel with strength p in [0, 1].

    Kraus set {sqrt(1 - 3p/4) I, sqrt(p/4) X, sqrt(p/4) Y, sqrt(p/4) Z};
    at p = 1 every input is mapped to the maximally mixed state.
    """
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"depolarizing strength must be in [0, 1], got {p}")
    kraus = [np.sqrt(1.0 - 0.75 * p) * np.eye(2, dtype=complex)]
    if p > 0.0:
        coeff = np.sqrt(p / 4.0)
        kraus.extend([coeff * PAULI_X, coeff * PAULI_Y, coeff * PAULI_Z])
    return KrausChannel(kraus, policy=policy)


def measure_and_control(
    measurement_operators: Sequence[np.ndarray],
    controlled_unitaries: Sequence[np.ndarray],
    *,
    policy: NumericPolicy = DEFAULT_POLICY,
) -> KrausChannel:
    """Measurement-controlled unitary: apply V_k when outcome k occurs.

    Builds the Kraus set {V_k M_k}; trace preservation follows from the
    measurement completeness sum_k M_k^dag M_k = I because the V_k are
    unitary.
    """
    if len(measurement_operators) != len(controlled_unitaries):
        raise ValidationError(
            "need one controlled unitary per measurement operator, got "
            f"{len(controlled_unitaries)} for {len(measurement_operators)}"
        )
    kraus = []
    for m_k, v_k in zip(measurement_operators, controlled_unitaries):
        m_k = as_complex_matrix(m_k, square=True)
        v_k = as_complex_matrix(v_k, square=True)
        defect = float(np.max(np.abs(v_k.conj().T @ v_k - np.eye(v_k.shape[0]))))
        if defect > policy.unitary_tol:
            raise ValidationError(
                f"controlled operation is not unitary: defect {defect:.3e}"
            )
        kraus.append(v_k @ m_k)
    return KrausChannel(kraus, policy=policy)


def compose(
    outer: KrausChannel, inner: KrausChannel, *, policy: NumericPolicy = DEFAULT_POLICY
) -> KrausChannel:
    """Sequential composition: (outer . inner)(rho) = outer(inner(rho)).

    The Kraus set is all products F_j E_k.
    """
    if inner.dim_out != outer.dim_in:
        raise DimensionMismatch(
            f"inner output dim {inner.dim_out} does not match outer input "
            f"{outer.dim_in}"
        )
    kraus = [f @ e for f in outer.kraus for e in inner.kraus]
    return KrausChannel(kraus, policy=policy)
