"""Quantum states and the distance metrics between them.

Pure states are unit complex vectors; mixed states are density matrices
(Hermitian, positive semidefinite, unit trace).  The distance used for
robustness verdicts is ``D(rho, sigma) = 1 - F(rho, sigma)`` where ``F``
is the fidelity ``[tr sqrt(sqrt(rho) sigma sqrt(rho))]^2``; the trace
distance is provided alongside for comparison.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .config import DEFAULT_POLICY, NumericPolicy, check_dimension
from .errors import DimensionMismatch, ValidationError

__all__ = [
    "PureState",
    "DensityMatrix",
    "as_complex_matrix",
    "require_hermitian",
    "hermitian_eigensystem",
    "matrix_sqrt_psd",
    "pure_to_density",
    "project_to_density",
    "fidelity",
    "sqrt_fidelity",
    "trace_distance",
    "tensor_product",
    "bloch_vector",
    "density_from_bloch",
    "PAULI_X",
    "PAULI_Y",
    "PAULI_Z",
]

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def as_complex_matrix(m, *, square: bool = False) -> np.ndarray:
    """Coerce to a finite 2-D complex array (C-ordered copy)."""
    arr = np.array(m, dtype=complex, order="C")
    if arr.ndim != 2:
        raise ValidationError(f"expected a matrix, got array of ndim {arr.ndim}")
    if arr.size == 0:
        raise ValidationError("empty matrix")
    if not np.all(np.isfinite(arr.view(float))):
        raise ValidationError("matrix contains NaN or Inf entries")
    if square and arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {arr.shape}")
    return arr


def hermiticity_defect(m: np.ndarray) -> float:
    """Max-norm of ``m - m^dag``."""
    return float(np.max(np.abs(m - m.conj().T)))


def require_hermitian(
    m: np.ndarray, tol: float | None = None, what: str = "matrix"
) -> np.ndarray:
    """Validate Hermiticity and return the exactly symmetrized matrix."""
    if tol is None:
        tol = DEFAULT_POLICY.herm_tol
    m = as_complex_matrix(m, square=True)
    defect = hermiticity_defect(m)
    if defect > tol:
        raise ValidationError(
            f"{what} is not Hermitian: max |M - M^dag| = {defect:.3e} > {tol:.1e}"
        )
    return 0.5 * (m + m.conj().T)


class PureState:
    """A unit-norm complex amplitude vector.

    Inputs whose norm deviates from 1 by more than ``policy.norm_reject``
    are rejected; smaller deviations are silently renormalized so the
    stored amplitudes are always unit norm to machine precision.
    """

    __slots__ = ("amplitudes", "dim")

    def __init__(self, amplitudes, *, policy: NumericPolicy = DEFAULT_POLICY):
        arr = np.asarray(amplitudes, dtype=complex).reshape(-1).copy()
        if arr.size < 1:
            raise ValidationError("pure state needs at least one amplitude")
        if not np.all(np.isfinite(arr.view(float))):
            raise ValidationError("amplitudes contain NaN or Inf")
        norm = float(np.linalg.norm(arr))
        if abs(norm - 1.0) > policy.norm_reject:
            raise ValidationError(
                f"state vector is not normalized: ||psi|| = {norm:.9f}"
            )
        if abs(norm - 1.0) > 1e-12:  # keep construction idempotent bit-for-bit
            arr /= norm
        check_dimension(arr.size)
        self.amplitudes = arr
        self.dim = arr.size

    def density(self) -> "DensityMatrix":
        return pure_to_density(self)

    def overlap(self, other: "PureState") -> complex:
        """Inner product <self|other>."""
        if self.dim != other.dim:
            raise DimensionMismatch(f"dims {self.dim} and {other.dim} differ")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def __repr__(self) -> str:
        return f"PureState(dim={self.dim})"


class DensityMatrix:
    """A mixed quantum state: Hermitian, PSD, unit-trace matrix.

    Construction validates all three invariants against the policy
    tolerances.  Use :func:`project_to_density` to repair nearly-valid
    matrices such as interior-point solver output.
    """

    __slots__ = ("matrix", "dim")

    def __init__(self, matrix, *, policy: NumericPolicy = DEFAULT_POLICY):
        m = require_hermitian(matrix, policy.herm_tol, "density matrix")
        trace = float(np.real(np.trace(m)))
        if abs(trace - 1.0) > policy.trace_tol:
            raise ValidationError(f"density matrix has trace {trace:.12f}, not 1")
        lo = float(np.linalg.eigvalsh(m)[0])
        if lo < -policy.psd_tol:
            raise ValidationError(
                f"density matrix has negative eigenvalue {lo:.3e}"
            )
        check_dimension(m.shape[0])
        self.matrix = m
        self.dim = m.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def __repr__(self) -> str:
        return f"DensityMatrix(dim={self.dim})"


StateLike = "PureState | DensityMatrix"


def state_matrix(state) -> np.ndarray:
    """Density-matrix array of a PureState, DensityMatrix, or raw array."""
    if isinstance(state, PureState):
        v = state.amplitudes
        return np.outer(v, v.conj())
    if isinstance(state, DensityMatrix):
        return state.matrix
    return as_complex_matrix(state, square=True)


def pure_to_density(
    psi: PureState, *, policy: NumericPolicy = DEFAULT_POLICY
) -> DensityMatrix:
    """Rank-1 projector |psi><psi| of a pure state."""
    if not isinstance(psi, PureState):
        psi = PureState(psi, policy=policy)
    v = psi.amplitudes
    return DensityMatrix(np.outer(v, v.conj()), policy=policy)


def hermitian_eigensystem(
    m, *, policy: NumericPolicy = DEFAULT_POLICY
) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and unitary eigenvector matrix of a Hermitian m.

    Satisfies ``m = V diag(w) V^dag`` and ``V^dag V = I`` to working
    precision; non-Hermitian input is rejected.
    """
    m = require_hermitian(m, policy.herm_tol)
    w, v = np.linalg.eigh(m)
    return w, v


def _suppress_spectral_junk(w: np.ndarray) -> np.ndarray:
    """Zero eigenvalues at relative machine noise.

    Square roots amplify +1e-16 rounding junk on rank-deficient spectra
    into 1e-8 errors, so anything below ``max(w) * dim * 16 eps`` is
    treated as an exact zero before a root is taken.
    """
    w = np.clip(w, 0.0, None)
    cutoff = float(np.max(w, initial=0.0)) * w.size * 16 * np.finfo(float).eps
    w[w < cutoff] = 0.0
    return w


def matrix_sqrt_psd(m, *, policy: NumericPolicy = DEFAULT_POLICY) -> np.ndarray:
    """Hermitian PSD square root.

    Eigenvalues in ``[-psd_reject, 0)`` are clamped to zero so that
    solver-induced PSD drift cannot leak NaNs into fidelities; anything
    below ``-psd_reject`` is rejected as not PSD.
    """
    w, v = hermitian_eigensystem(m, policy=policy)
    if w[0] < -policy.psd_reject:
        raise ValidationError(
            f"matrix is not positive semidefinite: min eigenvalue {w[0]:.3e}"
        )
    w = _suppress_spectral_junk(w)
    root = (v * np.sqrt(w)) @ v.conj().T
    return 0.5 * (root + root.conj().T)


def project_to_density(
    m, *, policy: NumericPolicy = DEFAULT_POLICY
) -> DensityMatrix:
    """Nearest-density-matrix repair for nearly-valid input.

    Symmetrizes, clamps negative eigenvalues in the accepted drift range,
    and renormalizes the trace.  Input that is far from a density matrix
    (eigenvalue below ``-psd_reject``) is rejected.
    """
    h = 0.5 * (as_complex_matrix(m, square=True) + as_complex_matrix(m).conj().T)
    w, v = np.linalg.eigh(h)
    if w[0] < -policy.psd_reject:
        raise ValidationError(
            f"matrix too indefinite to repair: min eigenvalue {w[0]:.3e}"
        )
    w = np.clip(w, 0.0, None)
    total = float(np.sum(w))
    if total <= 0.0:
        raise ValidationError("matrix has zero trace after clamping")
    w /= total
    return DensityMatrix((v * w) @ v.conj().T, policy=policy)


def _check_same_dims(rho: DensityMatrix, sigma: DensityMatrix) -> None:
    if rho.dim != sigma.dim:
        raise DimensionMismatch(f"state dims {rho.dim} and {sigma.dim} differ")


def sqrt_fidelity(
    rho: DensityMatrix, sigma: DensityMatrix, *, policy: NumericPolicy = DEFAULT_POLICY
) -> float:
    """sqrt(F) = tr sqrt(sqrt(rho) sigma sqrt(rho)), clamped to [0, 1]."""
    _check_same_dims(rho, sigma)
    root = matrix_sqrt_psd(rho.matrix, policy=policy)
    inner = root @ sigma.matrix @ root
    w = np.linalg.eigvalsh(0.5 * (inner + inner.conj().T))
    value = float(np.sum(np.sqrt(_suppress_spectral_junk(w))))
    return min(max(value, 0.0), 1.0)


def fidelity(
    rho: DensityMatrix, sigma: DensityMatrix, *, policy: NumericPolicy = DEFAULT_POLICY
) -> float:
    """Fidelity [tr sqrt(sqrt(rho) sigma sqrt(rho))]^2 in [0, 1].

    Computed by eigendecomposition; symmetric in its arguments up to
    numerical noise.  For pure states it reduces to |<psi|phi>|^2.
    """
    return sqrt_fidelity(rho, sigma, policy=policy) ** 2


def trace_distance(
    rho: DensityMatrix, sigma: DensityMatrix, *, policy: NumericPolicy = DEFAULT_POLICY
) -> float:
    """Trace distance 0.5 * ||rho - sigma||_tr in [0, 1]."""
    _check_same_dims(rho, sigma)
    diff = rho.matrix - sigma.matrix
    w = np.linalg.eigvalsh(0.5 * (diff + diff.conj().T))
    return min(max(0.5 * float(np.sum(np.abs(w))), 0.0), 1.0)


def tensor_product(a, b, *more) -> np.ndarray:
    """Kronecker product of two or more matrices."""
    out = np.kron(as_complex_matrix(a), as_complex_matrix(b))
    for extra in more:
        out = np.kron(out, as_complex_matrix(extra))
    return out


def bloch_vector(rho: DensityMatrix) -> np.ndarray:
    """(x, y, z) Bloch coordinates of a qubit state."""
    if rho.dim != 2:
        raise DimensionMismatch("Bloch coordinates are defined for dim 2 only")
    m = rho.matrix
    return np.array(
        [
            float(np.real(np.trace(m @ PAULI_X))),
            float(np.real(np.trace(m @ PAULI_Y))),
            float(np.real(np.trace(m @ PAULI_Z))),
        ]
    )


def density_from_bloch(
    r: Iterable[float], *, policy: NumericPolicy = DEFAULT_POLICY
) -> DensityMatrix:
    """Qubit state 0.5 * (I + x X + y Y + z Z) for ||r|| <= 1."""
    x, y, z = (float(c) for c in r)
    norm = np.sqrt(x * x + y * y + z * z)
    if norm > 1.0 + policy.psd_tol:
        raise ValidationError(f"Bloch vector has norm {norm:.9f} > 1")
    m = 0.5 * (np.eye(2, dtype=complex) + x * PAULI_X + y * PAULI_Y + z * PAULI_Z)
    if norm > 1.0:  # numerical drift just outside the ball
        return project_to_density(m, policy=policy)
    return DensityMatrix(m, policy=policy)
