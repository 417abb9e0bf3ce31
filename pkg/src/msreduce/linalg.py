"""Dense complex linear algebra kernel with fixed ordering and phase conventions.

Everything downstream (decomposition, perturbation theory, propagation) relies
on the determinism guaranteed here: eigenvalues ascending, eigenvector phases
fixed by making the largest-magnitude component real and positive, singular
values descending with the shared left/right phase absorbed so the singular
values stay real and nonnegative.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class ContractViolation(ValueError):
    """A numerical pre/postcondition was violated (bad input matrix etc.)."""


@dataclass(frozen=True)
class Tolerances:
    """Central tolerance configuration shared by all modules."""

    hermiticity: float = 1e-12
    unitarity: float = 1e-12
    residual: float = 1e-10
    zero_singular: float = 1e-12  # relative to the largest singular value
    zero_eigenvalue: float = 1e-9  # relative to max |eigenvalue|, zero-branch cutoff
    degeneracy: float = 1e-9  # relative clustering width for equal eigen/singular values


TOL = Tolerances()


@dataclass
class EigenSystem:
    """Hermitian eigendecomposition: ``values`` ascending, ``vectors[:, i]``
    the phase-fixed eigenvector paired with ``values[i]``."""

    values: np.ndarray
    vectors: np.ndarray


@dataclass
class SVDResult:
    """SVD in row-transformation form: ``left @ V @ right.conj().T`` is
    rectangular-diagonal with nonnegative entries ``sigma`` (descending).

    ``left`` (g x g) and ``right`` (e x e) are unitary; their rows are the
    transformed basis bra-vectors for the lower and upper sets.
    """

    left: np.ndarray
    right: np.ndarray
    sigma: np.ndarray


def require_square(M: np.ndarray) -> np.ndarray:
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ContractViolation(f"expected a square matrix, got shape {M.shape}")
    return M


def require_hermitian(M: np.ndarray, tol: float = TOL.hermiticity) -> np.ndarray:
    """Return M as a complex array, raising if it is not Hermitian.

    The error names the worst offending entry so contract failures are
    actionable.
    """
    M = require_square(M)
    diff = np.abs(M - M.conj().T)
    scale = max(1.0, float(np.max(np.abs(M))) if M.size else 1.0)
    if diff.size and np.max(diff) > tol * scale:
        i, j = np.unravel_index(int(np.argmax(diff)), diff.shape)
        raise ContractViolation(
            f"matrix is not hermitian: entry ({i},{j})={M[i, j]:.6g} vs "
            f"conj({j},{i})={np.conj(M[j, i]):.6g}, |diff|={diff[i, j]:.3g}"
        )
    return M


def is_unitary(M: np.ndarray, tol: float = TOL.unitarity) -> bool:
    M = np.asarray(M, dtype=complex)
    n = M.shape[0]
    scale = max(1.0, float(np.max(np.abs(M))))
    return bool(np.max(np.abs(M.conj().T @ M - np.eye(n))) <= tol * scale * n)


def fix_phase(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude entry is real and positive.

    Ties resolve to the first occurrence, which keeps the output deterministic
    for identical input.
    """
    out = np.array(vectors, dtype=complex, copy=True)
    for k in range(out.shape[1]):
        col = out[:, k]
        i = int(np.argmax(np.abs(col)))
        a = col[i]
        if np.abs(a) > 0:
            out[:, k] = col * (np.conj(a) / np.abs(a))
    return out


def fix_row_phase(rows: np.ndarray) -> np.ndarray:
    """Row-wise variant of :func:`fix_phase`."""
    return fix_phase(np.asarray(rows, dtype=complex).T).T


def eig_hermitian(M: np.ndarray) -> EigenSystem:
    """Eigendecomposition of a Hermitian matrix with fixed conventions.

    Values come out ascending; each eigenvector has its largest-magnitude
    component made real-positive.  Output is deterministic for identical
    input (LAPACK ``heevd`` is deterministic, the phase fix removes the
    remaining gauge freedom).
    """
    M = require_hermitian(M)
    values, vectors = np.linalg.eigh(M)
    return EigenSystem(values=values, vectors=fix_phase(vectors))


def svd(V: np.ndarray) -> SVDResult:
    """Full SVD of a g x e coupling matrix, in A/B row-transformation form.

    ``left[k] @ V`` has a single nonzero at slot k for k < rank, and vanishes
    for the null rows (which are orthonormal).  A shared phase per coupled
    pair is absorbed so the diagonal stays real-nonnegative; the free phases
    of null rows are fixed independently.
    """
    V = np.asarray(V, dtype=complex)
    if V.ndim != 2:
        raise ContractViolation(f"expected a 2-d coupling matrix, got shape {V.shape}")
    g, e = V.shape
    u, s, vh = np.linalg.svd(V, full_matrices=True)
    A = u.conj().T  # g x g, rows are bras
    B = vh  # e x e, rows are bras
    r = min(g, e)
    # common phase per coupled pair: make the dominant entry of the A row
    # real-positive and rotate the B row by the same phase (keeps sigma real).
    for k in range(r):
        i = int(np.argmax(np.abs(A[k])))
        a = A[k, i]
        if np.abs(a) > 0:
            ph = np.conj(a) / np.abs(a)
            A[k] *= ph
            B[k] *= ph
    A[r:] = fix_row_phase(A[r:]) if g > r else A[r:]
    B[r:] = fix_row_phase(B[r:]) if e > r else B[r:]
    return SVDResult(left=A, right=B, sigma=s)


def rectangular_diagonal(sigma: np.ndarray, g: int, e: int) -> np.ndarray:
    """Embed singular values on the main diagonal of a g x e zero matrix."""
    out = np.zeros((g, e), dtype=complex)
    r = min(g, e, len(sigma))
    out[np.arange(r), np.arange(r)] = sigma[:r]
    return out


def propagator_step(H: np.ndarray, dt: float) -> np.ndarray:
    """Unitary step exp(-i H dt) via the Hermitian eigendecomposition."""
    if not np.isfinite(dt):
        raise ContractViolation(f"time step must be finite, got {dt}")
    es = eig_hermitian(H)
    phases = np.exp(-1j * es.values * dt)
    return (es.vectors * phases) @ es.vectors.conj().T
