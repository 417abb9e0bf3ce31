"""Extension of the decomposition to lifted degeneracy.

The degenerate problem is diagonalized in two steps, H0 -> Xi (by S) ->
decomposed frame (by P), with U = P S.  Small per-state energy shifts are
folded in by rescaling the degenerate eigenvalues with their first-order
response (Q matrix), which yields an effective Hamiltonian that shares the
degenerate transformation exactly while matching the shifted spectrum to
first order.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .linalg import TOL, ContractViolation, fix_phase
from .ms_core import BipartiteSystem, MSDecomposition, ms_decompose

OVERLAP_FLOOR = 1.0 / np.sqrt(2.0)


class AmbiguousMatchError(ContractViolation):
    """Eigenpair matching between the shifted and degenerate spectra failed."""


@dataclass
class TwoStepTransform:
    """S diagonalizes H0 (S H0 S+ = diag(xi)); P maps the diagonal frame to
    the decomposed frame (P+ H0_ms P = diag(xi)); U = P S."""

    S: np.ndarray
    P: np.ndarray
    xi: np.ndarray


@dataclass
class ExactSpectrum:
    """Exact eigenpairs of the shifted Hamiltonian, ordered to match the
    degenerate eigenvalue layout by eigenvector overlap."""

    values: np.ndarray
    vectors: np.ndarray


@dataclass
class EffectiveModel:
    """First-order effective model: response matrix, Q rescaling, and the
    effective / decomposed-frame Hamiltonians."""

    kappa: np.ndarray
    Q: np.ndarray
    qxi: np.ndarray
    h_eff: np.ndarray
    h_ms: np.ndarray


def two_step(
    sys: BipartiteSystem, dec: MSDecomposition, t: float | None = None
) -> TwoStepTransform:
    """Build S, P, and the degenerate eigenvalue vector analytically.

    P is identity on dark slots and mixes each coupled pair with the closed
    2x2 diagonalization of [[-delta, s], [s, delta]]/2; the lower slot of a
    pair carries the - branch, the upper slot the + branch.
    """
    g, e, r = dec.g, dec.e, dec.rank
    n = g + e
    n_dg, n_de = g - r, e - r
    f = sys.envelope_value(t)
    delta = sys.delta

    P = np.eye(n, dtype=complex)
    xi = np.zeros(n)
    xi[:n_dg] = -0.5 * delta
    xi[g : g + n_de] = 0.5 * delta
    for k in range(r):
        i = n_dg + k
        j = g + n_de + k
        s = f * float(dec.sigma[k])
        eps = 0.5 * np.hypot(delta, s)
        if abs(s) > 0:
            xi[i], xi[j] = -eps, eps
            vm = np.array([s, delta - 2 * eps])
            vp = np.array([s, delta + 2 * eps])
            vm = vm / np.linalg.norm(vm)
            vp = vp / np.linalg.norm(vp)
            P[i, i], P[j, i] = vm[0], vm[1]
            P[i, j], P[j, j] = vp[0], vp[1]
        else:
            # envelope node: the pair is momentarily uncoupled
            xi[i], xi[j] = -0.5 * delta, 0.5 * delta
    S = P.conj().T @ dec.U
    return TwoStepTransform(S=S, P=P, xi=xi)


def exact_spectrum(
    sys: BipartiteSystem,
    tst: TwoStepTransform | None = None,
    t: float | None = None,
) -> ExactSpectrum:
    """Diagonalize the shifted Hamiltonian and order the eigenpairs against
    the degenerate layout.

    Matching maximizes total squared eigenvector overlap (optimal
    assignment); exact-degenerate clusters are first rotated to best align
    with the degenerate basis so the zero-shift limit reproduces it exactly.
    Any matched pair with overlap below 1/sqrt(2) raises
    :class:`AmbiguousMatchError` (the shifts are too large for a meaningful
    linear correspondence).
    """
    if tst is None:
        tst = two_step(sys, ms_decompose(sys), t=t)
    H = sys.hamiltonian(t)
    w, R = np.linalg.eigh(H)
    n = len(w)
    targets = tst.S.conj().T  # columns are the degenerate eigenvectors

    overlap = np.abs(tst.S @ R)  # overlap[i, j] = |<s_i | r_j>|
    row, col = linear_sum_assignment(-(overlap**2))
    order = np.empty(n, dtype=int)
    order[row] = col
    values = w[order]
    vectors = R[:, order].copy()

    # exact-degenerate clusters: the eigh basis inside a cluster is
    # arbitrary, so rotate it (orthogonal Procrustes) onto the matched
    # degenerate vectors; the zero-shift limit then reproduces them exactly.
    scale = max(1.0, float(np.max(np.abs(w))))
    j = 0
    while j < n:
        k = j + 1
        while k < n and abs(w[k] - w[j]) <= 1e-12 * scale:
            k += 1
        if k - j > 1:
            matched = [i for i in range(n) if abs(values[i] - w[j]) <= 1e-12 * scale]
            block = R[:, j:k]
            T = targets[:, matched]
            uu, _, vh = np.linalg.svd(block.conj().T @ T)
            aligned = block @ (uu @ vh)
            for idx, i in enumerate(matched):
                vectors[:, i] = aligned[:, idx]
        j = k

    pair_overlap = np.abs(np.einsum("ij,ji->i", tst.S, vectors))
    if np.any(pair_overlap < OVERLAP_FLOOR):
        i = int(np.argmin(pair_overlap))
        raise AmbiguousMatchError(
            f"eigenpair {i} matches its degenerate partner with overlap "
            f"{pair_overlap[i]:.3f} < 1/sqrt(2); reduce the energy shifts"
        )
    return ExactSpectrum(values=values, vectors=fix_phase(vectors))


def kappa_matrix(sys: BipartiteSystem, tst: TwoStepTransform) -> np.ndarray:
    """First-order response of each degenerate eigenvalue to each per-state
    shift: kappa[i, k] = d eps_i / d shift_k at zero shift.

    In the adapted eigenbasis this is the diagonal matrix element of the
    shift generator, kappa[i, k] = |S[i, k]|^2 / 2.  Inside a degenerate
    eigenvalue group the rows are only simultaneously valid if the projected
    shift direction is diagonal there; a residual off-diagonal projection
    (non-commuting sweep directions) triggers a warning and the rows then
    describe the composite direction actually configured.
    """
    S, xi = tst.S, tst.xi
    kappa = 0.5 * np.abs(S) ** 2
    D = sys.shift_matrix()
    shift_scale = float(np.max(np.abs(sys.shifts))) if sys.shifts.size else 0.0
    if shift_scale > 0:
        scale = max(1.0, float(np.max(np.abs(xi))))
        order = np.argsort(xi)
        j = 0
        while j < len(order):
            k = j + 1
            while k < len(order) and abs(xi[order[k]] - xi[order[j]]) <= 1e-9 * scale:
                k += 1
            if k - j > 1:
                grp = order[j:k]
                M = S[grp] @ D @ S[grp].conj().T
                off = M - np.diag(np.diag(M))
                if np.max(np.abs(off)) > 1e-10 * max(1.0, shift_scale):
                    warnings.warn(
                        "degenerate eigenvalue group is not diagonal in the "
                        "configured shift direction; first-order responses "
                        "are only valid along that composite direction",
                        stacklevel=2,
                    )
            j = k
    return kappa


def build_q(
    xi: np.ndarray, kappa: np.ndarray, shifts: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal rescaling turning degenerate eigenvalues into first-order
    shifted ones.

    Q_i = 1 + (sum_k shifts_k kappa_ik) / xi_i and qxi_i = Q_i xi_i away from
    zero; at a zero eigenvalue the limit is taken directly, qxi_i = the linear
    response, with Q_i = 1 when the response also vanishes and NaN as the
    formal (divergent) limit marker otherwise.
    """
    xi = np.asarray(xi, dtype=float)
    shifts = np.asarray(shifts, dtype=float)
    lin = kappa @ shifts
    if lin.shape != xi.shape:
        raise ContractViolation(
            f"kappa/shift product shape {lin.shape} does not match eigenvalues {xi.shape}"
        )
    cutoff = TOL.zero_eigenvalue * float(np.max(np.abs(xi))) if len(xi) else 0.0
    nonzero = np.abs(xi) > cutoff
    qxi = np.where(nonzero, xi + lin, lin)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(nonzero, qxi / np.where(nonzero, xi, 1.0), 1.0)
    zero_marker = ~nonzero & (np.abs(lin) > 1e-15 * max(1.0, float(np.max(np.abs(lin), initial=0.0))))
    Q = np.where(zero_marker, np.nan, ratio)
    return Q, qxi


def effective_hamiltonian(tst: TwoStepTransform, qxi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Effective Hamiltonian and its decomposed-frame image.

    h_eff = S+ diag(qxi) S (manifestly Hermitian, exactly similar to the
    rescaled eigenvalues); h_ms = P diag(qxi) P+.
    """
    qxi = np.asarray(qxi, dtype=float)
    S, P = tst.S, tst.P
    h_eff = (S.conj().T * qxi) @ S
    h_ms = (P * qxi) @ P.conj().T
    return h_eff, h_ms


def effective_model(
    sys: BipartiteSystem,
    dec: MSDecomposition | None = None,
    t: float | None = None,
) -> EffectiveModel:
    """Run the full first-order pipeline at one instant."""
    if dec is None:
        dec = ms_decompose(sys)
    tst = two_step(sys, dec, t=t)
    kappa = kappa_matrix(sys, tst)
    Q, qxi = build_q(tst.xi, kappa, sys.shifts)
    h_eff, h_ms = effective_hamiltonian(tst, qxi)
    return EffectiveModel(kappa=kappa, Q=Q, qxi=qxi, h_eff=h_eff, h_ms=h_ms)
