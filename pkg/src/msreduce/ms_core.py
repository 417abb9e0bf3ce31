"""Degenerate bipartite decomposition.

Two coupled level sets (g lower states, e upper states, common detuning) are
reduced to independent two-state pairs plus uncoupled "dark" states by a
block-diagonal unitary U = diag(A, B) built from the SVD of the coupling
matrix.  Conventions:

  * within each set: dark (null-space) rows first, then coupled rows by
    descending singular value;
  * inside a degenerate group (the dark space, or coupled rows sharing one
    singular value) the basis is rotated to diagonalize the projected energy
    shifts, so first-order perturbation theory downstream is diagonal; rows
    are ordered by ascending projected shift, falling back to the index of
    the dominant component when the shifts do not split the group;
  * singular values are real-nonnegative (phases absorbed into A).

Only a constant common detuning is supported; a time-dependent detuning has
no well-defined decomposition here and is rejected at construction.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .linalg import TOL, ContractViolation, fix_row_phase, svd
from .pulses import EnvelopeSpec


@dataclass
class BipartiteSystem:
    """Physical problem: coupling matrix, common detuning, per-state shifts.

    ``coupling`` is the g x e matrix of Rabi frequencies (rad/time) at unit
    envelope; ``shifts_g`` / ``shifts_e`` are the per-state energy shifts that
    appear inside the global 1/2 prefactor of the Hamiltonian, i.e.

        H(t) = 1/2 [[-delta I + diag(shifts_g),  f(t) V],
                    [f(t) V+, delta I + diag(shifts_e)]]
    """

    coupling: np.ndarray
    delta: float = 0.0
    shifts_g: np.ndarray | None = None
    shifts_e: np.ndarray | None = None
    envelope: EnvelopeSpec = field(default_factory=EnvelopeSpec)

    def __post_init__(self):
        self.coupling = np.atleast_2d(np.asarray(self.coupling, dtype=complex))
        g, e = self.coupling.shape
        if g < 1 or e < 1:
            raise ValueError("need at least one lower and one upper state")
        if not np.isscalar(self.delta) or not np.isfinite(self.delta):
            raise ValueError("only a constant, finite common detuning is supported")
        self.delta = float(self.delta)
        self.shifts_g = (
            np.zeros(g) if self.shifts_g is None else np.asarray(self.shifts_g, dtype=float)
        )
        self.shifts_e = (
            np.zeros(e) if self.shifts_e is None else np.asarray(self.shifts_e, dtype=float)
        )
        if self.shifts_g.shape != (g,) or self.shifts_e.shape != (e,):
            raise ValueError(
                f"shift lengths {self.shifts_g.shape}/{self.shifts_e.shape} do not match "
                f"set sizes g={g}, e={e}"
            )

    @property
    def g(self) -> int:
        return self.coupling.shape[0]

    @property
    def e(self) -> int:
        return self.coupling.shape[1]

    @property
    def n(self) -> int:
        return self.g + self.e

    @property
    def shifts(self) -> np.ndarray:
        """Concatenated per-state shift vector (length g+e)."""
        return np.concatenate([self.shifts_g, self.shifts_e])

    def envelope_value(self, t: float | None = None) -> float:
        return self.envelope.peak if t is None else self.envelope.value(t)

    def h0(self, t: float | None = None) -> np.ndarray:
        """Degenerate Hamiltonian (shifts excluded) at time t (peak if None)."""
        g, e = self.g, self.e
        f = self.envelope_value(t)
        H = np.zeros((self.n, self.n), dtype=complex)
        H[:g, :g] = -0.5 * self.delta * np.eye(g)
        H[g:, g:] = 0.5 * self.delta * np.eye(e)
        H[:g, g:] = 0.5 * f * self.coupling
        H[g:, :g] = 0.5 * f * self.coupling.conj().T
        return H

    def shift_matrix(self) -> np.ndarray:
        """Diagonal degeneracy-lifting term (includes the global 1/2)."""
        return 0.5 * np.diag(self.shifts).astype(complex)

    def hamiltonian(self, t: float | None = None) -> np.ndarray:
        return self.h0(t) + self.shift_matrix()


@dataclass
class MSDecomposition:
    """Result of the degenerate decomposition.

    ``A``/``B`` rows are bras for the new lower/upper basis states; ``omega``
    = A V B+ has one nonnegative entry per coupled pair; ``pairing`` is the
    permutation exposing the 2x2-block + diagonal-tail structure.
    """

    A: np.ndarray
    B: np.ndarray
    omega: np.ndarray
    sigma: np.ndarray  # paired singular values, descending, length = rank
    dark_lower: list[int]
    dark_upper: list[int]
    pairing: np.ndarray

    @property
    def g(self) -> int:
        return self.A.shape[0]

    @property
    def e(self) -> int:
        return self.B.shape[0]

    @property
    def rank(self) -> int:
        return len(self.sigma)

    @property
    def U(self) -> np.ndarray:
        n = self.g + self.e
        U = np.zeros((n, n), dtype=complex)
        U[: self.g, : self.g] = self.A
        U[self.g :, self.g :] = self.B
        return U


def _dominant_index(row: np.ndarray) -> int:
    return int(np.argmax(np.abs(row)))


def _adapt_group(rows: np.ndarray, shift_op: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Rotate a group of basis rows to diagonalize the projected shift.

    Returns (rotated rows, projected eigenvalues ascending).  The projected
    operator in bra convention is M = rows @ shift_op @ rows+.
    """
    M = rows @ shift_op @ rows.conj().T
    M = 0.5 * (M + M.conj().T)
    w, C = np.linalg.eigh(M)
    return C.conj().T @ rows, w


def _order_group(rows: np.ndarray, w: np.ndarray, shift_scale: float) -> np.ndarray:
    """Order rows of one degenerate group deterministically.

    Ascending projected-shift eigenvalue when the shifts split the group,
    dominant-component index otherwise.
    """
    if len(rows) <= 1:
        return rows
    if np.ptp(w) > 1e-12 * max(1.0, shift_scale):
        return rows  # eigh already ascending in w
    order = sorted(range(len(rows)), key=lambda k: (_dominant_index(rows[k]), k))
    return rows[order]


def _sigma_groups(sigma: np.ndarray) -> list[list[int]]:
    """Group indices of (descending) singular values that are equal to
    tolerance."""
    groups: list[list[int]] = []
    smax = sigma[0] if len(sigma) else 0.0
    for k in range(len(sigma)):
        if groups and abs(sigma[groups[-1][0]] - sigma[k]) <= TOL.degeneracy * max(1.0, smax):
            groups[-1].append(k)
        else:
            groups.append([k])
    return groups


def ms_decompose(sys: BipartiteSystem) -> MSDecomposition:
    """Decompose the coupling into independent pairs plus dark states."""
    V = sys.coupling
    g, e = V.shape
    res = svd(V)
    smax = float(res.sigma[0]) if len(res.sigma) else 0.0
    rank = int(np.sum(res.sigma > TOL.zero_singular * max(smax, 1e-300)))
    sigma = res.sigma[:rank].copy()

    # equal-sigma coupled groups must be rotated jointly in A and B so omega
    # stays diagonal; handle the lower set first, then reuse its rotations.
    shift_g_op = 0.5 * np.diag(sys.shifts_g).astype(complex)
    shift_e_op = 0.5 * np.diag(sys.shifts_e).astype(complex)
    scale_g = float(np.max(np.abs(sys.shifts_g))) if g else 0.0
    scale_e = float(np.max(np.abs(sys.shifts_e))) if e else 0.0

    A_coupled = res.left[:rank].copy()
    B_coupled = res.right[:rank].copy()
    for grp in _sigma_groups(sigma):
        if len(grp) == 1:
            continue
        rows_a = A_coupled[grp]
        rows_b = B_coupled[grp]
        # joint first-order operator: at zero common detuning both dressed
        # branches see the mean of the lower and upper projections.
        Mg = rows_a @ shift_g_op @ rows_a.conj().T
        Me = rows_b @ shift_e_op @ rows_b.conj().T
        M = 0.5 * (Mg + Me)
        M = 0.5 * (M + M.conj().T)
        w, C = np.linalg.eigh(M)
        rows_a = C.conj().T @ rows_a
        rows_b = C.conj().T @ rows_b
        if np.ptp(w) <= 1e-12 * max(1.0, scale_g, scale_e):
            order = sorted(range(len(grp)), key=lambda k: (_dominant_index(rows_a[k]), k))
            rows_a, rows_b = rows_a[order], rows_b[order]
        # the two projections need not commute; if they differ the adapted
        # basis is only exact along the mean direction.
        Mg2 = rows_a @ shift_g_op @ rows_a.conj().T
        off = Mg2 - np.diag(np.diag(Mg2))
        if np.max(np.abs(off)) > 1e-10 * max(1.0, scale_g, scale_e):
            warnings.warn(
                "equal-coupling group has non-commuting lower/upper shift "
                "projections; adapted basis is exact only for the composite "
                "shift direction",
                stacklevel=2,
            )
        # re-fix the common pair phase
        for j, k in enumerate(grp):
            i = _dominant_index(rows_a[j])
            a = rows_a[j, i]
            if np.abs(a) > 0:
                ph = np.conj(a) / np.abs(a)
                rows_a[j] *= ph
                rows_b[j] *= ph
        A_coupled[grp] = rows_a
        B_coupled[grp] = rows_b

    def _dark_block(rows_dark, shift_op, scale):
        if not len(rows_dark):
            return rows_dark
        rot, w = _adapt_group(rows_dark, shift_op)
        return fix_row_phase(_order_group(rot, w, scale))

    A_dark = _dark_block(res.left[rank:], shift_g_op, scale_g)
    B_dark = _dark_block(res.right[rank:], shift_e_op, scale_e)

    A = np.vstack([A_dark, A_coupled]) if len(A_dark) else A_coupled
    if A.shape[0] == 0:
        A = res.left[:0]
    B = np.vstack([B_dark, B_coupled]) if len(B_dark) else B_coupled
    if B.shape[0] == 0:
        B = res.right[:0]

    omega = A @ V @ B.conj().T
    dec = MSDecomposition(
        A=A,
        B=B,
        omega=omega,
        sigma=sigma,
        dark_lower=list(range(g - rank)),
        dark_upper=list(range(e - rank)),
        pairing=np.arange(g + e),
    )
    dec.pairing = pairing_permutation(dec)
    return dec


def pairing_permutation(dec: MSDecomposition) -> np.ndarray:
    """Permutation exposing the block structure: coupled pairs first (one 2x2
    block per singular value, descending), dark states in the tail.

    Returned as an index array ``p``: reordering a Hamiltonian is
    ``H[np.ix_(p, p)]``; the matrix form has entries P[i, p[i]] = 1.
    """
    g, e, r = dec.g, dec.e, dec.rank
    n_dg, n_de = g - r, e - r
    order: list[int] = []
    for k in range(r):
        order.append(n_dg + k)
        order.append(g + n_de + k)
    order.extend(range(n_dg))
    order.extend(range(g, g + n_de))
    return np.array(order, dtype=int)


def ms_hamiltonian(sys: BipartiteSystem, dec: MSDecomposition, t: float | None = None) -> np.ndarray:
    """Degenerate Hamiltonian in the decomposed basis: U H0(t) U+."""
    if dec.g != sys.g or dec.e != sys.e:
        raise ContractViolation(
            f"decomposition dimensions ({dec.g},{dec.e}) do not match system "
            f"({sys.g},{sys.e})"
        )
    U = dec.U
    return U @ sys.h0(t) @ U.conj().T


def dark_states(dec: MSDecomposition) -> list[np.ndarray]:
    """Uncoupled states as unit vectors in the original basis.

    Lower-set dark vectors come first (conjugated A rows embedded in the
    first g slots), then upper-set ones.
    """
    g, e = dec.g, dec.e
    out = []
    for i in dec.dark_lower:
        v = np.zeros(g + e, dtype=complex)
        v[:g] = dec.A[i].conj()
        out.append(v)
    for i in dec.dark_upper:
        v = np.zeros(g + e, dtype=complex)
        v[g:] = dec.B[i].conj()
        out.append(v)
    return out
