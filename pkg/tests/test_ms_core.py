"""Decomposition structure tests on randomized bipartite systems."""

import numpy as np
import pytest

from msreduce.linalg import is_unitary
from msreduce.ms_core import (
    BipartiteSystem,
    dark_states,
    ms_decompose,
    ms_hamiltonian,
    pairing_permutation,
)


def random_system(rng, g=None, e=None, shifts=True, delta=None):
    g = g or int(rng.integers(1, 6))
    e = e or int(rng.integers(1, 4))
    V = rng.normal(size=(g, e)) + 1j * rng.normal(size=(g, e))
    kw = {}
    if shifts:
        kw["shifts_g"] = 0.01 * rng.normal(size=g)
        kw["shifts_e"] = 0.01 * rng.normal(size=e)
    return BipartiteSystem(
        coupling=V, delta=rng.normal() if delta is None else delta, **kw
    )


def test_system_validation():
    with pytest.raises(ValueError, match="shift lengths"):
        BipartiteSystem(coupling=np.ones((2, 1)), shifts_g=[0.0])
    with pytest.raises(ValueError, match="detuning"):
        BipartiteSystem(coupling=np.ones((2, 1)), delta=np.inf)


def test_hamiltonian_layout():
    sys = BipartiteSystem(
        coupling=np.array([[2.0], [3.0]]),
        delta=0.4,
        shifts_g=np.array([0.0, 0.2]),
        shifts_e=np.array([0.1]),
    )
    H = sys.hamiltonian()
    assert H[0, 0] == -0.2 and H[1, 1] == pytest.approx(-0.2 + 0.1)
    assert H[2, 2] == pytest.approx(0.2 + 0.05)
    assert H[0, 2] == 1.0 and H[1, 2] == 1.5
    np.testing.assert_allclose(H, H.conj().T)


def test_decompose_unitary_and_block_sparsity():
    rng = np.random.default_rng(23)
    for _ in range(30):
        sys = random_system(rng)
        dec = ms_decompose(sys)
        assert is_unitary(dec.U)
        # omega has a single nonnegative entry per coupled pair
        r = dec.rank
        D = np.abs(dec.omega)
        for i in range(dec.g):
            for j in range(dec.e):
                on = (i - (dec.g - r)) == (j - (dec.e - r)) and i >= dec.g - r
                if not on:
                    assert D[i, j] < 1e-12 * max(1.0, dec.sigma[0] if r else 1.0)
        assert len(dec.dark_lower) == dec.g - r
        assert len(dec.dark_upper) == dec.e - r


def test_dark_count_matches_rank_deficiency():
    rng = np.random.default_rng(5)
    # engineered rank-1 coupling, g=3 e=2 -> 2 lower darks + 1 upper dark
    a = rng.normal(size=3)
    b = rng.normal(size=2)
    sys = BipartiteSystem(coupling=np.outer(a, b))
    dec = ms_decompose(sys)
    assert dec.rank == 1
    assert len(dec.dark_lower) == 2 and len(dec.dark_upper) == 1
    for v in dark_states(dec):
        H = sys.hamiltonian()
        # uncoupled: H maps the dark vector within its own set (phase evolution only)
        w = H @ v
        coupled_part = np.where(np.abs(v) > 0, 0.0, np.abs(w))
        assert np.max(coupled_part) < 1e-12


def test_pairing_exposes_two_by_two_blocks():
    rng = np.random.default_rng(31)
    for _ in range(20):
        sys = random_system(rng, delta=float(rng.normal()))
        dec = ms_decompose(sys)
        p = pairing_permutation(dec)
        H = ms_hamiltonian(sys, dec)[np.ix_(p, p)]
        r = dec.rank
        mask = np.zeros_like(H, dtype=bool)
        for k in range(r):
            mask[2 * k : 2 * k + 2, 2 * k : 2 * k + 2] = True
        for k in range(2 * r, sys.n):
            mask[k, k] = True
        off = np.abs(H[~mask])
        assert off.size == 0 or np.max(off) < 1e-12 * max(1.0, np.max(np.abs(H)))


def test_pair_ordering_descending_sigma():
    sys = BipartiteSystem(coupling=np.diag([1.0, 3.0, 2.0]))
    dec = ms_decompose(sys)
    np.testing.assert_allclose(dec.sigma, [3.0, 2.0, 1.0])


def test_dark_basis_diagonalizes_projected_shifts():
    # degenerate dark space adapted to the shift direction
    rng = np.random.default_rng(47)
    V = np.outer(rng.normal(size=4), rng.normal(size=2))
    V = np.hstack([V, rng.normal(size=(4, 1))])  # rank 2, two lower darks
    shifts_g = np.array([0.03, -0.01, 0.02, 0.0])
    sys = BipartiteSystem(coupling=V, shifts_g=shifts_g)
    dec = ms_decompose(sys)
    rows = dec.A[dec.dark_lower]
    M = rows @ (0.5 * np.diag(shifts_g)) @ rows.conj().T
    off = M - np.diag(np.diag(M))
    assert np.max(np.abs(off)) < 1e-12
    assert np.all(np.diff(np.real(np.diag(M))) >= -1e-15)


def test_equal_sigma_group_keeps_omega_diagonal():
    # two equal singular values with degeneracy-lifting shifts
    V = np.eye(2) * 2.0
    sys = BipartiteSystem(coupling=V, shifts_g=[0.01, -0.01], shifts_e=[0.005, 0.02])
    dec = ms_decompose(sys)
    D = dec.A @ V @ dec.B.conj().T
    assert np.max(np.abs(D - np.diag(np.diag(D)))) < 1e-12
    assert np.min(np.real(np.diag(D))) > 0


def test_decompose_deterministic():
    rng = np.random.default_rng(61)
    sys = random_system(rng)
    d1 = ms_decompose(sys)
    d2 = ms_decompose(sys)
    assert np.array_equal(d1.A, d2.A) and np.array_equal(d1.B, d2.B)
    assert np.array_equal(d1.pairing, d2.pairing)
