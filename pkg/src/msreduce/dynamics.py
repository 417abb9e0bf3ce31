"""Time propagation and dynamical-equivalence diagnostics.

States evolve by midpoint piecewise-constant exponential stepping,
C(t+dt) = exp(-i H(t+dt/2) dt) C(t), which is exactly unitary at any step
size.  The Hamiltonian per step is either the full shifted one, the
degenerate one, or the first-order effective one rebuilt at the step
midpoint.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import ContractViolation, propagator_step
from .ms_core import BipartiteSystem, MSDecomposition, dark_states, ms_decompose
from .nondegenerate import effective_model

WHICH = ("full", "effective", "degenerate")

#: default resolution: 2000 substeps per window of 10 time units
DEFAULT_STEP = 10.0 / 2000.0
CONVERGENCE_TOL = 1e-8
MAX_REFINEMENTS = 4


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # shape (len(times), n)

    @property
    def populations(self) -> np.ndarray:
        return np.abs(self.states) ** 2

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]


@dataclass
class TrajectoryMetrics:
    max_population_gap: float
    final_infidelity: float
    population_gap_series: np.ndarray


@dataclass
class DarkPhaseResult:
    phase_rate: float
    min_amplitude: float
    final_overlap: float
    dark_vector: np.ndarray


def _hamiltonian_factory(sys: BipartiteSystem, which: str):
    if which == "full":
        fun = lambda t: sys.hamiltonian(t)  # noqa: E731
    elif which == "degenerate":
        fun = lambda t: sys.h0(t)  # noqa: E731
    elif which == "effective":
        dec = ms_decompose(sys)
        fun = lambda t: effective_model(sys, dec, t=t).h_eff  # noqa: E731
    else:
        raise ValueError(f"unknown hamiltonian selection {which!r}, expected one of {WHICH}")
    if sys.envelope.shape == "constant":
        H = fun(0.0)
        fun = lambda t: H  # noqa: E731
        fun.time_independent = True
    return fun


def _run(hfun, c0, times, substeps_per_interval):
    states = np.empty((len(times), len(c0)), dtype=complex)
    states[0] = c0
    c = np.array(c0, dtype=complex)
    constant = getattr(hfun, "time_independent", False)
    step_cache: dict[float, np.ndarray] = {}
    for i in range(len(times) - 1):
        t0, t1 = times[i], times[i + 1]
        m = substeps_per_interval[i]
        dt = (t1 - t0) / m
        for k in range(m):
            tm = t0 + (k + 0.5) * dt
            if constant:
                U = step_cache.get(dt)
                if U is None:
                    U = propagator_step(hfun(tm), dt)
                    step_cache[dt] = U
            else:
                U = propagator_step(hfun(tm), dt)
            c = U @ c
        states[i + 1] = c
    return states


def propagate(
    sys: BipartiteSystem,
    which: str,
    c0: np.ndarray,
    times: np.ndarray,
    max_step: float = DEFAULT_STEP,
) -> Trajectory:
    """Propagate an initial unit vector over a monotone time grid.

    Each grid interval is subdivided to at most ``max_step``; the subdivision
    is doubled until halving it moves the final state by less than 1e-8
    (cheap for constant-envelope systems, where each step is exact).
    """
    c0 = np.asarray(c0, dtype=complex)
    if abs(np.linalg.norm(c0) - 1.0) > 1e-10:
        raise ContractViolation(f"initial state norm {np.linalg.norm(c0):.6g} != 1")
    times = np.asarray(times, dtype=float)
    if len(times) < 2 or np.any(np.diff(times) <= 0):
        raise ContractViolation("time grid must be strictly increasing with >= 2 points")
    hfun = _hamiltonian_factory(sys, which)

    substeps = np.maximum(1, np.ceil(np.diff(times) / max_step).astype(int))
    states = _run(hfun, c0, times, substeps)
    if sys.envelope.shape == "constant":
        # piecewise-constant stepping is exact: no refinement needed
        return Trajectory(times=times, states=states)
    for _ in range(MAX_REFINEMENTS):
        finer = _run(hfun, c0, times, 2 * substeps)
        if np.linalg.norm(finer[-1] - states[-1]) < CONVERGENCE_TOL:
            return Trajectory(times=times, states=finer)
        substeps = 2 * substeps
        states = finer
    return Trajectory(times=times, states=states)


def compare(a: Trajectory, b: Trajectory) -> TrajectoryMetrics:
    """Population and final-state discrepancy between two trajectories.

    Both metrics are insensitive to a global phase.
    """
    if a.times.shape != b.times.shape or not np.allclose(a.times, b.times, atol=0, rtol=0):
        raise ContractViolation("trajectories were sampled on different grids")
    gaps = np.max(np.abs(a.populations - b.populations), axis=1)
    fid = np.abs(np.vdot(a.final_state, b.final_state)) ** 2
    return TrajectoryMetrics(
        max_population_gap=float(np.max(gaps)),
        final_infidelity=float(1.0 - fid),
        population_gap_series=gaps,
    )


def dark_phase_probe(
    sys: BipartiteSystem,
    t_final: float,
    which: str = "full",
    samples: int = 801,
    dec: MSDecomposition | None = None,
) -> DarkPhaseResult:
    """Propagate the second (larger-shift) uncoupled state of a tripod-like
    system and extract its accumulated phase rate.

    The returned rate is the eigenfrequency sign convention: a state
    evolving as exp(-i E t) reports rate E.
    """
    if dec is None:
        dec = ms_decompose(sys)
    if sys.e != 1 or len(dec.dark_lower) != 2:
        raise ContractViolation(
            "dark-phase probe needs a tripod-like system: one upper state and "
            f"exactly two uncoupled lower states (got e={sys.e}, "
            f"darks={len(dec.dark_lower)})"
        )
    d2 = dark_states(dec)[1]
    times = np.linspace(0.0, t_final, samples)
    traj = propagate(sys, which, d2, times)
    amps = traj.states @ d2.conj()
    phases = np.unwrap(np.angle(amps))
    rate = -(phases[-1] - phases[0]) / (times[-1] - times[0])
    return DarkPhaseResult(
        phase_rate=float(rate),
        min_amplitude=float(np.min(np.abs(amps))),
        final_overlap=float(np.abs(amps[-1])),
        dark_vector=d2,
    )
