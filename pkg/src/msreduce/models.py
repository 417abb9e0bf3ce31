"""Built-in model systems with closed-form expected results.

Four standard configurations: the three-state lambda chain, the four-state
tripod, the double-lambda and the diamond (the latter realized as the same
coupling data under a relabeling of the states; only the level diagram
differs).  All frequencies are in units of 1/T with T the pulse duration.

Closed forms are written for zero common detuning and carry the conventions
of this package: nonnegative couplings, dark slots ordered by ascending
first-order shift, paired blocks by descending coupling.  Note the diagonal
first-order terms of the tripod are the *negatives* of the widely quoted
printed formulas, which correspond to the opposite sign of the shift
pattern; the forms below agree with exact numerical eigenvalues of the
tripod Hamiltonian as constructed here.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ms_core import BipartiteSystem
from .pulses import EnvelopeSpec

KINDS = ("lambda", "tripod", "double_lambda", "diamond")


@dataclass
class ModelSpec:
    """Parameter set for one built-in system.

    Applicable parameters per kind:
      lambda          omega_p, omega_s, shift (delta on ground state 2)
      tripod          omega_p, omega_s, omega_c, shift (pattern -d, 0, +d)
      double_lambda   omega_c, omega_d, shift_g, shift_e
      diamond         same as double_lambda
    """

    kind: str
    omega_p: float | None = None
    omega_s: float | None = None
    omega_c: float | None = None
    omega_d: float | None = None
    shift: float = 0.0
    shift_g: float = 0.0
    shift_e: float = 0.0
    detuning: float = 0.0
    envelope: EnvelopeSpec = field(default_factory=EnvelopeSpec)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}, expected one of {KINDS}")
        required = {
            "lambda": ("omega_p", "omega_s"),
            "tripod": ("omega_p", "omega_s", "omega_c"),
            "double_lambda": ("omega_c", "omega_d"),
            "diamond": ("omega_c", "omega_d"),
        }[self.kind]
        allowed = set(required)
        for name in ("omega_p", "omega_s", "omega_c", "omega_d"):
            v = getattr(self, name)
            if name in allowed:
                if v is None:
                    raise ValueError(f"{self.kind} model requires {name}")
            elif v is not None:
                raise ValueError(f"{name} is not a parameter of the {self.kind} model")
        if self.kind in ("lambda", "tripod"):
            if self.shift_g or self.shift_e:
                raise ValueError(f"{self.kind} model uses 'shift', not shift_g/shift_e")
        elif self.shift:
            raise ValueError(f"{self.kind} model uses shift_g/shift_e, not 'shift'")

    # -- derived quantities ------------------------------------------------
    @property
    def omega_rms(self) -> float:
        if self.kind == "lambda":
            return float(np.hypot(self.omega_p, self.omega_s))
        if self.kind == "tripod":
            return float(np.sqrt(self.omega_p**2 + self.omega_s**2 + self.omega_c**2))
        # largest coupling of the two pairs
        return float(max(abs(self.omega_c + self.omega_d), abs(self.omega_c - self.omega_d)))

    @property
    def omega_plus(self) -> float:
        return self.omega_c + self.omega_d

    @property
    def omega_minus(self) -> float:
        return self.omega_c - self.omega_d

    @property
    def omega_tilde_plus(self) -> float:
        return self.omega_p**2 + self.omega_c**2

    @property
    def omega_tilde_minus(self) -> float:
        return self.omega_p**2 - self.omega_c**2

    @property
    def delta_minus(self) -> float:
        return (self.shift_e - self.shift_g) / 4.0

    def dark_shift_pair(self) -> tuple[float, float]:
        """First-order eigenvalues of the two tripod dark slots, ascending."""
        if self.kind != "tripod":
            raise ValueError("dark_shift_pair is defined for the tripod model")
        om = self.omega_tilde_minus
        op = self.omega_tilde_plus
        s = np.sqrt(4 * self.omega_s**4 + 4 * op * self.omega_s**2 + om**2)
        r2 = self.omega_rms**2
        d1 = self.shift * (om - s) / (4 * r2)
        d2 = self.shift * (om + s) / (4 * r2)
        return (min(d1, d2), max(d1, d2))

    @property
    def dark_phase_rate(self) -> float:
        """First-order phase rate of tripod dark slot 2 (the larger one)."""
        return self.dark_shift_pair()[1]


def build(spec: ModelSpec) -> BipartiteSystem:
    """Assemble the coupling/shift data of a built-in system."""
    if spec.kind == "lambda":
        coupling = np.array([[spec.omega_s], [spec.omega_p]], dtype=complex)
        shifts_g = np.array([0.0, 2.0 * spec.shift])
        shifts_e = np.zeros(1)
    elif spec.kind == "tripod":
        coupling = np.array([[spec.omega_p], [spec.omega_s], [spec.omega_c]], dtype=complex)
        shifts_g = np.array([-spec.shift, 0.0, spec.shift])
        shifts_e = np.zeros(1)
    else:  # double_lambda / diamond share the coupling data
        coupling = np.array(
            [[spec.omega_d, spec.omega_c], [spec.omega_c, spec.omega_d]], dtype=complex
        )
        shifts_g = np.array([0.0, -spec.shift_g])
        shifts_e = np.array([0.0, spec.shift_e])
    return BipartiteSystem(
        coupling=coupling,
        delta=spec.detuning,
        shifts_g=shifts_g,
        shifts_e=shifts_e,
        envelope=spec.envelope,
    )


def expected_ms(spec: ModelSpec) -> np.ndarray:
    """Closed-form decomposed-frame Hamiltonian (first order in the shifts).

    Laid out in this package's basis order (dark slots first within each
    set, paired couplings descending and nonnegative).  Only valid at zero
    common detuning, where the printed closed forms exist.
    """
    if spec.detuning != 0.0:
        raise ValueError("closed-form results are only available at zero common detuning")
    f = spec.envelope.peak
    if spec.kind == "lambda":
        r2 = spec.omega_p**2 + spec.omega_s**2
        rms = f * np.sqrt(r2)
        dark = spec.shift * spec.omega_s**2 / r2
        bright = spec.shift * spec.omega_p**2 / (2 * r2)
        return np.array(
            [
                [dark, 0.0, 0.0],
                [0.0, bright, rms / 2],
                [0.0, rms / 2, bright],
            ]
        )
    if spec.kind == "tripod":
        r2 = spec.omega_p**2 + spec.omega_s**2 + spec.omega_c**2
        rms = f * np.sqrt(r2)
        d1, d2 = spec.dark_shift_pair()
        bright = -spec.shift * spec.omega_tilde_minus / (4 * r2)
        return np.array(
            [
                [d1, 0.0, 0.0, 0.0],
                [0.0, d2, 0.0, 0.0],
                [0.0, 0.0, bright, rms / 2],
                [0.0, 0.0, rms / 2, bright],
            ]
        )
    # double_lambda / diamond
    s1 = f * max(abs(spec.omega_plus), abs(spec.omega_minus))
    s2 = f * min(abs(spec.omega_plus), abs(spec.omega_minus))
    dm = spec.delta_minus
    H = np.zeros((4, 4))
    # layout: lower pair slots (0, 1), upper pair slots (2, 3)
    H[0, 0] = H[2, 2] = dm / 2
    H[1, 1] = H[3, 3] = dm / 2
    H[0, 2] = H[2, 0] = s1 / 2
    H[1, 3] = H[3, 1] = s2 / 2
    return H


def special_case_flags(spec: ModelSpec) -> list[str]:
    """Human-readable diagnostics for structurally special parameter sets."""
    flags: list[str] = []
    if spec.kind in ("double_lambda", "diamond"):
        if abs(spec.omega_minus) <= 1e-12 * max(1.0, abs(spec.omega_plus)):
            flags.append(
                "second pair uncoupled (omega_c - omega_d = 0): population "
                "placed there does not get excited"
            )
        if abs(spec.omega_plus) <= 1e-12 * max(1.0, abs(spec.omega_minus)):
            flags.append("first pair uncoupled (omega_c + omega_d = 0)")
    if spec.kind == "tripod":
        flags.append(
            "dark slot 2 evolves by pure phase at rate "
            f"{spec.dark_phase_rate:.6g}; the rate is tunable through omega_s"
        )
    return flags
