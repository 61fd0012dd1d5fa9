"""Deterministic two-pulse Bell-pair preparation from the ground state."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit import EffectiveParams
from .errors import InvalidStateError
from .gates import DurationSolution, Propagator, u_conditional
from .numerics import as_density

_S = 1 / math.sqrt(2)

BELL_STATES: dict[str, np.ndarray] = {
    "psi+": np.array([_S, 0, 0, _S], dtype=complex),
    "psi-": np.array([_S, 0, 0, -_S], dtype=complex),
    "phi+": np.array([0, _S, _S, 0], dtype=complex),
    "phi-": np.array([0, _S, -_S, 0], dtype=complex),
}

FIRST_PULSE_ANGLES = (math.pi / 4, 3 * math.pi / 4, 5 * math.pi / 4, 7 * math.pi / 4)
FIDELITY_TOL = 1e-9


@dataclass(frozen=True)
class PulseStep:
    propagator: Propagator
    params: EffectiveParams
    duration: float
    timing: DurationSolution


@dataclass(frozen=True)
class PulseSequence:
    steps: tuple[PulseStep, ...]
    target: str
    theta1: float

    @property
    def unitary(self) -> np.ndarray:
        u = np.eye(4, dtype=complex)
        for s in self.steps:
            u = s.propagator.matrix @ u
        return u

    @property
    def total_duration(self) -> float:
        return sum(s.duration for s in self.steps)


def bell_state(label: str) -> np.ndarray:
    try:
        return BELL_STATES[label].copy()
    except KeyError:
        raise ValueError(f"unknown Bell label {label!r}; expected one of {sorted(BELL_STATES)}") from None


def bell_density(label: str) -> np.ndarray:
    """Trace-normalized projector onto a Bell state."""
    v = bell_state(label)
    return np.outer(v, v.conj())


def ground_state() -> np.ndarray:
    return np.array([1, 0, 0, 0], dtype=complex)


def state_fidelity(a, b) -> float:
    """tr(rho_a rho_b); for two kets this is |<a|b>|^2."""
    ra, rb = as_density(a), as_density(b)
    f = float(np.real(np.trace(ra @ rb)))
    return min(1.0, max(0.0, f))


def prepare_bell(target: str, e12: float) -> tuple[PulseSequence, np.ndarray]:
    """Reach `target` from |00> with one conditional rotation per qubit.

    Pulse 1 rotates qubit 1 (only when qubit 2 is |0>) by one of the angles in
    :data:`FIRST_PULSE_ANGLES`; pulse 2 flips qubit 2 with theta = pi/2, gated
    on qubit 1 being |0> for the phi states and |1> for the psi states. The
    first angle whose final state lands on `target` (up to a global phase) is
    used.
    """
    want = bell_state(target)
    second_sign = "-" if target.startswith("phi") else "+"
    p2, ep2, sol2 = u_conditional(2, second_sign, math.pi / 2, e12)
    for theta1 in FIRST_PULSE_ANGLES:
        p1, ep1, sol1 = u_conditional(1, "-", theta1, e12)
        final = p2.matrix @ p1.matrix @ ground_state()
        if state_fidelity(final, want) >= 1 - FIDELITY_TOL:
            seq = PulseSequence(
                (PulseStep(p1, ep1, sol1.t, sol1), PulseStep(p2, ep2, sol2.t, sol2)),
                target,
                theta1,
            )
            return seq, final
    raise InvalidStateError(f"no first-pulse branch reaches {target}")  # pragma: no cover

