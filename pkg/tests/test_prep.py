import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from chargepair.dissipation import concurrence
from chargepair.errors import InvalidStateError
from chargepair.gates import equal_up_to_phase, u_free
from chargepair.numerics import unitarity_error
from chargepair.prep import BELL_STATES, bell_density, bell_state, ground_state, prepare_bell, state_fidelity

LABELS = sorted(BELL_STATES)


@pytest.mark.parametrize("target", LABELS)
def test_prepare_reaches_target(target):
    seq, final = prepare_bell(target, 13.75)
    assert len(seq.steps) == 2
    assert state_fidelity(final, bell_state(target)) >= 1 - 1e-9
    assert unitarity_error(seq.unitary) <= 1e-10
    assert np.allclose(seq.unitary @ ground_state(), final)
    assert concurrence(final) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("target", LABELS)
def test_pulse_signs(target):
    seq, _ = prepare_bell(target, 13.75)
    first, second = seq.steps
    assert first.params.ec1 == pytest.approx(-2 * 13.75)
    expected = -2 * 13.75 if target.startswith("phi") else 2 * 13.75
    assert second.params.ec2 == pytest.approx(expected)
    assert seq.theta1 in (math.pi / 4, 3 * math.pi / 4, 5 * math.pi / 4, 7 * math.pi / 4)


def test_intermediate_state():
    seq, _ = prepare_bell("phi+", 13.75)
    mid = seq.steps[0].propagator.matrix @ ground_state()
    s = 1 / math.sqrt(2)
    candidates = [np.array([s, 0, sign * 1j * s, 0]) for sign in (1, -1)]
    assert any(np.allclose(mid, c, atol=1e-12) for c in candidates)


@given(st.floats(0.5, 60), st.sampled_from(LABELS))
def test_prepare_any_coupling(e12, target):
    _, final = prepare_bell(target, e12)
    assert state_fidelity(final, bell_state(target)) >= 1 - 1e-9


@given(st.floats(0, 100), st.sampled_from(LABELS))
def test_prepared_states_stationary(tau, target):
    _, final = prepare_bell(target, 13.75)
    evolved = u_free(13.75, tau).apply(final)
    assert abs(state_fidelity(evolved, final) - 1) <= 1e-12
    assert equal_up_to_phase(evolved, final, atol=1e-12)


def test_fidelity_examples():
    assert state_fidelity(bell_state("psi+"), bell_state("psi+")) == pytest.approx(1)
    assert state_fidelity(bell_state("psi+"), bell_state("psi-")) == pytest.approx(0)
    for label in LABELS:
        assert state_fidelity(np.eye(4) / 4, bell_density(label)) == pytest.approx(0.25)
    assert np.trace(bell_density("phi-")).real == pytest.approx(1)


def test_fidelity_phase_invariant():
    v = bell_state("phi-")
    assert state_fidelity(np.exp(0.7j) * v, v) == pytest.approx(1)


def test_ground_state_and_errors():
    g = ground_state()
    assert np.array_equal(g, [1, 0, 0, 0]) and np.linalg.norm(g) == 1
    with pytest.raises(ValueError):
        bell_state("chi")
    with pytest.raises(InvalidStateError):
        state_fidelity(np.diag([1.5, -0.5, 0, 0]), g)
