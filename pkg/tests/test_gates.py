import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from chargepair.circuit import EffectiveParams, build_hamiltonian, h_co, h_int
from chargepair.errors import NoCommensurateSolution, PreconditionError
from chargepair.gates import (
    U_CO_IDEAL, compose, equal_up_to_phase, hadamard_like, ideal_conditional, ideal_hadamard_like,
    solve_commensurate, u_cj, u_co_general, u_co_special, u_conditional, u_free, u_j_bar,
)
from chargepair.numerics import HBAR, I4, expm_unitary, frobenius, unitarity_error

from .strategies import energies, positive_energies, times

ORACLE_TOL = 1e-9


@given(energies, times)
def test_free_matches_oracle(e12, tau):
    u = u_free(e12, tau).matrix
    assert frobenius(u, expm_unitary(h_int(e12), tau)) <= 1e-12 * max(1, abs(e12 * tau))
    assert unitarity_error(u) <= 1e-10


def test_free_examples():
    assert np.allclose(u_free(13.75, 0).matrix, I4)
    tau = math.pi * HBAR / 13.75
    assert np.allclose(u_free(13.75, tau).matrix, -I4, atol=1e-12)


@given(energies, energies, times)
def test_co_general_matches_oracle(ej, e12, t):
    u = u_co_general(ej, e12, t).matrix
    assert frobenius(u, expm_unitary(h_co(ej, e12), t)) <= ORACLE_TOL
    assert unitarity_error(u) <= 1e-10


def test_co_general_double_flip():
    # cos(t Omega/hbar) = 1 and cos(t E12/hbar) = -1: Omega = 2 E12
    e12 = 10.0
    ej = e12 * math.sqrt(3)
    t = math.pi * HBAR / e12
    u = u_co_general(ej, e12, t).matrix
    flip = np.fliplr(np.eye(4))
    assert equal_up_to_phase(u, flip, atol=1e-10)
    assert np.allclose(u_co_general(ej, e12, 0).matrix, I4)


@given(energies, energies, times)
def test_co_general_antisymmetric_state(ej, e12, t):
    v = np.array([0, 1, -1, 0]) / math.sqrt(2)
    out = u_co_general(ej, e12, t).matrix @ v
    assert np.allclose(out, np.exp(1j * t * e12 / HBAR) * v, atol=1e-10)


def test_co_special_commensurate_ratio():
    e12 = 5.0
    ej = e12 * math.sqrt(15)  # Omega = 4 E12
    p, sol = u_co_special(ej, e12)
    assert sol.t == pytest.approx(math.pi / 2 * HBAR / e12, rel=1e-9)
    assert max(sol.residuals) <= 1e-9
    assert np.allclose(p.matrix, U_CO_IDEAL, atol=1e-9)
    assert frobenius(p.matrix, expm_unitary(h_co(ej, e12), sol.t)) <= ORACLE_TOL


def test_co_special_adjusts_ej():
    with pytest.raises(NoCommensurateSolution):
        u_co_special(55.0, 13.75, bound=200)
    p, sol = u_co_special(55.0, 13.75, adjust_ej=True)
    assert p.params.ej1 == pytest.approx(55.0, abs=1e-2)
    assert np.allclose(p.matrix, U_CO_IDEAL, atol=1e-9)
    assert frobenius(p.matrix, expm_unitary(p.hamiltonian(), sol.t)) <= ORACLE_TOL
    assert unitarity_error(p.matrix @ p.matrix) <= 1e-10


@given(energies, energies, st.floats(-30, 30), st.sampled_from([1, 2]), times)
def test_cj_matches_oracle(ec, ej, e12, j, t):
    ep = EffectiveParams(e12=e12).with_qubit(j, ec=ec, ej=ej)
    u = u_cj(ep, j, t).matrix
    assert frobenius(u, expm_unitary(build_hamiltonian(ep), t)) <= ORACLE_TOL
    assert unitarity_error(u) <= 1e-10


@given(energies, energies, energies, times)
def test_cj_never_flips_other_qubit(ec, ej, e12, t):
    for j in (1, 2):
        u = u_cj(EffectiveParams(e12=e12).with_qubit(j, ec=ec, ej=ej), j, t).matrix
        # basis index is 2*m + n, so qubit 1 is the high bit
        kbit = 0 if j == 1 else 1
        bad = [(x, y) for x in range(4) for y in range(4) if ((x >> kbit) & 1) != ((y >> kbit) & 1)]
        assert max(abs(u[x, y]) for x, y in bad) <= 1e-12


def test_cj_precondition():
    with pytest.raises(PreconditionError):
        u_cj(EffectiveParams(ec1=1.0, ec2=1.0, e12=1.0), 1, 1.0)
    assert np.allclose(u_cj(EffectiveParams(ec1=3.0, ej1=2.0, e12=1.0), 1, 0).matrix, I4)


@given(st.floats(0.05, 6.2), positive_energies, st.sampled_from([1, 2]), st.sampled_from(["+", "-"]))
def test_conditional_matches_ideal(theta, e12, j, sign):
    p, ep, sol = u_conditional(j, sign, theta, e12)
    assert max(sol.residuals) <= 1e-9
    assert ep.ec(j) == pytest.approx(2 * e12 if sign == "+" else -2 * e12)
    assert np.allclose(p.matrix, ideal_conditional(j, sign, theta), atol=1e-9)
    assert frobenius(p.matrix, expm_unitary(build_hamiltonian(ep), sol.t)) <= ORACLE_TOL


def test_conditional_examples():
    p, _, _ = u_conditional(1, "-", math.pi / 4, 13.75)
    out = p.matrix @ np.array([1, 0, 0, 0])
    assert np.allclose(out, np.array([1, 0, 1j, 0]) / math.sqrt(2), atol=1e-12)
    cnot, _, _ = u_conditional(2, "+", math.pi / 2, 13.75)
    assert np.allclose(cnot.matrix @ [0, 0, 1, 0], [0, 0, 0, 1j], atol=1e-12)
    assert np.allclose(cnot.matrix @ [1, 0, 0, 0], [1, 0, 0, 0], atol=1e-12)


def test_conditional_bounds():
    with pytest.raises(PreconditionError):
        u_conditional(1, "+", 0.0, 1.0)
    with pytest.raises(PreconditionError):
        u_conditional(1, "+", 1.0, -1.0)
    with pytest.raises(NoCommensurateSolution):
        u_conditional(1, "+", 1.0, 10.0, bound=3, ej_max=1e-3)
    with pytest.raises(ValueError):
        u_conditional(1, "x", 1.0, 1.0)


@given(energies, energies, st.sampled_from([1, 2]), times)
def test_j_bar_matches_oracle(ej, e12, j, t):
    p = u_j_bar(ej, e12, t, j)
    assert frobenius(p.matrix, expm_unitary(p.hamiltonian(), t)) <= ORACLE_TOL
    assert unitarity_error(p.matrix) <= 1e-10


@given(energies, times, st.sampled_from([1, 2]))
def test_j_bar_reduces_to_free(e12, t, j):
    assert np.allclose(u_j_bar(0.0, e12, t, j).matrix, u_free(e12, t).matrix, atol=1e-12)
    assert np.allclose(u_j_bar(5.0, e12, 0.0, j).matrix, I4)


@pytest.mark.parametrize("j", [1, 2])
def test_hadamard_like(j):
    p = hadamard_like(j, 13.75)
    assert np.allclose(p.matrix, ideal_hadamard_like(j), atol=1e-12)
    assert math.sin(math.hypot(13.75, 13.75) * p.duration / HBAR) == pytest.approx(1.0)


def test_solve_commensurate_examples():
    w = 2.0
    assert solve_commensurate([w], [0.0]).t == pytest.approx(math.pi)
    assert solve_commensurate([w, 2 * w], [0.0, 0.0]).t == pytest.approx(math.pi)
    with pytest.raises(NoCommensurateSolution):
        solve_commensurate([1.0, math.sqrt(2)], [0.0, 0.0], bound=100, tol=1e-12)
    with pytest.raises(PreconditionError):
        solve_commensurate([0.0], [0.0])


@given(st.integers(1, 20), st.integers(1, 20), st.floats(0.1, 10))
def test_solve_commensurate_minimal(p, q, w):
    # w1 t = 2 pi p', w2 t = 2 pi q' with w2/w1 = q/p; smallest t = 2 pi p / (w gcd)
    sol = solve_commensurate([w * p, w * q], [0.0, 0.0])
    g = math.gcd(p, q)
    assert sol.t == pytest.approx(2 * math.pi / (w * g), rel=1e-9)


def test_compose_order():
    a = u_conditional(1, "-", math.pi / 4, 13.75)[0]
    b = u_conditional(2, "+", math.pi / 2, 13.75)[0]
    assert np.allclose(compose(a, b), b.matrix @ a.matrix)
