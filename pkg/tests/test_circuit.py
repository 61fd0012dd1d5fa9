import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from chargepair.circuit import (
    E2_PER_FF, EffectiveParams, PhysicalCircuitParams, build_hamiltonian, derive_effective,
    gate_voltage_for_zero_ec, h_co, h_int, validate_charge_regime,
)
from chargepair.errors import PreconditionError
from chargepair.numerics import K_B, is_hermitian

from .strategies import energies


def _params(**kw):
    base = dict(eps_J1=27.5, eps_J2=27.5, C_sigma1=2.0, C_sigma2=2.0, C_m=0.1)
    base.update(kw)
    return PhysicalCircuitParams(**base)


def test_co_resonance_zeroes_charging_terms():
    ep = derive_effective(_params(ng1=0.5, ng2=0.5))
    assert ep.ec1 == pytest.approx(0, abs=1e-12) and ep.ec2 == pytest.approx(0, abs=1e-12)


def test_half_flux_quantum_turns_off_josephson():
    ep = derive_effective(_params(Phi1=0.5, Phi2=0.5))
    assert abs(ep.ej1) < 1e-12 and abs(ep.ej2) < 1e-12
    assert derive_effective(_params()).ej1 == pytest.approx(55.0)


def test_coupling_for_em_equal_ej():
    # E_m = 4 e^2 C_m / (C1 C2 - C_m^2) = 55 ueV, solved for C_m with C1 = C2 = c
    c, em = 2.0, 55.0
    k = 4 * E2_PER_FF
    cm = (-k + math.sqrt(k * k + 4 * em * em * c * c)) / (2 * em)
    p = _params(C_sigma1=c, C_sigma2=c, C_m=cm)
    assert p.coupling_energy == pytest.approx(55.0, rel=1e-12)
    assert derive_effective(p).e12 == pytest.approx(13.75, rel=1e-12)


def test_opposite_index_charging_energy():
    p = _params(C_sigma1=2.0, C_sigma2=3.0, C_m=0.1)
    ec1, ec2 = p.charging_energies
    det = 2.0 * 3.0 - 0.01
    assert ec1 == pytest.approx(4 * E2_PER_FF * 3.0 / det)
    assert ec2 == pytest.approx(4 * E2_PER_FF * 2.0 / det)


def test_invalid_capacitances():
    with pytest.raises(PreconditionError):
        _params(C_m=-1)
    with pytest.raises(PreconditionError):
        _params(C_sigma1=1.0, C_sigma2=1.0, C_m=1.0)


def test_build_hamiltonian_examples():
    assert np.allclose(build_hamiltonian(EffectiveParams()), 0)
    assert np.allclose(h_int(7.0), np.diag([7, -7, -7, 7]))
    h = h_co(55.0, 13.75)
    assert h[0, 2] == pytest.approx(-27.5)
    assert h[0, 1] == pytest.approx(-27.5)


@given(energies, energies, energies, energies, energies)
def test_hamiltonian_hermitian(ec1, ec2, ej1, ej2, e12):
    h = build_hamiltonian(EffectiveParams(ec1, ec2, ej1, ej2, e12))
    assert is_hermitian(h, atol=0)


@given(st.floats(0.1, 5.0), st.floats(0.1, 5.0), st.floats(0.01, 0.5))
def test_co_resonance_diagonal(c1, c2, cm_frac):
    cm = cm_frac * math.sqrt(c1 * c2)
    p = _params(C_sigma1=c1, C_sigma2=c2, C_m=cm, ng1=0.5, ng2=0.5)
    ep = derive_effective(p)
    d = np.real(np.diag(build_hamiltonian(ep)))
    assert np.allclose(d, [ep.e12, -ep.e12, -ep.e12, ep.e12], atol=1e-9)


@given(st.floats(-2000, 2000))
def test_gate_voltage_cancels_ec2(v1):
    p = _params(V1=v1)
    v2 = gate_voltage_for_zero_ec(p, 2)
    q = _params(V1=v1, V2=v2)
    assert abs(derive_effective(q).ec2) <= 1e-12 * max(1.0, abs(v2))
    ng1, ng2 = q.n_g
    ec2_box = q.charging_energies[1]
    lhs = (ng2 - 0.5) / (ng1 - 0.5) if abs(ng1 - 0.5) > 1e-9 else None
    if lhs is not None:
        assert lhs == pytest.approx(-2 * derive_effective(q).e12 / ec2_box, rel=1e-9)


def test_regime_validation():
    assert validate_charge_regime(_params(), 2000.0) == []
    kt_equal = _params(T=27.5 / K_B)
    assert any("k_B T" in w for w in validate_charge_regime(kt_equal, 2000.0))
    big_ej = _params(eps_J1=5000.0)
    assert any("E_C" in w for w in validate_charge_regime(big_ej, 1e6))
    assert any("Delta" in w for w in validate_charge_regime(_params(), 10.0))
