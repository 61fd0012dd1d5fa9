"""Circuit parameters and the effective two-qubit charge Hamiltonian."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import PreconditionError
from .numerics import E_CHARGE, K_B, SX, SZ, kron, on_qubit

# e^2 / (1 fF) in ueV
E2_PER_FF = E_CHARGE * 1e21
# (1 fF * 1 uV) / (2e), dimensionless
NG_PER_FF_UV = 1e-21 / (2 * E_CHARGE)

REGIME_FACTOR = 5.0


@dataclass(frozen=True)
class PhysicalCircuitParams:
    """Lumped-element description of two SQUID-based Cooper-pair boxes.

    Energies in ueV, capacitances in fF, gate voltages in uV, fluxes in units of
    the flux quantum, temperature in K. ``ng1``/``ng2`` override the gate charge
    computed from ``C_g * V`` when given.
    """

    eps_J1: float
    eps_J2: float
    C_sigma1: float
    C_sigma2: float
    C_m: float
    C_g1: float = 1.0
    C_g2: float = 1.0
    V1: float = 0.0
    V2: float = 0.0
    Phi1: float = 0.0
    Phi2: float = 0.0
    T: float = 0.01
    ng1: float | None = None
    ng2: float | None = None

    def __post_init__(self):
        caps = (self.C_sigma1, self.C_sigma2, self.C_m, self.C_g1, self.C_g2)
        if min(caps) <= 0:
            raise PreconditionError("all capacitances must be positive")
        if self.C_sigma_det <= 0:
            raise PreconditionError("C_sigma1*C_sigma2 - C_m^2 must be positive")

    @property
    def C_sigma_det(self) -> float:
        return self.C_sigma1 * self.C_sigma2 - self.C_m**2

    @property
    def n_g(self) -> tuple[float, float]:
        ng1 = self.ng1 if self.ng1 is not None else self.C_g1 * self.V1 * NG_PER_FF_UV
        ng2 = self.ng2 if self.ng2 is not None else self.C_g2 * self.V2 * NG_PER_FF_UV
        return ng1, ng2

    @property
    def charging_energies(self) -> tuple[float, float]:
        """Box charging energies E_C1, E_C2 (ueV).

        Each uses the opposite box's total capacitance, i.e. the diagonal of the
        inverse capacitance matrix.
        """
        det = self.C_sigma_det
        return 4 * E2_PER_FF * self.C_sigma2 / det, 4 * E2_PER_FF * self.C_sigma1 / det

    @property
    def coupling_energy(self) -> float:
        """E_m = 4 e^2 C_m / C_sigma (ueV)."""
        return 4 * E2_PER_FF * self.C_m / self.C_sigma_det


@dataclass(frozen=True)
class EffectiveParams:
    """The five controllable energies of the reduced Hamiltonian (ueV)."""

    ec1: float = 0.0
    ec2: float = 0.0
    ej1: float = 0.0
    ej2: float = 0.0
    e12: float = 0.0

    def __post_init__(self):
        for name in ("ec1", "ec2", "ej1", "ej2", "e12"):
            if not math.isfinite(getattr(self, name)):
                raise PreconditionError(f"{name} must be finite")

    def ec(self, j: int) -> float:
        return self.ec1 if j == 1 else self.ec2

    def ej(self, j: int) -> float:
        return self.ej1 if j == 1 else self.ej2

    def with_qubit(self, j: int, *, ec: float | None = None, ej: float | None = None) -> "EffectiveParams":
        changes = {}
        if ec is not None:
            changes[f"ec{j}"] = ec
        if ej is not None:
            changes[f"ej{j}"] = ej
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return {"ec1_ueV": self.ec1, "ec2_ueV": self.ec2, "ej1_ueV": self.ej1,
                "ej2_ueV": self.ej2, "e12_ueV": self.e12}


def josephson_energy(eps_j: float, phi: float) -> float:
    return 2 * eps_j * math.cos(math.pi * phi)


def derive_effective(p: PhysicalCircuitParams) -> EffectiveParams:
    ec_box1, ec_box2 = p.charging_energies
    em = p.coupling_energy
    ng1, ng2 = p.n_g
    return EffectiveParams(
        ec1=ec_box1 * (ng1 - 0.5) + em * (ng2 / 2 - 0.25),
        ec2=ec_box2 * (ng2 - 0.5) + em * (ng1 / 2 - 0.25),
        ej1=josephson_energy(p.eps_J1, p.Phi1),
        ej2=josephson_energy(p.eps_J2, p.Phi2),
        e12=em / 4,
    )


def gate_charge_for_zero_ec(p: PhysicalCircuitParams, j: int) -> float:
    """Gate charge n_g of box `j` that cancels E_C^(j) given the other box's setting."""
    ec_box = p.charging_energies[j - 1]
    ng_other = p.n_g[2 - j]
    return 0.5 - p.coupling_energy * (ng_other / 2 - 0.25) / ec_box


def gate_voltage_for_zero_ec(p: PhysicalCircuitParams, j: int) -> float:
    cg = p.C_g1 if j == 1 else p.C_g2
    return gate_charge_for_zero_ec(p, j) / (cg * NG_PER_FF_UV)


def build_hamiltonian(ep: EffectiveParams) -> np.ndarray:
    h = np.zeros((4, 4), dtype=complex)
    for j in (1, 2):
        h += 0.5 * (ep.ec(j) * on_qubit(SZ, j) - ep.ej(j) * on_qubit(SX, j))
    h += ep.e12 * kron(SZ, SZ)
    return h


def h_int(e12: float) -> np.ndarray:
    return build_hamiltonian(EffectiveParams(e12=e12))


def h_co(ej: float, e12: float) -> np.ndarray:
    return build_hamiltonian(EffectiveParams(ej1=ej, ej2=ej, e12=e12))


def validate_charge_regime(p: PhysicalCircuitParams, delta_gap: float) -> list[str]:
    """Check k_B T << eps_J << E_C << Delta, each '<<' read as a factor of 5.

    Returns one message per violated inequality; never raises.
    """
    warnings_: list[str] = []
    kt = K_B * p.T
    for j, (eps, ec) in enumerate(zip((p.eps_J1, p.eps_J2), p.charging_energies), start=1):
        if REGIME_FACTOR * kt > eps:
            warnings_.append(f"qubit {j}: k_B T = {kt:.4g} ueV not << eps_J = {eps:.4g} ueV")
        if REGIME_FACTOR * eps > ec:
            warnings_.append(f"qubit {j}: eps_J = {eps:.4g} ueV not << E_C = {ec:.4g} ueV")
        if REGIME_FACTOR * ec > delta_gap:
            warnings_.append(f"qubit {j}: E_C = {ec:.4g} ueV not << Delta = {delta_gap:.4g} ueV")
    return warnings_
