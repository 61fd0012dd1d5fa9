"""Quasi-local encoding of measurement settings and the CHSH test on a prepared Bell pair."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .dissipation import concurrence
from .errors import PreconditionError
from .gates import u_j_bar
from .numerics import HBAR, SZ, as_density, dagger, kron
from .prep import prepare_bell

DEFAULT_EJ = 55.0  # ueV
DEFAULT_ANGLES = (-math.pi / 8, 3 * math.pi / 8)
_ZZ = kron(SZ, SZ)


@dataclass(frozen=True)
class EncodingSetting:
    """Phases phi_j = 2 gamma t_j / hbar written onto each qubit by a driven pulse."""

    phi1: float
    phi2: float
    em_over_ej: float
    ej: float = DEFAULT_EJ

    def __post_init__(self):
        if self.em_over_ej <= 0 or self.ej <= 0:
            raise PreconditionError("em_over_ej and ej must be positive")

    @property
    def e12(self) -> float:
        return self.em_over_ej * self.ej / 4

    @property
    def gamma(self) -> float:
        return math.hypot(self.e12, self.ej / 2)

    @property
    def cos_alpha(self) -> float:
        r = self.em_over_ej
        return r / math.sqrt(r * r + 4)

    @property
    def alpha(self) -> float:
        return math.acos(self.cos_alpha)

    def duration(self, j: int) -> float:
        """Pulse length (ns) for phase phi_j, taken modulo the 4 pi period of the pulse."""
        phi = self.phi1 if j == 1 else self.phi2
        return (phi % (4 * math.pi)) * HBAR / (2 * self.gamma)


def encoding_unitary(setting: EncodingSetting) -> np.ndarray:
    """Driven pulse on qubit 1, then on qubit 2."""
    u1 = u_j_bar(setting.ej, setting.e12, setting.duration(1), 1).matrix
    u2 = u_j_bar(setting.ej, setting.e12, setting.duration(2), 2).matrix
    return u2 @ u1


def encode(rho, setting: EncodingSetting) -> np.ndarray:
    u = encoding_unitary(setting)
    return u @ as_density(rho) @ dagger(u)


def prepared_pair(label: str, setting: EncodingSetting) -> np.ndarray:
    """Density matrix of the Bell pair produced by the two-pulse preparation at this coupling."""
    _, ket = prepare_bell(label, setting.e12)
    return np.outer(ket, ket.conj())


@dataclass(frozen=True)
class DeltaC:
    formula: float  # 1 - sqrt(1 - [sin 2a (1 - cos(2 phi1 + 2 phi2)) / 2]^2)
    variant: float  # same with (1 - cos(phi1 + phi2))
    direct: float  # 1 - C(encoded Bell pair)


def _delta_c(sin2a: float, angle: float) -> float:
    x = sin2a * (1 - math.cos(angle)) / 2
    return 1 - math.sqrt(max(0.0, 1 - x * x))


def delta_concurrence(setting: EncodingSetting, label: str = "psi+") -> DeltaC:
    sin2a = math.sin(2 * setting.alpha)
    s = setting.phi1 + setting.phi2
    direct = 1 - concurrence(encode(prepared_pair(label, setting), setting))
    return DeltaC(_delta_c(sin2a, 2 * s), _delta_c(sin2a, s), direct)


def correlation_theory(setting: EncodingSetting) -> float:
    """E = cos^2 a + sin^2 a cos(phi1 + phi2)."""
    c2 = setting.cos_alpha**2
    return c2 + (1 - c2) * math.cos(setting.phi1 + setting.phi2)


def correlation_matrix(rho_encoded) -> float:
    """Exact <sigma_z x sigma_z>."""
    return float(np.real(np.trace(as_density(rho_encoded) @ _ZZ)))


@dataclass(frozen=True)
class CorrelationRecord:
    phi1: float
    phi2: float
    E_theory: float
    E_matrix: float | None = None
    E_counted: float | None = None
    N_same: int | None = None
    N_diff: int | None = None


def correlation_counted(rho_encoded, shots: int, seed, phi1: float = math.nan,
                        phi2: float = math.nan, e_theory: float = math.nan) -> CorrelationRecord:
    """Sample joint sigma_z outcomes and form (N_same - N_diff) / shots."""
    if shots < 1:
        raise PreconditionError("shots must be >= 1")
    rho = as_density(rho_encoded)
    p = np.clip(np.real(np.diag(rho)), 0, None)
    counts = np.random.default_rng(seed).multinomial(shots, p / p.sum())
    same, diff = int(counts[0] + counts[3]), int(counts[1] + counts[2])
    return CorrelationRecord(phi1, phi2, e_theory, correlation_matrix(rho), (same - diff) / shots, same, diff)


@dataclass(frozen=True)
class CHSHResult:
    records: tuple[CorrelationRecord, ...]  # (phi1,phi2), (phi1,phi2'), (phi1',phi2), (phi1',phi2')
    em_over_ej: float

    @staticmethod
    def _f(e) -> float:
        return abs(e[0] + e[1] + e[2] - e[3])

    @property
    def f(self) -> float:
        return self._f([r.E_theory for r in self.records])

    @property
    def f_matrix(self) -> float:
        return self._f([r.E_matrix for r in self.records])

    @property
    def f_counted(self) -> float | None:
        if any(r.E_counted is None for r in self.records):
            return None
        return self._f([r.E_counted for r in self.records])

    @property
    def violated(self) -> bool:
        return self.f > 2


def setting_pairs(angles1=DEFAULT_ANGLES, angles2=DEFAULT_ANGLES) -> list[tuple[float, float]]:
    (a, a2), (b, b2) = angles1, angles2
    return [(a, b), (a, b2), (a2, b), (a2, b2)]


def chsh_test(em_over_ej: float, angles1=DEFAULT_ANGLES, angles2=DEFAULT_ANGLES,
              shots: int | None = None, seed=0, ej: float = DEFAULT_EJ,
              label: str = "psi+") -> CHSHResult:
    """Four correlations at the setting pairs and the CHSH value; `seed` is an int or SeedSequence."""
    pairs = setting_pairs(angles1, angles2)
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    streams = ss.spawn(len(pairs))
    rho0 = prepared_pair(label, EncodingSetting(0.0, 0.0, em_over_ej, ej))
    records = []
    for (p1, p2), stream in zip(pairs, streams):
        s = EncodingSetting(p1, p2, em_over_ej, ej)
        rho = encode(rho0, s)
        th = correlation_theory(s)
        if shots is None:
            records.append(CorrelationRecord(p1, p2, th, correlation_matrix(rho)))
        else:
            records.append(correlation_counted(rho, shots, stream, p1, p2, th))
    return CHSHResult(tuple(records), em_over_ej)


def lhv_strategies() -> list[tuple[int, int, int, int]]:
    """All deterministic assignments (a, a', b, b') of +-1 outcomes."""
    return list(itertools.product((1, -1), repeat=4))


def classical_bound(angles1=DEFAULT_ANGLES, angles2=DEFAULT_ANGLES) -> float:
    """Largest f over deterministic local strategies; the settings only label the outcomes."""
    setting_pairs(angles1, angles2)  # validates shape
    return float(max(abs(a * b + a * b2 + a2 * b - a2 * b2) for a, a2, b, b2 in lhv_strategies()))


@dataclass(frozen=True)
class TableRow:
    em_over_ej: float
    phi1: float
    phi2: float
    delta_c: DeltaC
    record: CorrelationRecord
    f: float


TABLE_COLUMNS = ("em_over_ej", "phi1_over_pi", "phi2_over_pi", "delta_c_formula", "delta_c_direct",
                 "E_theory", "E_counted", "f", "delta_c_variant", "E_matrix")


def table(ratios=(1.0, 0.1, 0.01), angles1=DEFAULT_ANGLES, angles2=DEFAULT_ANGLES,
          shots: int | None = None, seed: int = 0, ej: float = DEFAULT_EJ,
          label: str = "psi+") -> list[TableRow]:
    """Correlations, concurrence loss and f for each coupling ratio and setting pair."""
    rows = []
    ratios = list(ratios)
    for r, ss in zip(ratios, np.random.SeedSequence(seed).spawn(len(ratios))):
        res = chsh_test(r, angles1, angles2, shots, ss, ej, label)
        for rec in res.records:
            dc = delta_concurrence(EncodingSetting(rec.phi1, rec.phi2, r, ej), label)
            rows.append(TableRow(r, rec.phi1, rec.phi2, dc, rec, res.f))
    return rows


def table_row_values(row: TableRow) -> list:
    rec = row.record
    return [row.em_over_ej, row.phi1 / math.pi, row.phi2 / math.pi, row.delta_c.formula,
            row.delta_c.direct, rec.E_theory, rec.E_counted, row.f, row.delta_c.variant, rec.E_matrix]
