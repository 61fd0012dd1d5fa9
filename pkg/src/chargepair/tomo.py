"""Projective readout, the reconstruction schedule and linear-inversion tomography."""
from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import PreconditionError, RankDeficient
from .gates import hadamard_like, u_co_special, u_conditional
from .numerics import P1, as_density, dagger, kron, on_qubit

N_PARAMS = 16
RANK_TOL = 1e-9


class ProjectiveKind(enum.Enum):
    P1 = "P1"
    P2 = "P2"
    P12 = "P12"

    @property
    def projector(self) -> np.ndarray:
        if self is ProjectiveKind.P1:
            return on_qubit(P1, 1)
        if self is ProjectiveKind.P2:
            return on_qubit(P1, 2)
        return kron(P1, P1)


def measure_probability(rho, kind: ProjectiveKind) -> float:
    rho = as_density(rho)
    p = float(np.real(np.trace(rho @ ProjectiveKind(kind).projector)))
    return min(1.0, max(0.0, p))


def sample_counts(prob: float, shots: int, seed) -> int:
    """Binomial number of 'click' outcomes; `seed` may be an int or a SeedSequence."""
    if not 0 <= prob <= 1:
        raise PreconditionError(f"probability {prob} outside [0, 1]")
    if shots < 1:
        raise PreconditionError("shots must be >= 1")
    return int(np.random.default_rng(seed).binomial(shots, prob))


# ---------------------------------------------------------------- parameters

_BASIS_LABELS = ("00", "01", "10", "11")
_PAIRS = [(a, b) for a in range(4) for b in range(a + 1, 4)]


def _element(a: int, b: int) -> str:
    return f"rho_{_BASIS_LABELS[a]},{_BASIS_LABELS[b]}"


PARAM_LABELS: tuple[str, ...] = tuple(
    [_element(a, a) for a in range(4)]
    + [f"Re {_element(a, b)}" for a, b in _PAIRS]
    + [f"Im {_element(a, b)}" for a, b in _PAIRS]
)


@lru_cache(maxsize=1)
def _param_basis() -> np.ndarray:
    """B_k with rho = sum_k x_k B_k for the real parameter vector x."""
    basis = np.zeros((N_PARAMS, 4, 4), dtype=complex)
    for a in range(4):
        basis[a, a, a] = 1
    for i, (a, b) in enumerate(_PAIRS):
        basis[4 + i, a, b] = basis[4 + i, b, a] = 1
        basis[10 + i, a, b] = 1j
        basis[10 + i, b, a] = -1j
    basis.setflags(write=False)
    return basis


def density_to_params(rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    x = [rho[a, a].real for a in range(4)]
    x += [rho[a, b].real for a, b in _PAIRS]
    x += [rho[a, b].imag for a, b in _PAIRS]
    return np.array(x)


def params_to_density(x) -> np.ndarray:
    return np.tensordot(np.asarray(x, dtype=float), _param_basis(), axes=1)


# ---------------------------------------------------------------- schedule

_TOKEN = re.compile(r"UJ([12])|U([+-])([12])\(([^)]*)\)|Uco")
_ANGLE = re.compile(r"^\s*(\d*\.?\d*)\s*\*?\s*pi\s*(?:/\s*(\d+(?:\.\d+)?))?\s*$")


def _parse_angle(text: str) -> float:
    m = _ANGLE.match(text)
    if m:
        num = float(m.group(1)) if m.group(1) else 1.0
        den = float(m.group(2)) if m.group(2) else 1.0
        return num * math.pi / den
    return float(text)


@lru_cache(maxsize=256)
def preop_matrix(tag: str, e12: float, ej_co: float | None = None) -> np.ndarray:
    """Unitary for a pre-measurement tag written as an operator product.

    Tags are "none" or a concatenation of ``UJ1``, ``UJ2``, ``Uco`` and
    ``U<sign><qubit>(<angle>)``; as in any operator product, the rightmost
    factor acts first. ``Uco`` uses ``ej_co`` (default 4 E_12), retuned to the
    nearest value admitting the special co-resonance timing.
    """
    tag = tag.strip()
    if tag in ("", "none"):
        u = np.eye(4, dtype=complex)
        u.setflags(write=False)
        return u
    pos, u = 0, np.eye(4, dtype=complex)
    for m in _TOKEN.finditer(tag):
        if tag[pos:m.start()].strip():
            raise ValueError(f"cannot parse preop tag {tag!r}")
        pos = m.end()
        if m.group(1):
            factor = hadamard_like(int(m.group(1)), e12).matrix
        elif m.group(2):
            factor = u_conditional(int(m.group(3)), m.group(2), _parse_angle(m.group(4)), e12)[0].matrix
        else:
            ej = 4 * e12 if ej_co is None else ej_co
            factor = u_co_special(ej, e12, adjust_ej=True)[0].matrix
        u = u @ factor
    if tag[pos:].strip() or pos == 0:
        raise ValueError(f"cannot parse preop tag {tag!r}")
    u.setflags(write=False)
    return u


@dataclass(frozen=True)
class ScheduleRow:
    preop: str
    measurement: ProjectiveKind
    determines: str = ""


DEFAULT_SCHEDULE: tuple[ScheduleRow, ...] = tuple(
    ScheduleRow(pre, ProjectiveKind(kind), det)
    for pre, kind, det in [
        ("none", "P12", "rho_11,11"),
        ("none", "P1", "rho_10,10"),
        ("none", "P2", "rho_01,01"),
        ("UJ1", "P12", "Re rho_01,11"),
        ("UJ1", "P1", "Re rho_00,10"),
        ("UJ2", "P12", "Re rho_10,11"),
        ("UJ2", "P2", "Re rho_00,01"),
        ("U-1(pi/4)U+2(pi/2)", "P1", "Re rho_00,11"),
        ("U+1(pi/4)U+2(pi/2)", "P12", "Re rho_01,10"),
        ("U-1(pi/4)", "P2", "Im rho_00,10"),
        ("U+1(pi/4)", "P2", "Im rho_01,11"),
        ("U-2(pi/4)", "P2", "Im rho_00,01"),
        ("U+2(pi/4)", "P2", "Im rho_10,11"),
        ("Uco", "P12", "Im rho_00,11"),
        ("Uco", "P2", "Im rho_01,10"),
    ]
)


def row_functional(row: ScheduleRow, e12: float) -> np.ndarray:
    """Coefficients c with tr(U rho U^dag P) = c . x for the parameter vector x."""
    u = preop_matrix(row.preop, e12)
    heis = dagger(u) @ row.measurement.projector @ u
    # tr(B_k M) for Hermitian M and each basis element B_k
    return np.real(np.einsum("kab,ba->k", _param_basis(), heis))


def candidate_rows(schedule: Sequence[ScheduleRow]) -> list[ScheduleRow]:
    """Every (preop, measurement) pair built from the schedule's preops, in schedule order."""
    seen = {(r.preop, r.measurement) for r in schedule}
    out, preops = [], []
    for r in schedule:
        if r.preop not in preops:
            preops.append(r.preop)
    for pre in preops:
        for kind in (ProjectiveKind.P12, ProjectiveKind.P1, ProjectiveKind.P2):
            if (pre, kind) not in seen:
                out.append(ScheduleRow(pre, kind, "augmentation"))
    return out


@dataclass(frozen=True)
class InversionMap:
    rows: tuple[ScheduleRow, ...]
    matrix: np.ndarray  # (len(rows) + 1) x 16; last row is the trace constraint
    rank: int
    condition_number: float
    augmented: tuple[ScheduleRow, ...] = field(default=())

    def solve(self, probabilities) -> tuple[np.ndarray, np.ndarray]:
        b = np.append(np.asarray(probabilities, dtype=float), 1.0)
        x, *_ = np.linalg.lstsq(self.matrix, b, rcond=None)
        return x, self.matrix @ x - b


def _stack(rows, e12) -> np.ndarray:
    trace = np.zeros(N_PARAMS)
    trace[:4] = 1
    return np.vstack([row_functional(r, e12) for r in rows] + [trace])


def _rank(a: np.ndarray) -> int:
    s = np.linalg.svd(a, compute_uv=False)
    return int(np.sum(s > RANK_TOL * s[0]))


def build_inversion_map(schedule: Sequence[ScheduleRow] = DEFAULT_SCHEDULE, e12: float = 13.75,
                        augment: bool = True) -> InversionMap:
    """Stack the row functionals with tr(rho) = 1 and check they fix all 16 parameters.

    If the schedule is rank-deficient and `augment` is set, rows from
    :func:`candidate_rows` are appended greedily (each kept only if it raises
    the rank) until the map is invertible.
    """
    rows = list(schedule)
    a = _stack(rows, e12)
    rank = _rank(a)
    added: list[ScheduleRow] = []
    if rank < N_PARAMS and augment:
        for cand in candidate_rows(rows):
            trial = np.vstack([a[:-1], row_functional(cand, e12), a[-1]])
            r = _rank(trial)
            if r > rank:
                a, rank = trial, r
                added.append(cand)
                if rank == N_PARAMS:
                    break
    if rank < N_PARAMS:
        raise RankDeficient(f"schedule determines only {rank} of {N_PARAMS} real parameters")
    s = np.linalg.svd(a, compute_uv=False)
    return InversionMap(tuple(rows + added), a, rank, float(s[0] / s[-1]), tuple(added))


@dataclass(frozen=True)
class ReconstructionResult:
    rho_hat: np.ndarray
    params: np.ndarray
    residuals: np.ndarray
    condition_number: float
    shots: int | None
    min_eigenvalue: float

    def as_dict(self) -> dict:
        return {
            "parameters": dict(zip(PARAM_LABELS, map(float, self.params))),
            "condition_number": self.condition_number,
            "shots": self.shots if self.shots is not None else "exact",
            "min_eigenvalue": self.min_eigenvalue,
            "max_abs_residual": float(np.max(np.abs(self.residuals))),
        }


def reconstruct(state_source: Callable[[], np.ndarray] | np.ndarray,
                schedule: Sequence[ScheduleRow] | InversionMap = DEFAULT_SCHEDULE,
                shots: int | None = None, seed: int = 0, e12: float = 13.75) -> ReconstructionResult:
    """Estimate rho from one fresh copy per schedule row.

    Exact mode (``shots=None``) uses Born probabilities. Shot mode draws
    binomial counts with one independent stream per row, spawned from `seed`.
    """
    imap = schedule if isinstance(schedule, InversionMap) else build_inversion_map(schedule, e12)
    source = state_source if callable(state_source) else (lambda: state_source)
    streams = np.random.SeedSequence(seed).spawn(len(imap.rows))
    probs = np.empty(len(imap.rows))
    for i, row in enumerate(imap.rows):
        c = imap.matrix[i]
        p = float(c @ density_to_params(as_density(source())))
        p = min(1.0, max(0.0, p))
        probs[i] = p if shots is None else sample_counts(p, shots, streams[i]) / shots
    x, residuals = imap.solve(probs)
    rho = params_to_density(x)
    rho = 0.5 * (rho + dagger(rho))
    rho = rho / np.trace(rho).real
    return ReconstructionResult(
        rho, density_to_params(rho), residuals, imap.condition_number, shots,
        float(np.linalg.eigvalsh(rho).min()),
    )
