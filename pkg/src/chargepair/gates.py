"""Closed-form propagators of the fixed-coupling two-qubit circuit and their timing solvers.

All propagators are built analytically; :func:`chargepair.numerics.expm_unitary`
of the corresponding Hamiltonian is the independent check used in the tests.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .circuit import EffectiveParams, build_hamiltonian
from .errors import NoCommensurateSolution, PreconditionError
from .numerics import HBAR, I2, P0, P1, SX, SZ, dagger, kron, on_qubit

DEFAULT_BOUND = 10_000
DEFAULT_TOL = 1e-9
TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class Propagator:
    matrix: np.ndarray
    source: str
    params: EffectiveParams
    duration: float  # ns

    def hamiltonian(self) -> np.ndarray:
        return build_hamiltonian(self.params)

    def apply(self, state: np.ndarray) -> np.ndarray:
        """Act on a ket (1-d) or conjugate a density matrix (2-d)."""
        state = np.asarray(state, dtype=complex)
        if state.ndim == 1:
            return self.matrix @ state
        return self.matrix @ state @ dagger(self.matrix)


@dataclass(frozen=True)
class DurationSolution:
    t: float  # ns
    residuals: tuple[float, ...]
    periods: tuple[int, ...] = field(default=())


def _wrap(phase):
    """Map phases to (-pi, pi]."""
    return (np.asarray(phase) + math.pi) % TWO_PI - math.pi


def _sin_over(s, t):
    # sin(s)/scale with s = t*scale/hbar; finite as scale -> 0
    return (t / HBAR) * float(np.sinc(s / math.pi))


def _controlled(block_k0: np.ndarray, block_k1: np.ndarray, j: int) -> np.ndarray:
    """Operator acting on qubit j with `block_k0` when the other qubit is |0>, `block_k1` when |1>."""
    if j == 1:
        return kron(block_k0, P0) + kron(block_k1, P1)
    if j == 2:
        return kron(P0, block_k0) + kron(P1, block_k1)
    raise ValueError(f"qubit index must be 1 or 2, got {j}")


def equal_up_to_phase(u, v, atol: float = 1e-9) -> bool:
    u, v = np.asarray(u), np.asarray(v)
    overlap = np.vdot(u.ravel(), v.ravel())
    if abs(overlap) == 0:
        return False
    phase = overlap / abs(overlap)
    return bool(np.max(np.abs(u * phase - v)) <= atol)


def solve_commensurate(omega_list, phase_targets, bound: int = DEFAULT_BOUND,
                       tol: float = DEFAULT_TOL) -> DurationSolution:
    """Smallest t > 0 with omega_i * t = target_i (mod 2*pi) for every i.

    Candidates are the solutions of the slowest nonzero condition over `bound`
    of its periods; every true solution lies on that lattice, so the first
    candidate meeting all residuals is the minimum.
    """
    omegas = np.asarray(omega_list, dtype=float)
    targets = np.asarray(phase_targets, dtype=float)
    if omegas.shape != targets.shape or omegas.ndim != 1:
        raise ValueError("omega_list and phase_targets must be equal-length sequences")
    nonzero = np.flatnonzero(omegas != 0)
    if nonzero.size == 0:
        raise PreconditionError("at least one frequency must be nonzero")
    zero = omegas == 0
    if np.any(np.abs(_wrap(targets[zero])) > tol):
        raise NoCommensurateSolution("a zero-frequency condition has a nonzero target phase")

    ref = nonzero[np.argmin(np.abs(omegas[nonzero]))]
    w_ref = abs(omegas[ref])
    phi_ref = (math.copysign(1.0, omegas[ref]) * targets[ref]) % TWO_PI
    k = np.arange(bound + 1, dtype=float)
    t = (phi_ref + TWO_PI * k) / w_ref
    t = t[t > tol / w_ref]
    res = np.abs(_wrap(omegas[:, None] * t[None, :] - targets[:, None]))
    ok = np.flatnonzero(np.all(res <= tol, axis=0))
    if ok.size == 0:
        best = np.argmin(res.max(axis=0))
        raise NoCommensurateSolution(
            f"no duration within {bound} periods; best residual {res[:, best].max():.3e} rad"
        )
    i = ok[0]
    t_sol = float(t[i])
    periods = tuple(int(round(x)) for x in (omegas * t_sol - targets) / TWO_PI)
    return DurationSolution(t_sol, tuple(float(r) for r in res[:, i]), periods)


def u_free(e12: float, tau: float) -> Propagator:
    """Idle evolution under E_12 sz(x)sz."""
    a0 = e12 * tau / HBAR
    m = np.diag(np.exp(np.array([-1j, 1j, 1j, -1j]) * a0))
    return Propagator(m, "free", EffectiveParams(e12=e12), tau)


def u_co_general(ej: float, e12: float, t: float) -> Propagator:
    """Both qubits at co-resonance with equal Josephson energy `ej`."""
    omega = math.hypot(ej, e12)
    s = t * omega / HBAR
    sin_over = _sin_over(s, t)
    ph = np.exp(-1j * t * e12 / HBAR)
    core = math.cos(s) - 1j * e12 * sin_over
    a = core + ph
    b = 1j * ej * sin_over
    c = core - ph
    m = 0.5 * np.array(
        [[a, b, b, c],
         [b, np.conj(a), np.conj(c), b],
         [b, np.conj(c), np.conj(a), b],
         [c, b, b, a]],
        dtype=complex,
    )
    return Propagator(m, "co-resonance", EffectiveParams(ej1=ej, ej2=ej, e12=e12), t)


U_CO_IDEAL = 0.5 * np.array(
    [[1 - 1j, 0, 0, 1 + 1j],
     [0, 1 + 1j, 1 - 1j, 0],
     [0, 1 - 1j, 1 + 1j, 0],
     [1 + 1j, 0, 0, 1 - 1j]],
    dtype=complex,
)


def _co_special_ej(ej: float, e12: float, max_index: int = 64) -> float:
    """Josephson energy nearest `ej` whose Omega/E_12 ratio equals 4m/(1+4n)."""
    best = None
    for n in range(max_index):
        for m in range(1, 4 * max_index):
            ratio = 4 * m / (1 + 4 * n)
            if ratio <= 1:
                continue
            cand = e12 * math.sqrt(ratio**2 - 1)
            t = (math.pi / 2 + TWO_PI * n) * HBAR / e12
            key = (abs(cand - ej), t)
            if best is None or key < best[0]:
                best = (key, cand)
    return best[1]


def u_co_special(ej: float, e12: float, bound: int = DEFAULT_BOUND, tol: float = DEFAULT_TOL,
                 adjust_ej: bool = False) -> tuple[Propagator, DurationSolution]:
    """Co-resonance pulse with cos(t Omega/hbar) = sin(t E_12/hbar) = 1.

    With ``adjust_ej`` the Josephson energy (a flux knob) is retuned to the
    nearest commensurate value when no duration exists for the given ratio.
    """
    omega = math.hypot(ej, e12)
    try:
        sol = solve_commensurate([omega / HBAR, e12 / HBAR], [0.0, math.pi / 2], bound, tol)
    except NoCommensurateSolution:
        if not adjust_ej or e12 <= 0:
            raise
        ej = _co_special_ej(ej, e12)
        omega = math.hypot(ej, e12)
        sol = solve_commensurate([omega / HBAR, e12 / HBAR], [0.0, math.pi / 2], bound, tol)
    p = u_co_general(ej, e12, sol.t)
    return Propagator(p.matrix, "co-resonance special", p.params, sol.t), sol


def u_cj(ep: EffectiveParams, j: int, t: float) -> Propagator:
    """Rotation of qubit j conditioned on the state of qubit k (k's own terms switched off)."""
    k = 3 - j
    if abs(ep.ec(k)) > 1e-12 or abs(ep.ej(k)) > 1e-12:
        raise PreconditionError(f"qubit {k} must have E_C = E_J = 0")
    ec, ej, e12 = ep.ec(j), ep.ej(j), ep.e12

    def block(sign: int) -> np.ndarray:
        dz = ec / 2 + sign * e12
        lam = math.hypot(dz, ej / 2)
        s = t * lam / HBAR
        sin_over = _sin_over(s, t)
        mu = math.cos(s) - 1j * dz * sin_over
        nu = 1j * (ej / 2) * sin_over
        return np.array([[mu, nu], [nu, np.conj(mu)]], dtype=complex)

    return Propagator(_controlled(block(+1), block(-1), j), f"conditional-{j}", ep, t)


def ideal_conditional(j: int, sign: str, theta: float) -> np.ndarray:
    """Rotation I cos(theta) + i sx sin(theta) on qubit j, applied only when the other
    qubit is |1> (sign '+') or |0> (sign '-')."""
    rot = math.cos(theta) * I2 + 1j * math.sin(theta) * SX
    if sign == "+":
        return _controlled(I2, rot, j)
    return _controlled(rot, I2, j)


def _norm_sign(sign) -> str:
    if sign in ("+", 1, +1):
        return "+"
    if sign in ("-", -1):
        return "-"
    raise ValueError(f"sign must be '+' or '-', got {sign!r}")


def u_conditional(j: int, sign, theta: float, e12: float, bound: int = DEFAULT_BOUND,
                  ej_max: float | None = None,
                  ) -> tuple[Propagator, EffectiveParams, DurationSolution]:
    """Conditional rotation by `theta` solved jointly for E_J^(j) and the duration.

    E_C^(j) is set to +2 E_12 (sign '+') or -2 E_12 (sign '-'), which makes the
    selected qubit idle in one control branch once cos(t lambda_j/hbar) = 1,
    with lambda_j = sqrt((2 E_12)^2 + (E_J^(j)/2)^2), while it rotates by
    theta = t E_J^(j) / (2 hbar) in the other branch.
    """
    sign = _norm_sign(sign)
    if not 0 < theta < TWO_PI:
        raise PreconditionError("theta must lie in (0, 2*pi)")
    if e12 <= 0:
        raise PreconditionError("e12 must be positive")
    ec = 2 * e12 if sign == "+" else -2 * e12
    for m in range(1, bound + 1):
        half_ej = 2 * e12 / math.sqrt((TWO_PI * m / theta) ** 2 - 1)
        if ej_max is None or 2 * half_ej <= ej_max:
            break
    else:
        raise NoCommensurateSolution(f"no E_J <= {ej_max} ueV within {bound} periods")
    t = theta * HBAR / half_ej
    ep = EffectiveParams(e12=e12).with_qubit(j, ec=ec, ej=2 * half_ej)
    lam = math.hypot(2 * e12, half_ej)
    residuals = (float(abs(_wrap(t * lam / HBAR))), float(abs(theta - t * half_ej / HBAR)))
    sol = DurationSolution(t, residuals, (m,))
    if max(residuals) > DEFAULT_TOL:
        raise NoCommensurateSolution(f"timing residual {max(residuals):.3e} exceeds tolerance")
    p = u_cj(ep, j, t)
    prop = Propagator(p.matrix, f"conditional{sign}-{j}({theta:.6g})", ep, t)
    return prop, ep, sol


def u_j_bar(ej_j: float, e12: float, t: float, j: int) -> Propagator:
    """Qubit j driven by E_J^(j) with both charging terms and the other E_J switched off."""
    gam = math.hypot(e12, ej_j / 2)
    s = t * gam / HBAR
    sin_over = _sin_over(s, t)
    zeta = math.cos(s) - 1j * e12 * sin_over
    xi = 1j * (ej_j / 2) * sin_over
    b = np.diag([zeta, np.conj(zeta)])
    m = _controlled(b, np.conj(b), j) + xi * on_qubit(SX, j)
    ep = EffectiveParams(e12=e12).with_qubit(j, ej=ej_j)
    return Propagator(m, f"J-bar-{j}", ep, t)


def ideal_hadamard_like(j: int) -> np.ndarray:
    return (1j / math.sqrt(2)) * (-kron(SZ, SZ) + on_qubit(SX, j))


def hadamard_like(j: int, e12: float) -> Propagator:
    """Driven pulse with E_J^(j) = 2 E_12 and sin(gamma_j t/hbar) = 1."""
    ej = 2 * e12
    t = (math.pi / 2) * HBAR / math.hypot(e12, ej / 2)
    p = u_j_bar(ej, e12, t, j)
    return Propagator(p.matrix, f"hadamard-like-{j}", p.params, t)


def compose(*props: Propagator) -> np.ndarray:
    """Matrix of the sequence applied left to right in time (first argument acts first)."""
    u = np.eye(4, dtype=complex)
    for p in props:
        u = p.matrix @ u
    return u
