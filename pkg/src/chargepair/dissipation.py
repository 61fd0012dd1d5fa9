"""Spin-boson noise with crosstalk, Bloch-Redfield dynamics and concurrence decay.

Internally energies are in ueV and times in ns (angular frequencies in rad/ns);
the public interface takes and returns rates in 1/s and times in s.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .errors import NonExponentialWarning, PreconditionError, StepSizeUnderflow
from .numerics import HBAR, K_B, SY, SZ, HermitianEig, as_density, dagger, herm_eig, kron, on_qubit, psd_sqrt_eigvals

NS_PER_S = 1e9
ZERO_FREQ = 1e-9  # rad/ns; Bohr frequencies below this use the calibrated S(0)
STEP_FRACTION = 200  # integration step = fastest timescale / STEP_FRACTION
MAX_STEPS = 10**12
CALIBRATIONS = ("crosstalk_scaled", "single_qubit")


@dataclass(frozen=True)
class BathSpec:
    """Two independent Ohmic (Drude-cutoff) baths plus a zero-frequency dephasing term.

    ``calibration`` fixes how ``gamma_phi`` sets the zero-frequency noise S_b(0):

    * ``"crosstalk_scaled"``: S_b(0)/hbar = gamma_phi / (4 pi (1 + x_b)^2), with x_b the
      crosstalk entering bath b's coupling operator; reproduces the quoted
      two-qubit rates gamma_phi/pi for the psi states.
    * ``"single_qubit"``: S_b(0)/hbar = gamma_phi / 2, so an isolated qubit with
      unit sigma_z coupling loses coherence at exactly gamma_phi.
    """

    eta: float = 1.8e-3
    omega_c: float = 1e13  # rad/s
    temperature: float = 0.01  # K
    gamma_phi: float = 1e7  # 1/s
    beta_xt: float = 0.1
    gamma_xt: float = 0.1
    calibration: str = "crosstalk_scaled"
    lamb_shift: bool = False

    def __post_init__(self):
        if self.eta < 0 or self.omega_c <= 0 or self.temperature <= 0 or self.gamma_phi < 0:
            raise PreconditionError("need eta >= 0, omega_c > 0, temperature > 0, gamma_phi >= 0")
        if self.calibration not in CALIBRATIONS:
            raise PreconditionError(f"calibration must be one of {CALIBRATIONS}")

    @property
    def kt(self) -> float:
        return K_B * self.temperature

    @property
    def omega_c_ns(self) -> float:
        return self.omega_c / NS_PER_S

    def crosstalk(self, bath: int) -> float:
        return self.gamma_xt if bath == 1 else self.beta_xt


def coupling_operators(spec: BathSpec) -> tuple[np.ndarray, np.ndarray]:
    """System operators coupling to bath 1 and bath 2."""
    z1, z2 = on_qubit(SZ, 1), on_qubit(SZ, 2)
    return z1 + spec.gamma_xt * z2, z2 + spec.beta_xt * z1


def zero_frequency_value(spec: BathSpec, bath: int = 1) -> float:
    """Total S_b(0) in ueV (Ohmic plus 1/f), fixed by the calibration convention."""
    if spec.calibration == "crosstalk_scaled":
        rate = spec.gamma_phi / (4 * math.pi * (1 + spec.crosstalk(bath)) ** 2)
    else:
        rate = spec.gamma_phi / 2
    return HBAR * rate / NS_PER_S


def ohmic_zero_limit(spec: BathSpec) -> float:
    """lim_{w->0} of the Ohmic part, 2 eta k_B T (ueV)."""
    return 2 * spec.eta * spec.kt


def _noise(spec: BathSpec, w, s0: float) -> np.ndarray:
    """S(w) in ueV for angular frequencies w in rad/ns; s0 at w = 0."""
    w = np.asarray(w, dtype=float)
    out = np.full(w.shape, s0)
    nz = np.abs(w) >= ZERO_FREQ
    aw = np.abs(w[nz])
    wc = spec.omega_c_ns
    j = spec.eta * HBAR * aw * wc**2 / (wc**2 + aw**2)
    x = HBAR * aw / (2 * spec.kt)
    # coth(x) + 1 = 2 / (1 - e^{-2x}),  coth(x) - 1 = 2 / (e^{2x} - 1)
    with np.errstate(over="ignore"):
        factor = np.where(w[nz] > 0, 2 / -np.expm1(-2 * x), 2 / np.expm1(2 * x))
    out[nz] = j * factor
    return out


def spectral_function(spec: BathSpec, omega, bath: int = 1):
    """Noise power S(omega)/hbar in 1/s for angular frequency omega in rad/s.

    Positive omega is emission into the bath, negative omega absorption.
    """
    val = _noise(spec, np.asarray(omega, dtype=float) / NS_PER_S, zero_frequency_value(spec, bath))
    val = val / HBAR * NS_PER_S
    return float(val) if np.ndim(omega) == 0 else val


def _lamb(spec: BathSpec, x: float, s0: float) -> float:
    """(1/(2 pi hbar)) P int S(v)/(x - v) dv in rad/ns (continuous part only)."""
    def f(v):
        return float(_noise(spec, np.array([v]), s0)[0])

    width = 10 * max(abs(x), spec.kt / HBAR, 1.0)
    core, _ = integrate.quad(f, x - width, x + width, weight="cauchy", wvar=x, limit=200)
    hi, _ = integrate.quad(lambda v: f(v) / (x - v), x + width, np.inf, limit=200)
    lo, _ = integrate.quad(lambda v: f(v) / (x - v), -np.inf, x - width, limit=200)
    return (-core + hi + lo) / (2 * math.pi * HBAR)


@dataclass(frozen=True)
class RedfieldTensor:
    eigenbasis: HermitianEig
    rates: np.ndarray  # R[n, m, k, l], 1/ns
    bohr: np.ndarray  # omega[n, m], rad/ns
    generator: np.ndarray = field(repr=False)  # 16x16, eigenbasis, row-major vec

    def to_eigen(self, rho: np.ndarray) -> np.ndarray:
        v = self.eigenbasis.eigenvectors
        return dagger(v) @ rho @ v

    def from_eigen(self, rho: np.ndarray) -> np.ndarray:
        v = self.eigenbasis.eigenvectors
        return v @ rho @ dagger(v)

    def derivative(self, rho) -> np.ndarray:
        """d rho / dt (per ns) in the computational basis."""
        r = self.to_eigen(np.asarray(rho, dtype=complex))
        return self.from_eigen((self.generator @ r.reshape(16)).reshape(4, 4))

    @property
    def fastest_rate(self) -> float:
        return float(max(np.abs(self.bohr).max(), np.abs(self.rates).max()))


def build_redfield(h, spec: BathSpec) -> RedfieldTensor:
    """Full (non-secular) Bloch-Redfield tensor for H with the two independent baths."""
    eig = herm_eig(h)
    e, v = eig.eigenvalues, eig.eigenvectors
    w = (e[:, None] - e[None, :]) / HBAR
    d = np.eye(4)
    rates = np.zeros((4, 4, 4, 4), dtype=complex)
    for bath, op in enumerate(coupling_operators(spec), start=1):
        s0 = zero_frequency_value(spec, bath)
        a = dagger(v) @ op @ v
        g_plus = _noise(spec, -w, s0) / (2 * HBAR)  # indexed [n, k] at -w_nk
        g_minus = _noise(spec, w, s0) / (2 * HBAR)  # indexed [l, m] at w_lm
        if spec.lamb_shift:
            cache: dict[float, float] = {}

            def im(x: float) -> float:
                key = round(x, 12)
                if key not in cache:
                    cache[key] = _lamb(spec, x, s0)
                return cache[key]

            g_plus = g_plus + 1j * np.vectorize(im)(-w)
            g_minus = g_minus - 1j * np.vectorize(im)(w)
        gp = np.einsum("lm,nk,nk->lmnk", a, a, g_plus)
        gm = np.einsum("lm,nk,lm->lmnk", a, a, g_minus)
        rates += np.einsum("lm,nk->nmkl", d, np.einsum("nrrk->nk", gp))
        rates += np.einsum("nk,lm->nmkl", d, np.einsum("lrrm->lm", gm))
        rates -= np.einsum("lmnk->nmkl", gm) + np.einsum("lmnk->nmkl", gp)
    gen = -1j * np.einsum("nm,nk,ml->nmkl", w, d, d) - rates
    return RedfieldTensor(eig, rates, w, gen.reshape(16, 16))


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray  # s
    states: np.ndarray  # (n, 4, 4), computational basis
    concurrences: np.ndarray
    min_eigenvalues: np.ndarray  # positivity diagnostic per grid point


def _rk4_matrix(gen: np.ndarray, h: float) -> np.ndarray:
    x = h * gen
    x2 = x @ x
    x3 = x2 @ x
    return np.eye(16) + x + x2 / 2 + x3 / 6 + x3 @ x / 24


def evolve(rho0, h, spec: BathSpec, t_grid, tensor: RedfieldTensor | None = None) -> Trajectory:
    """Integrate the Redfield master equation with fixed-step RK4 on each grid interval.

    The step never exceeds 1/STEP_FRACTION of the fastest system timescale.
    Because the generator is constant, k steps of RK4 are the k-th power of
    one step matrix, which is what gets applied.
    """
    rho0 = as_density(rho0)
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size == 0 or np.any(np.diff(t) < 0) or t[0] < 0:
        raise PreconditionError("t_grid must be a non-empty, non-negative, non-decreasing sequence (s)")
    red = tensor if tensor is not None else build_redfield(h, spec)
    t_ns = t * NS_PER_S
    fastest = red.fastest_rate
    h_max = math.inf if fastest == 0 else 1 / (fastest * STEP_FRACTION)
    if t_ns[-1] / h_max > MAX_STEPS:
        raise StepSizeUnderflow(
            f"{t_ns[-1] / h_max:.3g} steps needed for the horizon; reduce t_max")
    vec = red.to_eigen(rho0).reshape(16)
    cache: dict[tuple[int, float], np.ndarray] = {}
    states = np.empty((t.size, 4, 4), dtype=complex)
    prev = 0.0
    for i, ti in enumerate(t_ns):
        dt = ti - prev
        if dt > 0:
            n = max(1, math.ceil(dt / h_max - 1e-9))
            key = (n, round(dt, 12))
            if key not in cache:
                cache[key] = np.linalg.matrix_power(_rk4_matrix(red.generator, dt / n), n)
            vec = cache[key] @ vec
        prev = ti
        states[i] = red.from_eigen(vec.reshape(4, 4))
    conc = np.array([concurrence(s, validate=False) for s in states])
    mins = np.array([np.linalg.eigvalsh(0.5 * (s + dagger(s))).min() for s in states])
    return Trajectory(t, states, conc, mins)


_YY = kron(SY, SY)


def concurrence(rho, validate: bool = True) -> float:
    """Wootters concurrence max(0, s1 - s2 - s3 - s4).

    With ``validate=False`` the input is only Hermitized and any negative
    eigenvalues are clipped; Redfield dynamics is not completely positive, so
    trajectories may carry small negative eigenvalues.
    """
    if validate:
        rho = as_density(rho, atol=1e-6)
        tol = 1e-6
    else:
        rho = 0.5 * (np.asarray(rho) + dagger(np.asarray(rho)))
        tol = np.inf
    rho_t = _YY @ rho.conj() @ _YY
    s = psd_sqrt_eigvals(rho, rho_t, neg_tol=tol)
    return float(max(0.0, s[0] - s[1:].sum()))


@dataclass(frozen=True)
class RateFit:
    A: float  # 1/s
    r_squared: float
    window: tuple[float, float]  # s
    n_points: int
    intercept: float


def fit_decay(traj, values=None, lo: float = 0.05, hi: float = 0.95) -> RateFit:
    """Fit ln C = c - A t over the points where lo <= C <= hi.

    Accepts a :class:`Trajectory` or a (times, values) pair.
    """
    if isinstance(traj, Trajectory):
        t, c = traj.times, traj.concurrences
    else:
        t, c = np.asarray(traj, dtype=float), np.asarray(values, dtype=float)
    if np.sum(c > 1e-6) < 10:
        raise PreconditionError("need at least 10 points with C > 1e-6")
    sel = (c >= lo) & (c <= hi)
    if sel.sum() < 3:
        raise PreconditionError(f"only {sel.sum()} points inside the fit window [{lo}, {hi}]")
    ts, y = t[sel], np.log(c[sel])
    slope, intercept = np.polyfit(ts, y, 1)
    resid = y - (slope * ts + intercept)
    ss_tot = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum(resid**2) / ss_tot if ss_tot > 0 else 1.0
    fit = RateFit(float(-slope), float(r2), (float(ts[0]), float(ts[-1])), int(sel.sum()), float(intercept))
    if r2 < 0.99:
        warnings.warn(f"decay is not exponential (r^2 = {r2:.4f})", NonExponentialWarning, stacklevel=2)
    return fit


def pure_dephasing_rates(spec: BathSpec) -> np.ndarray:
    """Closed-form decay rates (1/s) of rho_ik when H commutes with both couplings.

    Lambda_ik = sum_b S_b(0) (a_b(i) - a_b(k))^2 / (2 hbar), a_b the diagonal of A_b.
    """
    lam = np.zeros((4, 4))
    for bath, op in enumerate(coupling_operators(spec), start=1):
        a = np.real(np.diag(op))
        lam += zero_frequency_value(spec, bath) * (a[:, None] - a[None, :]) ** 2 / (2 * HBAR)
    return lam * NS_PER_S

