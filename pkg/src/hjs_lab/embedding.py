"""Exact maps between (R, S) and psi, admissibility checks, residual tests.

The embedding is psi = R exp(i S / kappa).  Writing kappa = a + i b,
i S / kappa = S (b + i a) / |kappa|^2, so |psi| = R exp(S b / |kappa|^2) and
arg psi = S a / |kappa|^2.  Inversion requires a >= Re kappa != 0 and a phase
anchor fixing the 2*pi branch.
"""
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (DomainError, InputError, NodeError, ParameterError,
                     PhaseUnwrapError)
from .grid import derivative, detrended_derivative
from .state import EnsembleState, WaveField, as_kappa, evaluate_potential

# Relative amplitude below which a phase carries no usable information.
NODE_FLOOR_REL = 1e-8

# Per-cell unwrapped phase jumps beyond this fraction of pi are treated as
# aliased (the sequential unwrap cannot be trusted there).
PHASE_JUMP_LIMIT = 0.95 * np.pi


def unwrap_phase(psi: np.ndarray, anchor_index: int, anchor_phase: float,
                 check_increments: bool = True) -> np.ndarray:
    """Sequential 1-D unwrap of arg(psi), pinned at the anchor point."""
    phi = np.unwrap(np.angle(psi))
    phi = phi - phi[anchor_index] + anchor_phase
    if check_increments:
        jumps = np.abs(np.diff(phi))
        worst = int(np.argmax(jumps))
        if jumps[worst] > PHASE_JUMP_LIMIT:
            raise PhaseUnwrapError(
                f"per-cell phase increment {jumps[worst]:.3f} at index {worst} "
                "exceeds the aliasing limit")
    return phi


def default_anchor(psi: np.ndarray) -> int:
    return int(np.argmax(np.abs(psi)))


def embed(state: EnsembleState, kappa) -> WaveField:
    """psi = R exp(i S / kappa)."""
    kap = as_kappa(kappa)
    a, b, k2 = kap.re, kap.im, kap.abs2
    psi = state.R * np.exp(state.S * b / k2) * np.exp(1j * state.S * a / k2)
    return WaveField(psi=psi, grid=state.grid)


def extract(wave: WaveField, kappa, anchor_index: int | None = None,
            anchor_s: float = 0.0) -> EnsembleState:
    """Invert the embedding: S from the unwrapped phase, then R.

    The additive 2*pi*kappa branch of S is fixed by anchor_s at anchor_index
    (default: S = 0 at the amplitude maximum).
    """
    kap = as_kappa(kappa)
    if kap.re == 0.0:
        raise ParameterError("extraction requires Re kappa != 0")
    a, b, k2 = kap.re, kap.im, kap.abs2
    amp = np.abs(wave.psi)
    amax = amp.max()
    if amax == 0.0:
        raise NodeError("cannot extract from an identically-zero field")
    low = amp < NODE_FLOOR_REL * amax
    if np.any(low):
        idx = int(np.argmin(amp))
        raise NodeError(
            f"amplitude below node floor at grid index {idx}; phase undefined",
            index=idx)
    if anchor_index is None:
        anchor_index = default_anchor(wave.psi)
    phi = unwrap_phase(wave.psi, anchor_index, anchor_s * a / k2)
    S = k2 * phi / a
    R = amp * np.exp(-S * b / k2)
    return EnsembleState(R=R, S=S, grid=wave.grid)


@dataclass(frozen=True)
class EmbeddingCandidate:
    """Candidate map psi = B(R) exp(c2 S) exp(i (c1 S + A(R))).

    A and B are callables of the amplitude; the admissibility coefficient
    below vanishes identically iff the candidate linearizes the dynamics.
    """
    A: Callable[[float], float]
    B: Callable[[float], float]
    c1: float = 1.0
    c2: float = 0.0
    label: str = ""


def _richardson_derivative(f: Callable[[float], float], x: float) -> float:
    # central differences with one Richardson step; h scaled to the argument.
    # h = 1e-3 |x| keeps the subtraction cancellation near 1e-13 |f'| while
    # the Richardson-extrapolated truncation is O(h^4) ~ 1e-12.
    h = 1e-3 * abs(x)
    d1 = (f(x + h) - f(x - h)) / (2 * h)
    d2 = (f(x + h / 2) - f(x - h / 2)) / h
    return (4.0 * d2 - d1) / 3.0


def admissibility_coefficient(candidate: EmbeddingCandidate,
                              R_samples: Sequence[float]) -> np.ndarray:
    """i*B(R)*R*A'(R) + R*B'(R) - B(R) at each sample.

    This is the overall coefficient of the nonlinear gradient term that an
    embedding candidate leaves behind; admissible candidates make it vanish.
    """
    out = np.empty(len(R_samples), dtype=complex)
    for i, r in enumerate(R_samples):
        if r <= 0:
            raise DomainError(f"amplitude samples must be positive, got {r}")
        Ap = _richardson_derivative(candidate.A, r)
        Bp = _richardson_derivative(candidate.B, r)
        out[i] = 1j * candidate.B(r) * r * Ap + r * Bp - candidate.B(r)
    return out


def reference_candidates() -> list[EmbeddingCandidate]:
    """The admissible map plus a suite of perturbed (inadmissible) ones."""
    return [
        EmbeddingCandidate(A=lambda r: 0.0, B=lambda r: r, label="admissible"),
        EmbeddingCandidate(A=lambda r: r, B=lambda r: r, label="phase-linear-in-R"),
        EmbeddingCandidate(A=lambda r: 0.0, B=lambda r: r**2, label="B=R^2"),
        EmbeddingCandidate(A=lambda r: 0.0, B=lambda r: np.sqrt(r), label="B=sqrt(R)"),
        EmbeddingCandidate(A=lambda r: 0.0, B=lambda r: r + 0.2 * r**2,
                           label="B=R+0.2R^2"),
        EmbeddingCandidate(A=lambda r: np.log(r), B=lambda r: r, label="A=log(R)"),
        EmbeddingCandidate(A=lambda r: 0.0, B=lambda r: r**3, label="B=R^3"),
    ]


def _check_trajectory(times, fields):
    if len(times) != len(fields):
        raise InputError("trajectory times and states differ in length")
    if len(times) < 3:
        raise InputError("residual checks need at least 3 uniform time samples")
    dts = np.diff(times)
    if not np.allclose(dts, dts[0], rtol=1e-8, atol=1e-12):
        raise InputError("residual checks need uniform time spacing")
    return dts[0]


def linear_residual(trajectory, potential, kappa, m: float = 1.0) -> np.ndarray:
    """Sup-norm defect of i*kappa*dt(psi) + (kappa^2/2m) psi'' - V psi.

    Time derivatives use centered differences, so the defect is O(dt^2) for an
    exact solution; one value per interior sample.
    """
    times, waves = trajectory
    dt = _check_trajectory(times, waves)
    kap = as_kappa(kappa).as_complex()
    grid = waves[0].grid
    V = evaluate_potential(potential, grid)
    out = []
    for n in range(1, len(waves) - 1):
        psi = waves[n].psi
        dpsi_dt = (waves[n + 1].psi - waves[n - 1].psi) / (2.0 * dt)
        lap = derivative(psi, grid, order=2, method="spectral")
        resid = 1j * kap * dpsi_dt + (kap**2 / (2.0 * m)) * lap - V * psi
        out.append(np.abs(resid).max() / np.abs(psi).max())
    return np.asarray(out)


def madelung_residual(trajectory, potential, kappa, m: float = 1.0,
                      node_floor: float = 1e-6) -> np.ndarray:
    """Sup-norm defects of the deformed HJ and amplitude equations.

    Returns an array of (hj_residual, amplitude_residual) rows, one per
    interior sample, evaluated only where the regularized quantum potential
    is the physical one (amplitudes above 1000x the node floor; see
    solver_madelung.quantum_potential).  Real kappa only; the (R, S) system
    has no closed real form otherwise.
    """
    from .solver_madelung import quantum_potential  # local to avoid a cycle

    kap = as_kappa(kappa)
    if not kap.is_real:
        raise ParameterError("madelung_residual is defined for real kappa")
    times, states = trajectory
    dt = _check_trajectory(times, states)
    grid = states[0].grid
    V = evaluate_potential(potential, grid)
    rows = []
    for n in range(1, len(states) - 1):
        st = states[n]
        mask = st.R > 1000.0 * node_floor * st.R.max()
        dR_dt = (states[n + 1].R - states[n - 1].R) / (2.0 * dt)
        dS_dt = (states[n + 1].S - states[n - 1].S) / (2.0 * dt)
        dR = derivative(st.R, grid, 1)
        d2S = detrended_derivative(st.S, grid, 2)
        dS = detrended_derivative(st.S, grid, 1)
        Q = quantum_potential(st.R, kap, m, grid, node_floor)
        hj = dS_dt + dS**2 / (2.0 * m) + V + Q
        amp = dR_dt + (dR * dS) / m + st.R * d2S / (2.0 * m)
        scale_s = max(np.abs(dS_dt[mask]).max(), 1.0)
        scale_r = max(np.abs(st.R).max(), 1e-300)
        rows.append((np.abs(hj[mask]).max() / scale_s,
                     np.abs(amp[mask]).max() / scale_r))
    return np.asarray(rows)
