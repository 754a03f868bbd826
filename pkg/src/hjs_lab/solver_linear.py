"""Split-step spectral integrator for the linear complex-field evolution

    i kappa dt(psi) = -(kappa^2 / 2m) psi'' + V psi

with general complex kappa.  Strang splitting, potential-kinetic-potential:
both half-step factors exp(-i V dt / (2 kappa)) and the kinetic factor
exp(-i kappa k^2 dt / 2m) are unimodular iff kappa is real, in which case the
scheme conserves the norm to roundoff.  No renormalization is applied for
complex kappa; the norm behavior is physics there.
"""
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import BlowUpError, ConfigurationError
from .grid import Grid
from .state import Kappa, Potential, WaveField, as_kappa, evaluate_potential

BLOWUP_FACTOR = 1e6


@dataclass(frozen=True)
class LinearRunConfig:
    dt: float
    t_final: float
    kappa: Kappa
    potential: Potential
    m: float = 1.0
    sample_every: int = 100

    def __post_init__(self):
        if self.dt <= 0 or self.t_final < self.dt:
            raise ConfigurationError("need dt > 0 and t_final >= dt")
        if self.sample_every < 1:
            raise ConfigurationError("sample_every must be >= 1")
        if self.m <= 0:
            raise ConfigurationError("mass must be positive")
        object.__setattr__(self, "kappa", as_kappa(self.kappa))

    @property
    def n_steps(self) -> int:
        return int(round(self.t_final / self.dt))


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: Sequence
    metadata: dict = field(default_factory=dict)

    def __iter__(self):
        return iter((self.times, self.states))

    def __len__(self):
        return len(self.states)


def kinetic_factor(kappa, m: float, dt: float, grid: Grid) -> np.ndarray:
    """Per-mode free-flight multiplier exp(-i kappa k^2 dt / 2m)."""
    kap = as_kappa(kappa).as_complex()
    return np.exp(-1j * kap * grid.k**2 * dt / (2.0 * m))


def potential_half_factor(config: LinearRunConfig, grid: Grid) -> np.ndarray:
    V = evaluate_potential(config.potential, grid)
    kap = config.kappa.as_complex()
    return np.exp(-1j * V * config.dt / (2.0 * kap))


def step(wave: WaveField, config: LinearRunConfig) -> WaveField:
    """One Strang step: half potential, full kinetic, half potential."""
    p_half = potential_half_factor(config, wave.grid)
    k_fac = kinetic_factor(config.kappa, config.m, config.dt, wave.grid)
    psi = p_half * np.fft.ifft(k_fac * np.fft.fft(p_half * wave.psi))
    return WaveField(psi=psi, grid=wave.grid)


def evolve(wave0: WaveField, config: LinearRunConfig) -> Trajectory:
    """Repeated stepping; stores t = 0, every sample_every-th step, and t_final."""
    grid = wave0.grid
    p_half = potential_half_factor(config, grid)
    k_fac = kinetic_factor(config.kappa, config.m, config.dt, grid)
    psi = wave0.psi.astype(complex)
    guard = BLOWUP_FACTOR * np.abs(psi).max()
    times = [0.0]
    states = [WaveField(psi=psi.copy(), grid=grid)]
    n = config.n_steps
    for i in range(1, n + 1):
        psi = p_half * np.fft.ifft(k_fac * np.fft.fft(p_half * psi))
        if i % 50 == 0 or i == n:
            peak = np.abs(psi).max()
            if not np.isfinite(peak) or peak > guard:
                raise BlowUpError(f"field amplitude blew up at step {i}", step=i)
        if i % config.sample_every == 0 or i == n:
            times.append(i * config.dt)
            states.append(WaveField(psi=psi.copy(), grid=grid))
    meta = {"solver": "linear_split_step", "dt": config.dt,
            "t_final": config.t_final, "m": config.m,
            "kappa": (config.kappa.re, config.kappa.im),
            "potential": config.potential.kind}
    return Trajectory(times=np.asarray(times), states=states, metadata=meta)
