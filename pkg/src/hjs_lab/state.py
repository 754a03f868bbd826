"""Core domain types: deformation parameter, state representations, potential.

Units: m = omega = 1 by default throughout; kappa carries action units but is
handled as a plain number.  The pair (R, S) is the real ensemble description,
psi the equivalent complex field.
"""
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (ConfigurationError, DegenerateStateError, ParameterError,
                     ShapeError)
from .grid import Grid, integrate


@dataclass(frozen=True)
class Kappa:
    """Complex deformation parameter kappa = re + i*im."""
    re: float
    im: float = 0.0

    def __post_init__(self):
        if self.re == 0.0 and self.im == 0.0:
            raise ParameterError("kappa must be nonzero for dynamical use")

    @property
    def theta(self) -> float:
        """Time-asymmetry ratio Im/Re; undefined for Re kappa = 0."""
        if self.re == 0.0:
            raise ParameterError("theta is undefined for Re kappa = 0")
        return self.im / self.re

    @property
    def is_real(self) -> bool:
        return self.im == 0.0

    @property
    def abs2(self) -> float:
        return self.re**2 + self.im**2

    @property
    def magnitude(self) -> float:
        return float(np.hypot(self.re, self.im))

    def as_complex(self) -> complex:
        return complex(self.re, self.im)


def as_kappa(value) -> Kappa:
    if isinstance(value, Kappa):
        return value
    z = complex(value)
    return Kappa(z.real, z.imag)


@dataclass(frozen=True)
class EnsembleState:
    """Amplitude/action pair on a grid; R >= 0, rho = R^2."""
    R: np.ndarray
    S: np.ndarray
    grid: Grid
    normalized: bool = False

    def __post_init__(self):
        self.grid.check(self.R)
        self.grid.check(self.S)
        if np.any(self.R < 0):
            raise ConfigurationError("R must be nonnegative")

    @property
    def rho(self) -> np.ndarray:
        return self.R**2


@dataclass(frozen=True)
class WaveField:
    """Complex field on a grid."""
    psi: np.ndarray
    grid: Grid

    def __post_init__(self):
        self.grid.check(self.psi)

    @property
    def abs2(self) -> np.ndarray:
        return np.abs(self.psi) ** 2


@dataclass(frozen=True)
class Potential:
    """External scalar potential; evaluated lazily on a grid."""
    kind: str
    m: float = 1.0
    omega: float = 1.0
    lam: float = 0.0
    values: np.ndarray | None = field(default=None, repr=False)

    @staticmethod
    def free() -> "Potential":
        return Potential(kind="free")

    @staticmethod
    def harmonic(m: float = 1.0, omega: float = 1.0) -> "Potential":
        if m <= 0 or omega < 0:
            raise ConfigurationError("harmonic potential needs m > 0, omega >= 0")
        return Potential(kind="harmonic", m=m, omega=omega)

    @staticmethod
    def quartic(m: float = 1.0, omega: float = 1.0, lam: float = 0.0) -> "Potential":
        if m <= 0 or omega < 0:
            raise ConfigurationError("quartic potential needs m > 0, omega >= 0")
        return Potential(kind="quartic", m=m, omega=omega, lam=lam)

    @staticmethod
    def tabulated(values: np.ndarray) -> "Potential":
        return Potential(kind="tabulated", values=np.asarray(values, dtype=float))

    @property
    def is_quadratic(self) -> bool:
        return self.kind in ("free", "harmonic")


def evaluate_potential(potential: Potential, grid: Grid) -> np.ndarray:
    """Pointwise potential values on the grid."""
    q = grid.q
    if potential.kind == "free":
        return np.zeros_like(q)
    if potential.kind == "harmonic":
        return 0.5 * potential.m * potential.omega**2 * q**2
    if potential.kind == "quartic":
        return 0.5 * potential.m * potential.omega**2 * q**2 + potential.lam * q**4
    if potential.kind == "tabulated":
        if potential.values is None or potential.values.shape != q.shape:
            raise ShapeError("tabulated potential length does not match grid")
        return potential.values
    raise ConfigurationError(f"unknown potential kind {potential.kind!r}")


def normalize(state, theta: float = 0.0, anchor_index: int | None = None,
              anchor_s: float = 0.0):
    """Scale a state to unit total probability.

    EnsembleState: scales R so that the integral of R^2 is 1 (S untouched).
    WaveField: for theta = 0 the weight is |psi|^2; otherwise the generalized
    probability density is used, which requires a phase anchor (see
    observables.born_density).
    """
    from .observables import born_density  # cycle kept local

    if isinstance(state, EnsembleState):
        total = integrate(state.R**2, state.grid)
        if total <= 0.0:
            raise DegenerateStateError("cannot normalize an identically-zero state")
        return replace(state, R=state.R / np.sqrt(total), normalized=True)
    if isinstance(state, WaveField):
        if theta == 0.0:
            total = integrate(state.abs2, state.grid)
        else:
            total = integrate(
                born_density(state, theta, anchor_index=anchor_index,
                             anchor_s=anchor_s),
                state.grid)
        if total <= 0.0:
            raise DegenerateStateError("cannot normalize an identically-zero state")
        return WaveField(psi=state.psi / np.sqrt(total), grid=state.grid)
    raise ConfigurationError(f"cannot normalize object of type {type(state)!r}")
