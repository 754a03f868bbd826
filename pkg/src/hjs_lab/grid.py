"""Uniform periodic 1-D grid with spectral and finite-difference operators.

The domain is [-L, L) with N points, N a power of two.  All fields in the
package live on such a grid; spectral derivatives assume the field decays
below roundoff at the boundary (the shipped scenarios choose L accordingly).
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, ShapeError


@dataclass(frozen=True)
class Grid:
    half_width: float
    n_points: int
    dx: float
    q: np.ndarray = field(repr=False)
    k: np.ndarray = field(repr=False)

    def check(self, f: np.ndarray) -> np.ndarray:
        f = np.asarray(f)
        if f.shape != (self.n_points,):
            raise ShapeError(
                f"field of shape {f.shape} does not match grid with N={self.n_points}")
        return f


def make_grid(half_width: float, n_points: int) -> Grid:
    """Build the periodic grid q_j = -L + j*dx, dx = 2L/N."""
    if half_width <= 0:
        raise ConfigurationError(f"half_width must be positive, got {half_width}")
    n = int(n_points)
    if n != n_points or n < 8 or (n & (n - 1)) != 0:
        raise ConfigurationError(
            f"n_points must be a power of two >= 8, got {n_points}")
    dx = 2.0 * half_width / n
    q = -half_width + dx * np.arange(n)
    k = 2.0 * np.pi * np.fft.fftfreq(n, d=dx)
    return Grid(half_width=float(half_width), n_points=n, dx=dx, q=q, k=k)


def derivative(f: np.ndarray, grid: Grid, order: int = 1,
               method: str = "spectral") -> np.ndarray:
    """order-th derivative of a periodic field (order 1 or 2)."""
    f = grid.check(f)
    if order not in (1, 2):
        raise ConfigurationError(f"order must be 1 or 2, got {order}")
    if method == "spectral":
        out = np.fft.ifft((1j * grid.k) ** order * np.fft.fft(f))
        return out if np.iscomplexobj(f) else out.real
    if method == "central":
        up = np.roll(f, -1)
        dn = np.roll(f, 1)
        if order == 1:
            return (up - dn) / (2.0 * grid.dx)
        return (up - 2.0 * f + dn) / grid.dx**2
    raise ConfigurationError(f"unknown derivative method {method!r}")


def integrate(f: np.ndarray, grid: Grid) -> float | complex:
    """Rectangle-rule quadrature; exact trapezoid on a periodic grid."""
    f = grid.check(f)
    total = np.sum(f) * grid.dx
    return total if np.iscomplexobj(f) else float(total)


def tail_quadratic_fit(f: np.ndarray, grid: Grid,
                       window_frac: float = 0.15) -> np.ndarray:
    """Least-squares quadratic c0 + c1 q + c2 q^2 over the boundary windows.

    Used to split off the non-periodic polynomial tail a trapped action field
    develops (the vacuum Hamilton-Jacobi flow of a quadratic potential is
    itself exactly quadratic in q).
    """
    f = grid.check(f)
    sel = np.abs(grid.q) >= (1.0 - window_frac) * grid.half_width
    qs = grid.q[sel]
    design = np.stack([np.ones(qs.size), qs, qs**2], axis=1)
    coef, *_ = np.linalg.lstsq(design, f[sel], rcond=None)
    return coef


def detrended_derivative(f: np.ndarray, grid: Grid, order: int = 1,
                         window_frac: float = 0.15) -> np.ndarray:
    """Spectral derivative after removing the boundary-window quadratic.

    The quadratic part is differentiated analytically, the periodic remainder
    spectrally.  Suitable for action fields S whose tails grow linearly or
    quadratically and therefore break plain periodic differentiation.
    """
    c0, c1, c2 = tail_quadratic_fit(f, grid, window_frac)
    rem = f - (c0 + c1 * grid.q + c2 * grid.q**2)
    d_rem = derivative(rem, grid, order=order, method="spectral")
    if order == 1:
        return d_rem + c1 + 2.0 * c2 * grid.q
    return d_rem + 2.0 * c2
