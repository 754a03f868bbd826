"""Measurement layer: generalized probability density, inner product,
expectations, the two momentum dispersions, commutator and conservation
diagnostics, and the interference modulation.

The generalized probability density is H = |psi|^2 exp(-2 theta phi) with phi
the unwrapped phase and theta = Im kappa / Re kappa.  On embedded states it
equals R^2 identically.  For theta != 0 the density depends on the phase
anchor (a global phase is physical there); callers that know S pass the
anchor explicitly.
"""
from dataclasses import dataclass

import numpy as np

from .embedding import default_anchor, unwrap_phase
from .errors import ConsistencyError, InputError, NodeError, ParameterError
from .grid import derivative, detrended_derivative, integrate
from .state import EnsembleState, Kappa, WaveField, as_kappa


@dataclass(frozen=True)
class MomentSet:
    mean_q: float
    mean_p: float
    var_q: float
    var_p_op: float
    var_p_hj: float
    amp_grad_term: float
    uncertainty_product: float

    def identity_residual(self) -> float:
        """Relative defect of var_p_op = var_p_hj + amp_grad_term."""
        return abs(self.var_p_op - self.var_p_hj - self.amp_grad_term) / abs(self.var_p_op)


def _require_node_free(psi: np.ndarray, rel: float = 1e-12):
    amp = np.abs(psi)
    if amp.max() == 0.0:
        raise NodeError("identically-zero field")
    idx = int(np.argmin(amp))
    if amp[idx] < rel * amp.max():
        raise NodeError(f"field has a node near grid index {idx}", index=idx)
    return amp


def born_density(wave: WaveField, theta: float, anchor_index: int | None = None,
                 anchor_s: float = 0.0) -> np.ndarray:
    """Generalized probability density; |psi|^2 for theta = 0.

    anchor_s is the unwrapped phase at the anchor point (phase units); for
    theta != 0 the density genuinely depends on this gauge.  Callers that know
    the action field use born_density_embedded instead.
    """
    if theta == 0.0:
        return wave.abs2
    amp = _require_node_free(wave.psi)
    if anchor_index is None:
        anchor_index = default_anchor(wave.psi)
    phi = unwrap_phase(wave.psi, anchor_index, anchor_s)
    return amp**2 * np.exp(-2.0 * theta * phi)


def born_density_embedded(wave: WaveField, kappa, anchor_index: int | None = None,
                          anchor_s: float = 0.0) -> np.ndarray:
    """Born density of an embedded state with the anchor given as an S value."""
    kap = as_kappa(kappa)
    if kap.re == 0.0:
        raise ParameterError("generalized density needs Re kappa != 0")
    phase_anchor = anchor_s * kap.re / kap.abs2
    return born_density(wave, kap.theta, anchor_index=anchor_index,
                        anchor_s=phase_anchor)


def theta_inner_product(phi_w: WaveField, psi_w: WaveField, theta: float) -> complex:
    """Sesquilinear-like pairing with complex powers 1 -/+ i*theta."""
    if phi_w.grid is not psi_w.grid and phi_w.grid != psi_w.grid:
        raise InputError("fields live on different grids")
    if theta == 0.0:
        return integrate(np.conj(phi_w.psi) * psi_w.psi, phi_w.grid)
    a1 = _require_node_free(phi_w.psi)
    a2 = _require_node_free(psi_w.psi)
    y1 = unwrap_phase(phi_w.psi, default_anchor(phi_w.psi), 0.0)
    y2 = unwrap_phase(psi_w.psi, default_anchor(psi_w.psi), 0.0)
    x1, x2 = np.log(a1), np.log(a2)
    integrand = np.exp((x1 - theta * y1) + (x2 - theta * y2)) \
        * np.exp(1j * ((y2 - y1) + theta * (x2 - x1)))
    return integrate(integrand, phi_w.grid)


def _operator_apply(wave: WaveField, kappa: Kappa, observable: str) -> np.ndarray:
    q = wave.grid.q
    if observable == "q":
        return q * wave.psi
    if observable == "q2":
        return q**2 * wave.psi
    if observable == "p":
        return -1j * kappa.as_complex() * derivative(wave.psi, wave.grid, 1)
    if observable == "p2":
        return -kappa.as_complex() ** 2 * derivative(wave.psi, wave.grid, 2)
    raise InputError(f"unknown observable {observable!r}")


def expectation(wave: WaveField, kappa, observable: str):
    """<A> for A in {q, p, q2, p2} on a normalized field.

    Real kappa: the standard quadratic form, with a check that the spurious
    imaginary part stays below 1e-10.  Complex kappa: the generalized-density
    weighted form  integral H(psi) (A psi / psi) dq, which reduces to the
    standard one at theta = 0 and avoids branch-ambiguous powers of A psi.
    """
    kap = as_kappa(kappa)
    Apsi = _operator_apply(wave, kap, observable)
    if kap.is_real:
        val = integrate(np.conj(wave.psi) * Apsi, wave.grid)
        norm = integrate(wave.abs2, wave.grid)
        val = val / norm
        if abs(val.imag) > 1e-10 * max(1.0, abs(val.real)):
            raise ConsistencyError(
                f"<{observable}> has imaginary part {val.imag:.3e} for real kappa")
        return float(val.real)
    amp = _require_node_free(wave.psi)
    H = born_density_embedded(wave, kap)
    ratio = Apsi / wave.psi
    norm = integrate(H, wave.grid)
    return complex(integrate(H * ratio, wave.grid) / norm)


def _wave_moments(wave: WaveField, kap: Kappa) -> MomentSet:
    grid = wave.grid
    rho = wave.abs2
    norm = integrate(rho, grid)
    q = grid.q
    mean_q = integrate(q * rho, grid) / norm
    var_q = integrate((q - mean_q) ** 2 * rho, grid) / norm
    dpsi = derivative(wave.psi, grid, 1)
    k = kap.re
    # rho * S' = k * Im(conj(psi) psi') is node-safe; the division below is
    # clamped where rho underflows (weights there are negligible anyway)
    rho_sp = k * np.imag(np.conj(wave.psi) * dpsi)
    mean_p = integrate(rho_sp, grid) / norm
    p2 = k**2 * integrate(np.abs(dpsi) ** 2, grid) / norm
    var_p_op = p2 - mean_p**2
    damp = derivative(np.abs(wave.psi), grid, 1)
    amp_term = k**2 * integrate(damp**2, grid) / norm
    floor2 = (1e-12 * np.abs(wave.psi).max()) ** 2
    sp = rho_sp / np.maximum(rho, floor2)
    var_p_hj = integrate(rho * (sp - mean_p) ** 2, grid) / norm
    return MomentSet(mean_q=float(mean_q), mean_p=float(mean_p),
                     var_q=float(var_q), var_p_op=float(var_p_op),
                     var_p_hj=float(var_p_hj), amp_grad_term=float(amp_term),
                     uncertainty_product=float(np.sqrt(max(var_q, 0.0))
                                               * np.sqrt(max(var_p_op, 0.0))))


def _ensemble_moments(state: EnsembleState, kap: Kappa) -> MomentSet:
    from .embedding import embed

    grid = state.grid
    rho = state.rho
    norm = integrate(rho, grid)
    q = grid.q
    mean_q = integrate(q * rho, grid) / norm
    var_q = integrate((q - mean_q) ** 2 * rho, grid) / norm
    sp = detrended_derivative(state.S, grid, 1)
    mean_p = integrate(rho * sp, grid) / norm
    var_p_hj = integrate(rho * (sp - mean_p) ** 2, grid) / norm
    dR = derivative(state.R, grid, 1)
    amp_term = kap.re**2 * integrate(dR**2, grid) / norm
    # operator route goes through the embedded field to stay independent
    wave = embed(state, kap)
    dpsi = derivative(wave.psi, grid, 1)
    p2 = kap.re**2 * integrate(np.abs(dpsi) ** 2, grid) / integrate(wave.abs2, grid)
    mean_p_op = kap.re * integrate(np.imag(np.conj(wave.psi) * dpsi), grid) \
        / integrate(wave.abs2, grid)
    var_p_op = p2 - mean_p_op**2
    return MomentSet(mean_q=float(mean_q), mean_p=float(mean_p),
                     var_q=float(var_q), var_p_op=float(var_p_op),
                     var_p_hj=float(var_p_hj), amp_grad_term=float(amp_term),
                     uncertainty_product=float(np.sqrt(max(var_q, 0.0))
                                               * np.sqrt(max(var_p_op, 0.0))))


def moments(state, kappa) -> MomentSet:
    """Full moment set; operator and flow-field routes are kept independent.

    Accepts a WaveField (operator quantities direct, flow quantities from the
    phase) or an EnsembleState (flow quantities direct, operator quantities
    via the embedded field).  Real kappa.
    """
    kap = as_kappa(kappa)
    if not kap.is_real:
        raise ParameterError("moment sets are defined for real kappa")
    if isinstance(state, WaveField):
        return _wave_moments(state, kap)
    if isinstance(state, EnsembleState):
        return _ensemble_moments(state, kap)
    raise InputError(f"cannot compute moments of {type(state)!r}")


def velocity_field(state: EnsembleState, m: float = 1.0) -> np.ndarray:
    """Flow velocity grad(S)/m (detrended gradient: S may have linear tails)."""
    return detrended_derivative(state.S, state.grid, 1) / m


def commutator_defect(wave: WaveField, kappa) -> float:
    """Sup-norm defect of (q p - p q) psi = i kappa psi on the interior 80%.

    Multiplication by q breaks exact periodicity at the wrap, so the boundary
    strip is excluded.
    """
    kap = as_kappa(kappa).as_complex()
    grid = wave.grid
    q = grid.q
    p_psi = -1j * kap * derivative(wave.psi, grid, 1)
    qp = q * p_psi
    pq = -1j * kap * derivative(q * wave.psi, grid, 1)
    resid = qp - pq - 1j * kap * wave.psi
    interior = np.abs(q) <= 0.8 * grid.half_width
    return float(np.abs(resid[interior]).max() / np.abs(wave.psi).max())


def _aligned_trajectory_phases(times, waves):
    """Unwrapped phases per sample with 2*pi branches aligned in time.

    Requires sampling dense enough that the true phase advance at the running
    amplitude maximum stays below pi between consecutive samples.
    """
    phases = []
    prev = None
    for w in waves:
        phi = np.unwrap(np.angle(w.psi))
        i0 = default_anchor(w.psi)
        if prev is not None:
            shift = 2.0 * np.pi * np.round((prev[i0] - phi[i0]) / (2.0 * np.pi))
            phi = phi + shift
        phases.append(phi)
        prev = phi
    return phases


def pseudo_unitarity_defect(traj_phi, traj_psi, theta: float) -> np.ndarray:
    """|LHS(t) - LHS(0)| of the symmetrized pairing balance, per sample.

    LHS(t) = <phi(t), psi(t)>_theta + <psi(t), phi(t)>_theta.  Phases are
    tracked continuously along each trajectory so the theta-powers use a
    time-consistent branch.
    """
    t1, waves1 = traj_phi
    t2, waves2 = traj_psi
    if len(t1) != len(t2) or not np.allclose(t1, t2):
        raise InputError("trajectories must share sample times")
    if waves1[0].grid != waves2[0].grid:
        raise InputError("trajectories must share the grid")
    grid = waves1[0].grid
    if theta == 0.0:
        vals = [2.0 * np.real(integrate(np.conj(a.psi) * b.psi, grid))
                for a, b in zip(waves1, waves2)]
    else:
        ph1 = _aligned_trajectory_phases(t1, waves1)
        ph2 = _aligned_trajectory_phases(t2, waves2)
        vals = []
        for a, b, y1, y2 in zip(waves1, waves2, ph1, ph2):
            x1 = np.log(_require_node_free(a.psi))
            x2 = np.log(_require_node_free(b.psi))
            f12 = np.exp((x1 - theta * y1) + (x2 - theta * y2)) \
                * np.exp(1j * ((y2 - y1) + theta * (x2 - x1)))
            pair = integrate(f12, grid)
            vals.append(float(2.0 * pair.real))
    vals = np.asarray(vals)
    return np.abs(vals - vals[0])


@dataclass(frozen=True)
class InterferenceReport:
    theta_values: tuple
    profiles: np.ndarray        # one F(x) row per nonzero theta
    mean_profile: np.ndarray
    linearity_spread: float     # max over the window of the relative spread


def interference_modulation(psi1: WaveField, psi2: WaveField,
                            theta_values) -> InterferenceReport:
    """First-order modulation of the two-path pattern by theta.

    M(x; theta) = H_theta(psi1+psi2)/H_0(psi1+psi2) - 1 and F = M/theta; for
    the implemented density the exact form is F -> -2*phi(x) as theta -> 0.
    The spread is evaluated on the central 80% of the domain with the
    denominator floored at 1e-2 of the peak |F|.
    """
    thetas = tuple(float(t) for t in theta_values)
    nonzero = [t for t in thetas if t != 0.0]
    if 0.0 not in thetas or len(nonzero) < 2:
        raise InputError("theta_values must include 0 and at least two nonzero values")
    if any(abs(t) > 1e-2 for t in nonzero):
        raise InputError("interference check expects |theta| <= 1e-2")
    if psi1.grid != psi2.grid:
        raise InputError("fields live on different grids")
    total = WaveField(psi=psi1.psi + psi2.psi, grid=psi1.grid)
    base = born_density(total, 0.0)
    anchor = default_anchor(total.psi)
    profiles = []
    for t in nonzero:
        H = born_density(total, t, anchor_index=anchor, anchor_s=0.0)
        profiles.append((H / base - 1.0) / t)
    profiles = np.asarray(profiles)
    mean = profiles.mean(axis=0)
    grid = psi1.grid
    window = np.abs(grid.q) <= 0.8 * grid.half_width
    floor = 1e-2 * np.abs(mean[window]).max()
    spread = (profiles.max(axis=0) - profiles.min(axis=0)) \
        / np.maximum(np.abs(mean), floor)
    return InterferenceReport(theta_values=thetas, profiles=profiles,
                              mean_profile=mean,
                              linearity_spread=float(spread[window].max()))
