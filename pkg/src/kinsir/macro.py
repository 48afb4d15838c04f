"""Macroscopic tier: chemotaxis-reaction-diffusion system on a periodic grid.

    dc/dt + d/dx( chi*c*ds/dx - Dc*dc/dx ) = -d1*c - beta*c*u + r
    ds/dt - d/dx( Ds*ds/dx )               = -d2*s + beta*c*u
    du/dt - d/dx( Du*du/dx )               = -d3*u + k*s

Healthy cells c drift up the gradient of the infected density s; all three
species diffuse with coefficients obtained from velocity-space quadrature.
Finite-volume discretization in flux form: diffusion via centered face
differences, the chemotactic flux with the cell value upwinded by the drift
sign, reactions pointwise explicit. Transport fluxes telescope over the
periodic domain, so mass changes only through reactions.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import StepSizeError, ValidationError
from .grids import MacroState, clamp_nonnegative
from .velocity import transport_coefficients

DIFFUSION_NUMBER = 0.45  # dt <= DIFFUSION_NUMBER * dx^2 / max(D)
DRIFT_CFL = 0.9          # dt <= DRIFT_CFL * dx / max|chi * ds/dx|


@dataclass(frozen=True)
class MacroCoefficients:
    """Scalar transport coefficients (1D) plus the reaction parameters.

    r_field optionally replaces the constant production rate r with a static
    per-cell field.
    """

    Dc: float
    Ds: float
    Du: float
    chi: float
    params: object
    r_field: np.ndarray | None = None

    def __post_init__(self):
        for name in ("Dc", "Ds", "Du"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ValidationError(f"{name} must be finite and >= 0")
        if not math.isfinite(self.chi):
            raise ValidationError("chi must be finite")

    @property
    def max_diffusivity(self):
        return max(self.Dc, self.Ds, self.Du)

    def production(self, grid):
        """Per-cell healthy-cell production rate."""
        if self.r_field is None:
            return self.params.r
        if self.r_field.shape != (grid.n_cells,):
            raise ValidationError("r_field length must match the grid")
        return self.r_field


def build_macro_coefficients(params, vgrid, r_field=None):
    """Reduce the velocity-space tensors to the scalar 1D coefficients.

    Every number here comes out of the quadrature, not a closed form, so the
    macro tier stays consistent with whatever the kinetic tier integrates.
    """
    tc = transport_coefficients(params, vgrid)
    return MacroCoefficients(
        Dc=float(tc.Dc[0, 0]),
        Ds=float(tc.Ds[0, 0]),
        Du=float(tc.Du[0, 0]),
        chi=float(tc.chi[0, 0]),
        params=params,
        r_field=None if r_field is None else np.asarray(r_field, dtype=float),
    )


def _face_gradient(field, dx):
    """Gradient at face k+1/2 between cells k and k+1 (periodic)."""
    return (np.roll(field, -1) - field) / dx


def drift_field(state, coeff):
    """Chemotactic drift velocity chi * ds/dx at the faces."""
    return coeff.chi * _face_gradient(state.s, state.grid.dx)


def macro_step(state, coeff, dt):
    """One explicit step; returns a new state at time + dt.

    Preconditions (StepSizeError): dt within the diffusive bound
    0.45*dx^2/max(D) and the drift bound 0.9*dx/max|chi*ds/dx|.
    """
    if dt <= 0:
        raise ValidationError("dt must be > 0")
    grid = state.grid
    dx = grid.dx

    w = drift_field(state, coeff)
    max_drift = np.max(np.abs(w))
    if coeff.max_diffusivity > 0 and dt > DIFFUSION_NUMBER * dx * dx / coeff.max_diffusivity:
        raise StepSizeError(
            f"dt = {dt:.3e} exceeds the diffusive bound "
            f"{DIFFUSION_NUMBER * dx * dx / coeff.max_diffusivity:.3e}"
        )
    if max_drift > 0 and dt > DRIFT_CFL * dx / max_drift:
        raise StepSizeError(
            f"dt = {dt:.3e} exceeds the drift bound {DRIFT_CFL * dx / max_drift:.3e}"
        )

    c, s, u = state.c, state.s, state.u

    # fluxes at face k+1/2; upwind the advected cell value by the drift sign
    c_face = np.where(w > 0, c, np.roll(c, -1))
    flux_c = w * c_face - coeff.Dc * _face_gradient(c, dx)
    flux_s = -coeff.Ds * _face_gradient(s, dx)
    flux_u = -coeff.Du * _face_gradient(u, dx)

    infection = coeff.params.beta * c * u
    p = coeff.params
    new_c = c - dt / dx * (flux_c - np.roll(flux_c, 1)) + dt * (
        -p.d1 * c - infection + coeff.production(grid)
    )
    new_s = s - dt / dx * (flux_s - np.roll(flux_s, 1)) + dt * (-p.d2 * s + infection)
    new_u = u - dt / dx * (flux_u - np.roll(flux_u, 1)) + dt * (-p.d3 * u + p.k * s)

    for name, field in (("c", new_c), ("s", new_s), ("u", new_u)):
        clamp_nonnegative(field, f"macro field {name}")
    return MacroState(new_c, new_s, new_u, state.time + dt, grid)


def stable_dt(state, coeff):
    """Step size safe for diffusion, drift and reaction loss simultaneously.

    Uses the combined explicit bound 0.9/(2*maxD/dx^2 + max|w|/dx + loss),
    which is at least as strict as each macro_step precondition and also
    keeps the explicit reaction update positivity-preserving.
    """
    dx = state.grid.dx
    p = coeff.params
    loss = max(p.d1 + p.beta * float(state.u.max()), p.d2, p.d3)
    denom = (
        2.0 * coeff.max_diffusivity / (dx * dx)
        + np.max(np.abs(drift_field(state, coeff))) / dx
        + loss
    )
    return 0.9 / denom if denom > 0 else math.inf


def run_macro(initial, coeff, t_final, snapshot_times=None, dt_max=None):
    """Advance to t_final, returning snapshots at the requested times.

    Between snapshots the step is chosen from the stability bound (with a
    0.8 margin for drift growth) or capped at dt_max, then rounded down so
    each segment is hit exactly. The final time is always snapshotted.
    """
    if t_final < 0:
        raise ValidationError("t_final must be >= 0")
    times = sorted(set(snapshot_times if snapshot_times is not None else [t_final]))
    if times and (times[0] < initial.time or times[-1] > t_final):
        raise ValidationError("snapshot times must lie in [initial time, t_final]")
    if not times or times[-1] < t_final:
        times.append(t_final)

    state = initial
    snapshots = []
    for target in times:
        segment = target - state.time
        if segment > 0:
            bound = 0.8 * stable_dt(state, coeff)
            if dt_max is not None:
                bound = min(bound / 0.8, dt_max)
            n = max(1, math.ceil(segment / bound - 1e-12))
            dt = segment / n
            for _ in range(n):
                state = macro_step(state, coeff, dt)
            state.time = target  # cancel accumulated rounding in the sum
        snapshots.append(MacroState(state.c.copy(), state.s.copy(), state.u.copy(), state.time, state.grid))
    return snapshots
