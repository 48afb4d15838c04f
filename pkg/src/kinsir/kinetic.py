"""Kinetic tier: velocity-jump transport of the three populations.

In the scaled time variable each distribution f_i(t, x, v) obeys

    df_i/dt + (v/eps) df_i/dx
        = sigma_i/eps^(q_i+1) * relaxation
        + eps^(p-q_1-1) * gradient bias   (healthy cells only)
        + interaction terms,

so transport runs at speed v/eps, velocity relaxation at rate
sigma_i/eps^(q_i+1), the infected-gradient bias at eps^(p-q_1-1), and the
virus-dynamics interactions at order one. A step is the sequence: upwind
transport, exact exponential relaxation, explicit gradient bias, explicit
interactions, each over the full dt. Transport is in conservative upwind
form and the other three sub-steps preserve the zeroth moment node-for-node,
so total mass moves only through the interaction terms.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import CflViolationError, ValidationError
from .grids import MacroState, clamp_nonnegative
from .velocity import interaction_terms, perturbation_apply


@dataclass
class KineticState:
    """Distributions on (cell, velocity node), plus the scaling parameter."""

    f1: np.ndarray
    f2: np.ndarray
    f3: np.ndarray
    epsilon: float
    time: float
    grid: object
    vgrid: object

    def __post_init__(self):
        if not 0 < self.epsilon <= 1:
            raise ValidationError("epsilon must be in (0, 1]")
        shape = (self.grid.n_cells, self.vgrid.n_nodes)
        for name in ("f1", "f2", "f3"):
            if getattr(self, name).shape != shape:
                raise ValidationError(f"{name} must have shape {shape}")


def init_local_equilibrium(macro, eqs, vgrid, epsilon):
    """Start at the local equilibrium f_i = M_i(v) * density_i(x)."""
    fields = (macro.c, macro.s, macro.u)
    f1, f2, f3 = (np.outer(rho, eq.values) for rho, eq in zip(fields, eqs))
    return KineticState(f1, f2, f3, float(epsilon), macro.time, macro.grid, vgrid)


def moments(state):
    """Zeroth velocity moments as a macroscopic state."""
    w = state.vgrid.weights
    return MacroState(
        state.f1 @ w, state.f2 @ w, state.f3 @ w, state.time, state.grid
    )


def max_step(state, cfl=0.9):
    """Largest dt allowed by the transport CFL condition."""
    return cfl * state.epsilon * state.grid.dx / state.vgrid.vmax


def transport_substep(f, vgrid, grid, epsilon, dt):
    """Conservative upwind transport at the scaled speeds v_j/eps."""
    courant = vgrid.nodes * (dt / (epsilon * grid.dx))
    upwind_diff = np.where(
        vgrid.nodes > 0, f - np.roll(f, 1, axis=0), np.roll(f, -1, axis=0) - f
    )
    return f - courant * upwind_diff


def relaxation_substep(f, M, sigma, epsilon, q, dt, vgrid):
    """Exact relaxation toward M * <f>: the anisotropic part decays by the
    factor exp(-sigma*dt/eps^(q+1)) while <f> is untouched."""
    decay = math.exp(-sigma * dt / epsilon ** (q + 1))
    mean = (f @ vgrid.weights)[:, None]
    return M.values * mean + (f - M.values * mean) * decay


def infected_gradient(f2, vgrid, grid):
    """Centered-difference gradient of the infected-cell moment."""
    s = f2 @ vgrid.weights
    return (np.roll(s, -1) - np.roll(s, 1)) / (2.0 * grid.dx)


def kinetic_step(state, params, eqs, dt):
    """One split step; returns a new state at time + dt.

    Precondition (CflViolationError): dt <= 0.9 * eps * dx / vmax.
    """
    if dt <= 0:
        raise ValidationError("dt must be > 0")
    if dt > max_step(state) * (1.0 + 1e-12):
        raise CflViolationError(
            f"dt = {dt:.3e} exceeds the transport bound {max_step(state):.3e}"
        )
    eps, grid, vgrid = state.epsilon, state.grid, state.vgrid

    # (a) transport
    f1 = transport_substep(state.f1, vgrid, grid, eps, dt)
    f2 = transport_substep(state.f2, vgrid, grid, eps, dt)
    f3 = transport_substep(state.f3, vgrid, grid, eps, dt)

    # (b) stiff relaxation, exact per species
    f1 = relaxation_substep(f1, eqs[0], params.sigma1, eps, params.q1, dt, vgrid)
    f2 = relaxation_substep(f2, eqs[1], params.sigma2, eps, params.q2, dt, vgrid)
    f3 = relaxation_substep(f3, eqs[2], params.sigma3, eps, params.q3, dt, vgrid)

    # (c) infected-gradient bias on the healthy population
    if params.chi0 != 0.0:
        grad_s = infected_gradient(f2, vgrid, grid)
        scale = eps ** (params.p - params.q1 - 1)
        f1 = f1 + dt * scale * perturbation_apply(f1, grad_s, params.chi0, vgrid)

    # (d) interactions
    g1, g2, g3 = interaction_terms(f1, f2, f3, eqs, params, vgrid)
    f1 = f1 + dt * g1
    f2 = f2 + dt * g2
    f3 = f3 + dt * g3

    for name, f in (("f1", f1), ("f2", f2), ("f3", f3)):
        clamp_nonnegative(f, f"kinetic distribution {name}")
    return KineticState(f1, f2, f3, eps, state.time + dt, grid, vgrid)


def run_kinetic(initial, params, eqs, t_final, snapshot_times=None, cfl=0.8):
    """Advance to t_final, emitting moment snapshots at the requested times.

    dt is chosen from the CFL bound and rounded down so every snapshot time
    is hit exactly; the final time is always snapshotted. Returns the list
    of snapshots and the final kinetic state.
    """
    if t_final < 0:
        raise ValidationError("t_final must be >= 0")
    if not 0 < cfl <= 0.9:
        raise ValidationError("cfl must be in (0, 0.9]")
    times = sorted(set(snapshot_times if snapshot_times is not None else [t_final]))
    if times and (times[0] < initial.time or times[-1] > t_final):
        raise ValidationError("snapshot times must lie in [initial time, t_final]")
    if not times or times[-1] < t_final:
        times.append(t_final)

    dt_bound = max_step(initial, cfl)
    state = initial
    snapshots = []
    for target in times:
        segment = target - state.time
        if segment > 0:
            n = max(1, math.ceil(segment / dt_bound - 1e-12))
            dt = segment / n
            for _ in range(n):
                state = kinetic_step(state, params, eqs, dt)
            state.time = target  # cancel accumulated rounding in the sum
        snapshots.append(moments(state))
    return snapshots, state
