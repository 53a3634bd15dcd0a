"""Semi-discrete right-hand side, positivity-preserving draining limiter,
SSP-RK3 time stepping, and the simulation driver.

Boundary conditions are zero-order extrapolation: two ghost cells per side
copy the outermost physical cells (one feeds the boundary-cell slopes, one
spare for the stencil).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np

from .flux import diffusion_switch, numerical_flux
from .model import (ConservedState, CoriolisSpec, Grid, Numerics, Scenario,
                    Topography)
from .reconstruction import GHOST, InterfaceStates, build_interface_states

_TINY = 1.0e-300
# keeps the limited update strictly nonnegative under round-off
_DRAIN_SAFETY = 1.0 - 1.0e-10


class IntegrationError(RuntimeError):
    """Raised when the solution stops being finite; carries the time."""

    def __init__(self, t: float, message: str = "non-finite solution"):
        super().__init__(f"{message} at t={t:.6g}")
        self.t = t


def apply_boundary(state: ConservedState) -> np.ndarray:
    """Pad all four conserved fields with two edge-copied ghost cells per
    side; returns a (4, n+4) array."""
    return np.pad(state.array, ((0, 0), (GHOST, GHOST)), mode="edge")


def source_term(state: ConservedState, iface: InterfaceStates,
                coriolis: CoriolisSpec, grid: Grid) -> np.ndarray:
    """Coriolis source for the q component.

    Constant f uses f * p_bar directly; variable f integrates f*p over the
    cell with Simpson's rule on the inner one-sided interface values.
    """
    if coriolis.is_constant:
        return coriolis.f0 * state.p
    f_iface = coriolis.values(grid.interfaces)
    f_center = coriolis.values(grid.centers)
    return (f_iface[:-1] * iface.p_plus[:-1]
            + 4.0 * f_center * state.p
            + f_iface[1:] * iface.p_minus[1:]) / 6.0


def assemble_fluxes(state: ConservedState, topo: Topography,
                    coriolis: CoriolisSpec, grid: Grid, numerics: Numerics,
                    r_datum: float = 0.0):
    """Interface states plus central-upwind fluxes for the current state.

    Returns (fluxes, a_plus, a_minus, iface).
    """
    iface = build_interface_states(state, topo, coriolis, grid, numerics,
                                   r_datum=r_datum)
    switch = diffusion_switch(iface.l_cell_left, iface.l_cell_right,
                              grid.dy, grid.length,
                              numerics.switch_c, numerics.switch_m)
    flux, a_plus, a_minus = numerical_flux(iface, switch)
    return flux, a_plus, a_minus, iface


def rhs(state: ConservedState, topo: Topography, coriolis: CoriolisSpec,
        grid: Grid, numerics: Numerics, r_datum: float = 0.0) -> np.ndarray:
    """Semi-discrete tendencies d/dt (h, q, p, hb) per cell, (4, n).

    Flux divergence plus the Coriolis source on q; no positivity limiting
    (that is time-step dependent and belongs to the stepper).
    """
    flux, _, _, iface = assemble_fluxes(state, topo, coriolis, grid,
                                        numerics, r_datum=r_datum)
    tend = -(flux[:, 1:] - flux[:, :-1]) / grid.dy
    tend[1] += source_term(state, iface, coriolis, grid)
    return tend


def cfl_dt(a_plus, a_minus, dy: float, cfl: float, t_remaining: float) -> float:
    """Time step cfl*dy/a_max; a quiescent state (a_max = 0) uses the whole
    remaining time."""
    a_max = float(max(np.max(a_plus, initial=0.0),
                      np.max(-np.asarray(a_minus), initial=0.0)))
    if a_max <= 0.0:
        return t_remaining
    return cfl * dy / a_max


def draining_limit(padded: np.ndarray, flux: np.ndarray, dt: float,
                   dy: float) -> Tuple[np.ndarray, int]:
    """Rescale the h and hb flux components so no cell loses more of either
    quantity than it holds within dt.

    Each cell's drain time is dy*rho / (sum of its outgoing fluxes); every
    interface flux is scaled by min(dt, drain time of the donor cell)/dt,
    the donor being the upwind cell by flux sign. Momentum fluxes are left
    untouched. Returns the adjusted fluxes and the number of limited
    interfaces.
    """
    flux = flux.copy()
    n_iface = flux.shape[1]
    idx = np.arange(n_iface)
    limited = np.zeros(n_iface, dtype=bool)
    for row, quantity in ((0, padded[0]), (3, padded[3])):
        f = flux[row]
        f_ext = np.concatenate(([0.0], f, [0.0]))
        outgoing = np.maximum(f_ext[1:], 0.0) + np.maximum(-f_ext[:-1], 0.0)
        t_drain = _DRAIN_SAFETY * dy * quantity[1:-1] / np.maximum(outgoing, _TINY)
        donor = np.where(f > 0.0, idx, idx + 1)
        scale = np.minimum(dt, t_drain[donor]) / dt
        flux[row] = f * scale
        limited |= scale < 1.0
    return flux, int(np.count_nonzero(limited))


def ssp_rk3_combine(u, dt: float, f: Callable):
    """Three-stage third-order strong-stability-preserving Runge-Kutta
    update of u' = f(u); works on scalars and arrays alike."""
    u1 = u + dt * f(u)
    u2 = 0.75 * u + 0.25 * (u1 + dt * f(u1))
    return u / 3.0 + (2.0 / 3.0) * (u2 + dt * f(u2))


@dataclass(frozen=True)
class StepReport:
    """Record of one accepted step."""

    t: float              # simulation clock after the step
    dt: float             # step actually taken
    dt_cfl: float         # cfl*dy/a_max before any event clipping
    a_max: float
    n_limited: int        # draining-limited interfaces over all stages
    min_h: float          # minimum depth over all stages
    min_hb: float
    # effective boundary fluxes of the whole step (SSP-weighted), for the
    # exact conservation ledger: (left, right) for h and hb
    bflux_h: Tuple[float, float] = (0.0, 0.0)
    bflux_hb: Tuple[float, float] = (0.0, 0.0)


def _finish_stage(arr: np.ndarray, flux: np.ndarray, iface: InterfaceStates,
                  scenario: Scenario, dt: float):
    """Drain the raw fluxes at step dt and form the stage tendencies."""
    grid = scenario.grid
    padded = np.pad(arr, ((0, 0), (GHOST, GHOST)), mode="edge")
    flux, n_limited = draining_limit(padded, flux, dt, grid.dy)
    tend = -(flux[:, 1:] - flux[:, :-1]) / grid.dy
    tend[1] += source_term(ConservedState(arr), iface, scenario.coriolis, grid)
    boundary = (flux[0, 0], flux[0, -1], flux[3, 0], flux[3, -1])
    return tend, boundary, n_limited


def _stage(arr: np.ndarray, scenario: Scenario, dt: float):
    flux, a_plus, a_minus, iface = assemble_fluxes(
        ConservedState(arr), scenario.topography, scenario.coriolis,
        scenario.grid, scenario.numerics)
    tend, boundary, n_limited = _finish_stage(arr, flux, iface, scenario, dt)
    return tend, boundary, n_limited, a_plus, a_minus


def _combine_and_report(u0, stage1, scenario, dt, t_after):
    """Run stages 2 and 3 on top of a finished first stage and assemble
    the report; raises IntegrationError on non-finite output."""
    k0, b0, n0, a_plus, a_minus = stage1
    u1 = u0 + dt * k0
    k1, b1, n1, _, _ = _stage(u1, scenario, dt)
    u2 = 0.75 * u0 + 0.25 * (u1 + dt * k1)
    k2, b2, n2, _, _ = _stage(u2, scenario, dt)
    u_new = u0 / 3.0 + (2.0 / 3.0) * (u2 + dt * k2)

    if not np.all(np.isfinite(u_new)):
        raise IntegrationError(t_after)

    weighted = [(x0 + x1 + 4.0 * x2) / 6.0 for x0, x1, x2 in zip(b0, b1, b2)]
    report = StepReport(
        t=t_after, dt=dt,
        dt_cfl=cfl_dt(a_plus, a_minus, scenario.grid.dy,
                      scenario.numerics.cfl, np.inf),
        a_max=float(max(np.max(a_plus, initial=0.0),
                        np.max(-a_minus, initial=0.0))),
        n_limited=n0 + n1 + n2,
        min_h=float(min(u1[0].min(), u2[0].min(), u_new[0].min())),
        min_hb=float(min(u1[3].min(), u2[3].min(), u_new[3].min())),
        bflux_h=(weighted[0], weighted[1]),
        bflux_hb=(weighted[2], weighted[3]))
    return ConservedState(u_new), report


def ssp_rk3_step(state: ConservedState, t: float, dt: float,
                 scenario: Scenario) -> Tuple[ConservedState, StepReport]:
    """Advance one SSP-RK3 step of size dt.

    Every stage rebuilds the boundary padding, reassembles fluxes, and
    applies the draining limiter, so h and hb stay nonnegative after each
    stage and hence after the convex combinations.
    """
    stage1 = _stage(state.array, scenario, dt)
    return _combine_and_report(state.array, stage1, scenario, dt, t + dt)


@dataclass
class SimulationResult:
    """Outcome of run_simulation; ``failed`` flags an aborted integration
    with whatever partial outputs were collected."""

    scenario: Scenario
    initial_state: ConservedState
    state: ConservedState
    t: float
    snapshots: List[Tuple[float, ConservedState]] = field(default_factory=list)
    records: list = field(default_factory=list)
    steps: int = 0
    failed: bool = False
    failure_message: str = ""


def run_simulation(scenario: Scenario,
                   on_step: Optional[Callable] = None,
                   on_snapshot: Optional[Callable] = None,
                   collect_records: bool = True) -> SimulationResult:
    """Integrate a scenario to its final time.

    Steps are clipped so snapshot times and the final time are landed on
    exactly (no output interpolation). ``on_step(state, report)`` fires
    after every accepted step, ``on_snapshot(t, state)`` at snapshot times.
    Deterministic: identical scenarios produce identical outputs.
    """
    from .diagnostics import ConservationLedger, make_record

    state = scenario.initial_state()
    result = SimulationResult(scenario, state, state, 0.0)
    ledger = ConservationLedger(state, scenario.grid)
    if collect_records:
        result.records.append(make_record(0.0, state, scenario, ledger))

    def emit_snapshot(t_snap, snap_state):
        result.snapshots.append((t_snap, snap_state))
        if on_snapshot is not None:
            on_snapshot(t_snap, snap_state)

    t_final = scenario.t_final
    if t_final == 0.0:
        emit_snapshot(0.0, state)
        return result
    if scenario.snapshots and scenario.snapshots[0] == 0.0:
        emit_snapshot(0.0, state)
    events = sorted(set(t for t in scenario.snapshots if t > 0.0) | {t_final})

    t = 0.0
    ev = 0
    while t < t_final:
        next_event = events[ev]
        try:
            flux, a_plus, a_minus, iface = assemble_fluxes(
                state, scenario.topography, scenario.coriolis,
                scenario.grid, scenario.numerics)
            dt = cfl_dt(a_plus, a_minus, scenario.grid.dy,
                        scenario.numerics.cfl, next_event - t)
            landed = dt >= (next_event - t) * (1.0 - 1.0e-12)
            if landed:
                dt = next_event - t
            t_after = next_event if landed else t + dt
            stage1 = (*_finish_stage(state.array, flux, iface, scenario, dt),
                      a_plus, a_minus)
            state, report = _combine_and_report(state.array, stage1,
                                                scenario, dt, t_after)
        except IntegrationError as err:
            result.failed = True
            result.failure_message = str(err)
            result.state = state
            result.t = t
            return result
        t = t_after
        ledger.update(report)
        result.steps += 1
        if collect_records:
            result.records.append(make_record(t, state, scenario, ledger))
        if on_step is not None:
            on_step(state, report)
        if landed:
            if next_event in scenario.snapshots:
                emit_snapshot(next_event, state)
            ev += 1
    result.state = state
    result.t = t
    return result
