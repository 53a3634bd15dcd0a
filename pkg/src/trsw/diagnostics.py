"""Verification quantities: thermo-geostrophic balance residuals and their
time averages, conservation ledgers, energy, potential vorticity, total
variation, and linear-theory reference values.

Spatial derivatives use centered differences in the interior and one-sided
differences at the boundaries, matching the second-order scheme.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .model import (DEFAULT_EPS, ConservedState, CoriolisSpec, Grid,
                    Scenario, Topography, desingularized_ratio,
                    primitives_from_state)


def _require_flat(topo: Topography, what: str):
    if np.any(topo.z_iface != 0.0):
        raise ValueError(f"{what} is defined for a flat bottom (Z = 0) only")


def balance_residual(state: ConservedState, coriolis: CoriolisSpec,
                     grid: Grid, topo: Topography,
                     eps: float = DEFAULT_EPS) -> Tuple[np.ndarray, np.ndarray]:
    """Both sides of the flat-bottom thermo-geostrophic balance
    b h_y + (h/2) b_y = -f u, evaluated per cell.

    The left side is differenced in its conservative form (b h^2/2)_y / h,
    the gradient of the same potential whose flux the scheme balances;
    this is identical in the continuum and better conditioned on coarse
    grids than differencing b and h separately. Returned as (lhs, rhs) so
    transient imbalance can be plotted; nothing forces the two to agree
    away from equilibrium.
    """
    _require_flat(topo, "the balance residual")
    u, _, _, _ = primitives_from_state(state, topo, eps)
    potential = 0.5 * state.hb * state.h
    lhs = desingularized_ratio(state.h, np.gradient(potential, grid.dy), eps)
    rhs = -coriolis.values(grid.centers) * u
    return lhs, rhs


class BalanceTimeAverager:
    """Trapezoidal time average of both sides of the balance relation over
    a window starting at t_start (typically two inertial periods in)."""

    def __init__(self, t_start: float):
        self.t_start = float(t_start)
        self._prev = None
        self._acc_lhs = None
        self._acc_rhs = None
        self._t_first = None
        self._t_last = None

    def add(self, t: float, lhs: np.ndarray, rhs: np.ndarray):
        if t < self.t_start:
            return
        if self._prev is not None:
            t0, lhs0, rhs0 = self._prev
            w = 0.5 * (t - t0)
            self._acc_lhs = self._acc_lhs + w * (lhs0 + lhs)
            self._acc_rhs = self._acc_rhs + w * (rhs0 + rhs)
        else:
            self._acc_lhs = np.zeros_like(np.asarray(lhs, float))
            self._acc_rhs = np.zeros_like(np.asarray(rhs, float))
            self._t_first = t
        self._prev = (t, np.asarray(lhs, float), np.asarray(rhs, float))
        self._t_last = t

    def finalize(self) -> Tuple[np.ndarray, np.ndarray]:
        if self._t_first is None or self._t_last <= self._t_first:
            raise ValueError("empty averaging window")
        span = self._t_last - self._t_first
        return self._acc_lhs / span, self._acc_rhs / span


class ConservationLedger:
    """Exact bookkeeping of total h and hb against the boundary-flux
    integral of the conservative update."""

    def __init__(self, initial: ConservedState, grid: Grid):
        self.dy = grid.dy
        self.mass0 = float(np.sum(initial.h) * grid.dy)
        self.hb0 = float(np.sum(initial.hb) * grid.dy)
        self._outflow_h = 0.0
        self._outflow_hb = 0.0

    def update(self, report):
        """Accumulate one step's effective boundary fluxes."""
        self._outflow_h += report.dt * (report.bflux_h[1] - report.bflux_h[0])
        self._outflow_hb += report.dt * (report.bflux_hb[1] - report.bflux_hb[0])

    def drifts(self, state: ConservedState) -> Tuple[float, float]:
        """Change of the totals minus the boundary-flux integral; zero up
        to round-off for the conservative scheme."""
        mass = float(np.sum(state.h) * self.dy)
        hb = float(np.sum(state.hb) * self.dy)
        return (mass - (self.mass0 - self._outflow_h),
                hb - (self.hb0 - self._outflow_hb))


def energy(state: ConservedState, grid: Grid, topo: Topography,
           eps: float = DEFAULT_EPS) -> float:
    """Total energy sum(h (u^2+v^2)/2 + b h^2 / 2) dy over a flat bottom."""
    _require_flat(topo, "the energy integral")
    u, v, b, _ = primitives_from_state(state, topo, eps)
    h = state.h
    return float(np.sum(0.5 * h * (u * u + v * v) + 0.5 * b * h * h) * grid.dy)


def potential_vorticity(state: ConservedState, coriolis: CoriolisSpec,
                        grid: Grid, eps: float = DEFAULT_EPS) -> np.ndarray:
    """Q = (f - u_y) / h per cell (desingularized in h)."""
    u = desingularized_ratio(state.h, state.q, eps)
    u_y = np.gradient(u, grid.dy)
    return desingularized_ratio(state.h, coriolis.values(grid.centers) - u_y, eps)


def rossby_burger(u0: float, length: float, h0: float, b_mean: float,
                  beta: float) -> Tuple[float, float]:
    """Rossby and Burger numbers of an equatorial jet:
    Ro = U0 / (beta L^2), Bu = sqrt(b_mean H0) / (beta L^2)."""
    if length <= 0 or beta <= 0:
        raise ValueError("jet width and beta must be positive")
    denom = beta * length * length
    return u0 / denom, np.sqrt(b_mean * h0) / denom


def inertia_gravity_frequency(f: float, b: float, h: float, k: float) -> float:
    """Dispersion relation omega = sqrt(f^2 + b h k^2) of inertia-gravity
    waves over a uniform background."""
    return float(np.sqrt(f * f + b * h * k * k))


def equatorial_eigenfrequency(n: int) -> float:
    """Nondimensional frequency sqrt(2n + 1) of the n-th equatorially
    trapped mode in the infinite-zonal-wavelength limit."""
    if n < 0:
        raise ValueError("mode number must be nonnegative")
    return float(np.sqrt(2 * n + 1))


def equatorial_inertial_period(beta: float, b0: float, h0: float) -> float:
    """Equatorial inertial period 2 pi / sqrt(beta sqrt(b0 H0))."""
    return float(2.0 * np.pi / np.sqrt(beta * np.sqrt(b0 * h0)))


def total_variation(field) -> float:
    """Sum of absolute cell-to-cell differences."""
    return float(np.sum(np.abs(np.diff(np.asarray(field, float)))))


def gradient_max(field, dy: float) -> float:
    """Largest discrete gradient magnitude max |delta field| / dy."""
    d = np.abs(np.diff(np.asarray(field, float)))
    return float(d.max(initial=0.0) / dy)


@dataclass
class DiagnosticsRecord:
    """Per-step ledger entry; energy is NaN when the bottom is not flat.
    Balance residual fields can be attached for plotting."""

    t: float
    mass: float
    hb_total: float
    mass_drift: float
    hb_drift: float
    energy: float
    max_abs_v: float
    max_grad_v: float
    tv_w: float
    balance_lhs: Optional[np.ndarray] = None
    balance_rhs: Optional[np.ndarray] = None

    FIELDS = ("t", "mass", "hb_total", "mass_drift", "hb_drift", "energy",
              "max_abs_v", "max_grad_v", "tv_w")

    def row(self) -> Tuple[float, ...]:
        return tuple(getattr(self, name) for name in self.FIELDS)


def make_record(t: float, state: ConservedState, scenario: Scenario,
                ledger: ConservationLedger) -> DiagnosticsRecord:
    grid, topo = scenario.grid, scenario.topography
    eps = scenario.numerics.eps
    _, v, _, w = primitives_from_state(state, topo, eps)
    mass_drift, hb_drift = ledger.drifts(state)
    flat = not np.any(topo.z_iface != 0.0)
    return DiagnosticsRecord(
        t=t,
        mass=float(np.sum(state.h) * grid.dy),
        hb_total=float(np.sum(state.hb) * grid.dy),
        mass_drift=mass_drift,
        hb_drift=hb_drift,
        energy=energy(state, grid, topo, eps) if flat else float("nan"),
        max_abs_v=float(np.max(np.abs(v), initial=0.0)),
        max_grad_v=gradient_max(v, grid.dy),
        tv_w=total_variation(w))
