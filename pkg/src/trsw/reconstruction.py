"""Equilibrium-variable reconstruction.

The meridional momentum equation is closed through a global variable
L = p^2/h + (b/2) h^2 + R, where R integrates the Coriolis and topography
source terms in y. Reconstructing V = (q, p, L, b) with a generalized
minmod limiter and recovering one-sided interface depths from L keeps
discrete equilibria (p = 0, L = const) exactly stationary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import (ConservedState, CoriolisSpec, Grid, Numerics, Topography,
                    desingularized_ratio)

GHOST = 2  # edge-copied ghost cells per side; enough for the slope stencil

_TINY = 1.0e-300


def minmod(*args):
    """Componentwise minmod: min of the arguments if all positive, max if
    all negative, zero otherwise. Accepts scalars or equally shaped arrays."""
    arrs = [np.asarray(a, float) for a in args]
    lo = arrs[0]
    hi = arrs[0]
    for a in arrs[1:]:
        lo = np.minimum(lo, a)
        hi = np.maximum(hi, a)
    out = np.where(lo > 0, lo, 0.0) + np.where(hi < 0, hi, 0.0)
    if all(np.ndim(a) == 0 for a in args):
        return float(out)
    return out


def minmod_slopes(values: np.ndarray, sigma: float, dy: float) -> np.ndarray:
    """Generalized minmod slopes for the interior cells of ``values``.

    Returns one slope per cell except the first and last (those lack a
    neighbour); sigma in [1, 2] trades diffusion against oscillation.
    """
    v = np.asarray(values, float)
    left = (v[1:-1] - v[:-2]) / dy
    right = (v[2:] - v[1:-1]) / dy
    central = (v[2:] - v[:-2]) / (2.0 * dy)
    return minmod(sigma * left, central, sigma * right)


def interface_values(padded: np.ndarray, sigma: float, dy: float):
    """One-sided interface values of a cell field carrying GHOST=2 ghosts.

    For a physical grid of n cells (padded length n+4) returns the left
    ("minus") and right ("plus") limits at the n+1 physical interfaces.
    """
    s = minmod_slopes(padded, sigma, dy)
    minus = padded[1:-2] + 0.5 * dy * s[:-1]
    plus = padded[2:-1] - 0.5 * dy * s[1:]
    return minus, plus


def pad_cells(values: np.ndarray) -> np.ndarray:
    """Edge-replicate GHOST cells on both sides (zero-order extrapolation)."""
    return np.pad(np.asarray(values, float), GHOST, mode="edge")


def cell_buoyancy(h_bar, hb_bar, eps: float) -> np.ndarray:
    """Cell buoyancy b = hb/h through the desingularized ratio."""
    return desingularized_ratio(h_bar, hb_bar, eps)


def source_potential(state: ConservedState, topo: Topography,
                     coriolis: CoriolisSpec, grid: Grid):
    """Running integral R of f*q + h*b*Z_y, at cell centers and interfaces.

    The interface recursion uses the cell value of f*q and hb times the
    interface jump of Z; the center recursion uses trapezoidal averages.
    The datum is R = 0 at the left boundary interface, and the first center
    value is the average of the two enclosing interface values.
    """
    dy = grid.dy
    fq = coriolis.values(grid.centers) * state.q
    hb = state.hb

    r_iface = np.zeros(grid.n + 1)
    r_iface[1:] = np.cumsum(fq * dy + hb * np.diff(topo.z_iface))

    r_center = np.empty(grid.n)
    r_center[0] = 0.5 * (r_iface[0] + r_iface[1])
    if grid.n > 1:
        inc = (0.5 * (fq[:-1] + fq[1:]) * dy
               + 0.5 * (hb[:-1] + hb[1:]) * np.diff(topo.z_center))
        r_center[1:] = r_center[0] + np.cumsum(inc)
    return r_center, r_iface


def equilibrium_centers(state: ConservedState, r_center: np.ndarray,
                        eps: float) -> np.ndarray:
    """Cell values of L = p^2/h + (hb/2) h + R, with the kinetic term
    desingularized so dry cells contribute zero."""
    kinetic = state.p * desingularized_ratio(state.h, state.p, eps)
    return kinetic + 0.5 * state.hb * state.h + np.asarray(r_center, float)


@dataclass(frozen=True, eq=False)
class GlobalPrimitive:
    """Cell and interface values of the global variables: the source
    potential R (datum zero at the left boundary interface), the
    equilibrium variable L, and the cell buoyancy."""

    r_center: np.ndarray
    r_iface: np.ndarray
    l_center: np.ndarray
    b_center: np.ndarray


def global_primitive(state: ConservedState, topo: Topography,
                     coriolis: CoriolisSpec, grid: Grid,
                     eps: float) -> GlobalPrimitive:
    """Assemble R, L, and b for a state in one pass."""
    r_center, r_iface = source_potential(state, topo, coriolis, grid)
    return GlobalPrimitive(
        r_center=r_center, r_iface=r_iface,
        l_center=equilibrium_centers(state, r_center, eps),
        b_center=cell_buoyancy(state.h, state.hb, eps))


def fallback_interface_depth(h_pad: np.ndarray, z_center_pad: np.ndarray,
                             z_iface: np.ndarray, sigma: float, dy: float):
    """Surface-based one-sided depths: reconstruct w = h + Z like any other
    field and subtract the interface bottom, clipped at zero."""
    w_minus, w_plus = interface_values(h_pad + z_center_pad, sigma, dy)
    return (np.maximum(w_minus - z_iface, 0.0),
            np.maximum(w_plus - z_iface, 0.0))


def depth_from_equilibrium(p_side, b_mid, l_side, r_iface, h_fallback):
    """Recover the one-sided interface depth from p, L and R.

    The definition of L gives p^2/h + (b/2) h^2 = L - R =: D, a cubic in h.
    With D > 0 and p^4 <= 8 D^3 / (27 b) it has two positive roots
    2*sqrt(Y)*cos((T + 2*pi*l)/3), Y = 2D/(3b), T = arccos(-p^2/(b Y^{3/2}));
    the one closer to the surface-based fallback is physical (ties break to
    the larger, subsonic root). p = 0 collapses to sqrt(2D/b) for D > 0.
    In every other case (no positive root, D <= 0, or vanishing b) the
    fallback depth is returned, so the function is total.
    """
    p = np.asarray(p_side, float)
    b = np.asarray(b_mid, float)
    l = np.asarray(l_side, float)
    r = np.asarray(r_iface, float)
    fb = np.asarray(h_fallback, float)
    scalar = all(np.ndim(a) == 0 for a in (p, b, l, r, fb))
    p, b, l, r, fb = np.broadcast_arrays(p, b, l, r, fb)

    d = l - r
    h = np.array(fb, dtype=float, copy=True)

    ok = b > _TINY
    b_safe = np.where(ok, b, 1.0)
    rootable = ok & (p ** 4 <= 8.0 * d ** 3 / (27.0 * b_safe))

    m_sqrt = rootable & (p == 0.0) & (d > 0.0)
    if np.any(m_sqrt):
        h[m_sqrt] = np.sqrt(2.0 * d[m_sqrt] / b[m_sqrt])

    m_trig = rootable & (p != 0.0)  # implies d > 0
    if np.any(m_trig):
        dm, bm, pm, fbm = d[m_trig], b[m_trig], p[m_trig], fb[m_trig]
        y = 2.0 * dm / (3.0 * bm)
        sq = np.sqrt(y)
        arg = np.clip(-pm * pm / (bm * y * sq), -1.0, 1.0)
        theta = np.arccos(arg)
        # round-off in theta can push a vanishing root a hair below zero
        r_sub = np.maximum(2.0 * sq * np.cos(theta / 3.0), 0.0)
        r_sup = np.maximum(2.0 * sq * np.cos((theta + 4.0 * np.pi) / 3.0), 0.0)
        h[m_trig] = np.where(np.abs(r_sub - fbm) <= np.abs(r_sup - fbm),
                             r_sub, r_sup)
    if scalar:
        return float(h)
    return h


@dataclass(frozen=True, eq=False)
class InterfaceStates:
    """One-sided reconstructed values at the n+1 physical interfaces.

    ``minus`` quantities are limits from the left cell, ``plus`` from the
    right; p has been recomputed as h*v after desingularization, so
    p = h*v holds exactly. ``l_cell_left/right`` carry the cell-centered L
    on either side for the diffusion switch.
    """

    h_minus: np.ndarray
    h_plus: np.ndarray
    q_minus: np.ndarray
    q_plus: np.ndarray
    p_minus: np.ndarray
    p_plus: np.ndarray
    b_minus: np.ndarray
    b_plus: np.ndarray
    l_minus: np.ndarray
    l_plus: np.ndarray
    v_minus: np.ndarray
    v_plus: np.ndarray
    b_mid: np.ndarray
    r_iface: np.ndarray
    l_cell_left: np.ndarray
    l_cell_right: np.ndarray


def build_interface_states(state: ConservedState, topo: Topography,
                           coriolis: CoriolisSpec, grid: Grid,
                           numerics: Numerics,
                           r_datum: float = 0.0) -> InterfaceStates:
    """Full reconstruction pipeline from cell averages to interface states.

    ``r_datum`` shifts the (arbitrary) integration constant of R; it is
    exposed for datum-invariance checks and is zero in production use.
    """
    sigma, dy, eps = numerics.sigma, grid.dy, numerics.eps

    pad = np.pad(state.array, ((0, 0), (GHOST, GHOST)), mode="edge")
    h_pad, q_pad, p_pad, hb_pad = pad
    b_pad = cell_buoyancy(h_pad, hb_pad, eps)

    r_center, r_iface = source_potential(state, topo, coriolis, grid)
    if r_datum != 0.0:
        r_center = r_center + r_datum
        r_iface = r_iface + r_datum
    kinetic = p_pad * desingularized_ratio(h_pad, p_pad, eps)
    l_pad = kinetic + 0.5 * hb_pad * h_pad + pad_cells(r_center)

    q_minus, q_plus = interface_values(q_pad, sigma, dy)
    p_minus, p_plus = interface_values(p_pad, sigma, dy)
    l_minus, l_plus = interface_values(l_pad, sigma, dy)
    b_minus, b_plus = interface_values(b_pad, sigma, dy)
    b_mid = 0.5 * (b_minus + b_plus)

    fb_minus, fb_plus = fallback_interface_depth(
        h_pad, pad_cells(topo.z_center), topo.z_iface, sigma, dy)
    h_minus = depth_from_equilibrium(p_minus, b_mid, l_minus, r_iface, fb_minus)
    h_plus = depth_from_equilibrium(p_plus, b_mid, l_plus, r_iface, fb_plus)

    v_minus = desingularized_ratio(h_minus, p_minus, eps)
    v_plus = desingularized_ratio(h_plus, p_plus, eps)
    p_minus = h_minus * v_minus
    p_plus = h_plus * v_plus

    return InterfaceStates(
        h_minus=h_minus, h_plus=h_plus,
        q_minus=q_minus, q_plus=q_plus,
        p_minus=p_minus, p_plus=p_plus,
        b_minus=b_minus, b_plus=b_plus,
        l_minus=l_minus, l_plus=l_plus,
        v_minus=v_minus, v_plus=v_plus,
        b_mid=b_mid, r_iface=r_iface,
        l_cell_left=l_pad[1:-2], l_cell_right=l_pad[2:-1])
