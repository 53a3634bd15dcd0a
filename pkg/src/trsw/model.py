"""Grid, state, topography, and scenario data model for the 1-D thermal
rotating shallow water solver.

All containers are immutable value objects: arrays are copied on
construction and flagged read-only, so instances can be shared freely.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional

import numpy as np

DEFAULT_EPS = 1.0e-8


def _readonly(a) -> np.ndarray:
    out = np.array(a, dtype=float, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Grid:
    """Uniform finite-volume grid on [y_min, y_max] with n cells.

    Interfaces sit at y_min + j*dy (j = 0..n) and cell centers at the
    interface midpoints; y_min and y_max are hit exactly.
    """

    y_min: float
    y_max: float
    n: int

    def __post_init__(self):
        if self.n < 4:
            raise ValueError(f"need at least 4 cells, got {self.n}")
        if not self.y_max > self.y_min:
            raise ValueError(f"empty domain [{self.y_min}, {self.y_max}]")

    @property
    def dy(self) -> float:
        return (self.y_max - self.y_min) / self.n

    @property
    def length(self) -> float:
        return self.y_max - self.y_min

    @cached_property
    def interfaces(self) -> np.ndarray:
        return _readonly(np.linspace(self.y_min, self.y_max, self.n + 1))

    @cached_property
    def centers(self) -> np.ndarray:
        return _readonly(self.y_min + (np.arange(self.n) + 0.5) * self.dy)


def build_grid(y_min: float, y_max: float, n: int) -> Grid:
    return Grid(float(y_min), float(y_max), int(n))


@dataclass(frozen=True, eq=False)
class Topography:
    """Bottom profile sampled at interfaces; cell-center values are always
    the average of the two adjacent interface values (never re-sampled),
    which keeps the discrete steady-state algebra exact.
    """

    z_iface: np.ndarray
    z_center: np.ndarray = field(init=False)

    def __post_init__(self):
        zi = _readonly(self.z_iface)
        object.__setattr__(self, "z_iface", zi)
        object.__setattr__(self, "z_center", _readonly(0.5 * (zi[:-1] + zi[1:])))

    @property
    def is_flat(self) -> bool:
        return bool(np.all(self.z_iface == self.z_iface[0]))


def sample_topography(
    z_left: Callable[[np.ndarray], np.ndarray],
    z_right: Optional[Callable[[np.ndarray], np.ndarray]],
    grid: Grid,
) -> Topography:
    """Sample the bottom at interfaces as the average of one-sided limits.

    For a continuous bottom pass the same function twice (or z_right=None);
    the average then reduces to the point value.
    """
    if z_right is None:
        z_right = z_left
    y = grid.interfaces
    zi = 0.5 * (np.asarray(z_left(y), float) + np.asarray(z_right(y), float))
    return Topography(zi)


def flat_topography(grid: Grid) -> Topography:
    return Topography(np.zeros(grid.n + 1))


@dataclass(frozen=True)
class CoriolisSpec:
    """Coriolis parameter f(y) = f0 + beta*y.

    beta = 0 gives the constant f-plane; f0 = 0 with beta != 0 gives the
    equatorial beta-plane.
    """

    f0: float
    beta: float = 0.0

    @property
    def is_constant(self) -> bool:
        return self.beta == 0.0

    def values(self, y) -> np.ndarray:
        y = np.asarray(y, float)
        return self.f0 + self.beta * y


@dataclass(frozen=True)
class Numerics:
    """Scheme parameters: CFL number, minmod parameter sigma, the
    desingularization threshold, and the diffusion-switch constants."""

    cfl: float = 0.5
    sigma: float = 1.3
    eps: float = DEFAULT_EPS
    switch_c: float = 400.0
    switch_m: int = 8

    def __post_init__(self):
        if not 0.0 < self.cfl:
            raise ValueError(f"cfl must be positive, got {self.cfl}")
        if not 1.0 <= self.sigma <= 2.0:
            raise ValueError(f"sigma must lie in [1, 2], got {self.sigma}")
        if not self.eps > 0.0:
            raise ValueError("eps must be positive")
        if not (self.switch_c > 0 and self.switch_m > 0):
            raise ValueError("switch constants must be positive")


@dataclass(frozen=True, eq=False)
class ConservedState:
    """Cell averages of (h, q, p, hb) stored as a read-only (4, n) array.

    h is the layer depth, q = h*u and p = h*v the zonal and meridional
    momentum densities, and hb the depth-weighted buoyancy.
    """

    array: np.ndarray

    def __post_init__(self):
        arr = _readonly(self.array)
        if arr.ndim != 2 or arr.shape[0] != 4:
            raise ValueError(f"expected a (4, n) array, got shape {arr.shape}")
        if np.any(arr[0] < 0.0):
            raise ValueError("negative depth in conserved state")
        if np.any(arr[3] < 0.0):
            raise ValueError("negative depth-weighted buoyancy in conserved state")
        object.__setattr__(self, "array", arr)

    @classmethod
    def from_fields(cls, h, q, p, hb) -> "ConservedState":
        return cls(np.stack([np.asarray(h, float), np.asarray(q, float),
                             np.asarray(p, float), np.asarray(hb, float)]))

    @property
    def n(self) -> int:
        return self.array.shape[1]

    @property
    def h(self) -> np.ndarray:
        return self.array[0]

    @property
    def q(self) -> np.ndarray:
        return self.array[1]

    @property
    def p(self) -> np.ndarray:
        return self.array[2]

    @property
    def hb(self) -> np.ndarray:
        return self.array[3]


def desingularized_ratio(h, numerator, eps: float = DEFAULT_EPS) -> np.ndarray:
    """Bounded evaluation of numerator/h that stays finite as h -> 0:
    2*h*numerator / (h^2 + max(h^2, eps^2)).

    Equals the exact ratio whenever |h| >= eps.
    """
    h = np.asarray(h, float)
    numerator = np.asarray(numerator, float)
    h2 = h * h
    return 2.0 * h * numerator / (h2 + np.maximum(h2, eps * eps))


def primitives_from_state(state: ConservedState, topo: Topography,
                          eps: float = DEFAULT_EPS):
    """Recover (u, v, b, w) from cell averages.

    Velocities and buoyancy use the desingularized ratio so dry cells give
    zeros instead of division hazards; w = h + Z at cell centers.
    """
    u = desingularized_ratio(state.h, state.q, eps)
    v = desingularized_ratio(state.h, state.p, eps)
    b = desingularized_ratio(state.h, state.hb, eps)
    w = state.h + topo.z_center
    return u, v, b, w


@dataclass(frozen=True, eq=False)
class Scenario:
    """A fully specified run: grid, rotation, bottom, initial-condition
    functions, final time, numerical parameters, and output times.

    ``height`` is interpreted as the free surface w when
    ``height_is_surface`` is set (depth then is w - Z, clipped at zero),
    otherwise as the depth h directly. All callables must accept ndarrays.
    """

    name: str
    grid: Grid
    coriolis: CoriolisSpec
    topography: Topography
    height: Callable[[np.ndarray], np.ndarray]
    b0: Callable[[np.ndarray], np.ndarray]
    u0: Optional[Callable[[np.ndarray], np.ndarray]] = None
    v0: Optional[Callable[[np.ndarray], np.ndarray]] = None
    height_is_surface: bool = False
    t_final: float = 0.0
    numerics: Numerics = Numerics()
    snapshots: tuple = ()

    def __post_init__(self):
        if self.t_final < 0:
            raise ValueError("t_final must be nonnegative")
        if len(self.topography.z_center) != self.grid.n:
            raise ValueError("topography does not match the grid")
        snaps = tuple(sorted(float(t) for t in self.snapshots))
        if any(t < 0 or t > self.t_final for t in snaps):
            raise ValueError("snapshot times must lie in [0, t_final]")
        object.__setattr__(self, "snapshots", snaps)

    def initial_state(self) -> ConservedState:
        """Cell averages by midpoint sampling of the initial-condition
        functions; surface-specified heights subtract the discrete
        cell-center bottom so sampled equilibria stay exact."""
        y = self.grid.centers
        if self.height_is_surface:
            h = np.maximum(np.asarray(self.height(y), float) - self.topography.z_center, 0.0)
        else:
            h = np.asarray(self.height(y), float)
        u = np.asarray(self.u0(y), float) if self.u0 is not None else np.zeros_like(h)
        v = np.asarray(self.v0(y), float) if self.v0 is not None else np.zeros_like(h)
        b = np.asarray(self.b0(y), float)
        return ConservedState.from_fields(h, h * u, h * v, h * b)
