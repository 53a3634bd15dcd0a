"""CSV snapshot and diagnostics files, plus solution comparison helpers.

Snapshots are plot-ready text: metadata in leading ``# key: value``
comments, a header row, one data row per cell with 17 significant digits,
so identical runs produce byte-identical files.
"""

from __future__ import annotations

import os
from typing import Dict, Optional, Tuple

import numpy as np

from .model import ConservedState, Grid, Numerics, Topography, \
    primitives_from_state

SNAPSHOT_COLUMNS = ("y", "h", "q", "p", "hb", "u", "v", "b", "w", "Z")


def _fmt(x: float) -> str:
    return f"{x:.16e}"


def write_snapshot(path, state: ConservedState, topo: Topography, grid: Grid,
                   t: float, scenario_name: str = "custom",
                   numerics: Optional[Numerics] = None) -> None:
    """Write one solution snapshot as CSV (see SNAPSHOT_COLUMNS)."""
    numerics = numerics or Numerics()
    u, v, b, w = primitives_from_state(state, topo, numerics.eps)
    columns = (grid.centers, state.h, state.q, state.p, state.hb,
               u, v, b, w, topo.z_center)
    lines = [
        f"# scenario: {scenario_name}",
        f"# N: {grid.n}",
        f"# y_min: {_fmt(grid.y_min)}",
        f"# y_max: {_fmt(grid.y_max)}",
        f"# t: {_fmt(t)}",
        f"# cfl: {_fmt(numerics.cfl)}",
        f"# sigma: {_fmt(numerics.sigma)}",
        ",".join(SNAPSHOT_COLUMNS),
    ]
    lines += [",".join(_fmt(col[k]) for col in columns)
              for k in range(grid.n)]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_snapshot(path) -> Tuple[Dict[str, str], Dict[str, np.ndarray]]:
    """Parse a snapshot file back into (metadata, column arrays)."""
    meta: Dict[str, str] = {}
    header = None
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line[1:].partition(":")
                meta[key.strip()] = value.strip()
            elif header is None:
                header = line.split(",")
            else:
                rows.append([float(x) for x in line.split(",")])
    if header is None:
        raise ValueError(f"{path}: no header row")
    data = np.asarray(rows, float)
    if data.shape[0] != int(meta.get("N", data.shape[0])):
        raise ValueError(f"{path}: row count does not match N")
    return meta, {name: data[:, i] for i, name in enumerate(header)}


def write_diagnostics(path, records) -> None:
    """Diagnostics time series CSV: one row per recorded step."""
    from .diagnostics import DiagnosticsRecord

    lines = [",".join(DiagnosticsRecord.FIELDS)]
    lines += [",".join(_fmt(x) for x in rec.row()) for rec in records]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def restrict_average(fine: np.ndarray, factor: int) -> np.ndarray:
    """Exact finite-volume restriction: average groups of ``factor``
    consecutive fine cells into one coarse cell."""
    fine = np.asarray(fine, float)
    if factor < 1 or fine.size % factor:
        raise ValueError(f"cannot restrict {fine.size} cells by {factor}")
    return fine.reshape(-1, factor).mean(axis=1)


def _refinement_factor(n_a: int, n_b: int) -> int:
    big, small = max(n_a, n_b), min(n_a, n_b)
    if big % small:
        raise ValueError(f"grids with {n_a} and {n_b} cells are not nested")
    return big // small


def compare_fields(a: np.ndarray, b: np.ndarray, dy_coarse: float
                   ) -> Tuple[float, float]:
    """Discrete L1 and Linf distance of two cell fields on nested grids;
    the finer one is restricted by cell averaging first."""
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    if a.size > b.size:
        a = restrict_average(a, _refinement_factor(a.size, b.size))
    elif b.size > a.size:
        b = restrict_average(b, _refinement_factor(a.size, b.size))
    diff = np.abs(a - b)
    return float(diff.sum() * dy_coarse), float(diff.max())


def compare_solutions(path_a, path_b) -> Dict[str, Tuple[float, float]]:
    """Per-column (L1, Linf) differences between two snapshot files whose
    grids coincide or are nested by an integer factor."""
    meta_a, data_a = read_snapshot(path_a)
    meta_b, data_b = read_snapshot(path_b)
    for key in ("y_min", "y_max"):
        if not np.isclose(float(meta_a[key]), float(meta_b[key]),
                          rtol=0.0, atol=1e-12):
            raise ValueError(f"snapshots cover different domains ({key})")
    n_a, n_b = int(meta_a["N"]), int(meta_b["N"])
    _refinement_factor(n_a, n_b)
    length = float(meta_a["y_max"]) - float(meta_a["y_min"])
    dy_coarse = length / min(n_a, n_b)
    out = {}
    for name in SNAPSHOT_COLUMNS:
        if name == "y":
            continue
        out[name] = compare_fields(data_a[name], data_b[name], dy_coarse)
    return out


def snapshot_filename(scenario_name: str, n: int, t: float) -> str:
    return f"{scenario_name}_N{n}_t{t:.6f}.csv"


def ensure_outdir(path) -> str:
    os.makedirs(path, exist_ok=True)
    probe = os.path.join(path, ".write-probe")
    try:
        with open(probe, "w"):
            pass
        os.remove(probe)
    except OSError as err:
        raise OSError(f"output directory {path!r} is not writable: {err}")
    return path
