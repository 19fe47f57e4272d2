"""Neighborhood-preserving grid layout for a selection of samples.

Feature vectors are projected to 2-D, then the points are matched to the cells of
the smallest square grid that fits them by an exact minimum-cost linear
assignment on squared point-to-cell-center distances.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil, sqrt
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import EmptySelectionError

Projector = Callable[[np.ndarray, int], np.ndarray]


@dataclass(frozen=True)
class GridAssignment:
    grid_rows: int
    grid_cols: int
    placements: tuple[tuple[str, int, int], ...]  # (object key, row, col)
    cost: float


def project(vectors: Sequence[Sequence[float]], seed: int = 0, method: Projector | None = None) -> np.ndarray:
    """2-D embedding of the feature vectors.

    The default is a principal-axis projection: deterministic, seed-independent,
    with component signs fixed so repeated runs agree bitwise. A stochastic
    neighbor method can be plugged in via `method`, which receives the matrix and
    the seed.
    """
    matrix = np.asarray(vectors, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] == 0:
        raise EmptySelectionError("projection needs at least one feature vector")
    if method is not None:
        out = np.asarray(method(matrix, seed), dtype=float)
        if out.shape != (matrix.shape[0], 2):
            raise ValueError(f"projector returned shape {out.shape}, expected ({matrix.shape[0]}, 2)")
        return out
    centered = matrix - matrix.mean(axis=0)
    if matrix.shape[0] == 1 or not np.any(centered):
        return np.zeros((matrix.shape[0], 2))
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    components = vt[:2]
    if components.shape[0] < 2:
        components = np.vstack([components, np.zeros_like(components[0])])
    # sign convention: the largest-magnitude loading of each axis is positive
    for i in range(2):
        pivot = np.argmax(np.abs(components[i]))
        if components[i, pivot] < 0:
            components[i] = -components[i]
    return centered @ components.T


def normalize_points(points: np.ndarray) -> np.ndarray:
    """Min-max normalize each axis into [0, 1]; degenerate axes collapse to 0.5."""
    points = np.asarray(points, dtype=float)
    lo = points.min(axis=0)
    span = points.max(axis=0) - lo
    out = np.empty_like(points)
    for axis in range(points.shape[1]):
        if span[axis] > 0:
            out[:, axis] = (points[:, axis] - lo[axis]) / span[axis]
        else:
            out[:, axis] = 0.5
    return out


def _entropic_duals(cost: np.ndarray, reg: float = 0.002, iterations: int = 100) -> np.ndarray | None:
    """Row/column potentials from a short entropic-transport (Sinkhorn) run.

    Subtracting per-row and per-column constants never changes which assignment
    is optimal, but near-optimal potentials make the exact solver's augmenting
    paths short, which matters for the dense point clouds projections produce.
    Returns the reduced matrix, or None when the iteration degenerates.
    """
    n, m = cost.shape
    kernel = np.exp(-cost / reg)
    v = np.ones(m)
    col_mass = n / m
    for _ in range(iterations):
        u = 1.0 / np.maximum(kernel @ v, 1e-300)
        v = col_mass / np.maximum(kernel.T @ u, 1e-300)
    row_pot = reg * np.log(u)
    col_pot = reg * np.log(v)
    if not (np.isfinite(row_pot).all() and np.isfinite(col_pot).all()):
        return None
    return cost - row_pot[:, None] - col_pot[None, :]


def assign_to_grid(points: np.ndarray) -> tuple[int, list[tuple[int, int]], float]:
    """Exact minimum-cost placement of n points onto a ceil(sqrt(n))^2 grid.

    Returns (grid side, per-point (row, col), total squared-distance cost).
    Surplus cells stay empty.
    """
    points = np.asarray(points, dtype=float)
    n = points.shape[0]
    if n == 0:
        raise EmptySelectionError("no points to place")
    side = ceil(sqrt(n))
    cols, rows = np.meshgrid(np.arange(side), np.arange(side))
    centers = np.stack(
        [(cols.reshape(-1) + 0.5) / side, (rows.reshape(-1) + 0.5) / side], axis=1
    )
    normalized = normalize_points(points)
    cost = ((normalized[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    point_idx = cell_idx = None
    if n >= 256:
        # pad to square with zero-cost dummy rows so the potential subtraction
        # is optimum-preserving (every column used), then solve the reduced matrix
        n_cells = side * side
        padded = cost if n == n_cells else np.vstack([cost, np.zeros((n_cells - n, n_cells))])
        reduced = _entropic_duals(padded)
        if reduced is not None:
            rows_idx, cols_idx = linear_sum_assignment(reduced)
            real = rows_idx < n
            point_idx, cell_idx = rows_idx[real], cols_idx[real]
    if point_idx is None:
        point_idx, cell_idx = linear_sum_assignment(cost)
    total = float(cost[point_idx, cell_idx].sum())
    placements: list[tuple[int, int]] = [(-1, -1)] * n
    for p, cell in zip(point_idx, cell_idx):
        placements[p] = (int(cell // side), int(cell % side))
    return side, placements, total


def layout_grid(
    keys: Sequence[str],
    vectors: Sequence[Sequence[float]],
    seed: int = 0,
    method: Projector | None = None,
) -> GridAssignment:
    """Project the selection and assign it to grid cells; deterministic per (selection, seed)."""
    if len(keys) == 0:
        raise EmptySelectionError("empty selection")
    if len(keys) != len(vectors):
        raise ValueError(f"{len(keys)} keys but {len(vectors)} vectors")
    points = project(vectors, seed=seed, method=method)
    side, cells, cost = assign_to_grid(points)
    return GridAssignment(
        grid_rows=side,
        grid_cols=side,
        placements=tuple((key, r, c) for key, (r, c) in zip(keys, cells)),
        cost=cost,
    )


def fallback_feature_vector(
    size: float | None,
    aspect: float | None,
    confidence: float | None,
    center_x: float | None,
    center_y: float | None,
    image_width: int,
    image_height: int,
) -> tuple[float, float, float, float, float]:
    """Stand-in features when no feature table is supplied: normalized size,
    aspect ratio, confidence, and normalized box center."""
    area = float(image_width * image_height)
    return (
        (size or 0.0) / area if area else 0.0,
        aspect or 0.0,
        confidence or 0.0,
        (center_x or 0.0) / image_width if image_width else 0.0,
        (center_y or 0.0) / image_height if image_height else 0.0,
    )
