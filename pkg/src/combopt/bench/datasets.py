"""Dataset ingestion for the k-medoids pack, plus a synthetic generator."""

import csv

import numpy as np

from ..kmedoids import validate_distance_matrix


def load_numeric_csv(path):
    """Read the numeric columns of a header-ed CSV.

    A column is kept only when every cell parses as a finite float; other
    columns are skipped.  Returns ``(data, kept_names, skipped_names)``.
    """
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        rows = [row for row in reader if row]
    if not rows:
        raise ValueError(f"{path}: no data rows")
    width = len(header)
    if any(len(row) != width for row in rows):
        raise ValueError(f"{path}: ragged rows")

    kept, skipped, columns = [], [], []
    for index, name in enumerate(header):
        try:
            column = np.array([float(row[index]) for row in rows])
        except ValueError:
            skipped.append(name)
            continue
        if not np.all(np.isfinite(column)):
            skipped.append(name)
            continue
        kept.append(name)
        columns.append(column)
    if not kept:
        raise ValueError(f"{path}: no numeric columns")
    return np.column_stack(columns), kept, skipped


def load_distance_csv(path):
    """Read a precomputed square distance matrix (optional header row)."""
    with open(path, newline="") as handle:
        rows = [row for row in csv.reader(handle) if row]
    if not rows:
        raise ValueError(f"{path}: empty file")
    try:
        [float(cell) for cell in rows[0]]
    except ValueError:
        rows = rows[1:]  # header row
    try:
        matrix = np.array([[float(cell) for cell in row] for row in rows])
    except ValueError as exc:
        raise ValueError(f"{path}: non-numeric distance entry: {exc}") from None
    return validate_distance_matrix(matrix)


def gaussian_mixture(m, n_centers, dim, seed, center_spread=10.0, within_spread=1.0):
    """Sample m points from a mixture of ``n_centers`` spherical Gaussians."""
    rng = np.random.default_rng(seed)
    centers = rng.normal(0.0, center_spread, size=(n_centers, dim))
    assignment = rng.integers(n_centers, size=m)
    return centers[assignment] + rng.normal(0.0, within_spread, size=(m, dim))
