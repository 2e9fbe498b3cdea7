"""CSV ingestion and export of plot-ready tables and model summaries.

Function tables are comma-separated with a mandatory header: column 1
holds the grid points, the remaining columns hold one function each.
Numbers are written with 17 significant digits so that export followed
by re-ingestion is lossless for double precision values.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .grids import Grid
from .joint import JointAmplitudePhasePCA, compose, variance_decomposition
from .transforms import inverse_transform_warping
from .warping import check_warping

__all__ = [
    "read_function_table",
    "write_function_table",
    "read_metadata_table",
    "write_scores_table",
    "write_model_summary",
    "write_component_table",
]

_FMT = "%.17g"


def _fmt(x: float) -> str:
    return _FMT % float(x)


def read_function_table(path: str, *, warpings: bool = False):
    """Read a function table; returns ``(grid, matrix, names)``.

    ``matrix`` has one function per row. With ``warpings=True`` every
    column is validated as a warping function and failures name the
    offending column.

    Raises
    ------
    ValueError
        On missing header, ragged rows, or non-numeric fields, with row
        and column indices in the message.
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = [line.rstrip("\n") for line in fh if line.strip()]
    if not lines:
        raise ValueError(f"{path}: file is empty")
    header = [h.strip() for h in lines[0].split(",")]
    if len(header) < 2:
        raise ValueError(f"{path}: header must name a grid column and at least one function")
    ncols = len(header)
    rows = []
    for r, line in enumerate(lines[1:], start=2):
        fields = line.split(",")
        if len(fields) != ncols:
            raise ValueError(
                f"{path}: row {r} has {len(fields)} fields, expected {ncols}"
            )
        try:
            rows.append([float(x) for x in fields])
        except ValueError:
            bad = next(c for c, x in enumerate(fields) if not _is_float(x))
            raise ValueError(f"{path}: row {r}, column {bad + 1} is not numeric") from None
    data = np.asarray(rows, dtype=float)
    try:
        grid = Grid(data[:, 0])
    except ValueError as exc:
        raise ValueError(f"{path}: grid column invalid: {exc}") from None
    matrix = data[:, 1:].T
    if warpings:
        for j, g in enumerate(matrix):
            try:
                check_warping(grid, g)
            except ValueError as exc:
                raise type(exc)(f"{path}: column {header[j + 1]!r}: {exc}") from None
    return grid, matrix, header[1:]


def _is_float(x: str) -> bool:
    try:
        float(x)
        return True
    except ValueError:
        return False


def write_function_table(path: str, grid: Grid, matrix: np.ndarray, prefix: str = "f",
                         names: Optional[Sequence[str]] = None) -> None:
    """Write functions (rows of ``matrix``) as columns next to the grid."""
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    if names is None:
        names = [f"{prefix}_{i + 1}" for i in range(matrix.shape[0])]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(["t"] + list(names)) + "\n")
        for j, t in enumerate(grid.points):
            fh.write(",".join([_fmt(t)] + [_fmt(v) for v in matrix[:, j]]) + "\n")


def read_metadata_table(path: str):
    """Read a per-sample metadata table verbatim (strings, not parsed).

    Returns ``(names, rows)`` where each row is a list of raw fields.
    Metadata is passed through to the scores table untouched.
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = [line.rstrip("\n") for line in fh if line.strip()]
    if not lines:
        raise ValueError(f"{path}: file is empty")
    names = [h.strip() for h in lines[0].split(",")]
    rows = []
    for r, line in enumerate(lines[1:], start=2):
        fields = line.split(",")
        if len(fields) != len(names):
            raise ValueError(f"{path}: row {r} has {len(fields)} fields, expected {len(names)}")
        rows.append(fields)
    return names, rows


def write_scores_table(path: str, scores: np.ndarray, n_components: int,
                       meta: Optional[tuple] = None) -> None:
    """Write per-sample scores, optionally carrying metadata columns through."""
    scores = np.asarray(scores, dtype=float)
    m = int(n_components)
    header = ["id"] + [f"score_{k + 1}" for k in range(m)]
    meta_names: Sequence[str] = []
    meta_rows: Sequence[Sequence[str]] = []
    if meta is not None:
        meta_names, meta_rows = meta
        if len(meta_rows) != scores.shape[0]:
            raise ValueError(
                f"metadata has {len(meta_rows)} rows but there are {scores.shape[0]} samples"
            )
        header += list(meta_names)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for i, row in enumerate(scores):
            fields = [str(i + 1)] + [_fmt(v) for v in row[:m]]
            if meta is not None:
                fields += list(meta_rows[i])
            fh.write(",".join(fields) + "\n")


def write_model_summary(path: str, model: JointAmplitudePhasePCA, *,
                        max_components: int = 20) -> None:
    """Write the fitted model as a line-oriented ``key: value`` document."""
    nus = model.eigenvalues_
    total = float(nus.sum())
    m_sel = model.n_components_
    decomp = variance_decomposition(nus, m_sel)
    lines = [
        f"transform: {model.method}",
        f"n_samples: {model.W_.shape[0]}",
        f"grid_size: {len(model.grid_)}",
        f"interval_start: {_fmt(model.grid_.a)}",
        f"interval_end: {_fmt(model.grid_.b)}",
        f"phase_weight: {_fmt(model.phase_weight_)}",
        f"phase_weight_optimized: {str(bool(model.optimize_weight)).lower()}",
        f"variance_threshold: {_fmt(model.variance_threshold)}",
        f"n_components_selected: {m_sel}",
        f"total_variance: {_fmt(total)}",
        f"frechet_variance: {_fmt(model.frechet_variance())}",
        f"explained_variance_selected: {_fmt(decomp.explained)}",
        f"explained_ratio_selected: {_fmt(decomp.ratio)}",
    ]
    shown = min(max_components, int(np.count_nonzero(nus)), nus.size)
    cumulative = 0.0
    for k in range(shown):
        share = nus[k] / total if total > 0 else 0.0
        cumulative += share
        lines.append(f"component_{k + 1}_eigenvalue: {_fmt(nus[k])}")
        lines.append(f"component_{k + 1}_share_percent: {_fmt(100.0 * share)}")
        lines.append(f"component_{k + 1}_cumulative_percent: {_fmt(100.0 * cumulative)}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_component_table(path: str, model: JointAmplitudePhasePCA, index: int) -> None:
    """Write one component with its perturbation-of-the-mean curves.

    Columns: grid, the amplitude and phase parts of the component, the
    mean curve, and the composed curves obtained by shifting the mean by
    plus/minus one standard deviation of the score in the joint,
    phase-only, and amplitude-only directions.
    """
    m = int(index)
    if m < 0 or m >= model.components_w_.shape[0]:
        raise ValueError(f"component index {m} out of range")
    grid = model.grid_
    sd = float(np.sqrt(model.eigenvalues_[m]))
    phi_w = model.components_w_[m]
    phi_v = model.components_v_[m]

    def back(v):
        return inverse_transform_warping(
            grid, v, model.method,
            reference=getattr(model._transformer, "reference_", None),
            tail_fraction=model.tail_fraction,
        )

    def curve(alpha_w: float, alpha_v: float, sign: float) -> np.ndarray:
        w = model.mean_w_ + sign * alpha_w * sd * phi_w
        v = model.mean_v_ + sign * alpha_v * sd * phi_v
        return compose(grid, w, back(v))

    columns = {
        "phi_w": phi_w,
        "phi_v": phi_v,
        "mean": compose(grid, model.mean_w_, back(model.mean_v_)),
        "joint_plus": curve(1.0, 1.0, +1.0),
        "joint_minus": curve(1.0, 1.0, -1.0),
        "phase_plus": curve(0.0, 1.0, +1.0),
        "phase_minus": curve(0.0, 1.0, -1.0),
        "amplitude_plus": curve(1.0, 0.0, +1.0),
        "amplitude_minus": curve(1.0, 0.0, -1.0),
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(["t"] + list(columns)) + "\n")
        for j, t in enumerate(grid.points):
            fh.write(",".join([_fmt(t)] + [_fmt(col[j]) for col in columns.values()]) + "\n")
