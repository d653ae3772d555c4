"""CSV/SVG export of oracle quantities, credit heatmaps and curves."""
from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .. import oracle
from ..envs import make_env
from .svg import heatmap_svg, learning_curves_svg

ORACLE_WHAT = ("value", "sr-inclusive", "sr-strict", "ztrace", "visits")


def _num(x: float) -> str:
    return repr(float(x))


def vector_csv(vec, column: str) -> str:
    lines = [f"state,{column}"]
    lines += [f"{s},{_num(x)}" for s, x in enumerate(vec)]
    return "\n".join(lines) + "\n"


def matrix_csv(mat) -> str:
    n = mat.shape[1]
    lines = ["state," + ",".join(str(j) for j in range(n))]
    lines += [f"{i}," + ",".join(_num(x) for x in row) for i, row in enumerate(mat)]
    return "\n".join(lines) + "\n"


def _horizon(mdp) -> int:
    return 100 * mdp.n_states


def oracle_quantity(env: str, what: str, kappa: float) -> np.ndarray:
    mdp = make_env(env)
    if what == "value":
        return oracle.true_values(mdp, kappa)
    if what == "sr-inclusive":
        return oracle.successor_matrix(mdp, kappa, oracle.Convention.INCLUSIVE).m
    if what == "sr-strict":
        return oracle.successor_matrix(mdp, kappa, oracle.Convention.STRICT).m
    if what == "ztrace":
        return oracle.expected_trace(mdp, kappa, _horizon(mdp)).z
    if what == "visits":
        return oracle.visit_probabilities(mdp, _horizon(mdp))
    raise ValueError(f"unknown oracle quantity {what!r}; choose from {', '.join(ORACLE_WHAT)}")


def export_oracle(env: str, what: str, kappa: float, path=None) -> str:
    """Render an oracle quantity as CSV; written to ``path`` when given.

    Vectors get a ``state,<what>`` header, matrices a ``state,0,1,…`` header
    with one labelled row per state.
    """
    q = oracle_quantity(env, what, kappa)
    text = vector_csv(q, what) if q.ndim == 1 else matrix_csv(q)
    if path is not None:
        Path(path).write_text(text, encoding="utf-8", newline="\n")
    return text


def grid_of(vector) -> np.ndarray:
    vec = np.asarray(vector, dtype=np.float64).ravel()
    side = math.isqrt(len(vec))
    if side * side != len(vec) or side == 0:
        raise ValueError(f"length {len(vec)} is not a perfect square")
    return vec.reshape(side, side)


def export_heatmap(vector, path) -> tuple[Path, Path]:
    """Write ``<stem>.svg`` and ``<stem>.csv`` with the row-major square grid."""
    grid = grid_of(vector)
    base = Path(path)
    if base.suffix in (".svg", ".csv"):
        base = base.with_suffix("")
    svg_path, csv_path = base.with_suffix(".svg"), base.with_suffix(".csv")
    svg_path.write_text(heatmap_svg(grid), encoding="utf-8", newline="\n")
    csv_path.write_text(
        "\n".join(",".join(_num(x) for x in row) for row in grid) + "\n",
        encoding="utf-8", newline="\n")
    return svg_path, csv_path


def emit_learning_curves(results, path, metric: str = "rmse", title: str = "") -> str:
    """Mean curve with per-seed min/max band for each algorithm label."""
    rows = [r for res in results for r in res]
    if not rows:
        raise ValueError("no results to plot")
    text = learning_curves_svg(rows, metric, title)
    if path is not None:
        Path(path).write_text(text, encoding="utf-8", newline="\n")
    return text
