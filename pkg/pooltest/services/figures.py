"""Data tables behind the four figures (g_m curves, g_0 near the origin, the Sterrett gap, the Dorfman region)."""
from typing import Dict

import numpy as np
import pandas as pd

from pooltest.errors import DomainError
from pooltest.models import SchemeId
from pooltest.services.optimizer import UNGAR_CUTOFF, continuous_minimizer
from pooltest.services.verifier import (
    STERRETT_BREAKPOINT,
    brace_point,
    g,
    get_p_star,
    in_region_A_D,
    sterrett_gap,
)
from pooltest.utils.numeric import interior_grid


FIGURES = (1, 2, 3, 4)
G_ORIGIN_RANGE = 0.25
REGION_N_VALUES = np.linspace(1.0, 12.0, 45)


def g_curves(p_values: np.ndarray) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "p": p_values,
            "g_minus1": [g(-1, p) for p in p_values],
            "g_0": [g(0, p) for p in p_values],
            "g_1": [g(1, p) for p in p_values],
        }
    )


def sterrett_gap_curve(grid_points: int) -> pd.DataFrame:
    p_star = get_p_star()
    p_values = np.union1d(interior_grid(p_star, UNGAR_CUTOFF, grid_points), [STERRETT_BREAKPOINT])
    return pd.DataFrame({"p": p_values, "f": [sterrett_gap(p, p_star=p_star) for p in p_values]})


def dorfman_region(grid_points: int) -> pd.DataFrame:
    p_values = interior_grid(0.0, UNGAR_CUTOFF, grid_points)
    rows = [
        {"p": p, "n": n, "in_A_D": int(in_region_A_D(n, p))}
        for p in p_values
        for n in REGION_N_VALUES
    ]
    return pd.DataFrame(rows, columns=["p", "n", "in_A_D"])


def dorfman_brace_curves(grid_points: int) -> pd.DataFrame:
    p_values = interior_grid(0.0, UNGAR_CUTOFF, grid_points)
    return pd.DataFrame(
        {
            "p": p_values,
            "sqrt_inv_p": np.sqrt(1.0 / p_values),
            "brace_lo": [brace_point(0.0, p) for p in p_values],
            "brace_hi": [brace_point(1.0, p) for p in p_values],
            "n_star": [continuous_minimizer(SchemeId.D, p).x for p in p_values],
        }
    )


def figure_tables(which: int, grid_points: int) -> Dict[str, pd.DataFrame]:
    """Tables for one figure keyed by file suffix ("" for the main table)."""
    if which not in FIGURES:
        raise DomainError(f"figure must be one of 1, 2, 3, 4, got {which!r}")
    if grid_points < 2:
        raise DomainError(f"grid_points must be >= 2, got {grid_points}")
    if which == 1:
        return {"": g_curves(interior_grid(0.0, UNGAR_CUTOFF, grid_points))}
    if which == 2:
        return {"": g_curves(interior_grid(0.0, G_ORIGIN_RANGE, grid_points))}
    if which == 3:
        return {"": sterrett_gap_curve(grid_points)}
    return {"": dorfman_region(grid_points), "_brace": dorfman_brace_curves(grid_points)}
