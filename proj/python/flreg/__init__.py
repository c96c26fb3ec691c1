"""Functional kernel regression: FLC/FLL estimators with PCA semimetrics.

Thin Python surface over the C++ core. The heavy lifting (PCA bases,
leave-one-out CV, Monte Carlo replication) happens in `flreg._core`.
"""

from ._core import (
    Curve,
    FunctionalSample,
    Grid,
    PcaBasis,
    Prediction,
    csfe,
    fit_pca_basis,
    flc_estimate,
    fll_estimate,
    gen_dgp,
    gw_test,
    kernel,
    l2_distance,
    loo_cv_select,
    monte_carlo,
    pca_distance,
    sample_wiener,
    uniform_grid,
)

__all__ = [
    "Curve",
    "FunctionalSample",
    "Grid",
    "PcaBasis",
    "Prediction",
    "csfe",
    "fit_pca_basis",
    "flc_estimate",
    "fll_estimate",
    "gen_dgp",
    "gw_test",
    "kernel",
    "l2_distance",
    "loo_cv_select",
    "monte_carlo",
    "pca_distance",
    "sample_wiener",
    "uniform_grid",
]
