"""Numerical laboratory for Wasserstein contraction under convolution."""

from ._otlab import (
    ContractionReport,
    CostConvention,
    DiscreteMeasure,
    GaussianDeficit,
    GridMeasure,
    GridSpec,
    Kernel,
    PlanArc,
    StabGaussReport,
    TransportSolution,
    convolve,
    delta_eps,
    delta_eps_gaussian_closed_form,
    lower_to_discrete,
    plot_csv,
    recover_translation,
    run_experiment,
    selftest,
    solve,
    stabgauss_experiment,
    wp_1d,
)

__all__ = [
    "ContractionReport",
    "CostConvention",
    "DiscreteMeasure",
    "GaussianDeficit",
    "GridMeasure",
    "GridSpec",
    "Kernel",
    "PlanArc",
    "StabGaussReport",
    "TransportSolution",
    "convolve",
    "delta_eps",
    "delta_eps_gaussian_closed_form",
    "lower_to_discrete",
    "plot_csv",
    "recover_translation",
    "run_experiment",
    "selftest",
    "solve",
    "stabgauss_experiment",
    "wp_1d",
]
