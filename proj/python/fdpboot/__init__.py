"""Post hoc bounds on false positives over hypothesis subsets in the linear
model, calibrated by residual bootstrap (single-step / step-down) or by the
parametric Simes / ARI baselines."""

from fdpboot._core import (
    BootstrapSample,
    BoundReport,
    CalibrationResult,
    Dataset,
    HypothesisSet,
    Method,
    ModelFit,
    Sidedness,
    StatField,
    StatKind,
    TemplateFamily,
    ari_lambda,
    bh_rejection_set,
    calibrate_single_step,
    calibrate_step_down,
    draw_bootstrap,
    f_statistic,
    f_statistics,
    fit,
    fwer_rejections,
    fwer_threshold,
    generate_grf,
    hommel_factor,
    p_values,
    run_simulation,
    simes_lambda,
    student_cdf,
    t_statistics,
    topk_curves,
    vbar,
)

__all__ = [
    "BootstrapSample",
    "BoundReport",
    "CalibrationResult",
    "Dataset",
    "HypothesisSet",
    "Method",
    "ModelFit",
    "Sidedness",
    "StatField",
    "StatKind",
    "TemplateFamily",
    "ari_lambda",
    "bh_rejection_set",
    "calibrate_single_step",
    "calibrate_step_down",
    "draw_bootstrap",
    "f_statistic",
    "f_statistics",
    "fit",
    "fwer_rejections",
    "fwer_threshold",
    "generate_grf",
    "hommel_factor",
    "p_values",
    "run_simulation",
    "simes_lambda",
    "student_cdf",
    "t_statistics",
    "topk_curves",
    "vbar",
]
