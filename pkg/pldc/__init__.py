"""Piecewise-linear difference-of-convex (PLDC) regression and classification."""
from .models import Dataset, MaxAffine, PLDCModel, ReluNet, Standardizer
from .core import build_from_witness, evaluate, interpolate_quadratic_shift, seminorm_bound
from .admm import FitConfig, FitReport, fit, fit_absolute, fit_hinge_binary, fit_lp
from .discrepancy import discrepancy, lambda_grid
from .select import CvPlan, MulticlassModel, cross_validate, fit_multiclass, generate_synthetic
from .relu_bridge import pldc_to_relu, relu_to_pldc, seminorm_certificate

__version__ = "1.0.0"

# Export them for easy import
__all__ = [
    "Dataset", "MaxAffine", "PLDCModel", "ReluNet", "Standardizer",
    "build_from_witness", "evaluate", "interpolate_quadratic_shift", "seminorm_bound",
    "FitConfig", "FitReport", "fit", "fit_absolute", "fit_hinge_binary", "fit_lp",
    "discrepancy", "lambda_grid",
    "CvPlan", "MulticlassModel", "cross_validate", "fit_multiclass", "generate_synthetic",
    "pldc_to_relu", "relu_to_pldc", "seminorm_certificate",
]
