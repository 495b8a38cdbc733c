"""Probabilistic semi-linear auto-associative models (semi-linear PCA)."""
from .axes import (CompletedBasis, ContiguityMatrix, ProjectionBasis, axis_correlations,
                   complete_basis, contiguity_axes, estimate_axes, knn_contiguity,
                   local_covariance, pca_axes, project)
from .data import CenteringInfo, DataMatrix, center_standardize, load_csv, total_covariance
from .errors import DegenerateModelError, InputError, NumericalError, SlpcaError
from .model import (ModelFamily, RegressionSpec, SelectionReport, SlpcaModel, bic, coordinates,
                    fit, log_likelihood, mle_gaussian, parameter_count, reconstruct,
                    residual_variance, sample, select)
from .modelfile import load_model, save_model
from .regress import (AdditiveRegression, LinearRegression, component_curve,
                      fit_additive_spline, fit_linear, predict)
from .spline import BSplineBasis, design_matrix, eval_basis, make_basis
from .synth import gen_hat, gen_helix

__all__ = [
    "CompletedBasis", "ContiguityMatrix", "ProjectionBasis", "axis_correlations",
    "complete_basis", "contiguity_axes", "estimate_axes", "knn_contiguity", "local_covariance",
    "pca_axes", "project", "CenteringInfo", "DataMatrix", "center_standardize", "load_csv",
    "total_covariance", "DegenerateModelError", "InputError", "NumericalError", "SlpcaError",
    "ModelFamily", "RegressionSpec", "SelectionReport", "SlpcaModel", "bic", "coordinates",
    "fit", "log_likelihood", "mle_gaussian", "parameter_count", "reconstruct",
    "residual_variance", "sample", "select", "load_model", "save_model", "AdditiveRegression",
    "LinearRegression", "component_curve", "fit_additive_spline", "fit_linear", "predict",
    "BSplineBasis", "design_matrix", "eval_basis", "make_basis", "gen_hat", "gen_helix",
]

__version__ = "0.1.0"
