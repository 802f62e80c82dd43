"""1-NN time-series classification with learned Mahalanobis distances,
benchmarked against Euclidean and DTW distances."""

from .classifier import DistanceModel, DistanceSpec, EvaluationReport, classify, evaluate, fit, learning_curve, predict
from .core import LabeledDataset, TsMetricError, class_partition, validate_dataset
from .covariance import (
    CovarianceEstimate,
    diagonal_covariance,
    estimate_shrink_intensity,
    log_determinant,
    pseudo_inverse,
    sample_covariance,
    shrinkage_covariance,
)
from .dtw import DtwConfig, dtw_distance, dtw_distance_early_abandon
from .io import export_matrix, load_ucr_pair, read_ucr, write_ucr, z_normalize, z_normalize_dataset
from .metric import EllipsoidMetric, distance, euclidean_sq, metric_from_covariance
from .synth import GeneratorSpec, generate

__version__ = "0.1.0"
