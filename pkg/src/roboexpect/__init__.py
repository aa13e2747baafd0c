"""Regression toolkit for predicting social and functional expectations of robots."""

__version__ = "0.1.0"

from .dataset import Construct, Dataset, DatasetError, Modality, RobotRecord, load_dataset, validate, write_dataset
from .features import ModalityCombo, FeatureMatrix, all_combos, fuse, label_vector
from .svr import HyperParams, MeanBaseline, SvrModel, SCALE_DEFAULT, fit_baseline, fit_svr, predict, rbf_kernel, resolve_gamma
from .evaluation import CellResult, FoldPlan, GridSpec, cross_validate, grid_search, make_folds, mse, paired_t_test, run_experiment, stars

__all__ = [
    "Construct", "Dataset", "DatasetError", "Modality", "RobotRecord",
    "load_dataset", "validate", "write_dataset",
    "ModalityCombo", "FeatureMatrix", "all_combos", "fuse", "label_vector",
    "HyperParams", "MeanBaseline", "SvrModel", "SCALE_DEFAULT",
    "fit_baseline", "fit_svr", "predict", "rbf_kernel", "resolve_gamma",
    "CellResult", "FoldPlan", "GridSpec", "cross_validate", "grid_search",
    "make_folds", "mse", "paired_t_test", "run_experiment", "stars",
]
