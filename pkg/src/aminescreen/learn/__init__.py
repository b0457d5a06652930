"""Binary classifiers, metrics and model selection."""

from .base import BaseEstimator, ClassifierMixin, TransformerMixin, check_array, check_X_y, clone
from .discriminant import GaussianNB, QuadraticDiscriminantAnalysis
from .ensemble import AdaBoostClassifier, SoftVotingClassifier
from .gaussian_process import GaussianProcessClassifier
from .kernels import Matern, RBF, WhiteKernel, ConstantKernel, parse_kernel
from .linear import LogisticRegression
from .metrics import Confusion, MetricsReport, evaluate, matching_confusions, metrics_from_confusion
from .model_selection import FoldsExceedClassCount, StratifiedKFold, grid_search_cv
from .neighbors import KNeighborsClassifier
from .neural import MLPClassifier
from .registry import KINDS, ClassifierSpec, load_grids, tuned_specs
from .svm import SVC
from .tree import DecisionTreeClassifier, ExtraTreesClassifier


def fit(spec: ClassifierSpec, X, y, seed: int = 0):
    """Build the estimator described by ``spec`` and fit it."""
    return spec.build(seed).fit(X, y)


__all__ = [
    "AdaBoostClassifier", "BaseEstimator", "ClassifierMixin", "ClassifierSpec", "Confusion",
    "ConstantKernel", "DecisionTreeClassifier", "ExtraTreesClassifier", "FoldsExceedClassCount",
    "GaussianNB", "GaussianProcessClassifier", "KINDS", "KNeighborsClassifier", "LogisticRegression",
    "MLPClassifier", "Matern", "MetricsReport", "QuadraticDiscriminantAnalysis", "RBF", "SVC",
    "SoftVotingClassifier", "StratifiedKFold", "TransformerMixin", "WhiteKernel", "check_X_y",
    "check_array", "clone", "evaluate", "fit", "grid_search_cv", "load_grids", "matching_confusions",
    "metrics_from_confusion", "parse_kernel", "tuned_specs",
]
