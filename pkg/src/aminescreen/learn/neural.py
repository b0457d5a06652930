import numpy as np

from ._mlp_core import forward, init_params, train
from .base import BaseEstimator, ClassifierMixin, as_proba, check_array, check_is_fitted, check_X_y
from .tree import _seed


def _layers(hidden_layer_sizes):
    if isinstance(hidden_layer_sizes, (int, np.integer)):
        return [int(hidden_layer_sizes)]
    return [int(h) for h in hidden_layer_sizes]


class MLPClassifier(ClassifierMixin, BaseEstimator):
    """Feed-forward ReLU network trained by mini-batch SGD.

    Nesterov momentum 0.9, L2 penalty ``alpha`` scaled by batch size,
    Glorot-uniform initialisation.  Training stops after ``max_iter`` epochs
    or once the training loss has not improved by ``tol`` over
    ``n_iter_no_change`` epochs (see ``learning_rate`` for the adaptive
    schedule).
    """

    def __init__(self, hidden_layer_sizes=(100,), alpha=1e-4, batch_size=10,
                 learning_rate="constant", learning_rate_init=1e-3, max_iter=200,
                 tol=1e-4, n_iter_no_change=10, momentum=0.9, random_state=0):
        self.hidden_layer_sizes = hidden_layer_sizes
        self.alpha = alpha
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.learning_rate_init = learning_rate_init
        self.max_iter = max_iter
        self.tol = tol
        self.n_iter_no_change = n_iter_no_change
        self.momentum = momentum
        self.random_state = random_state

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        if self.learning_rate not in ("constant", "adaptive"):
            raise ValueError(f"unknown learning_rate {self.learning_rate!r}")
        sizes = np.array([X.shape[1], *_layers(self.hidden_layer_sizes), 1], dtype=np.int64)
        seed = _seed(self.random_state)
        p = init_params(sizes, seed)
        p, losses, epochs = train(
            np.ascontiguousarray(X), y.astype(np.float64), sizes, p, int(self.batch_size),
            float(self.learning_rate_init), self.learning_rate == "adaptive", float(self.alpha),
            int(self.max_iter), float(self.tol), int(self.n_iter_no_change), float(self.momentum),
            seed + 1,
        )
        self.sizes_ = sizes
        self.params_ = p
        self.loss_curve_ = losses
        self.n_iter_ = epochs
        self.n_features_in_ = X.shape[1]
        return self

    def predict_proba(self, X):
        check_is_fitted(self, "params_")
        X = check_array(X, self.n_features_in_)
        return as_proba(forward(np.ascontiguousarray(X), self.sizes_, self.params_))
