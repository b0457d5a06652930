import numpy as np
from scipy.special import expit

from .base import BaseEstimator, ClassifierMixin, as_proba, check_array, check_is_fitted, check_X_y, clone
from .tree import MAX_SEED, _seed, grow


class AdaBoostClassifier(ClassifierMixin, BaseEstimator):
    """Discrete AdaBoost (SAMME) over depth-1 Gini stumps.

    The binary decision is ``(sum of weights voting 1 - sum voting 0) /
    total weight`` and the positive-class probability is its logistic
    sigmoid.
    """

    def __init__(self, n_estimators=50, learning_rate=1.0, random_state=0):
        self.n_estimators = n_estimators
        self.learning_rate = learning_rate
        self.random_state = random_state

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        n = len(y)
        w = np.full(n, 1.0 / n)
        rs = np.random.RandomState(_seed(self.random_state))
        self.estimators_, self.estimator_weights_, self.estimator_errors_ = [], [], []
        for m in range(self.n_estimators):
            stump = grow(X, y, w, max_depth=1, seed=int(rs.randint(MAX_SEED)))
            pred = (stump.predict(X) >= 0.5).astype(int)
            incorrect = pred != y
            err = float(np.sum(w[incorrect]) / np.sum(w))
            if err <= 0.0:
                self.estimators_.append(stump)
                self.estimator_weights_.append(1.0)
                self.estimator_errors_.append(0.0)
                break
            if err >= 0.5:
                if not self.estimators_:
                    raise ValueError("the first stump is no better than chance")
                break
            alpha = self.learning_rate * np.log((1.0 - err) / err)
            self.estimators_.append(stump)
            self.estimator_weights_.append(alpha)
            self.estimator_errors_.append(err)
            if m < self.n_estimators - 1:
                w = w * np.exp(alpha * incorrect)
                w /= w.sum()
        self.estimator_weights_ = np.array(self.estimator_weights_)
        self.estimator_errors_ = np.array(self.estimator_errors_)
        self.n_features_in_ = X.shape[1]
        return self

    def _votes(self, X):
        return np.array([np.where(t.predict(X) >= 0.5, 1.0, -1.0) for t in self.estimators_])

    def decision_function(self, X):
        check_is_fitted(self, "estimators_")
        X = check_array(X, self.n_features_in_)
        a = self.estimator_weights_
        return a @ self._votes(X) / a.sum()

    def predict_proba(self, X):
        return as_proba(expit(self.decision_function(X)))

    def staged_decision_function(self, X):
        check_is_fitted(self, "estimators_")
        X = check_array(X, self.n_features_in_)
        a = self.estimator_weights_
        cum = np.cumsum(a[:, None] * self._votes(X), axis=0)
        for m in range(len(a)):
            yield cum[m] / a[: m + 1].sum()

    def staged_score(self, X, y):
        y = np.asarray(y)
        for d in self.staged_decision_function(X):
            yield float(np.mean((d >= 0).astype(int) == y))


class SoftVotingClassifier(ClassifierMixin, BaseEstimator):
    """Mean of member positive-class probabilities."""

    def __init__(self, estimators):
        self.estimators = estimators

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        self.estimators_ = [(name, clone(est).fit(X, y)) for name, est in self.estimators]
        self.n_features_in_ = X.shape[1]
        return self

    @classmethod
    def from_fitted(cls, estimators):
        vote = cls(estimators)
        vote.estimators_ = list(estimators)
        vote.n_features_in_ = estimators[0][1].n_features_in_
        return vote

    def predict_proba(self, X):
        check_is_fitted(self, "estimators_")
        X = check_array(X, self.n_features_in_)
        return as_proba(np.mean([est.predict_proba(X)[:, 1] for _, est in self.estimators_], axis=0))
