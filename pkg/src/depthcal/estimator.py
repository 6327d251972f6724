"""scikit-learn compatible estimator over the polynomial fitting core."""

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .polyfit import fit_polynomial, sweep_degrees


def _single_column(X: np.ndarray) -> np.ndarray:
    if X.ndim == 2:
        if X.shape[1] != 1:
            raise ValueError(
                f"expected a single pixel-depth feature, got {X.shape[1]} columns"
            )
        return X[:, 0]
    return X


class DepthPolynomialRegressor(RegressorMixin, BaseEstimator):
    """Map pixel depths to real distances with a least-squares polynomial.

    Fits y = sum a_n x^n on an internally scaled abscissa; composes with
    sklearn pipelines and model selection via the standard fit/predict and
    get_params/set_params surface.

    Parameters
    ----------
    degree : int or "auto", default=8
        Polynomial degree, or "auto" to sweep ``degree_range`` and keep the
        degree with the smallest dof-adjusted RMSE.
    degree_range : tuple of (int, int), default=(6, 9)
        Inclusive degree bounds used when ``degree="auto"``.

    Attributes
    ----------
    model_ : PolynomialModel
        Fitted polynomial (raw and scaled coefficients).
    stats_ : FitStats
        Goodness of fit on the training data.
    degree_ : int
        Degree actually fitted.
    sweep_ : DegreeSweep or None
        Full sweep report when ``degree="auto"``, else None.
    """

    def __init__(self, degree=8, degree_range=(6, 9)):
        self.degree = degree
        self.degree_range = degree_range

    def fit(self, X, y):
        X, y = check_X_y(X, y, ensure_2d=False, y_numeric=True)
        xs = _single_column(X)
        if self.degree == "auto":
            d_min, d_max = self.degree_range
            self.sweep_ = sweep_degrees(xs, y, d_min, d_max)
            self.model_ = self.sweep_.best.model
            self.stats_ = self.sweep_.best.stats
        else:
            result = fit_polynomial(xs, y, int(self.degree))
            self.sweep_ = None
            self.model_ = result.model
            self.stats_ = result.stats
        self.degree_ = self.model_.degree
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "model_")
        X = check_array(X, ensure_2d=False)
        return np.asarray(self.model_.evaluate(_single_column(X)), dtype=float)
