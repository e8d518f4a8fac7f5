"""Exact Gaussian-process regression with marginal-likelihood fitting.

The estimator follows the usual fit/predict surface: hyperparameters passed
at construction, fitted state stored with trailing underscores.  Targets are
standardized internally (optional) and de-standardized at prediction.

The negative log marginal likelihood and its gradient in the log
hyperparameters (kernel parameters plus noise variance) are computed from a
single Cholesky factorization per evaluation:

    log p(y | X, theta) = -0.5 y^T alpha - sum(log diag L) - 0.5 n log(2 pi)
    d log p / d theta_j = 0.5 tr((alpha alpha^T - K_y^{-1}) dK_y/d theta_j)

Optimization is L-BFGS-B over log parameters with multi-start: the data-
driven initialization plus ``n_restarts`` log-normal perturbations of it.
"""

import copy
import warnings

import numpy as np
from scipy.linalg import cho_solve, solve_triangular
from scipy.optimize import minimize
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.exceptions import NotFittedError

from ..core.errors import ValidationError
from .kernels import (PhysicsKernel, SumKernel, cholesky_with_jitter,
                      inv_from_cholesky)

_LOG_2PI = np.log(2.0 * np.pi)
_NOISE_BOUNDS = (-30.0, 10.0)


class GPRegressor(BaseEstimator, RegressorMixin):
    """Exact GP regressor with a pluggable kernel.

    Parameters
    ----------
    kernel : Kernel
        Prior covariance; fitted copy stored as ``kernel_``.
    noise_var : float
        Initial observation-noise variance (standardized target units when
        ``normalize_y``).
    optimize : bool
        Maximize the log marginal likelihood over kernel plus noise
        parameters.  With False the given values are used as-is.
    n_restarts : int
        Extra optimizer starts drawn as log-normal perturbations around the
        initialization (total starts = n_restarts + 1).
    restart_scale : float
        Standard deviation of the log-space perturbations.
    normalize_y : bool
        Standardize targets to zero mean, unit variance during fitting.
    include_noise_in_std : bool
        Return the standard deviation of a new noisy observation rather than
        of the latent function.
    max_iter : int
        L-BFGS-B iteration cap per start.
    random_state : int or None
        Seed for the restart draws.
    """

    def __init__(self, kernel=None, noise_var=0.1, optimize=True, n_restarts=4,
                 restart_scale=1.0, normalize_y=True,
                 include_noise_in_std=True, max_iter=100, random_state=None):
        self.kernel = kernel
        self.noise_var = noise_var
        self.optimize = optimize
        self.n_restarts = n_restarts
        self.restart_scale = restart_scale
        self.normalize_y = normalize_y
        self.include_noise_in_std = include_noise_in_std
        self.max_iter = max_iter
        self.random_state = random_state

    # -- validation helpers --------------------------------------------------

    def _validate_xy(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        if X.ndim != 2:
            raise ValidationError("X must be a 2-d array (n_samples, n_dims)")
        if y.shape != (X.shape[0],):
            raise ValidationError("y must be 1-d and aligned with X")
        if X.shape[0] == 0:
            raise ValidationError("empty training set")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise ValidationError("training data must be finite")
        return X, y

    def _check_fitted(self):
        if not hasattr(self, "alpha_"):
            raise NotFittedError("this GPRegressor is not fitted yet")

    # -- marginal likelihood --------------------------------------------------

    def _nlml(self, theta, eval_gradient=False):
        """Negative log marginal likelihood at log-parameters `theta`.

        `theta` stacks the kernel parameters and log noise variance last.
        Uses the standardized training targets bound by ``fit``.
        """
        kernel = self.kernel_
        kernel.theta = theta[:-1]
        noise = float(np.exp(theta[-1]))
        y = self._y_std_space_
        n = y.shape[0]
        if eval_gradient:
            K, K_grad = kernel(self.X_train_, eval_gradient=True,
                               cache=self._cache_)
        else:
            K = kernel(self.X_train_, cache=self._cache_)
        Ky = K + noise * np.eye(n)
        L, _ = cholesky_with_jitter(Ky)
        alpha = cho_solve((L, True), y)
        nlml = 0.5 * float(y @ alpha) + np.log(np.diag(L)).sum() \
            + 0.5 * n * _LOG_2PI
        if not eval_gradient:
            return nlml
        M = np.outer(alpha, alpha) - inv_from_cholesky(L)
        grad = np.empty(theta.shape)
        grad[:-1] = -0.5 * np.einsum("ij,ijk->k", M, K_grad)
        grad[-1] = -0.5 * noise * np.trace(M)
        return nlml, grad

    def log_marginal_likelihood(self, theta=None, eval_gradient=False):
        """Log marginal likelihood of the bound training data.

        `theta` stacks kernel log-parameters with log noise variance last;
        None evaluates at the fitted values.
        """
        self._check_fitted()
        if theta is None:
            theta = np.concatenate([self.kernel_.theta,
                                    [np.log(self.noise_var_)]])
        theta = np.asarray(theta, dtype=float)
        saved = self.kernel_.theta
        try:
            if eval_gradient:
                nlml, grad = self._nlml(theta, eval_gradient=True)
                return -nlml, -grad
            return -self._nlml(theta)
        finally:
            self.kernel_.theta = saved

    # -- fitting ---------------------------------------------------------------

    def _objective(self, theta):
        try:
            value, grad = self._nlml(np.asarray(theta), eval_gradient=True)
        except (ValidationError, FloatingPointError):
            return 1e25, np.zeros_like(theta)
        if not np.isfinite(value):
            return 1e25, np.zeros_like(theta)
        return value, grad

    def fit(self, X, y):
        if self.kernel is None:
            raise ValidationError("a kernel must be provided")
        X, y = self._validate_xy(X, y)
        self.X_train_ = X
        self.kernel_ = copy.deepcopy(self.kernel)
        if self.normalize_y:
            self.y_train_mean_ = float(np.mean(y))
            std = float(np.std(y))
            self.y_train_std_ = std if std > 0 else 1.0
        else:
            self.y_train_mean_ = 0.0
            self.y_train_std_ = 1.0
        self._y_std_space_ = (y - self.y_train_mean_) / self.y_train_std_
        self._cache_ = self.kernel_.make_cache(X)
        self.noise_var_ = float(self.noise_var)
        self.converged_ = True

        if self.optimize:
            rng = np.random.default_rng(self.random_state)
            theta0 = np.concatenate([self.kernel_.theta,
                                     [np.log(self.noise_var_)]])
            bounds = self.kernel_.bounds() + [_NOISE_BOUNDS]
            starts = [theta0]
            for _ in range(int(self.n_restarts)):
                starts.append(theta0 + self.restart_scale
                              * rng.standard_normal(theta0.shape))
            best = None
            any_converged = False
            for start in starts:
                res = minimize(self._objective, start, jac=True,
                               method="L-BFGS-B", bounds=bounds,
                               options={"maxiter": int(self.max_iter)})
                any_converged = any_converged or bool(res.success)
                if best is None or res.fun < best.fun:
                    best = res
            if not any_converged:
                warnings.warn("marginal-likelihood optimization did not "
                              "converge; keeping the best iterate",
                              RuntimeWarning)
            self.converged_ = any_converged
            self.kernel_.theta = best.x[:-1]
            self.noise_var_ = float(np.exp(best.x[-1]))

        K = self.kernel_(X, cache=self._cache_)
        Ky = K + self.noise_var_ * np.eye(len(X))
        self.L_, self.jitter_ = cholesky_with_jitter(Ky)
        self.alpha_ = cho_solve((self.L_, True), self._y_std_space_)
        self.log_marginal_likelihood_ = -self._nlml(
            np.concatenate([self.kernel_.theta, [np.log(self.noise_var_)]]))
        return self

    # -- prediction --------------------------------------------------------------

    def predict(self, X, return_std=False):
        self._check_fitted()
        X = np.asarray(X, dtype=float)
        squeeze = X.ndim == 1
        if squeeze:
            X = X[None, :]
        k_star = self.kernel_(X, self.X_train_)
        mean = self.y_train_mean_ + self.y_train_std_ * (k_star @ self.alpha_)
        if squeeze:
            mean = float(mean[0])
        if not return_std:
            return mean
        v = solve_triangular(self.L_, k_star.T, lower=True)
        var = self.kernel_.diag(X) - np.einsum("ij,ij->j", v, v)
        if self.include_noise_in_std:
            var = var + self.noise_var_
        var = np.maximum(var, 0.0) * self.y_train_std_ ** 2
        std = np.sqrt(var)
        if squeeze:
            std = float(std[0])
        return mean, std

    # -- physics-layer introspection ----------------------------------------------

    def posterior_weights(self):
        """Posterior mean of the feature weights of the physics layer.

        Valid when the kernel is a PhysicsKernel or a sum containing one.
        Weights are returned in raw target units; note that with
        ``normalize_y`` the subtracted target mean is not attributed to any
        feature.
        """
        self._check_fitted()
        part = self.kernel_
        if isinstance(part, SumKernel):
            parts = [p for p in part.parts if isinstance(p, PhysicsKernel)]
            if not parts:
                raise ValidationError("kernel has no physics layer")
            part = parts[0]
        if not isinstance(part, PhysicsKernel):
            raise ValidationError("kernel has no physics layer")
        from ..physics import features
        phi = features(self.X_train_, part.basis)
        return self.y_train_std_ * part.weight_vars * (phi.T @ self.alpha_)
