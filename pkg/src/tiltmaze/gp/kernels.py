"""Covariance functions over augmented inputs.

Kernels carry their hyperparameters as attributes and expose them jointly as
``theta``, a vector of natural logs, which is what the marginal-likelihood
optimizer works on.  ``__call__`` evaluates the Gram matrix; with
``eval_gradient=True`` (square, symmetric case only) it also returns the
stack of elementwise derivatives with respect to each entry of ``theta``.

``make_cache(X)`` precomputes per-fit quantities (squared distances, feature
matrices) so repeated evaluations during optimization stay cheap.
"""

import numpy as np
from scipy.linalg import cholesky
from scipy.linalg.lapack import dpotri

from ..core.errors import ValidationError
from ..physics import BasisConfig, features

# Relative jitter schedule: first try bare, then escalate six times.
_JITTER_LEVELS = (0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4)


class NumericalError(ValidationError):
    """A linear-algebra step failed even after jitter escalation."""


def cholesky_with_jitter(K):
    """Lower Cholesky factor of K, adding diagonal jitter if needed.

    Jitter escalates from 1e-10 to 1e-4 of the mean diagonal; failure after
    the last level raises ``NumericalError`` describing the conditioning.
    """
    scale = float(np.mean(np.diag(K)))
    if not np.isfinite(scale) or scale <= 0:
        raise NumericalError("kernel matrix has non-positive mean diagonal")
    for level in _JITTER_LEVELS:
        try:
            shifted = K if level == 0.0 else K + (level * scale) * np.eye(len(K))
            return cholesky(shifted, lower=True), level * scale
        except np.linalg.LinAlgError:
            continue
    raise NumericalError(
        f"Cholesky failed at jitter 1e-4 of mean diagonal ({scale:.3e}); "
        "the kernel matrix is numerically singular")


def inv_from_cholesky(L):
    """Dense inverse of the matrix whose lower Cholesky factor is L."""
    inv, info = dpotri(L, lower=1)
    if info != 0:
        raise NumericalError("dpotri failed on the Cholesky factor")
    return inv + np.tril(inv, -1).T


def _as_2d(x):
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[None, :]
    return x


class Kernel:
    """Base class; concrete kernels implement the hooks below."""

    @property
    def theta(self):
        raise NotImplementedError

    @theta.setter
    def theta(self, value):
        raise NotImplementedError

    @property
    def n_params(self):
        return len(self.theta)

    def bounds(self):
        """Log-space box constraints, one (low, high) pair per parameter."""
        return [(-30.0, 30.0)] * self.n_params

    def make_cache(self, X):
        return None

    def __call__(self, A, B=None, eval_gradient=False, cache=None):
        raise NotImplementedError

    def diag(self, A):
        return np.diag(self(A))

    def to_doc(self):
        raise NotImplementedError

    def __add__(self, other):
        return SumKernel(self, other)


class RBFKernel(Kernel):
    """Squared-exponential kernel with per-dimension lengthscales.

    k(a, b) = signal_var * exp(-0.5 * sum_d (a_d - b_d)^2 / lengthscale_d^2)

    With ``ard=False`` a single shared lengthscale is used.  With
    ``encode_angle=True`` the first input column (an angle) is replaced by
    its cosine and sine before distances are computed, making the kernel
    periodic in that column.
    """

    def __init__(self, signal_var=1.0, lengthscales=1.0, n_dims=None,
                 ard=True, encode_angle=False):
        self.ard = bool(ard)
        self.encode_angle = bool(encode_angle)
        lengthscales = np.atleast_1d(np.asarray(lengthscales, dtype=float))
        if self.ard:
            if lengthscales.size == 1 and n_dims is not None:
                lengthscales = np.full(self._encoded_dims(n_dims),
                                       lengthscales[0])
        else:
            if lengthscales.size != 1:
                raise ValidationError("shared-lengthscale kernel takes one scale")
        if np.any(lengthscales <= 0) or signal_var <= 0:
            raise ValidationError("kernel scales must be positive")
        self.signal_var = float(signal_var)
        self.lengthscales = lengthscales

    def _encoded_dims(self, n_dims):
        return n_dims + 1 if self.encode_angle else n_dims

    def encode(self, X):
        X = _as_2d(X)
        if not self.encode_angle:
            return X
        return np.column_stack([np.cos(X[:, 0]), np.sin(X[:, 0]), X[:, 1:]])

    @property
    def theta(self):
        return np.log(np.concatenate([[self.signal_var], self.lengthscales]))

    @theta.setter
    def theta(self, value):
        value = np.asarray(value, dtype=float)
        self.signal_var = float(np.exp(value[0]))
        self.lengthscales = np.exp(value[1:])

    def make_cache(self, X):
        E = self.encode(X)
        # Per-dimension squared differences, shape (n, n, d).
        return (E[:, None, :] - E[None, :, :]) ** 2

    def _check_dims(self, E):
        if self.ard and E.shape[1] != self.lengthscales.size:
            raise ValidationError(
                f"kernel expects {self.lengthscales.size} input dims, "
                f"got {E.shape[1]}")

    def __call__(self, A, B=None, eval_gradient=False, cache=None):
        EA = self.encode(A)
        self._check_dims(EA)
        if B is None:
            sq = cache if cache is not None else self.make_cache(A)
        else:
            if eval_gradient:
                raise ValidationError("gradients only for the symmetric case")
            EB = self.encode(B)
            sq = (EA[:, None, :] - EB[None, :, :]) ** 2
        ell2 = self.lengthscales ** 2 if self.ard \
            else np.full(sq.shape[-1], self.lengthscales[0] ** 2)
        z = sq / ell2
        K = self.signal_var * np.exp(-0.5 * z.sum(axis=-1))
        if not eval_gradient:
            return K
        grads = np.empty(K.shape + (self.n_params,))
        grads[..., 0] = K  # d/d log signal_var
        if self.ard:
            for d in range(ell2.size):
                grads[..., 1 + d] = K * z[..., d]
        else:
            grads[..., 1] = K * z.sum(axis=-1)
        return K, grads

    def diag(self, A):
        return np.full(_as_2d(A).shape[0], self.signal_var)

    def to_doc(self):
        return {"type": "rbf", "signal_var": self.signal_var,
                "lengthscales": self.lengthscales.tolist(), "ard": self.ard,
                "encode_angle": self.encode_angle}

    @classmethod
    def from_doc(cls, doc):
        return cls(signal_var=doc["signal_var"],
                   lengthscales=np.asarray(doc["lengthscales"]),
                   ard=doc["ard"], encode_angle=doc["encode_angle"])


class PhysicsKernel(Kernel):
    """Bayesian-linear-layer kernel over the physical feature basis.

    k(a, b) = phi(a)^T diag(weight_vars) phi(b)

    The diagonal prior covariance over feature weights is optimized jointly
    with everything else through ``theta``.
    """

    def __init__(self, basis, weight_vars=None):
        if not isinstance(basis, BasisConfig):
            raise ValidationError("PhysicsKernel needs a BasisConfig")
        self.basis = basis
        if weight_vars is None:
            weight_vars = np.ones(basis.n_features)
        self.weight_vars = np.atleast_1d(np.asarray(weight_vars, dtype=float))
        if self.weight_vars.size != basis.n_features:
            raise ValidationError("one weight variance per feature required")
        if np.any(self.weight_vars <= 0):
            raise ValidationError("weight variances must be positive")

    @property
    def theta(self):
        return np.log(self.weight_vars)

    @theta.setter
    def theta(self, value):
        self.weight_vars = np.exp(np.asarray(value, dtype=float))

    def make_cache(self, X):
        return features(X, self.basis)

    def __call__(self, A, B=None, eval_gradient=False, cache=None):
        phi_a = cache if (cache is not None and B is None) \
            else features(A, self.basis)
        phi_a = _as_2d(phi_a)
        if B is None:
            phi_b = phi_a
        else:
            if eval_gradient:
                raise ValidationError("gradients only for the symmetric case")
            phi_b = _as_2d(features(B, self.basis))
        K = (phi_a * self.weight_vars) @ phi_b.T
        if not eval_gradient:
            return K
        grads = np.empty(K.shape + (self.n_params,))
        for j in range(self.n_params):
            grads[..., j] = self.weight_vars[j] * np.outer(phi_a[:, j],
                                                           phi_b[:, j])
        return K, grads

    def diag(self, A):
        phi = _as_2d(features(A, self.basis))
        return np.einsum("nj,j,nj->n", phi, self.weight_vars, phi)

    def to_doc(self):
        return {"type": "physics", "weight_vars": self.weight_vars.tolist(),
                "basis": {"ring_radius": self.basis.ring_radius,
                          "variant": self.basis.variant,
                          "gravity": self.basis.gravity}}

    @classmethod
    def from_doc(cls, doc):
        b = doc["basis"]
        return cls(BasisConfig(ring_radius=b["ring_radius"],
                               variant=b["variant"], gravity=b["gravity"]),
                   weight_vars=np.asarray(doc["weight_vars"]))


class SumKernel(Kernel):
    """Sum of two kernels; parameters are concatenated."""

    def __init__(self, k1, k2):
        self.k1 = k1
        self.k2 = k2

    @property
    def parts(self):
        return (self.k1, self.k2)

    @property
    def theta(self):
        return np.concatenate([self.k1.theta, self.k2.theta])

    @theta.setter
    def theta(self, value):
        value = np.asarray(value, dtype=float)
        n1 = self.k1.n_params
        self.k1.theta = value[:n1]
        self.k2.theta = value[n1:]

    def bounds(self):
        return self.k1.bounds() + self.k2.bounds()

    def make_cache(self, X):
        return (self.k1.make_cache(X), self.k2.make_cache(X))

    def __call__(self, A, B=None, eval_gradient=False, cache=None):
        c1, c2 = cache if cache is not None else (None, None)
        if not eval_gradient:
            return self.k1(A, B, cache=c1) + self.k2(A, B, cache=c2)
        K1, g1 = self.k1(A, B, eval_gradient=True, cache=c1)
        K2, g2 = self.k2(A, B, eval_gradient=True, cache=c2)
        return K1 + K2, np.concatenate([g1, g2], axis=-1)

    def diag(self, A):
        return self.k1.diag(A) + self.k2.diag(A)

    def to_doc(self):
        return {"type": "sum", "parts": [self.k1.to_doc(), self.k2.to_doc()]}

    @classmethod
    def from_doc(cls, doc):
        return cls(kernel_from_doc(doc["parts"][0]),
                   kernel_from_doc(doc["parts"][1]))


_KERNEL_TYPES = {"rbf": RBFKernel, "physics": PhysicsKernel, "sum": SumKernel}


def kernel_from_doc(doc):
    try:
        klass = _KERNEL_TYPES[doc["type"]]
    except KeyError:
        raise ValidationError(f"unknown kernel type {doc.get('type')!r}") from None
    return klass.from_doc(doc)
