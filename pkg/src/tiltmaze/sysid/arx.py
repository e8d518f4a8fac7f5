"""Least-squares ARX identification of the tilt platform response."""
from dataclasses import dataclass

import numpy as np

from ..core import ValidationError


@dataclass(frozen=True, eq=False)
class ArxModel:
    """One-step predictor y[k] = sum a_i y[k-i] + sum b_j u[k-d-j+1]."""
    n_a: int
    n_b: int
    delay: int
    a: np.ndarray
    b: np.ndarray
    residual_var: float

    def __post_init__(self):
        if not (np.all(np.isfinite(self.a)) and np.all(np.isfinite(self.b))):
            raise ValidationError("ARX coefficients must be finite")

    @property
    def horizon(self):
        """Oldest sample index the predictor reaches back to."""
        return max(self.n_a, self.delay + self.n_b - 1)

    def predict(self, inputs, outputs):
        """One-step-ahead predictions for k >= horizon."""
        u = np.asarray(inputs, dtype=float)
        y = np.asarray(outputs, dtype=float)
        Phi, _, k0 = _regressor(u, y, self.n_a, self.n_b, self.delay)
        return Phi @ np.r_[self.a, self.b], k0

    def simulate(self, inputs, y_init=None):
        """Free-run simulation driven only by inputs.

        y_init seeds the first horizon outputs (zeros when omitted).
        """
        u = np.asarray(inputs, dtype=float)
        n = len(u)
        y = np.zeros(n)
        k0 = self.horizon
        if y_init is not None:
            y_init = np.asarray(y_init, dtype=float)
            y[:min(len(y_init), n)] = y_init[:n]
        for k in range(k0, n):
            acc = 0.0
            for i in range(self.n_a):
                acc += self.a[i] * y[k - 1 - i]
            for j in range(self.n_b):
                acc += self.b[j] * u[k - self.delay - j]
            y[k] = acc
        return y

    def to_doc(self):
        return {"n_a": self.n_a, "n_b": self.n_b, "delay": self.delay,
                "a": self.a.tolist(), "b": self.b.tolist(),
                "residual_var": self.residual_var}


def arx_from_doc(doc):
    return ArxModel(n_a=int(doc["n_a"]), n_b=int(doc["n_b"]),
                    delay=int(doc["delay"]),
                    a=np.asarray(doc["a"], dtype=float),
                    b=np.asarray(doc["b"], dtype=float),
                    residual_var=float(doc["residual_var"]))


def _regressor(u, y, n_a, n_b, delay):
    k0 = max(n_a, delay + n_b - 1)
    rows = len(y) - k0
    if rows <= 0:
        raise ValidationError("sequences too short for the requested orders")
    Phi = np.empty((rows, n_a + n_b))
    ks = np.arange(k0, len(y))
    for i in range(n_a):
        Phi[:, i] = y[ks - 1 - i]
    for j in range(n_b):
        Phi[:, n_a + j] = u[ks - delay - j]
    return Phi, y[ks], k0


def fit_arx(inputs, outputs, orders=(2, 2, 6)):
    """Least-squares fit of the one-step ARX predictor.

    orders is (n_a, n_b, delay) in samples. Raises if the regressor is
    rank deficient, which indicates insufficiently rich excitation.
    """
    u = np.asarray(inputs, dtype=float)
    y = np.asarray(outputs, dtype=float)
    n_a, n_b, delay = (int(v) for v in orders)
    if n_a < 0 or n_b < 1 or delay < 0:
        raise ValidationError("orders must satisfy n_a >= 0, n_b >= 1, d >= 0")
    if u.shape != y.shape or u.ndim != 1:
        raise ValidationError("inputs and outputs must be aligned 1-d arrays")
    if len(y) <= 10 * (n_a + n_b):
        raise ValidationError("need more than 10 samples per coefficient")
    if not (np.all(np.isfinite(u)) and np.all(np.isfinite(y))):
        raise ValidationError("inputs and outputs must be finite")

    if np.max(np.abs(u)) == 0.0 and np.max(np.abs(y)) == 0.0:
        # all-quiet data is exactly explained by the zero predictor
        return ArxModel(n_a=n_a, n_b=n_b, delay=delay, a=np.zeros(n_a),
                        b=np.zeros(n_b), residual_var=0.0)
    Phi, target, _ = _regressor(u, y, n_a, n_b, delay)
    coef, _, rank, _ = np.linalg.lstsq(Phi, target, rcond=None)
    if rank < n_a + n_b:
        raise ValidationError(
            "rank-deficient ARX regressor; use richer excitation")
    residuals = target - Phi @ coef
    return ArxModel(n_a=n_a, n_b=n_b, delay=delay, a=coef[:n_a],
                    b=coef[n_a:], residual_var=float(np.mean(residuals ** 2)))


def simulation_fit_percent(model, inputs, outputs):
    """Normalized fit of the free-run simulation against measured outputs."""
    y = np.asarray(outputs, dtype=float)
    sim = model.simulate(inputs, y_init=y[:model.horizon])
    k0 = model.horizon
    denom = np.linalg.norm(y[k0:] - y[k0:].mean())
    if denom == 0:
        return 100.0 if np.allclose(sim[k0:], y[k0:]) else 0.0
    return 100.0 * (1.0 - np.linalg.norm(y[k0:] - sim[k0:]) / denom)
