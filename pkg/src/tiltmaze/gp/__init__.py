from .kernels import (Kernel, NumericalError, PhysicsKernel, RBFKernel,
                      SumKernel, cholesky_with_jitter, kernel_from_doc)
from .models import (CONTINUOUS_KINDS, MODEL_KINDS, DiscreteStepModel,
                     PhysicsOnlyModel, fit_model, initialize_hyperparameters,
                     make_model, model_from_doc, model_to_doc)
from .regression import GPRegressor

__all__ = [
    "CONTINUOUS_KINDS", "DiscreteStepModel", "GPRegressor", "Kernel",
    "MODEL_KINDS", "NumericalError", "PhysicsKernel", "PhysicsOnlyModel",
    "RBFKernel", "SumKernel", "cholesky_with_jitter", "fit_model",
    "initialize_hyperparameters", "kernel_from_doc", "make_model",
    "model_from_doc", "model_to_doc",
]
