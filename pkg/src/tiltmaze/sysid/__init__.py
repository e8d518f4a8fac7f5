from .arx import ArxModel, arx_from_doc, fit_arx, simulation_fit_percent
from .datasets import (build_datasets, build_transition_data,
                       process_trajectory)
from .excitation import ExcitationConfig, generate_excitation, synthesize_waves
from .filtering import acausal_accel, kalman_velocity

__all__ = [
    "ArxModel",
    "ExcitationConfig",
    "acausal_accel",
    "arx_from_doc",
    "build_datasets",
    "build_transition_data",
    "fit_arx",
    "generate_excitation",
    "kalman_velocity",
    "process_trajectory",
    "simulation_fit_percent",
    "synthesize_waves",
]
