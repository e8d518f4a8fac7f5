from .config import ActuatorConfig, NoiseConfig, SimConfig
from .dynamics import (inplane_gravity, platform_accel, radial_gravity_drive,
                       true_ball_accel)
from .simulator import MazeSimulator

__all__ = [
    "ActuatorConfig", "MazeSimulator", "NoiseConfig", "SimConfig",
    "inplane_gravity", "platform_accel", "radial_gravity_drive",
    "true_ball_accel",
]
