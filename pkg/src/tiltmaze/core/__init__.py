from .angles import angle_diff, wrap_angle
from .errors import (FileFormatError, MissingPrerequisiteError, TiltmazeError,
                     ValidationError)
from .geometry import MazeGeometry
from .state import (AUGMENTED_COLUMNS, TRANSITION_COLUMNS, Action, BallState,
                    FullState, PlatformState, RegressionDataset, Trajectory,
                    TransitionDataset)

__all__ = [
    "AUGMENTED_COLUMNS", "TRANSITION_COLUMNS", "Action", "BallState",
    "FileFormatError", "FullState", "MazeGeometry",
    "MissingPrerequisiteError", "PlatformState", "RegressionDataset",
    "TiltmazeError", "Trajectory", "TransitionDataset", "ValidationError",
    "angle_diff", "wrap_angle",
]
