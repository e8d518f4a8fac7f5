"""Simulator configuration."""

from dataclasses import dataclass, field

from ..core.errors import ValidationError
from ..core.geometry import MazeGeometry


@dataclass(frozen=True)
class ActuatorConfig:
    """Second-order servo lag plus a pure command delay.

    A command u in [-1, 1] targets a tilt of ``tilt_gain * u`` radians; the
    plate responds as a second-order system with the given natural frequency
    (rad/s) and damping ratio, after the command has sat in a delay line for
    ``delay`` seconds (an integer number of samples).
    """

    natural_freq: float = 12.0
    damping_ratio: float = 0.9
    delay: float = 0.2
    tilt_gain: float = 0.15


@dataclass(frozen=True)
class NoiseConfig:
    """Measurement noise: camera angle and lever-arm tilt readings."""

    theta_std: float = 0.002
    tilt_std: float = 0.001


@dataclass(frozen=True)
class SimConfig:
    geometry: MazeGeometry = field(default_factory=MazeGeometry)
    dt: float = 1.0 / 30.0
    substeps: int = 10
    gravity: float = 9.81
    viscous_coeff: float = 0.8        # 1/s, opposes theta_dot
    dry_coeff: float = 0.35           # rad/s^2, Coulomb level
    dry_smoothing: float = 0.05       # rad/s, tanh transition width
    restitution: float = 0.3          # wall-end bounce coefficient
    gate_drive_threshold: float = 0.05  # m/s^2 of radial gravity to pass a gate
    tilt_limit: float = 0.20          # rad, hard stop on plate tilt
    actuator: ActuatorConfig = field(default_factory=ActuatorConfig)
    noise: NoiseConfig = field(default_factory=NoiseConfig)

    def __post_init__(self):
        if self.dt <= 0 or self.substeps < 1:
            raise ValidationError("dt must be positive and substeps >= 1")
        delay_samples = self.actuator.delay / self.dt
        if abs(delay_samples - round(delay_samples)) > 1e-9:
            raise ValidationError("actuator delay must be a whole number of samples")
        if not 0.0 <= self.restitution <= 1.0:
            raise ValidationError("restitution must lie in [0, 1]")
        if self.actuator.tilt_gain > self.tilt_limit:
            raise ValidationError("tilt_gain must not exceed tilt_limit")

    @property
    def delay_samples(self):
        return int(round(self.actuator.delay / self.dt))
