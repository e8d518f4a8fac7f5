"""Experiment configuration: a strict, YAML-loadable schema.

Every section mirrors the defaults of the module it configures. Loading
rejects unknown keys so typos fail loudly instead of silently running
with defaults.
"""
from __future__ import annotations

import dataclasses
import math
import typing
from dataclasses import dataclass, field, fields, is_dataclass
from pathlib import Path

import yaml

from .core.errors import ValidationError
from .core.geometry import MazeGeometry
from .sim.config import ActuatorConfig, NoiseConfig, SimConfig


@dataclass(frozen=True)
class GeometrySettings:
    maze_radius: float = 0.110
    ball_diameter: float = 0.01275
    opening_width: float = 0.016
    n_rings: int = 5

    def build(self):
        return MazeGeometry(maze_radius=self.maze_radius,
                            ball_diameter=self.ball_diameter,
                            opening_width=self.opening_width,
                            n_rings=self.n_rings)


@dataclass(frozen=True)
class ActuatorSettings:
    natural_freq: float = 12.0
    damping_ratio: float = 0.9
    delay: float = 0.2
    tilt_gain: float = 0.15


@dataclass(frozen=True)
class NoiseSettings:
    theta_std: float = 0.002
    tilt_std: float = 0.001


@dataclass(frozen=True)
class SimSettings:
    dt: float = 1.0 / 30.0
    substeps: int = 10
    gravity: float = 9.81
    viscous_coeff: float = 0.8
    dry_coeff: float = 0.35
    dry_smoothing: float = 0.05
    restitution: float = 0.3
    gate_drive_threshold: float = 0.05
    tilt_limit: float = 0.20
    actuator: ActuatorSettings = field(default_factory=ActuatorSettings)
    noise: NoiseSettings = field(default_factory=NoiseSettings)

    def build(self, geometry):
        return SimConfig(
            geometry=geometry, dt=self.dt, substeps=self.substeps,
            gravity=self.gravity, viscous_coeff=self.viscous_coeff,
            dry_coeff=self.dry_coeff, dry_smoothing=self.dry_smoothing,
            restitution=self.restitution,
            gate_drive_threshold=self.gate_drive_threshold,
            tilt_limit=self.tilt_limit,
            actuator=ActuatorConfig(
                natural_freq=self.actuator.natural_freq,
                damping_ratio=self.actuator.damping_ratio,
                delay=self.actuator.delay,
                tilt_gain=self.actuator.tilt_gain),
            noise=NoiseConfig(theta_std=self.noise.theta_std,
                              tilt_std=self.noise.tilt_std))


@dataclass(frozen=True)
class ExcitationSettings:
    n_trajectories: int = 5
    duration: float = 300.0
    start_rings: tuple = (1, 2, 3, 4, 4)
    n_waves: int = 50
    freq_max: float = 1.5
    amplitude_scale: float = 0.8 / math.sqrt(50)

    def __post_init__(self):
        if len(self.start_rings) != self.n_trajectories:
            raise ValidationError(
                "start_rings must list one ring per trajectory")


@dataclass(frozen=True)
class PipelineSettings:
    max_train_rows: int = 600
    max_transition_rows: int = 400
    theta_process_var: float = 25.0
    theta_meas_var: float = 4e-6
    tilt_process_var: float = 25.0
    tilt_meas_var: float = 1e-6
    cutoff_hz: float = 5.0
    arx_orders: tuple = (2, 2, 6)
    cluster_proximity: float = 0.2
    cluster_min_events: int = 2


@dataclass(frozen=True)
class ModelSettings:
    kinds: tuple = ("P", "PI", "NP", "SP", "NPd")
    rings: tuple = (1, 2, 3, 4)
    ard: bool = True
    encode_angle: bool = True
    n_restarts: int = 1
    max_iter: int = 60


@dataclass(frozen=True)
class EvalSettings:
    rollout_steps: int = 40
    min_windows: int = 100
    eval_trajectories: int = 4
    eval_duration: float = 300.0
    eval_start_rings: tuple = (1, 2, 3, 4)
    learning_sizes: tuple = (50, 100, 200, 400)
    curve_ring: int = 1
    curve_kinds: tuple = ("NP", "SP")
    # Small subsets need extra optimizer starts to escape underfit basins.
    curve_restarts: int = 5
    curve_max_iter: int = 40


@dataclass(frozen=True)
class ControlSettings:
    rings: tuple = (1, 2, 3)
    n_runs: int = 10
    shift: float = math.pi / 4
    duration: float = 3.0
    settle_deadline: float = 2.5
    horizon: int = 40
    max_plan_iterations: int = 40
    state_weights: tuple = (1.0, 0.1, 0.2, 0.02, 0.2, 0.02)
    smooth_abs_width: float = 0.05
    control_scale: float = 0.4
    terminal_multiplier: float = 10.0
    pd_position: float = 2.0
    pd_rate: float = 0.5


@dataclass(frozen=True)
class MazeSettings:
    n_runs: int = 10
    start_ring: int = 1
    goal_ring: int = 5
    total_timeout: float = 60.0
    segment_timeout: float = 10.0
    transition_timeout: float = 2.0
    deviation_threshold: float = 0.3
    pd_burst_steps: int = 15
    span_entry_rate: float = 1.5
    horizon: int = 40
    max_plan_iterations: int = 40


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int = 0
    out_dir: str = "runs/default"
    geometry: GeometrySettings = field(default_factory=GeometrySettings)
    sim: SimSettings = field(default_factory=SimSettings)
    excitation: ExcitationSettings = field(
        default_factory=ExcitationSettings)
    pipeline: PipelineSettings = field(default_factory=PipelineSettings)
    models: ModelSettings = field(default_factory=ModelSettings)
    eval: EvalSettings = field(default_factory=EvalSettings)
    control: ControlSettings = field(default_factory=ControlSettings)
    maze: MazeSettings = field(default_factory=MazeSettings)

    def sim_config(self):
        return self.sim.build(self.geometry.build())

    def resolved(self):
        """Plain-dict form embedded into reports."""
        return dataclasses.asdict(self)


def _coerce(value, typ, path):
    if is_dataclass(typ):
        if not isinstance(value, dict):
            raise ValidationError(f"config section '{path}' must be a map")
        return _build(typ, value, path)
    if typ is tuple:
        if not isinstance(value, (list, tuple)):
            raise ValidationError(f"config key '{path}' must be a list")
        return tuple(value)
    if typ is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValidationError(f"config key '{path}' must be a number")
        return float(value)
    if typ is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ValidationError(f"config key '{path}' must be an integer")
        return value
    if typ is bool:
        if not isinstance(value, bool):
            raise ValidationError(f"config key '{path}' must be a boolean")
        return value
    if typ is str:
        if not isinstance(value, str):
            raise ValidationError(f"config key '{path}' must be a string")
        return value
    raise ValidationError(f"config key '{path}' has unsupported type")


def _build(cls, data, path=""):
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        where = path or cls.__name__
        raise ValidationError(
            f"unknown config key(s) {sorted(unknown)} in '{where}'")
    hints = typing.get_type_hints(cls)
    kwargs = {}
    for name, value in data.items():
        sub = f"{path}.{name}" if path else name
        kwargs[name] = _coerce(value, hints[name], sub)
    return cls(**kwargs)


def config_from_dict(data):
    """Build an ExperimentConfig from nested dicts, rejecting unknown keys."""
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ValidationError("top-level config must be a map")
    return _build(ExperimentConfig, data)


def load_config(path):
    """Load a YAML experiment config; missing keys keep their defaults."""
    text = Path(path).read_text()
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ValidationError(f"could not parse config {path}: {exc}") \
            from None
    return config_from_dict(data)
