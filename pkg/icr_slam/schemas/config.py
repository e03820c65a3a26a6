"""
Experiment configuration schemas.

Every model forbids unknown keys and checks the invariants of the object
it builds, so a configuration that loads is one the pipeline accepts.
Defaults reproduce the standard evaluation setup.
"""

from typing import List, Optional

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from icr_slam.dynamics.motion import ControlBounds, ProcessNoiseModel
from icr_slam.errors import InvalidInputError
from icr_slam.geometry.fov import FovPolygon
from icr_slam.linalg import is_psd, is_spd
from icr_slam.planning.icr import DEFAULT_U_INIT, IcrConfig
from icr_slam.sensing.fov_sensing import VISIBILITY_FLOOR, SensorModel

POLICY_KINDS = ("random", "icr_open_loop", "icr_lqr")

Matrix = List[List[float]]


def _square(value: Matrix, size: int, name: str) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.shape != (size, size):
        raise ValueError(f"{name} must be a {size}x{size} matrix")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    return arr


def _diag(*values: float) -> Matrix:
    return np.diag(values).tolist()


class MotionConfig(BaseModel):
    """Robot kinematics, process noise and control bounds."""
    model_config = {"extra": "forbid"}

    tau: float = Field(1.0, gt=0, description="Time step in seconds")
    W: Matrix = Field(
        default_factory=lambda: _diag(0.1, 0.1, 0.01),
        description="Process noise covariance (m², m², rad²), symmetric PSD",
    )
    v_min: float = Field(0.0, description="Lower linear velocity bound (m/s)")
    v_max: float = Field(3.0, description="Upper linear velocity bound (m/s)")
    omega_max: float = Field(1.0, ge=0, description="Angular velocity bound (rad/s), symmetric")

    @field_validator("W")
    @classmethod
    def validate_w(cls, v):
        if not is_psd(_square(v, 3, "W")):
            raise ValueError("W must be symmetric positive semidefinite")
        return v

    @model_validator(mode="after")
    def validate_bounds(self):
        if self.v_min > self.v_max:
            raise ValueError("v_min must not exceed v_max")
        return self

    def to_model(self) -> ProcessNoiseModel:
        return ProcessNoiseModel(W=np.asarray(self.W, dtype=float), tau=self.tau)

    def to_bounds(self) -> ControlBounds:
        return ControlBounds(v_max=self.v_max, omega_max=self.omega_max, v_min=self.v_min)


class SensorConfig(BaseModel):
    """Measurement noise and the differentiable field of view."""
    model_config = {"extra": "forbid"}

    gamma: Matrix = Field(
        default_factory=lambda: _diag(0.1, 0.1),
        description="Measurement noise covariance (m²), symmetric positive definite",
    )
    kappa: float = Field(10.0, gt=0, description="FoV smoothness parameter")
    fov_height: float = Field(20.0, gt=0, description="Triangle FoV height (m)")
    fov_apex_angle_deg: float = Field(120.0, gt=0, lt=180, description="Triangle FoV apex angle (degrees)")
    fov_vertices: Optional[Matrix] = Field(
        None,
        description="Explicit convex FoV polygon in the body frame; overrides the triangle",
    )
    visibility_floor: float = Field(VISIBILITY_FLOOR, gt=0, lt=1, description="Lower clamp of the visibility factor")

    @field_validator("gamma")
    @classmethod
    def validate_gamma(cls, v):
        if not is_spd(_square(v, 2, "gamma")):
            raise ValueError("gamma must be symmetric positive definite")
        return v

    @field_validator("fov_vertices")
    @classmethod
    def validate_fov(cls, v):
        if v is not None:
            try:
                FovPolygon(np.asarray(v, dtype=float))
            except (InvalidInputError, ValueError) as e:
                raise ValueError(str(e)) from e
        return v

    def to_fov(self) -> FovPolygon:
        if self.fov_vertices is not None:
            return FovPolygon(np.asarray(self.fov_vertices, dtype=float))
        return FovPolygon.isosceles_triangle(self.fov_height, np.deg2rad(self.fov_apex_angle_deg))

    def to_sensor(self) -> SensorModel:
        return SensorModel(
            gamma=np.asarray(self.gamma, dtype=float),
            kappa=self.kappa,
            fov=self.to_fov(),
            visibility_floor=self.visibility_floor,
        )


class IcrSettings(BaseModel):
    """Open-loop planner parameters."""
    model_config = {"extra": "forbid"}

    horizon: int = Field(5, ge=1, description="Planning horizon K")
    iterations: int = Field(10, ge=0, description="Gradient descent iterations per phase")
    alpha: List[float] = Field(default_factory=lambda: [0.005, 0.0005], description="Step sizes for (v, ω)")
    backtracking: bool = Field(False, description="Halve the step until the cost does not increase")
    u_init: List[float] = Field(
        default_factory=lambda: list(DEFAULT_U_INIT),
        description="Initial control (v, ω) repeated over the horizon",
    )
    warm_start: bool = Field(True, description="Start each later phase from the previous optimized controls")

    @field_validator("alpha")
    @classmethod
    def validate_alpha(cls, v):
        if len(v) != 2 or min(v) <= 0:
            raise ValueError("alpha must hold two positive step sizes")
        return v

    @field_validator("u_init")
    @classmethod
    def validate_u_init(cls, v):
        if len(v) != 2:
            raise ValueError("u_init must hold (v, omega)")
        return v

    def to_icr_config(self, bounds: ControlBounds) -> IcrConfig:
        return IcrConfig(
            horizon=self.horizon,
            iterations=self.iterations,
            alpha=tuple(self.alpha),
            bounds=bounds,
            backtracking=self.backtracking,
            warm_start=self.warm_start,
        )


class LqrWeightsConfig(BaseModel):
    """LQR stage weights."""
    model_config = {"extra": "forbid"}

    q1: Matrix = Field(default_factory=lambda: _diag(10.0, 10.0, 1.0), description="Pose error weight Q⁽¹⁾")
    q2_pattern: Matrix = Field(
        default_factory=lambda: _diag(1.0, 0.1, 1.0),
        description="Per-landmark covariance error weight, Kronecker-repeated into Q⁽²⁾",
    )
    r: Matrix = Field(default_factory=lambda: [[20.0, 5.0], [5.0, 10.0]], description="Control weight R")

    @field_validator("q1", "q2_pattern")
    @classmethod
    def validate_state_weight(cls, v, info):
        if not is_psd(_square(v, 3, info.field_name)):
            raise ValueError(f"{info.field_name} must be symmetric positive semidefinite")
        return v

    @field_validator("r")
    @classmethod
    def validate_r(cls, v):
        if not is_spd(_square(v, 2, "r")):
            raise ValueError("r must be symmetric positive definite")
        return v


class HarnessConfig(BaseModel):
    """Environment, initialization and trial length."""
    model_config = {"extra": "forbid"}

    bounds: Matrix = Field(
        default_factory=lambda: [[0.0, 100.0], [0.0, 70.0]],
        description="Environment rectangle [[x_min, x_max], [y_min, y_max]] (m)",
    )
    n_landmarks: int = Field(15, ge=1, description="Number of landmarks")
    total_steps: int = Field(60, ge=1, description="Steps per trial, a multiple of the horizon")
    init_variance: float = Field(25.0, gt=0, description="Initial estimate variance per coordinate")
    init_robot_variance: Optional[float] = Field(
        None, gt=0, description="Initial robot pose variance; defaults to init_variance"
    )
    init_heading_noise: bool = Field(True, description="Also perturb the initial heading estimate")
    start_pose: Optional[List[float]] = Field(None, description="True start pose; default center of bounds, θ = 0")
    workers: int = Field(1, ge=1, description="Parallel trial processes")

    @field_validator("bounds")
    @classmethod
    def validate_bounds(cls, v):
        arr = np.asarray(v, dtype=float)
        if arr.shape != (2, 2) or np.any(arr[:, 0] >= arr[:, 1]):
            raise ValueError("bounds must be [[x_min, x_max], [y_min, y_max]] with min < max")
        return v

    @field_validator("start_pose")
    @classmethod
    def validate_start_pose(cls, v):
        if v is not None and len(v) != 3:
            raise ValueError("start_pose must be [x, y, theta]")
        return v


class ExperimentConfig(BaseModel):
    """Complete, validated experiment configuration."""
    model_config = {"extra": "forbid"}

    motion: MotionConfig = Field(default_factory=MotionConfig)
    sensor: SensorConfig = Field(default_factory=SensorConfig)
    icr: IcrSettings = Field(default_factory=IcrSettings)
    lqr: LqrWeightsConfig = Field(default_factory=LqrWeightsConfig)
    harness: HarnessConfig = Field(default_factory=HarnessConfig)
    master_seed: int = Field(0, ge=0, description="Seed every trial seed is derived from")
    trials: int = Field(5, ge=1, description="Number of environments per policy")
    policies: List[str] = Field(default_factory=lambda: list(POLICY_KINDS), description="Policies to compare")
    output_dir: Optional[str] = Field(None, description="Output directory; falls back to ICR_SLAM_OUT_DIR")

    @field_validator("policies")
    @classmethod
    def validate_policies(cls, v):
        if not v:
            raise ValueError("at least one policy is required")
        unknown = [p for p in v if p not in POLICY_KINDS]
        if unknown:
            raise ValueError(f"unknown policies {unknown}; expected a subset of {list(POLICY_KINDS)}")
        if len(set(v)) != len(v):
            raise ValueError("policies must not repeat")
        return v

    @model_validator(mode="after")
    def validate_steps(self):
        if self.harness.total_steps % self.icr.horizon != 0:
            raise ValueError(
                f"harness.total_steps ({self.harness.total_steps}) must be a multiple of icr.horizon ({self.icr.horizon})"
            )
        return self


class RunManifest(BaseModel):
    """Everything needed to reproduce a run."""
    model_config = {"extra": "forbid"}

    package_version: str = Field(..., description="icr-slam version that produced the run")
    config: ExperimentConfig = Field(..., description="Fully resolved configuration")
    trial_seeds: List[int] = Field(..., description="Seed of every trial, in trial order")
