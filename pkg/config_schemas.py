from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from errors import InputValidationError
from models import BoundaryCondition, BoundaryKind, RegularizationParams
from services.scene_parser import parse_complex, parse_float_list


class GridConfig(BaseModel):
    """Tensor grid of the imaging region"""
    x_min: float
    x_max: float
    y_min: float
    y_max: float
    n_x: int = Field(128, ge=2)
    n_y: int = Field(128, ge=2)

    @model_validator(mode="after")
    def check_bounds(self):
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise ValueError("Grid bounds must satisfy x_min < x_max and y_min < y_max")
        return self

    @classmethod
    def square(cls, half_width: float, n: int = 128) -> "GridConfig":
        return cls(x_min=-half_width, x_max=half_width, y_min=-half_width, y_max=half_width, n_x=n, n_y=n)

    def xs(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_x)

    def ys(self) -> np.ndarray:
        return np.linspace(self.y_min, self.y_max, self.n_y)


class ImagingConfig(BaseModel):
    """Inversion parameters; aliases are the symbols used on the command line"""
    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    k: float = Field(6.0, gt=0)
    R: float = Field(4.0, gt=0)
    n_centers: int = Field(64, ge=1, alias="nz")
    n_radii: int = Field(160, ge=1, alias="M")
    truncation: int = Field(80, ge=1, le=200, alias="N")
    alpha: float = Field(1e-13, gt=0)
    delta: float = Field(1.2e-2, gt=0)
    bc: BoundaryKind = BoundaryKind.IMPEDANCE
    eta_re: float = 0.0
    eta_im: float = Field(1.0, ge=0)
    grid: Optional[GridConfig] = None

    @property
    def boundary(self) -> BoundaryCondition:
        if self.bc is BoundaryKind.IMPEDANCE:
            return BoundaryCondition.impedance(complex(self.eta_re, self.eta_im))
        return BoundaryCondition.sound_soft()

    @property
    def h_floor(self) -> float:
        """Smallest radius of the h_m grid, 2R/M"""
        return 2.0 * self.R / self.n_radii

    def radii(self) -> np.ndarray:
        return 2.0 * self.R * np.arange(1, self.n_radii + 1) / self.n_radii

    def resolved_grid(self) -> GridConfig:
        return self.grid if self.grid is not None else GridConfig.square(self.R)

    def regularization(self) -> RegularizationParams:
        return RegularizationParams(alpha=self.alpha, truncation=self.truncation)


class MFSConfig(BaseModel):
    """Parameters of the fundamental-solution solver for polygonal obstacles"""
    model_config = ConfigDict(extra="forbid")

    charge_scale: float = Field(0.7, gt=0, lt=1)
    n_charges: int = Field(192, ge=3)
    n_collocation: int = Field(384, ge=3)
    grading: float = Field(3.0, ge=1)
    corner_offset: float = Field(2.0, gt=0)
    n_check: int = Field(512, ge=16)
    residual_tol: float = Field(1e-3, gt=0)
    cutoff: float = Field(1e-12, gt=0, lt=1)

    @model_validator(mode="after")
    def check_counts(self):
        if self.n_collocation < self.n_charges:
            raise ValueError("n_collocation must be at least n_charges")
        return self


class RunConfig(BaseModel):
    """One command-line run: defaults < config file < flags"""
    model_config = ConfigDict(extra="forbid")

    command: str
    scene_path: Optional[str] = None
    data_path: Optional[str] = None
    out_path: Optional[str] = None
    method: str = "scheme2"
    classical: str = "quarterpower"
    imaging: ImagingConfig = Field(default_factory=ImagingConfig)
    mfs: MFSConfig = Field(default_factory=MFSConfig)
    noise: float = Field(0.0, ge=0, lt=1)
    seed: int = 0
    n_theta: int = Field(512, ge=16)
    incident: Optional[float] = None
    radius: Optional[float] = Field(None, gt=0)
    multistatic: bool = False
    center: Optional[List[float]] = None
    alphas: List[float] = Field(default_factory=list)

    @field_validator("command")
    @classmethod
    def check_command(cls, value: str) -> str:
        if value not in COMMANDS:
            raise ValueError(f"Unknown command '{value}', expected one of {', '.join(COMMANDS)}")
        return value

    @field_validator("method")
    @classmethod
    def check_method(cls, value: str) -> str:
        if value not in METHODS:
            raise ValueError(f"Unknown method '{value}', expected one of {', '.join(METHODS)}")
        return value

    @field_validator("alphas")
    @classmethod
    def check_alphas(cls, values: List[float]) -> List[float]:
        if any(not a > 0 for a in values):
            raise ValueError("Every alpha must be positive")
        return values

    @model_validator(mode="after")
    def check_required(self):
        needed = REQUIRED_PATHS.get(self.command, [])
        for name in needed:
            value = getattr(self, name)
            if value is None or value == "":
                raise ValueError(f"'{self.command}' requires {name}")
        if self.command == "sweep" and not self.alphas:
            raise ValueError("'sweep' requires at least one alpha")
        return self


COMMANDS = ["synthesize", "invert", "spectrum", "sweep"]
METHODS = ["scheme1", "scheme2", "esm", "classical", "profile"]
REQUIRED_PATHS = {
    "synthesize": ["scene_path", "out_path"],
    "invert": ["data_path", "out_path"],
    "sweep": ["data_path", "scene_path"],
}

# config-file and flag keys mapped onto (section, field)
IMAGING_KEYS = {
    "k": "k", "R": "R", "nz": "n_centers", "M": "n_radii", "N": "truncation",
    "alpha": "alpha", "delta": "delta", "bc": "bc",
}
RUN_KEYS = {
    "noise": "noise", "seed": "seed", "ntheta": "n_theta", "incident": "incident",
    "method": "method", "classical": "classical", "scene": "scene_path", "data": "data_path",
    "out": "out_path", "multistatic": "multistatic", "h": "radius",
}
GRID_KEYS = ["x_min", "x_max", "y_min", "y_max", "n_x", "n_y"]
MFS_KEYS = list(MFSConfig.model_fields.keys())


def build_run_config(command: str, *sources: Dict[str, Any]) -> RunConfig:
    """Merge flat key/value sources in order, later ones overriding earlier ones.

    Values may be strings (config files) or typed (flags); pydantic coerces both.
    """
    run: Dict[str, Any] = {"command": command}
    imaging: Dict[str, Any] = {}
    grid: Dict[str, Any] = {}
    mfs: Dict[str, Any] = {}
    for source in sources:
        for key, value in source.items():
            if value is None:
                continue
            if key == "eta":
                eta = parse_complex(value) if isinstance(value, str) else complex(value)
                imaging["eta_re"], imaging["eta_im"] = eta.real, eta.imag
            elif key in IMAGING_KEYS:
                imaging[IMAGING_KEYS[key]] = value
            elif key in RUN_KEYS:
                run[RUN_KEYS[key]] = value
            elif key in GRID_KEYS:
                grid[key] = value
            elif key in MFS_KEYS:
                mfs[key] = value
            elif key == "alphas":
                run["alphas"] = parse_float_list(value) if isinstance(value, str) else list(value)
            elif key == "center":
                run["center"] = parse_float_list(value) if isinstance(value, str) else list(value)
            else:
                raise InputValidationError(f"Unknown configuration key '{key}'")
    if grid:
        half = float(imaging.get("R", ImagingConfig.model_fields["R"].default))
        bounds = {"x_min": -half, "x_max": half, "y_min": -half, "y_max": half}
        imaging["grid"] = GridConfig(**{**bounds, **grid})
    run["imaging"] = ImagingConfig(**imaging)
    run["mfs"] = MFSConfig(**mfs)
    return RunConfig(**run)


# Parameter choices of the reference experiments
SOURCE_ALPHA_BY_K = {1.5: 1e-22, 6.0: 1e-13, 12.0: 1e-8}
OBSTACLE_ALPHA_BY_NOISE = {0.0: 1e-14, 0.03: 1e-11, 0.08: 1e-4}
POINT_TARGETS = {
    "one": [(-2.0, 0.0)],
    "two": [(-2.0, 0.0), (2.0, 0.0)],
    "three": [(-2.0, 0.0), (2.0, 0.0), (0.0, 2.0)],
}
TRIANGLE_VERTICES = [(-2.0, -2.0), (2.0, -2.0), (-2.0, 2.0)]
SQUARE_VERTICES = [(-3.0, -3.0), (3.0, -3.0), (3.0, 3.0), (-3.0, 3.0)]
SQUARE_INCIDENT_ANGLE = 4.0
SQUARE_SAMPLING_RADIUS = 8.0
SQUARE_TEST_ETA = complex(-2.0, 1.0)


def preset_alpha(k: Optional[float] = None, noise: Optional[float] = None) -> float:
    """Closest tabulated alpha for a source wavenumber or an obstacle noise level"""
    if noise is not None:
        table = OBSTACLE_ALPHA_BY_NOISE
        key = min(table, key=lambda level: abs(level - noise))
    elif k is not None:
        table = SOURCE_ALPHA_BY_K
        key = min(table, key=lambda wavenumber: abs(wavenumber - k))
    else:
        return ImagingConfig().alpha
    return table[key]


class Flag:
    DEGENERATE_SIGNAL = "degenerate_signal"
    DROPPED_TERMS = "dropped_terms"
    DIRICHLET_EIGENVALUE = "dirichlet_eigenvalue"
    OUT_OF_RANGE = "out_of_range"
    TRUNCATION_INSUFFICIENT = "truncation_insufficient"


class ResultStatus:
    SUCCESS = "success"
    VALIDATION_ERROR = "validation_error"
    NUMERICAL_ERROR = "numerical_error"


class ResultMessage:
    SYNTHESIS_DONE = "Far-field data written"
    MULTISTATIC_DONE = "Multistatic matrix written"
    INVERSION_DONE = "Inversion results written"
    SPECTRUM_DONE = "Spectrum table written"
    SWEEP_DONE = "Regularization sweep written"


class RunSummary(BaseModel):
    """Summary printed after every command"""
    success: bool
    status: str
    message: str
    data: Optional[Dict[str, Any]] = None
    flags: List[str] = Field(default_factory=list)
