import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np

from errors import DataFormatError, InputValidationError

# Finite stand-in for an unbounded indicator value (empty signal)
SENTINEL = 1e300
MIN_DIRECTIONS = 16


def canonical_angle(theta: float) -> float:
    """Map an angle into [0, 2*pi)"""
    wrapped = math.fmod(float(theta), 2.0 * math.pi)
    if wrapped < 0:
        wrapped += 2.0 * math.pi
    # fmod of a value just below a multiple of 2*pi can round up to 2*pi
    return 0.0 if wrapped >= 2.0 * math.pi else wrapped


def grid_angles(n_theta: int) -> np.ndarray:
    return 2.0 * np.pi * np.arange(n_theta) / n_theta


def unit_vectors(thetas) -> np.ndarray:
    thetas = np.asarray(thetas, dtype=float)
    return np.stack([np.cos(thetas), np.sin(thetas)], axis=-1)


@dataclass(frozen=True)
class Direction:
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", canonical_angle(self.theta))

    @property
    def vector(self) -> np.ndarray:
        return np.array([math.cos(self.theta), math.sin(self.theta)])

    @classmethod
    def coerce(cls, value) -> "Direction":
        """Pass a Direction through; wrap a bare angle in radians"""
        return value if isinstance(value, Direction) else cls(float(value))


class BoundaryKind(str, Enum):
    SOUND_SOFT = "soundsoft"
    IMPEDANCE = "impedance"


@dataclass(frozen=True)
class BoundaryCondition:
    kind: BoundaryKind = BoundaryKind.SOUND_SOFT
    eta: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "kind", BoundaryKind(self.kind))
        object.__setattr__(self, "eta", complex(self.eta))
        if self.kind is BoundaryKind.IMPEDANCE and self.eta.imag < 0:
            raise InputValidationError(f"Impedance eta must have Im(eta) >= 0, got {self.eta}")

    @classmethod
    def sound_soft(cls) -> "BoundaryCondition":
        return cls(BoundaryKind.SOUND_SOFT)

    @classmethod
    def impedance(cls, eta: complex) -> "BoundaryCondition":
        return cls(BoundaryKind.IMPEDANCE, eta)

    @property
    def is_impedance(self) -> bool:
        return self.kind is BoundaryKind.IMPEDANCE

    def describe(self) -> str:
        if self.is_impedance:
            return f"impedance(eta={self.eta.real:g}{self.eta.imag:+g}i)"
        return "soundsoft"


class SourceNormalization(str, Enum):
    STANDARD = "standard"
    FUNDAMENTAL = "fundamental"

    @classmethod
    def _missing_(cls, value):
        # alternate spelling of FUNDAMENTAL
        if isinstance(value, str) and value.replace("-", "").replace("_", "") == "paperliteral":
            return cls.FUNDAMENTAL
        return None


@dataclass
class FarFieldPattern:
    """Samples u(theta_j) at theta_j = 2*pi*j/n_theta for wavenumber k"""
    k: float
    values: np.ndarray

    def __post_init__(self):
        self.k = float(self.k)
        if not (self.k > 0 and math.isfinite(self.k)):
            raise InputValidationError(f"Wavenumber must be positive, got {self.k}")
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.ndim != 1:
            raise DataFormatError("Far-field values must be a vector")
        if self.values.size < MIN_DIRECTIONS:
            raise DataFormatError(
                f"Far field needs at least {MIN_DIRECTIONS} directions, got {self.values.size}"
            )
        if not np.all(np.isfinite(self.values)):
            raise DataFormatError("Far-field values must be finite")

    @property
    def n_theta(self) -> int:
        return int(self.values.size)

    @property
    def thetas(self) -> np.ndarray:
        return grid_angles(self.n_theta)

    @property
    def directions(self) -> np.ndarray:
        return unit_vectors(self.thetas)

    def scaled(self, factor: complex) -> "FarFieldPattern":
        return FarFieldPattern(self.k, self.values * factor)


@dataclass
class PointScene:
    points: np.ndarray

    def __post_init__(self):
        self.points = np.atleast_2d(np.asarray(self.points, dtype=float))
        if self.points.size == 0 or self.points.shape[1] != 2:
            raise InputValidationError("Point scene needs at least one 2D point")


@dataclass
class DiskScene:
    center: Tuple[float, float]
    radius: float
    bc: BoundaryCondition = field(default_factory=BoundaryCondition.sound_soft)

    def __post_init__(self):
        self.center = (float(self.center[0]), float(self.center[1]))
        self.radius = float(self.radius)
        if not self.radius > 0:
            raise InputValidationError(f"Disk radius must be positive, got {self.radius}")


@dataclass
class PolygonSourceScene:
    vertices: np.ndarray
    density: complex = 1.0 + 0j
    normalization: SourceNormalization = SourceNormalization.STANDARD

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=float)
        self.density = complex(self.density)
        self.normalization = SourceNormalization(self.normalization)


@dataclass
class PolygonObstacleScene:
    vertices: np.ndarray
    bc: BoundaryCondition = field(default_factory=BoundaryCondition.sound_soft)

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=float)
        if self.bc.is_impedance:
            raise InputValidationError("Polygon obstacles support only the sound-soft condition")


@dataclass
class EmptyScene:
    pass


@dataclass(frozen=True)
class TestDisk:
    __test__ = False  # not a pytest class

    center: Tuple[float, float]
    radius: float
    bc: BoundaryCondition

    def __post_init__(self):
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))
        if not self.radius > 0:
            raise InputValidationError(f"Test disk radius must be positive, got {self.radius}")


@dataclass
class DiskSpectrum:
    """Eigenvalues lambda_n, n = -N..N, of a test disk's far-field operator"""
    k: float
    disk: TestDisk
    truncation: int
    eigenvalues: np.ndarray
    flags: List[str] = field(default_factory=list)

    @property
    def orders(self) -> np.ndarray:
        return np.arange(-self.truncation, self.truncation + 1)

    def eigenvalue(self, n: int) -> complex:
        if abs(n) > self.truncation:
            raise InputValidationError(f"Order {n} outside stored range |n| <= {self.truncation}")
        return complex(self.eigenvalues[n + self.truncation])


@dataclass(frozen=True)
class RegularizationParams:
    alpha: float
    truncation: int

    def __post_init__(self):
        if not self.alpha > 0:
            raise InputValidationError(f"alpha must be positive, got {self.alpha}")
        if self.truncation < 1:
            raise InputValidationError(f"truncation must be >= 1, got {self.truncation}")


@dataclass
class IndicatorValue:
    value: float
    raw_series: float
    terms_used: int
    flags: List[str] = field(default_factory=list)


@dataclass
class ThresholdResult:
    radius: float
    flags: List[str] = field(default_factory=list)


@dataclass
class IndicatorProfile:
    center: Tuple[float, float]
    radii: np.ndarray
    values: np.ndarray
    flags: List[str] = field(default_factory=list)


@dataclass
class IndicatorField:
    """Scalar field on a tensor grid; values[i, j] sits at (xs[j], ys[i])"""
    xs: np.ndarray
    ys: np.ndarray
    values: np.ndarray
    flags: List[str] = field(default_factory=list)

    def __post_init__(self):
        self.xs = np.asarray(self.xs, dtype=float)
        self.ys = np.asarray(self.ys, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.ys.size, self.xs.size):
            raise DataFormatError(
                f"Field shape {self.values.shape} does not match grid {self.ys.size}x{self.xs.size}"
            )

    @property
    def points(self) -> np.ndarray:
        gx, gy = np.meshgrid(self.xs, self.ys)
        return np.stack([gx, gy], axis=-1)


@dataclass
class SchemeOneResult:
    centers: np.ndarray
    radii: np.ndarray
    xs: np.ndarray
    ys: np.ndarray
    mask: np.ndarray
    flags: List[str] = field(default_factory=list)


@dataclass
class ContrastResult:
    interior_mean: float
    exterior_mean: float

    @property
    def contrast(self) -> float:
        return self.exterior_mean - self.interior_mean


@dataclass
class ClassicalSystem:
    """Discrete spectral data used by the multi-wave indicators"""
    k: float
    vectors: np.ndarray
    values: np.ndarray
    quadrature_weight: float
    dropped: int = 0
    method: Optional[str] = None
