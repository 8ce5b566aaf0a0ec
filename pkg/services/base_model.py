import cmath
import logging
import math
from abc import ABC, abstractmethod
from typing import Iterable, List, Optional

import numpy as np

from errors import InputValidationError, SceneParseError
from models import BoundaryCondition, BoundaryKind, FarFieldPattern, MIN_DIRECTIONS, grid_angles
from services.scene_parser import KeyValueDocument, parse_complex

logger = logging.getLogger(__name__)


def radiation_constant(k: float) -> complex:
    """Far-field coefficient exp(i pi/4)/sqrt(8 pi k) of the fundamental solution (i/4) H_0(k|x-y|)"""
    return cmath.exp(0.25j * math.pi) / math.sqrt(8.0 * math.pi * k)


def parse_boundary(doc: KeyValueDocument) -> BoundaryCondition:
    """Boundary condition from the `bc` and `eta` keys; sound-soft when absent"""
    kind = doc.convert("bc", lambda v: BoundaryKind(v.strip().lower().replace("-", "").replace("_", "")))
    if kind is None or kind is BoundaryKind.SOUND_SOFT:
        return BoundaryCondition.sound_soft()
    eta = doc.convert("eta", parse_complex, default=1j)
    try:
        return BoundaryCondition.impedance(eta)
    except InputValidationError as e:
        raise SceneParseError(str(e), line=doc.lines.get("eta")) from e


class BaseForwardModel(ABC):
    """Base class for all scene types with common far-field plumbing"""

    # sources radiate the same pattern for every incident wave
    supports_incidence = True

    def __init__(self, scene):
        self.scene = scene
        self.flags: List[str] = []

    @classmethod
    @abstractmethod
    def get_scene_type(cls) -> str:
        """Return the scene type name used in scene files"""
        pass

    @classmethod
    @abstractmethod
    def get_required_keys(cls) -> List[str]:
        """Return the scene-file keys this scene type needs"""
        pass

    @classmethod
    @abstractmethod
    def build_scene(cls, doc: KeyValueDocument):
        """Build the scene dataclass from parsed scene-file entries"""
        pass

    @abstractmethod
    def far_field_values(self, k: float, thetas: np.ndarray, incident_thetas: Optional[np.ndarray]) -> np.ndarray:
        """u(theta_p; d_q) as an array (len(thetas), len(incident_thetas))"""
        pass

    @abstractmethod
    def contains(self, points) -> np.ndarray:
        """True where a point lies in the scatterer or source support"""
        pass

    @classmethod
    def get_detection_priority(cls) -> int:
        """Return priority for scene detection (higher = more specific)"""
        return 1

    @classmethod
    def validate_keys(cls, keys: Iterable[str]) -> bool:
        """Check that at least half of the required keys are present"""
        required = cls.get_required_keys()
        available = set(keys)
        matches = len([key for key in required if key in available])
        return matches >= len(required) * 0.5

    def far_field(self, k: float, n_theta: int, incident_theta: Optional[float] = None) -> FarFieldPattern:
        """Far-field pattern on the uniform grid for one incident direction"""
        _check_wavenumber(k)
        _check_grid(n_theta)
        incident = None if incident_theta is None else np.array([float(incident_theta)])
        values = self.far_field_values(k, grid_angles(n_theta), incident)
        return FarFieldPattern(k, values[:, 0])

    def multistatic(self, k: float, n_theta: int) -> np.ndarray:
        """Entry (p, q) = u(theta_p; d = theta_q) * 2 pi / n_theta"""
        _check_wavenumber(k)
        _check_grid(n_theta)
        if not self.supports_incidence:
            raise InputValidationError(
                f"Scene type '{self.get_scene_type()}' has no incident wave; multistatic data is undefined"
            )
        thetas = grid_angles(n_theta)
        return self.far_field_values(k, thetas, thetas) * (2.0 * math.pi / n_theta)


def _check_wavenumber(k: float) -> None:
    if not (k > 0 and math.isfinite(k)):
        raise InputValidationError(f"Wavenumber must be positive, got {k}")


def _check_grid(n_theta: int) -> None:
    if n_theta < MIN_DIRECTIONS:
        raise InputValidationError(f"n_theta must be at least {MIN_DIRECTIONS}, got {n_theta}")
