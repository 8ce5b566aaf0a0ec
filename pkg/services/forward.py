"""Far-field synthesis for every scene type, multistatic matrices and noise"""
import logging
from typing import Optional, Union

import numpy as np

from config_schemas import MFSConfig
from errors import InputValidationError
from models import (
    Direction,
    DiskScene,
    EmptyScene,
    FarFieldPattern,
    PointScene,
    PolygonObstacleScene,
    PolygonSourceScene,
)
from services.base_model import BaseForwardModel
from services.disk_model import DiskModel, disk_far_field
from services.empty_model import EmptyModel
from services.geometry import triangle_exp_integral
from services.point_model import PointModel
from services.polygon_obstacle_model import PolygonObstacleModel
from services.polygon_source_model import PolygonSourceModel

logger = logging.getLogger(__name__)

__all__ = [
    "add_noise",
    "disk_far_field",
    "model_for",
    "multistatic_matrix",
    "point_far_field",
    "polygon_obstacle_far_field",
    "polygon_source_far_field",
    "synthesize",
    "triangle_exp_integral",
]

_SCENE_MODELS = {
    PointScene: PointModel,
    DiskScene: DiskModel,
    PolygonSourceScene: PolygonSourceModel,
    PolygonObstacleScene: PolygonObstacleModel,
    EmptyScene: EmptyModel,
}


def model_for(scene, mfs: Optional[MFSConfig] = None) -> BaseForwardModel:
    """Forward model of a scene dataclass; models pass through unchanged"""
    if isinstance(scene, BaseForwardModel):
        return scene
    model_class = _SCENE_MODELS.get(type(scene))
    if model_class is None:
        raise InputValidationError(f"No forward model for {type(scene).__name__}")
    if model_class is PolygonObstacleModel:
        return PolygonObstacleModel(scene, mfs)
    return model_class(scene)


def point_far_field(points, k: float, n_theta: int) -> FarFieldPattern:
    """Unit-strength point sources, sum_m exp(-i k z_m.x)"""
    return PointModel(PointScene(points)).far_field(k, n_theta)


def polygon_source_far_field(scene: PolygonSourceScene, k: float, n_theta: int) -> FarFieldPattern:
    return PolygonSourceModel(scene).far_field(k, n_theta)


def polygon_obstacle_far_field(
    scene: PolygonObstacleScene,
    k: float,
    incident_theta: float,
    n_theta: int,
    mfs: Optional[MFSConfig] = None,
) -> FarFieldPattern:
    return PolygonObstacleModel(scene, mfs).far_field(k, n_theta, incident_theta)


def multistatic_matrix(scene: Union[BaseForwardModel, object], k: float, n_theta: int) -> np.ndarray:
    """F[p, q] = u(theta_p; d = theta_q) * 2 pi / n_theta"""
    model = model_for(scene)
    matrix = model.multistatic(k, n_theta)
    logger.info(f"Multistatic matrix {n_theta}x{n_theta} for {model.get_scene_type()} at k={k:g}")
    return matrix


def add_noise(u: FarFieldPattern, delta: float, seed: int) -> FarFieldPattern:
    """Multiply each sample by 1 + delta * kappa_j with kappa_j uniform on [-1, 1]"""
    if not 0 <= delta < 1:
        raise InputValidationError(f"Noise level must lie in [0, 1), got {delta}")
    if delta == 0:
        return FarFieldPattern(u.k, u.values.copy())
    rng = np.random.default_rng(seed)
    kappa = rng.uniform(-1.0, 1.0, u.n_theta)
    return FarFieldPattern(u.k, u.values * (1.0 + delta * kappa))


def synthesize(
    scene,
    k: float,
    n_theta: int,
    incident_theta: Optional[Union[Direction, float]] = None,
    noise: float = 0.0,
    seed: int = 0,
    mfs: Optional[MFSConfig] = None,
) -> FarFieldPattern:
    """Far field of any scene, optionally polluted by multiplicative noise.

    Sources ignore the incident direction; obstacles default to theta_d = 0 and point
    scatterers to the bare radiated pattern.
    """
    model = model_for(scene, mfs)
    if not model.supports_incidence:
        incident_theta = None
    elif incident_theta is not None:
        incident_theta = Direction.coerce(incident_theta).theta
    pattern = model.far_field(k, n_theta, incident_theta)
    for flag in model.flags:
        logger.warning(f"Synthesis of {model.get_scene_type()} data raised flag '{flag}'")
    return add_noise(pattern, noise, seed)
