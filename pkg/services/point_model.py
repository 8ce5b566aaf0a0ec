from typing import List, Optional

import numpy as np

from models import PointScene, unit_vectors
from services.base_model import BaseForwardModel
from services.scene_parser import KeyValueDocument, parse_points


class PointModel(BaseForwardModel):
    """Point-like scatterers of unit strength, multiple scattering neglected"""

    def __init__(self, scene: PointScene):
        super().__init__(scene)
        self.points = scene.points

    @classmethod
    def get_scene_type(cls) -> str:
        return "point"

    @classmethod
    def get_required_keys(cls) -> List[str]:
        return ["points"]

    @classmethod
    def build_scene(cls, doc: KeyValueDocument) -> PointScene:
        doc.require("points")
        return doc.convert("points", lambda v: PointScene(parse_points(v)))

    def far_field_values(self, k: float, thetas: np.ndarray, incident_thetas: Optional[np.ndarray]) -> np.ndarray:
        # without an incident wave each point radiates exp(-ik z.x)
        outgoing = np.exp(-1j * k * (unit_vectors(thetas) @ self.points.T))
        if incident_thetas is None:
            return outgoing.sum(axis=1, keepdims=True)
        incoming = np.exp(1j * k * (unit_vectors(incident_thetas) @ self.points.T))
        return outgoing @ incoming.T

    def contains(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        return np.zeros(pts.shape[:-1], dtype=bool)
