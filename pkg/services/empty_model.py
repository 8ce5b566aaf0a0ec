from typing import List, Optional

import numpy as np

from models import EmptyScene
from services.base_model import BaseForwardModel
from services.scene_parser import KeyValueDocument


class EmptyModel(BaseForwardModel):
    """No scatterer: every far field vanishes"""

    @classmethod
    def get_scene_type(cls) -> str:
        return "empty"

    @classmethod
    def get_required_keys(cls) -> List[str]:
        return []

    @classmethod
    def build_scene(cls, doc: KeyValueDocument) -> EmptyScene:
        return EmptyScene()

    def far_field_values(self, k: float, thetas: np.ndarray, incident_thetas: Optional[np.ndarray]) -> np.ndarray:
        columns = 1 if incident_thetas is None else len(incident_thetas)
        return np.zeros((len(thetas), columns), dtype=complex)

    def contains(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        return np.zeros(pts.shape[:-1], dtype=bool)
