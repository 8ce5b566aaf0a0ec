from typing import List, Optional

import numpy as np

from models import PolygonSourceScene, SourceNormalization, unit_vectors
from services.base_model import BaseForwardModel, radiation_constant
from services.geometry import as_convex_polygon, fan_triangles, polygon_contains, triangle_exp_integral
from services.scene_parser import KeyValueDocument, parse_complex, parse_points


class PolygonSourceModel(BaseForwardModel):
    """Constant-density source supported on a convex polygon"""

    supports_incidence = False

    def __init__(self, scene: PolygonSourceScene):
        super().__init__(scene)
        self.vertices = as_convex_polygon(scene.vertices)

    @classmethod
    def get_scene_type(cls) -> str:
        return "polygon-source"

    @classmethod
    def get_required_keys(cls) -> List[str]:
        return ["vertices", "density", "normalization"]

    @classmethod
    def get_detection_priority(cls) -> int:
        return 2

    @classmethod
    def build_scene(cls, doc: KeyValueDocument) -> PolygonSourceScene:
        vertices = doc.convert("vertices", parse_points)
        if vertices is None:
            doc.require("vertices")
        density = doc.convert("density", parse_complex, default=1.0 + 0j)
        normalization = doc.convert(
            "normalization", lambda v: SourceNormalization(v.strip().lower()), default=SourceNormalization.STANDARD
        )
        doc.convert("vertices", as_convex_polygon)
        return PolygonSourceScene(vertices, density, normalization)

    def prefactor(self, k: float) -> complex:
        if self.scene.normalization is SourceNormalization.FUNDAMENTAL:
            return 0.25j
        return radiation_constant(k)

    def support_integral(self, q: np.ndarray) -> np.ndarray:
        """Integral of exp(-i q.z) over the polygon for wave vectors q of shape (..., 2)"""
        total = np.zeros(np.asarray(q).shape[:-1], dtype=complex)
        for v1, v2, v3 in fan_triangles(self.vertices):
            total = total + triangle_exp_integral(v1, v2, v3, q)
        return total

    def far_field_values(self, k: float, thetas: np.ndarray, incident_thetas: Optional[np.ndarray]) -> np.ndarray:
        values = self.prefactor(k) * self.scene.density * self.support_integral(k * unit_vectors(thetas))
        columns = 1 if incident_thetas is None else len(incident_thetas)
        return np.repeat(values[:, None], columns, axis=1)

    def contains(self, points) -> np.ndarray:
        return polygon_contains(self.vertices, points)
