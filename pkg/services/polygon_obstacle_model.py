"""Sound-soft convex polygon solved by the method of fundamental solutions.

The scattered field is a sum of point sources (i/4) H_0(k|x - y_j|) with charges y_j
inside the polygon; the charge strengths solve the boundary condition in the
least-squares sense at collocation points graded towards the corners.
"""
import logging
from typing import Dict, List, Optional

import numpy as np

from config_schemas import MFSConfig
from errors import ResidualError
from models import PolygonObstacleScene, unit_vectors
from services.base_model import BaseForwardModel, parse_boundary, radiation_constant
from services.geometry import as_convex_polygon, polygon_centroid, polygon_contains
from services.linalg import TruncatedSolver
from services.scene_parser import KeyValueDocument, parse_points
from services.specfun import hankel1_table

logger = logging.getLogger(__name__)


def graded_positions(count: int, exponent: float) -> np.ndarray:
    """Midpoint parameters on [0, 1] mapped by t^p / (t^p + (1 - t)^p)"""
    tau = (np.arange(count) + 0.5) / count
    head = tau ** exponent
    return head / (head + (1.0 - tau) ** exponent)


def split_count(total: int, parts: int) -> List[int]:
    base, extra = divmod(total, parts)
    return [base + (1 if i < extra else 0) for i in range(parts)]


class PolygonObstacleModel(BaseForwardModel):
    """Sound-soft convex polygon hit by plane waves exp(i k x.d)"""

    def __init__(self, scene: PolygonObstacleScene, mfs: Optional[MFSConfig] = None):
        super().__init__(scene)
        self.vertices = as_convex_polygon(scene.vertices)
        self.mfs = mfs or MFSConfig()
        self.centroid = polygon_centroid(self.vertices)
        self.collocation = self._boundary_points(self.mfs.n_collocation)
        self.charges = self._charge_points()
        self.check_points = self._check_points()
        self.last_residual: Optional[float] = None
        self._solvers: Dict[float, TruncatedSolver] = {}

    @classmethod
    def get_scene_type(cls) -> str:
        return "polygon-obstacle"

    @classmethod
    def get_required_keys(cls) -> List[str]:
        return ["vertices", "bc"]

    @classmethod
    def build_scene(cls, doc: KeyValueDocument) -> PolygonObstacleScene:
        vertices = doc.convert("vertices", parse_points)
        if vertices is None:
            doc.require("vertices")
        doc.convert("vertices", as_convex_polygon)
        bc = parse_boundary(doc)
        if "bc" in doc:
            return doc.convert("bc", lambda _: PolygonObstacleScene(vertices, bc))
        return PolygonObstacleScene(vertices, bc)

    def _edges(self):
        starts = self.vertices
        return starts, np.roll(starts, -1, axis=0) - starts

    def _boundary_points(self, total: int) -> np.ndarray:
        starts, edges = self._edges()
        chunks = []
        for start, edge, count in zip(starts, edges, split_count(total, len(starts))):
            tau = graded_positions(count, self.mfs.grading)
            chunks.append(start + tau[:, None] * edge)
        return np.vstack(chunks)

    def _charge_points(self) -> np.ndarray:
        """Graded boundary points pulled inwards, little near the corners"""
        starts, edges = self._edges()
        chunks = []
        for start, edge, count in zip(starts, edges, split_count(self.mfs.n_charges, len(starts))):
            tau = graded_positions(count, self.mfs.grading)
            on_edge = start + tau[:, None] * edge
            to_centroid = self.centroid - on_edge
            distance = np.hypot(to_centroid[:, 0], to_centroid[:, 1])
            to_vertex = np.minimum(tau, 1.0 - tau) * np.hypot(edge[0], edge[1])
            pull = np.minimum((1.0 - self.mfs.charge_scale) * distance, self.mfs.corner_offset * to_vertex)
            chunks.append(on_edge + (pull / distance)[:, None] * to_centroid)
        return np.vstack(chunks)

    def _check_points(self) -> np.ndarray:
        """Points equally spaced in arclength, offset by half a step"""
        starts, edges = self._edges()
        lengths = np.hypot(edges[:, 0], edges[:, 1])
        cumulative = np.concatenate([[0.0], np.cumsum(lengths)])
        arc = (np.arange(self.mfs.n_check) + 0.5) / self.mfs.n_check * cumulative[-1]
        edge_index = np.clip(np.searchsorted(cumulative, arc, side="right") - 1, 0, len(starts) - 1)
        local = (arc - cumulative[edge_index]) / lengths[edge_index]
        return starts[edge_index] + local[:, None] * edges[edge_index]

    def _kernel(self, k: float, targets: np.ndarray) -> np.ndarray:
        gaps = targets[:, None, :] - self.charges[None, :, :]
        distance = np.hypot(gaps[..., 0], gaps[..., 1])
        return 0.25j * hankel1_table(0, k * distance)[0]

    def _solver(self, k: float) -> TruncatedSolver:
        key = float(k)
        if key not in self._solvers:
            self._solvers[key] = TruncatedSolver(self._kernel(k, self.collocation), self.mfs.cutoff)
        return self._solvers[key]

    def solve_charges(self, k: float, incident_thetas: np.ndarray) -> np.ndarray:
        """Charge strengths (n_charges, n_incident), rejected when the boundary residual is too large"""
        directions = unit_vectors(incident_thetas)
        rhs = -np.exp(1j * k * (self.collocation @ directions.T))
        coeffs = self._solver(k).solve(rhs)

        incident = np.exp(1j * k * (self.check_points @ directions.T))
        total = self._kernel(k, self.check_points) @ coeffs + incident
        residual = float(np.max(np.abs(total)) / np.max(np.abs(incident)))
        self.last_residual = residual
        logger.info(f"MFS boundary residual {residual:.3e} over {len(incident_thetas)} incident waves")
        if residual > self.mfs.residual_tol:
            raise ResidualError(residual, self.mfs.residual_tol)
        return coeffs

    def far_field_values(self, k: float, thetas: np.ndarray, incident_thetas: Optional[np.ndarray]) -> np.ndarray:
        if incident_thetas is None:
            incident_thetas = np.zeros(1)
        coeffs = self.solve_charges(k, incident_thetas)
        radiation = np.exp(-1j * k * (unit_vectors(thetas) @ self.charges.T))
        return radiation_constant(k) * (radiation @ coeffs)

    def contains(self, points) -> np.ndarray:
        return polygon_contains(self.vertices, points)
