import logging
import math
from typing import List, Optional

import numpy as np

from config_schemas import Flag
from errors import InputValidationError
from models import DiskScene, unit_vectors
from services.base_model import BaseForwardModel, parse_boundary
from services.scene_parser import KeyValueDocument, parse_point
from services.spectral import disk_ratio_table, far_field_constant

logger = logging.getLogger(__name__)

TAIL_BOUND = 1e-16
MAX_TRUNCATION = 150


class DiskModel(BaseForwardModel):
    """Sound-soft or impedance disk, far field from its Fourier series"""

    def __init__(self, scene: DiskScene, truncation: Optional[int] = None):
        super().__init__(scene)
        if truncation is not None and not 0 <= truncation <= MAX_TRUNCATION:
            raise InputValidationError(f"Truncation must lie in [0, {MAX_TRUNCATION}], got {truncation}")
        self.truncation = truncation

    @classmethod
    def get_scene_type(cls) -> str:
        return "disk"

    @classmethod
    def get_required_keys(cls) -> List[str]:
        return ["center", "radius"]

    @classmethod
    def build_scene(cls, doc: KeyValueDocument) -> DiskScene:
        center = doc.convert("center", parse_point, default=np.zeros(2))
        radius = doc.convert("radius", float)
        if radius is None:
            doc.require("radius")
        bc = parse_boundary(doc)
        return doc.convert("radius", lambda _: DiskScene(tuple(center), radius, bc))

    def resolve_truncation(self, k: float) -> int:
        """Smallest order past k*h whose coefficient is below the tail bound"""
        if self.truncation is not None:
            return self.truncation
        ratios = np.abs(disk_ratio_table(MAX_TRUNCATION, k, self.scene.radius, self.scene.bc))
        orders = np.arange(MAX_TRUNCATION + 1)
        small = np.flatnonzero((ratios < TAIL_BOUND) & (orders > k * self.scene.radius))
        if small.size:
            return int(small[0])
        self.flags.append(Flag.TRUNCATION_INSUFFICIENT)
        logger.warning(
            f"Disk series tail bound {TAIL_BOUND:g} not reached by N = {MAX_TRUNCATION} "
            f"(kh = {k * self.scene.radius:.4g})"
        )
        return MAX_TRUNCATION

    def far_field_values(self, k: float, thetas: np.ndarray, incident_thetas: Optional[np.ndarray]) -> np.ndarray:
        if incident_thetas is None:
            incident_thetas = np.zeros(1)
        n_max = self.resolve_truncation(k)
        ratios = disk_ratio_table(n_max, k, self.scene.radius, self.scene.bc)

        gap = thetas[:, None] - incident_thetas[None, :]
        series = np.full(gap.shape, ratios[0], dtype=complex)
        for n in range(1, n_max + 1):
            series += 2.0 * ratios[n] * np.cos(n * gap)

        center = np.asarray(self.scene.center)
        shift = np.exp(1j * k * (unit_vectors(incident_thetas) @ center))[None, :] * np.exp(
            -1j * k * (unit_vectors(thetas) @ center)
        )[:, None]
        return -far_field_constant(k) * series * shift

    def contains(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        cx, cy = self.scene.center
        return np.hypot(pts[..., 0] - cx, pts[..., 1] - cy) <= self.scene.radius


def disk_far_field(center, radius: float, bc, k: float, incident_theta: float, n_theta: int,
                   truncation: Optional[int] = None):
    """Far field of a single disk for one incident direction"""
    model = DiskModel(DiskScene(center, radius, bc), truncation)
    return model.far_field(k, n_theta, incident_theta)


def truncation_for(k: float, radius: float, bc) -> int:
    return DiskModel(DiskScene((0.0, 0.0), radius, bc)).resolve_truncation(k)


def asymptotic_ratio(n: int, k: float, radius: float) -> float:
    """Large-order modulus of J_n/H_n at kh.

    Leading term pi (kh/2)^(2n) / (n! (n-1)!) with the first correction of both series,
    exp(-(kh/2)^2 (1/(n+1) + 1/(n-1))).
    """
    if n < 2:
        raise InputValidationError(f"Asymptotic form needs n >= 2, got {n}")
    t = 0.5 * k * radius
    leading = math.log(math.pi) + 2 * n * math.log(t) - math.lgamma(n + 1) - math.lgamma(n)
    return math.exp(leading - t * t * (1.0 / (n + 1) + 1.0 / (n - 1)))
