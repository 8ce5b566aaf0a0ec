"""Reconstruction from one far field: radius thresholds, disk intersection, summed indicator fields"""
import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from config_schemas import Flag, GridConfig, ImagingConfig
from errors import InputValidationError, WavenumberMismatchError
from models import (
    SENTINEL,
    ContrastResult,
    FarFieldPattern,
    IndicatorField,
    IndicatorProfile,
    SchemeOneResult,
    ThresholdResult,
)
from services.indicators import NEGLIGIBLE_EIGENVALUE, ClassicalMethod, classical_system, classical_values
from services.spectral import disk_eigenvalue_table, inner_products

logger = logging.getLogger(__name__)

SCHEME_TWO_METHODS = ("regularized", "esm")


def sampling_centers(cfg: ImagingConfig) -> np.ndarray:
    """z_n = R (cos 2 pi n/N_z, sin 2 pi n/N_z), n = 0..N_z-1"""
    angles = 2.0 * np.pi * np.arange(cfg.n_centers) / cfg.n_centers
    return cfg.R * np.stack([np.cos(angles), np.sin(angles)], axis=1)


def _check_wavenumber(u: FarFieldPattern, cfg: ImagingConfig) -> None:
    if not math.isclose(u.k, cfg.k, rel_tol=1e-12):
        raise WavenumberMismatchError(f"Data wavenumber {u.k} differs from configured k = {cfg.k}")


def folded_weights(u: FarFieldPattern, center: Sequence[float], truncation: int) -> np.ndarray:
    """|<u, phi_n>|^2 + |<u, phi_-n>|^2 for n = 0..N (n = 0 counted once)"""
    power = np.abs(inner_products(u, center, truncation)) ** 2
    weights = power[truncation:].copy()
    weights[1:] += power[:truncation][::-1]
    return weights


def reciprocal_series(lam: np.ndarray, weights: np.ndarray, alpha: float, method: str = "regularized"):
    """Reciprocal regularized sums for eigenvalue tables lam (N+1, ...) and folded weights (N+1,).

    Returns the values, capped at SENTINEL, and the number of dropped terms.
    """
    moduli = np.abs(lam)
    keep = moduli >= NEGLIGIBLE_EIGENVALUE
    w = weights.reshape((-1,) + (1,) * (lam.ndim - 1))
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if method == "esm":
            power = moduli ** 2
            terms = power / (power + alpha) ** 2 * w
        else:
            terms = moduli * w / np.abs(lam + alpha) ** 2
        total = np.sum(np.where(keep, terms, 0.0), axis=0)
        values = np.where(total > 0, 1.0 / total, SENTINEL)
    dropped = int(np.sum(~keep & (w > 0)))
    return np.minimum(values, SENTINEL), dropped


def indicator_profile(u: FarFieldPattern, center: Sequence[float], cfg: ImagingConfig) -> IndicatorProfile:
    """h -> regularized indicator at the sampling centre, over the radius grid"""
    _check_wavenumber(u, cfg)
    radii = cfg.radii()
    lam = disk_eigenvalue_table(cfg.truncation, cfg.k, radii, cfg.boundary)
    values, dropped = reciprocal_series(lam, folded_weights(u, center, cfg.truncation), cfg.alpha)

    flags = []
    if dropped:
        flags.append(Flag.DROPPED_TERMS)
        logger.warning(f"Dropped {dropped} indicator terms with vanishing eigenvalue")
    if np.any(values >= SENTINEL):
        flags.append(Flag.DEGENERATE_SIGNAL)
    return IndicatorProfile(center=(float(center[0]), float(center[1])), radii=radii, values=values, flags=flags)


def radius_threshold(u: FarFieldPattern, center: Sequence[float], cfg: ImagingConfig) -> ThresholdResult:
    """Smallest h_m with indicator >= delta; 2R flagged out of range when none qualifies"""
    profile = indicator_profile(u, center, cfg)
    hits = np.flatnonzero(profile.values >= cfg.delta)
    flags = list(profile.flags)
    if hits.size == 0:
        flags.append(Flag.OUT_OF_RANGE)
        logger.warning(
            f"No radius reaches delta = {cfg.delta:g} at centre ({center[0]:.3g}, {center[1]:.3g}); using 2R"
        )
        return ThresholdResult(radius=2.0 * cfg.R, flags=flags)
    return ThresholdResult(radius=float(profile.radii[hits[0]]), flags=flags)


def _merge_flags(groups) -> List[str]:
    merged: List[str] = []
    for flags in groups:
        for flag in flags:
            if flag not in merged:
                merged.append(flag)
    return merged


def scheme_one(u: FarFieldPattern, cfg: ImagingConfig) -> SchemeOneResult:
    """Intersection of the thresholded disks B_{h_n}(z_n), rasterized on the grid"""
    centers = sampling_centers(cfg)
    results = [radius_threshold(u, z, cfg) for z in centers]
    radii = np.array([r.radius for r in results])

    grid = cfg.resolved_grid()
    xs, ys = grid.xs(), grid.ys()
    gx, gy = np.meshgrid(xs, ys)
    mask = np.ones(gx.shape, dtype=bool)
    for z, h in zip(centers, radii):
        mask &= np.hypot(gx - z[0], gy - z[1]) <= h

    logger.info(f"Scheme one: {cfg.n_centers} centres, radii in [{radii.min():.4g}, {radii.max():.4g}]")
    return SchemeOneResult(
        centers=centers, radii=radii, xs=xs, ys=ys, mask=mask, flags=_merge_flags(r.flags for r in results)
    )


def scheme_two_fields(
    u: FarFieldPattern, cfg: ImagingConfig, alphas: Sequence[float], method: str = "regularized"
) -> List[IndicatorField]:
    """Summed indicator fields I(x) = sum_n W(z_n, |x - z_n|), one per alpha.

    Radii below 2R/M are clamped to 2R/M. Per-pixel contributions are sorted before
    summation, so the result does not depend on the order of the centres.
    """
    _check_wavenumber(u, cfg)
    if method not in SCHEME_TWO_METHODS:
        raise InputValidationError(f"Unknown scheme two method '{method}'")
    if any(not a > 0 for a in alphas):
        raise InputValidationError("Every alpha must be positive")

    grid = cfg.resolved_grid()
    xs, ys = grid.xs(), grid.ys()
    gx, gy = np.meshgrid(xs, ys)
    pixels = np.stack([gx.ravel(), gy.ravel()], axis=1)
    centers = sampling_centers(cfg)

    contributions = np.empty((len(alphas), len(centers), len(pixels)))
    dropped = 0
    for i, z in enumerate(centers):
        distance = np.maximum(np.hypot(pixels[:, 0] - z[0], pixels[:, 1] - z[1]), cfg.h_floor)
        lam = disk_eigenvalue_table(cfg.truncation, cfg.k, distance, cfg.boundary)
        weights = folded_weights(u, z, cfg.truncation)
        for a, alpha in enumerate(alphas):
            contributions[a, i], count = reciprocal_series(lam, weights, alpha, method)
            dropped += count

    fields = []
    for a, alpha in enumerate(alphas):
        flags = []
        if dropped:
            flags.append(Flag.DROPPED_TERMS)
        if np.any(contributions[a] >= SENTINEL):
            flags.append(Flag.DEGENERATE_SIGNAL)
        total = np.minimum(np.sort(contributions[a], axis=0).sum(axis=0), SENTINEL)
        fields.append(IndicatorField(xs=xs, ys=ys, values=total.reshape(gx.shape), flags=flags))
        logger.info(f"Scheme two ({method}, alpha={alpha:g}): field range [{total.min():.4e}, {total.max():.4e}]")
    if dropped:
        logger.warning(f"Dropped {dropped} indicator terms with vanishing eigenvalue")
    return fields


def scheme_two(u: FarFieldPattern, cfg: ImagingConfig, method: str = "regularized") -> IndicatorField:
    return scheme_two_fields(u, cfg, [cfg.alpha], method)[0]


def normalize_field(field: IndicatorField) -> IndicatorField:
    """Affine map of the non-sentinel values onto [0, 1]; sentinel values become 1"""
    values = field.values
    regular = values < SENTINEL
    if np.count_nonzero(regular) == 0 or np.ptp(values[regular]) == 0:
        raise InputValidationError("Cannot normalize a constant field")
    low, high = values[regular].min(), values[regular].max()
    scaled = np.where(regular, (values - low) / (high - low), 1.0)
    return IndicatorField(xs=field.xs, ys=field.ys, values=np.clip(scaled, 0.0, 1.0), flags=list(field.flags))


def interior_exterior_contrast(field: IndicatorField, model) -> ContrastResult:
    """Mean of the normalized field inside and outside the scene's support"""
    normalized = normalize_field(field).values
    inside = np.asarray(model.contains(field.points), dtype=bool)
    if not inside.any() or inside.all():
        raise InputValidationError("Contrast needs grid points both inside and outside the support")
    return ContrastResult(
        interior_mean=float(normalized[inside].mean()),
        exterior_mean=float(normalized[~inside].mean()),
    )


def alpha_sweep(
    u: FarFieldPattern, cfg: ImagingConfig, alphas: Sequence[float], model, method: str = "regularized"
) -> List[Tuple[float, ContrastResult]]:
    """Interior/exterior contrast of the scheme two field for each alpha"""
    fields = scheme_two_fields(u, cfg, alphas, method)
    return [(float(alpha), interior_exterior_contrast(f, model)) for alpha, f in zip(alphas, fields)]


def classical_field(
    F, k: float, grid: GridConfig, method=ClassicalMethod.QUARTER_POWER, system=None
) -> IndicatorField:
    """Multi-wave indicator on the grid from a multistatic matrix"""
    if system is None:
        system = classical_system(F, k, method)
    xs, ys = grid.xs(), grid.ys()
    gx, gy = np.meshgrid(xs, ys)
    values = classical_values(system, np.stack([gx, gy], axis=-1))
    flags = [Flag.DEGENERATE_SIGNAL] if np.any(values >= SENTINEL) else []
    return IndicatorField(xs=xs, ys=ys, values=values, flags=flags)


def profile_center(cfg: ImagingConfig, center: Optional[Sequence[float]] = None) -> Tuple[float, float]:
    """Explicit centre, or the first sampling centre (R, 0)"""
    if center is None:
        return (cfg.R, 0.0)
    if len(center) != 2:
        raise InputValidationError(f"Centre needs two coordinates, got {len(center)}")
    return (float(center[0]), float(center[1]))
