"""Indicator functionals: one-wave series, regularized and ESM forms, classical multi-wave"""
import logging
import math
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from config_schemas import Flag
from errors import DimensionError, InputValidationError, WavenumberMismatchError
from models import (
    SENTINEL,
    BoundaryCondition,
    ClassicalSystem,
    DiskSpectrum,
    FarFieldPattern,
    IndicatorValue,
    RegularizationParams,
    unit_vectors,
)
from services.linalg import hermitian_eigen, matrix_abs, svd
from services.spectral import disk_eigenvalue_table, inner_products
from services.specfun import bessel_j_table

logger = logging.getLogger(__name__)

NEGLIGIBLE_EIGENVALUE = 1e-300
CLASSICAL_CUTOFF = 1e-14


class ClassicalMethod(str, Enum):
    QUARTER_POWER = "quarterpower"
    FSHARP = "fsharp"


def _check_compatible(u: FarFieldPattern, spec: DiskSpectrum) -> None:
    if not math.isclose(u.k, spec.k, rel_tol=1e-12):
        raise WavenumberMismatchError(f"Data wavenumber {u.k} differs from test-disk wavenumber {spec.k}")


def _check_alpha(alpha: float) -> None:
    if not alpha > 0:
        raise InputValidationError(f"alpha must be positive, got {alpha}")


def spectral_coefficients(u: FarFieldPattern, spec: DiskSpectrum) -> np.ndarray:
    """|<u, phi_j>|^2 for j = -N..N against the spectrum's test disk"""
    _check_compatible(u, spec)
    return np.abs(inner_products(u, spec.disk.center, spec.truncation)) ** 2


def one_wave_series(u: FarFieldPattern, spec: DiskSpectrum, truncation: Optional[int] = None) -> float:
    """Partial sum of |<u, phi_j>|^2/|lambda_j| over |j| <= truncation"""
    limit = spec.truncation if truncation is None else min(truncation, spec.truncation)
    weights = spectral_coefficients(u, spec)
    moduli = np.abs(spec.eigenvalues)
    in_range = np.abs(spec.orders) <= limit
    keep = in_range & (moduli >= NEGLIGIBLE_EIGENVALUE)
    dropped = int(np.sum(in_range & ~keep))
    if dropped:
        logger.warning(f"Dropped {dropped} series terms with vanishing eigenvalue")
    return float(np.sum(weights[keep] / moduli[keep]))


def series_growth_ratio(u: FarFieldPattern, spec: DiskSpectrum) -> float:
    """W_N / W_{N/2}: near 1 for a convergent series, large when it blows up"""
    full = one_wave_series(u, spec)
    half = one_wave_series(u, spec, spec.truncation // 2)
    if half == 0.0:
        return math.inf if full > 0 else 1.0
    return full / half


def regularized_indicator(u: FarFieldPattern, spec: DiskSpectrum, reg: RegularizationParams) -> IndicatorValue:
    """1 / sum |lambda_j| |<u, phi_j>|^2 / |lambda_j + alpha|^2 over |j| <= N"""
    _check_alpha(reg.alpha)
    weights = spectral_coefficients(u, spec)
    orders = np.abs(spec.orders)
    lam = spec.eigenvalues
    moduli = np.abs(lam)
    flags = list(spec.flags)

    in_range = orders <= reg.truncation
    keep = in_range & (moduli >= NEGLIGIBLE_EIGENVALUE)
    dropped = int(np.sum(in_range & ~keep))
    if dropped:
        flags.append(Flag.DROPPED_TERMS)
        logger.warning(f"Dropped {dropped} indicator terms with vanishing eigenvalue")

    total = float(np.sum(moduli[keep] * weights[keep] / np.abs(lam[keep] + reg.alpha) ** 2))
    raw = float(np.sum(weights[keep] / moduli[keep]))
    if total > 0 and 1.0 / total < SENTINEL:
        value = 1.0 / total
    else:
        value = SENTINEL
        flags.append(Flag.DEGENERATE_SIGNAL)
    return IndicatorValue(value=value, raw_series=raw, terms_used=int(keep.sum()), flags=flags)


def esm_indicator(u: FarFieldPattern, spec: DiskSpectrum, alpha: float) -> float:
    """Squared norm of the Tikhonov solution of the far-field equation for the test disk"""
    _check_alpha(alpha)
    weights = spectral_coefficients(u, spec)
    power = np.abs(spec.eigenvalues) ** 2
    return float(np.sum(power / (power + alpha) ** 2 * weights))


def esm_bound_constant(spec: DiskSpectrum, alpha: float) -> float:
    """max_j |lambda_j + alpha|^2 |lambda_j| / (|lambda_j|^2 + alpha)^2 over retained modes"""
    _check_alpha(alpha)
    lam = spec.eigenvalues
    moduli = np.abs(lam)
    keep = moduli >= NEGLIGIBLE_EIGENVALUE
    if not keep.any():
        return 0.0
    ratio = np.abs(lam[keep] + alpha) ** 2 * moduli[keep] / (moduli[keep] ** 2 + alpha) ** 2
    return float(ratio.max())


def classical_system(F, k: float, method=ClassicalMethod.QUARTER_POWER) -> ClassicalSystem:
    """Spectral data of a multistatic matrix for the Picard-type indicators.

    QuarterPower uses the singular system of F, FSharp the eigensystem of |Re F| + |Im F|.
    Values below 1e-14 of the largest are dropped.
    """
    method = ClassicalMethod(method)
    mat = np.asarray(F, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise DimensionError(f"Multistatic matrix must be square, got shape {mat.shape}")

    if method is ClassicalMethod.QUARTER_POWER:
        system = svd(mat)
        vectors, values = system.v, system.s
    else:
        real_part = 0.5 * (mat + mat.conj().T)
        imag_part = (mat - mat.conj().T) / 2j
        eig = hermitian_eigen(matrix_abs(real_part) + matrix_abs(imag_part))
        vectors, values = eig.eigenvectors, eig.eigenvalues

    top = float(np.max(np.abs(values))) if values.size else 0.0
    keep = values > CLASSICAL_CUTOFF * top if top > 0 else np.zeros(values.shape, dtype=bool)
    dropped = int(values.size - keep.sum())
    if dropped:
        logger.info(f"Classical indicator: dropped {dropped} of {values.size} spectral terms")
    return ClassicalSystem(
        k=k,
        vectors=vectors[:, keep],
        values=values[keep],
        quadrature_weight=2.0 * math.pi / mat.shape[0],
        dropped=dropped,
        method=method.value,
    )


def classical_values(system: ClassicalSystem, points) -> np.ndarray:
    """Indicator at an array of sampling points (..., 2)"""
    pts = np.asarray(points, dtype=float)
    n_theta = system.vectors.shape[0]
    dirs = unit_vectors(2.0 * np.pi * np.arange(n_theta) / n_theta)
    flat = pts.reshape(-1, 2)
    plane_waves = np.exp(-1j * system.k * (dirs @ flat.T))
    coeffs = system.vectors.conj().T @ plane_waves
    series = system.quadrature_weight * np.sum(np.abs(coeffs) ** 2 / system.values[:, None], axis=0)
    with np.errstate(divide="ignore"):
        values = np.where(series > 0, 1.0 / series, SENTINEL)
    return np.minimum(values, SENTINEL).reshape(pts.shape[:-1])


def classical_indicator(
    F,
    z: Sequence[float],
    k: float,
    method=ClassicalMethod.QUARTER_POWER,
    system: Optional[ClassicalSystem] = None,
) -> float:
    """Reciprocal Picard sum of the test function exp(-i k x.z) against the spectrum of F"""
    if system is None:
        system = classical_system(F, k, method)
    return float(classical_values(system, np.asarray(z, dtype=float)))


def disk_picard_series(
    z: Sequence[float],
    k: float,
    radius: float,
    bc: BoundaryCondition,
    method=ClassicalMethod.QUARTER_POWER,
    truncation: int = 80,
) -> float:
    """Exact classical indicator of a centred disk from its analytic spectrum"""
    method = ClassicalMethod(method)
    lam = disk_eigenvalue_table(truncation, k, radius, bc)
    if method is ClassicalMethod.QUARTER_POWER:
        mu = np.abs(lam)
    else:
        mu = np.abs(lam.real) + np.abs(lam.imag)
    distance = math.hypot(z[0], z[1])
    j = bessel_j_table(truncation, k * distance)
    terms = 2.0 * math.pi * j ** 2
    keep = mu > CLASSICAL_CUTOFF * mu.max()
    multiplicity = np.where(np.arange(truncation + 1) == 0, 1.0, 2.0)
    series = float(np.sum(multiplicity[keep] * terms[keep] / mu[keep]))
    return 1.0 / series if series > 0 else SENTINEL


def principal_part(z: Sequence[float], k: float, radius: float) -> float:
    """Leading logarithmic term -sqrt(k/(8 pi^3)) ln(1 - |z|^2/R^2) of the reciprocal series inside the disk"""
    ratio = (z[0] ** 2 + z[1] ** 2) / radius ** 2
    if ratio >= 1.0:
        raise InputValidationError("Principal part is defined only inside the disk")
    return -math.sqrt(k / (8.0 * math.pi ** 3)) * math.log1p(-ratio)
