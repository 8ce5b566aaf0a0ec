"""Analytic far-field eigensystems of test disks and data inner products against them"""
import cmath
import logging
import math
from typing import Sequence, Union

import numpy as np

from config_schemas import Flag
from errors import InputValidationError
from models import BoundaryCondition, Direction, DiskSpectrum, FarFieldPattern, TestDisk
from services.specfun import bessel_j_table, bessel_jy_table, table_derivative

logger = logging.getLogger(__name__)

DIRICHLET_PROXIMITY = 1e-12
ALIASING_MARGIN = 16


def far_field_constant(k: float) -> complex:
    """C = sqrt(2/(k pi)) exp(-i pi/4)"""
    return math.sqrt(2.0 / (k * math.pi)) * cmath.exp(-0.25j * math.pi)


def _check_positive(name: str, value) -> None:
    if not np.all(np.asarray(value) > 0):
        raise InputValidationError(f"{name} must be positive")


def disk_ratio_table(n_max: int, k: float, h, bc: BoundaryCondition) -> np.ndarray:
    """Scattering coefficients r_n, n = 0..n_max, for disks of radius h (array allowed).

    Sound-soft r_n = J_n/H_n; impedance r_n = (kJ'_n + eta J_n)/(kH'_n + eta H_n), all at kh.
    Coefficients whose denominator overflows are exactly zero.
    """
    _check_positive("k", k)
    _check_positive("Disk radius", h)
    t = k * np.asarray(h, dtype=float)
    j, y = bessel_jy_table(n_max + 1, t)
    with np.errstate(invalid="ignore", over="ignore"):
        hankel = j + 1j * y
        if bc.is_impedance:
            numerator = k * table_derivative(j) + bc.eta * j[:-1]
            denominator = k * table_derivative(hankel) + bc.eta * hankel[:-1]
        else:
            numerator = j[:-1]
            denominator = hankel[:-1]

    finite = np.isfinite(denominator) & (denominator != 0)
    safe = np.where(finite, denominator, 1.0)
    return np.where(finite, numerator / safe, 0.0)


def disk_eigenvalue_table(n_max: int, k: float, h, bc: BoundaryCondition) -> np.ndarray:
    """lambda_n = -2 pi C r_n for n = 0..n_max; lambda_{-n} = lambda_n"""
    return -2.0 * math.pi * far_field_constant(k) * disk_ratio_table(n_max, k, h, bc)


def dirichlet_hits(n_max: int, t: float) -> np.ndarray:
    """Orders n <= n_max with J_n(t) = 0 up to DIRICHLET_PROXIMITY relative to its neighbours"""
    j = np.abs(bessel_j_table(n_max + 1, t))
    neighbours = np.concatenate([[j[1]], j[:-2]]) + j[1:]
    return np.flatnonzero(j[:-1] < DIRICHLET_PROXIMITY * neighbours)


def disk_eigenvalue(n: int, k: float, h: float, bc: BoundaryCondition) -> complex:
    m = abs(int(n))
    value = complex(disk_eigenvalue_table(m, k, h, bc)[m])
    if not bc.is_impedance and m in dirichlet_hits(m, k * h):
        logger.warning(f"k^2 is close to a Dirichlet eigenvalue of the disk: J_{m}({k * h:.6g}) ~ 0")
    return value


def eigenfunction_value(n: int, z: Sequence[float], k: float, theta_hat: Union[Direction, float]) -> complex:
    """exp(i n theta) exp(-i k z.x(theta))"""
    direction = Direction.coerce(theta_hat)
    x_hat = direction.vector
    x_dot = z[0] * x_hat[0] + z[1] * x_hat[1]
    return cmath.exp(1j * (n * direction.theta - k * x_dot))


def eigenfunction_samples(n: int, z: Sequence[float], k: float, n_theta: int) -> np.ndarray:
    thetas = 2.0 * np.pi * np.arange(n_theta) / n_theta
    x_dot = z[0] * np.cos(thetas) + z[1] * np.sin(thetas)
    return np.exp(1j * (n * thetas - k * x_dot))


def aliasing_limit(n: int, k: float, z: Sequence[float]) -> int:
    """Smallest grid size resolving <v, phi_n> for a disk centred at z"""
    return 2 * (abs(n) + int(math.ceil(k * math.hypot(z[0], z[1])))) + ALIASING_MARGIN


def inner_products(v: FarFieldPattern, z: Sequence[float], n_max: int) -> np.ndarray:
    """<v, phi_n^z> for n = -n_max..n_max by trapezoidal quadrature.

    (2 pi/n_theta) sum_j v_j exp(i k z.x_j) exp(-i n theta_j) is one FFT of the
    demodulated samples.
    """
    n_theta = v.n_theta
    if n_theta < aliasing_limit(n_max, v.k, z):
        logger.warning(
            f"Inner products up to order {n_max} at |z|={math.hypot(z[0], z[1]):.3g} are aliased: "
            f"n_theta={n_theta} < {aliasing_limit(n_max, v.k, z)}"
        )
    phase = np.exp(1j * v.k * (v.directions @ np.asarray(z, dtype=float)))
    spectrum = np.fft.fft(v.values * phase) * (2.0 * np.pi / n_theta)
    orders = np.arange(-n_max, n_max + 1)
    return spectrum[orders % n_theta]


def inner_product(v: FarFieldPattern, n: int, z: Sequence[float]) -> complex:
    return complex(inner_products(v, z, abs(n))[n + abs(n)])


def spectral_system(disk: TestDisk, k: float, truncation: int) -> DiskSpectrum:
    """Eigenvalues lambda_n, |n| <= truncation, of the test disk"""
    if truncation < 0:
        raise InputValidationError(f"Truncation must be non-negative, got {truncation}")
    half = disk_eigenvalue_table(truncation, k, disk.radius, disk.bc)
    eigenvalues = np.concatenate([half[:0:-1], half])

    flags = []
    if not disk.bc.is_impedance:
        hits = dirichlet_hits(truncation, k * disk.radius)
        if hits.size:
            flags.append(Flag.DIRICHLET_EIGENVALUE)
            logger.warning(
                f"Test disk radius {disk.radius:.6g} is near a Dirichlet eigenvalue (orders {hits.tolist()})"
            )
    return DiskSpectrum(k=k, disk=disk, truncation=truncation, eigenvalues=eigenvalues, flags=flags)
