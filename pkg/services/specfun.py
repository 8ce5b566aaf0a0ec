"""Cylinder functions J_n, Y_n and H_n^(1) of integer order and real argument.

Every Bessel value in the package comes from the two table routines below; `cylinder`
is the scalar view used for spot checks and by the command line.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from errors import DomainError, OrderOverflowError

logger = logging.getLogger(__name__)

MAX_ORDER = 200
EULER_GAMMA = 0.57721566490153286061

_OVERFLOW_GUARD = 1e200
_RESCALE = 1e-200


class CylinderKind(str, Enum):
    BESSEL_J = "BesselJ"
    BESSEL_Y = "BesselY"
    HANKEL1 = "Hankel1"


@dataclass(frozen=True)
class CylinderValue:
    value: complex
    derivative: Optional[complex] = None


def miller_start_order(n_max: int, t_max: float) -> int:
    """Even starting order for the backward recurrence"""
    scale = max(float(n_max), float(t_max), 1.0)
    start = max(n_max, int(math.ceil(t_max))) + 20 + int(math.ceil(math.sqrt(160.0 * scale)))
    return start + (start % 2)


def _check_order(n_max: int) -> None:
    if n_max < 0:
        raise OrderOverflowError(f"Order table size must be non-negative, got {n_max}")
    # one order above the supported range is needed for derivatives
    if n_max > MAX_ORDER + 1:
        raise OrderOverflowError(f"Order {n_max} exceeds supported range |n| <= {MAX_ORDER}")


def _as_arguments(t) -> np.ndarray:
    arr = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("Cylinder function argument must be finite")
    if np.any(arr < 0):
        raise DomainError("Cylinder function argument must be non-negative")
    return arr


def _miller_all_orders(t: np.ndarray, n_max: int) -> np.ndarray:
    """J_0..J_start at each positive t (flat array), normalized by J_0 + 2*sum(J_2m) = 1"""
    start = miller_start_order(n_max, float(t.max()))
    vals = np.zeros((start + 2, t.size))
    vals[start] = 1.0
    two_over_t = 2.0 / t

    for n in range(start, 0, -1):
        vals[n - 1] = n * two_over_t * vals[n] - vals[n + 1]
        big = np.abs(vals[n - 1]) > _OVERFLOW_GUARD
        if big.any():
            vals[n - 1:, big] *= _RESCALE

    norm = vals[0] + 2.0 * vals[2::2].sum(axis=0)
    return vals[:start + 1] / norm


def bessel_j_table(n_max: int, t) -> np.ndarray:
    """J_0..J_{n_max} at every argument; shape (n_max + 1,) + shape(t)"""
    _check_order(n_max)
    arr = _as_arguments(t)
    flat = arr.ravel()
    out = np.zeros((n_max + 1, flat.size))

    zero = flat == 0.0
    out[0, zero] = 1.0
    positive = ~zero
    if positive.any():
        out[:, positive] = _miller_all_orders(flat[positive], n_max)[:n_max + 1]

    return out.reshape((n_max + 1,) + arr.shape)


def bessel_jy_table(n_max: int, t) -> Tuple[np.ndarray, np.ndarray]:
    """J and Y for orders 0..n_max at every positive argument.

    Y_0 and Y_1 come from the Neumann series over the normalized J table, higher
    orders from forward recurrence (stable for Y). Orders whose Y overflows are -inf.
    """
    _check_order(n_max)
    arr = _as_arguments(t)
    if np.any(arr <= 0):
        raise DomainError("Y_n and H_n^(1) require a positive argument")
    shape = (n_max + 1,) + arr.shape
    flat = arr.ravel()
    if flat.size == 0:
        return np.zeros(shape), np.zeros(shape)

    full = _miller_all_orders(flat, n_max)
    last = full.shape[0] - 1
    log_term = np.log(0.5 * flat) + EULER_GAMMA

    m_even = np.arange(1, last // 2 + 1)
    weights = (-1.0) ** m_even / m_even
    even_sum = (weights[:, None] * full[2 * m_even]).sum(axis=0)
    y0 = (2.0 / math.pi) * (log_term * full[0] - 2.0 * even_sum)

    m_odd = np.arange(1, (last - 1) // 2 + 1)
    weights = (-1.0) ** m_odd / m_odd
    odd_sum = (weights[:, None] * (full[2 * m_odd - 1] - full[2 * m_odd + 1])).sum(axis=0)
    y1 = (2.0 / math.pi) * (-full[0] / flat + log_term * full[1] + odd_sum)

    y = np.empty((n_max + 1, flat.size))
    y[0] = y0
    if n_max >= 1:
        y[1] = y1
    two_over_t = 2.0 / flat
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(1, n_max):
            step = n * two_over_t * y[n] - y[n - 1]
            y[n + 1] = np.where(np.isinf(y[n]), y[n], step)

    return full[:n_max + 1].reshape(shape), y.reshape(shape)


def hankel1_table(n_max: int, t) -> np.ndarray:
    j, y = bessel_jy_table(n_max, t)
    return j + 1j * y


def table_derivative(table: np.ndarray) -> np.ndarray:
    """C'_n = (C_{n-1} - C_{n+1}) / 2 for orders 0..n_max-1 of an order table"""
    deriv = np.empty_like(table[:-1])
    with np.errstate(invalid="ignore"):
        deriv[0] = -table[1]
        deriv[1:] = 0.5 * (table[:-2] - table[2:])
    return deriv


def _bessel_j_series(n: int, t: float) -> float:
    if t == 0.0:
        return 1.0 if n == 0 else 0.0
    half = 0.5 * t
    term = math.exp(n * math.log(half) - math.lgamma(n + 1))
    total = term
    step = -half * half
    m = 0
    while m < 500:
        m += 1
        term *= step / (m * (m + n))
        total += term
        if abs(term) <= 1e-17 * abs(total):
            break
    return total


def _scalar_j(order: int, t: float) -> float:
    # cancellation in the series stays below a factor e^2 in this region
    if t * t <= 4.0 * (order + 1):
        return _bessel_j_series(order, t)
    return float(bessel_j_table(order, t)[order])


def cylinder(kind, n: int, t: float, want_derivative: bool = False) -> CylinderValue:
    """J_n, Y_n or H_n^(1) at t, optionally with the derivative in t"""
    kind = CylinderKind(kind)
    n = int(n)
    if abs(n) > MAX_ORDER:
        raise OrderOverflowError(f"Order {n} exceeds supported range |n| <= {MAX_ORDER}")
    t = float(t)
    if not math.isfinite(t) or t < 0:
        raise DomainError(f"Argument must be a finite non-negative real, got {t}")
    if kind is not CylinderKind.BESSEL_J and t <= 0:
        raise DomainError(f"{kind.value} requires t > 0, got {t}")

    m = abs(n)
    value = 0.0
    derivative = 0.0

    if kind is not CylinderKind.BESSEL_Y:
        value = _scalar_j(m, t)
        if want_derivative:
            if m == 0:
                derivative = -_scalar_j(1, t)
            else:
                derivative = 0.5 * (_scalar_j(m - 1, t) - _scalar_j(m + 1, t))

    if kind is not CylinderKind.BESSEL_J:
        _, y = bessel_jy_table(m + 1, t)
        y_value = float(y[m])
        if m == 0:
            y_derivative = -float(y[1])
        else:
            y_derivative = 0.5 * (float(y[m - 1]) - float(y[m + 1]))
        if kind is CylinderKind.BESSEL_Y:
            value, derivative = y_value, y_derivative
        else:
            value = complex(value, y_value)
            derivative = complex(derivative, y_derivative)

    if n < 0 and m % 2 == 1:
        value = -value
        derivative = -derivative

    return CylinderValue(
        value=complex(value),
        derivative=complex(derivative) if want_derivative else None,
    )
