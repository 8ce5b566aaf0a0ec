"""Dense complex linear algebra built on Jacobi rotations"""
import logging
from dataclasses import dataclass
from typing import List, NamedTuple, Tuple

import numpy as np

from errors import (
    ConvergenceError,
    DimensionError,
    InputValidationError,
    NotHermitianError,
)

logger = logging.getLogger(__name__)

EIGEN_TOLERANCE = 1e-14
HERMITIAN_TOLERANCE = 1e-8
MAX_SWEEPS = 100
SMALL_SINGULAR = 1e-12
# irrational weight so eigenvalues of the pencil do not collide
PENCIL_WEIGHT = 0.6180339887498949


@dataclass
class HermitianEigen:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int = 0


class SingularSystem(NamedTuple):
    u: np.ndarray
    s: np.ndarray
    v: np.ndarray


def as_complex_matrix(a) -> np.ndarray:
    """Copy input into a finite 2D complex array"""
    mat = np.array(a, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] == 0 or mat.shape[1] == 0:
        raise DimensionError(f"Expected a non-empty 2D matrix, got shape {mat.shape}")
    if not np.all(np.isfinite(mat)):
        raise InputValidationError("Matrix entries must be finite")
    return mat


def round_robin_pairs(n: int) -> List[Tuple[np.ndarray, np.ndarray]]:
    """Rounds of disjoint index pairs; one pass covers every pair exactly once"""
    players = list(range(n + (n % 2)))
    size = len(players)
    rounds = []
    for _ in range(size - 1):
        p = np.array(players[:size // 2])
        q = np.array(players[size - 1:size // 2 - 1:-1])
        keep = (p < n) & (q < n)
        lo = np.minimum(p[keep], q[keep])
        hi = np.maximum(p[keep], q[keep])
        rounds.append((lo, hi))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _rotation(app, aqq, apq):
    """Cosine, sine and phase of the rotations zeroing apq in a batch of 2x2 Hermitian blocks"""
    mag = np.abs(apq)
    active = mag > 0
    safe = np.where(active, mag, 1.0)
    phase = np.where(active, apq / safe, 1.0)
    with np.errstate(over="ignore"):
        tau = (aqq - app) / (2.0 * safe)
        t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
    t = np.where(active, t, 0.0)
    c = 1.0 / np.sqrt(1.0 + t * t)
    return c, t * c, phase


def _off_diagonal_norm(h: np.ndarray) -> float:
    diag = np.diag(h)
    return float(np.sqrt(max(np.sum(np.abs(h) ** 2) - np.sum(np.abs(diag) ** 2), 0.0)))


def _rotate_pairs(h: np.ndarray, v: np.ndarray, p: np.ndarray, q: np.ndarray) -> None:
    c, s, phase = _rotation(h[p, p].real, h[q, q].real, h[p, q])
    back = phase.conj()

    col_p = h[:, p]
    col_q = h[:, q]
    h[:, p] = c * col_p - (s * back) * col_q
    h[:, q] = s * col_p + (c * back) * col_q

    row_p = h[p, :]
    row_q = h[q, :]
    h[p, :] = c[:, None] * row_p - (s * phase)[:, None] * row_q
    h[q, :] = s[:, None] * row_p + (c * phase)[:, None] * row_q
    h[p, q] = 0.0
    h[q, p] = 0.0

    vec_p = v[:, p]
    vec_q = v[:, q]
    v[:, p] = c * vec_p - (s * back) * vec_q
    v[:, q] = s * vec_p + (c * back) * vec_q


def hermitian_eigen(a, tol: float = EIGEN_TOLERANCE, max_sweeps: int = MAX_SWEEPS) -> HermitianEigen:
    """Cyclic complex Jacobi eigensolver; eigenvalues sorted descending.

    Rotations of one round-robin round touch disjoint index pairs, so they are applied
    together as array operations.
    """
    h = as_complex_matrix(a)
    n, m = h.shape
    if n != m:
        raise DimensionError(f"Matrix must be square, got {n}x{m}")

    scale = float(np.abs(h).max())
    if scale == 0.0:
        return HermitianEigen(np.zeros(n), np.eye(n, dtype=complex), 0)
    asymmetry = float(np.abs(h - h.conj().T).max())
    if asymmetry > HERMITIAN_TOLERANCE * scale:
        raise NotHermitianError(
            f"Matrix is not Hermitian: max|A - A*| = {asymmetry:.3e} vs max|A| = {scale:.3e}"
        )
    h = 0.5 * (h + h.conj().T)

    v = np.eye(n, dtype=complex)
    target = tol * float(np.linalg.norm(h))
    rounds = round_robin_pairs(n)
    sweeps = 0
    while _off_diagonal_norm(h) >= target:
        if sweeps == max_sweeps:
            raise ConvergenceError(
                f"Jacobi eigensolver did not converge in {max_sweeps} sweeps "
                f"(off-diagonal {_off_diagonal_norm(h):.3e}, target {target:.3e})"
            )
        sweeps += 1
        for p, q in rounds:
            if p.size:
                _rotate_pairs(h, v, p, q)

    logger.info(f"Jacobi eigensolver: n={n}, sweeps={sweeps}")
    eigenvalues = np.real(np.diag(h)).copy()
    order = np.argsort(-eigenvalues, kind="stable")
    return HermitianEigen(eigenvalues[order], v[:, order], sweeps)


def _complete_orthonormal(u: np.ndarray, filled: np.ndarray) -> np.ndarray:
    """Replace unfilled columns of u by unit vectors orthogonal to the rest"""
    missing = np.flatnonzero(~filled)
    if missing.size == 0:
        return u
    rows = u.shape[0]
    basis = u[:, filled]
    candidates = iter(range(rows))
    for j in missing:
        while True:
            e = np.zeros(rows, dtype=complex)
            e[next(candidates)] = 1.0
            for _ in range(2):
                e -= basis @ (basis.conj().T @ e)
            norm = np.linalg.norm(e)
            if norm > 1e-8:
                break
        u[:, j] = e / norm
        basis = np.column_stack([basis, u[:, j]])
    return u


def svd(a, tol: float = None, max_sweeps: int = MAX_SWEEPS) -> SingularSystem:
    """Singular value decomposition A = U diag(s) V* by one-sided Jacobi on the columns of A.

    Each rotation is the Hermitian Jacobi rotation of the Gram matrix A*A, applied
    without forming A*A. Singular values come out descending; left vectors of
    singular values below 1e-12 * s_max are rebuilt by orthogonal completion.
    """
    mat = as_complex_matrix(a)
    rows, cols = mat.shape
    if rows < cols:
        flipped = svd(mat.conj().T, tol, max_sweeps)
        return SingularSystem(flipped.v, flipped.s, flipped.u)

    if tol is None:
        # rounding floor of a column inner product grows like sqrt(rows)
        tol = 8.0 * np.finfo(float).eps * np.sqrt(max(rows, 4))

    work = mat.copy()
    v = np.eye(cols, dtype=complex)
    rounds = round_robin_pairs(cols)
    sweeps = 0
    converged = cols == 1
    while not converged:
        if sweeps == max_sweeps:
            raise ConvergenceError(f"One-sided Jacobi SVD did not converge in {max_sweeps} sweeps")
        sweeps += 1
        rotated = 0
        for p, q in rounds:
            if p.size == 0:
                continue
            col_p = work[:, p]
            col_q = work[:, q]
            alpha = np.einsum("ij,ij->j", col_p.conj(), col_p).real
            beta = np.einsum("ij,ij->j", col_q.conj(), col_q).real
            gamma = np.einsum("ij,ij->j", col_p.conj(), col_q)
            active = np.abs(gamma) > tol * np.sqrt(alpha * beta)
            if not active.any():
                continue
            p, q = p[active], q[active]
            col_p, col_q = col_p[:, active], col_q[:, active]
            c, s, phase = _rotation(alpha[active], beta[active], gamma[active])
            back = phase.conj()
            work[:, p] = c * col_p - (s * back) * col_q
            work[:, q] = s * col_p + (c * back) * col_q
            vec_p = v[:, p]
            vec_q = v[:, q]
            v[:, p] = c * vec_p - (s * back) * vec_q
            v[:, q] = s * vec_p + (c * back) * vec_q
            rotated += int(active.sum())
        converged = rotated == 0

    sigma = np.linalg.norm(work, axis=0)
    order = np.argsort(-sigma, kind="stable")
    sigma = sigma[order]
    work = work[:, order]
    v = v[:, order]

    u = np.zeros((rows, cols), dtype=complex)
    filled = sigma > SMALL_SINGULAR * sigma[0] if sigma[0] > 0 else np.zeros(cols, dtype=bool)
    u[:, filled] = work[:, filled] / sigma[filled]
    u = _complete_orthonormal(u, filled)

    logger.info(f"Jacobi SVD: {rows}x{cols}, sweeps={sweeps}")
    return SingularSystem(u, sigma, v)


def matrix_abs(a) -> np.ndarray:
    """|A| = V |diag(mu)| V* for Hermitian A"""
    eig = hermitian_eigen(a)
    vecs = eig.eigenvectors
    out = (vecs * np.abs(eig.eigenvalues)) @ vecs.conj().T
    return 0.5 * (out + out.conj().T)


class TruncatedSolver:
    """Truncated-SVD least squares for a fixed matrix, reusable across right-hand sides"""

    def __init__(self, a, rel_cutoff: float):
        if not 0.0 < rel_cutoff < 1.0:
            raise InputValidationError(f"rel_cutoff must lie in (0, 1), got {rel_cutoff}")
        mat = as_complex_matrix(a)
        rows, cols = mat.shape
        if rows < cols:
            raise DimensionError(f"Least squares needs rows >= cols, got {rows}x{cols}")
        self.rows = rows
        self.cols = cols
        self.system = svd(mat)
        s = self.system.s
        self.keep = s >= rel_cutoff * s[0] if s[0] > 0 else np.zeros(cols, dtype=bool)
        self.rank = int(self.keep.sum())
        logger.info(f"Truncated SVD: kept {self.rank} of {cols} singular values")

    def solve(self, b) -> np.ndarray:
        rhs = np.asarray(b, dtype=complex)
        if rhs.ndim not in (1, 2) or rhs.shape[0] != self.rows:
            raise DimensionError(
                f"Right-hand side has shape {rhs.shape}, expected leading dimension {self.rows}"
            )
        u = self.system.u[:, self.keep]
        s = self.system.s[self.keep]
        coeffs = u.conj().T @ rhs
        coeffs = coeffs / (s if rhs.ndim == 1 else s[:, None])
        return self.system.v[:, self.keep] @ coeffs


def tsvd_solve(a, b, rel_cutoff: float) -> np.ndarray:
    """Minimizer of |Ax - b| over singular directions with s_j >= rel_cutoff * s_max"""
    return TruncatedSolver(a, rel_cutoff).solve(b)


def normal_eigen(a) -> Tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of a normal matrix, sorted by descending modulus.

    Normal A shares its eigenvectors with the Hermitian pencil (A+A*)/2 + w(A-A*)/(2i);
    eigenvalues are recovered as Rayleigh quotients.
    """
    mat = as_complex_matrix(a)
    n, m = mat.shape
    if n != m:
        raise DimensionError(f"Matrix must be square, got {n}x{m}")
    herm = 0.5 * (mat + mat.conj().T)
    skew = (mat - mat.conj().T) / 2j
    eig = hermitian_eigen(herm + PENCIL_WEIGHT * skew)
    vecs = eig.eigenvectors
    values = np.einsum("ij,ij->j", vecs.conj(), mat @ vecs)
    order = np.argsort(-np.abs(values), kind="stable")
    return values[order], vecs[:, order]
