"""Dense complex linear algebra primitives.

Everything here operates on square complex numpy arrays and is pure: no
function mutates its input. Spectral operations go through the Hermitian
eigendecomposition; tolerances are relative to the input norm so the
contracts are scale-free.
"""

from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

from .errors import (
    DimensionMismatchError,
    NonFiniteError,
    NotHermitianError,
    NotPSDError,
    SingularMatrixError,
)

# Eigenvalues of a PSD matrix below -PSD_CLAMP_REL * ||H|| raise NotPSD;
# anything negative above that threshold is treated as roundoff and clamped.
PSD_CLAMP_REL = 1e-12

HERMITIAN_TOL_REL = 1e-10

MAX_DIM = 64


class HermEig(NamedTuple):
    """Hermitian eigendecomposition: H = V diag(w) V* with w ascending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_matrix(x, name: str = "matrix") -> np.ndarray:
    """Validate and return `x` as a square, finite complex128 array."""
    a = np.asarray(x, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"{name} must be square, got shape {a.shape}")
    if a.shape[0] == 0 or a.shape[0] > MAX_DIM:
        raise DimensionMismatchError(
            f"{name} dimension must be in [1, {MAX_DIM}], got {a.shape[0]}"
        )
    if not np.all(np.isfinite(a.view(np.float64))):
        raise NonFiniteError(f"{name} has NaN or Inf entries")
    return a


def hermitian_part(x: np.ndarray) -> np.ndarray:
    """Return (x + x*) / 2."""
    return (x + x.conj().T) / 2


def hermitian_eig(h) -> HermEig:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    Raises NotHermitianError when ||h - h*|| exceeds 1e-10 * (1 + ||h||).
    """
    h = as_matrix(h, "hermitian matrix")
    dev = np.linalg.norm(h - h.conj().T, 2)
    if dev > HERMITIAN_TOL_REL * (1.0 + np.linalg.norm(h, 2)):
        raise NotHermitianError(f"matrix deviates from Hermitian by {dev:.3e}")
    w, v = np.linalg.eigh(h)
    return HermEig(w, v)


def operator_norm(x) -> float:
    """Largest singular value (the C*-norm on matrices)."""
    x = as_matrix(x)
    return float(np.linalg.svd(x, compute_uv=False)[0])


def _psd_eig(h: np.ndarray, name: str) -> HermEig:
    """Eigendecomposition of a nominally-PSD Hermitian matrix with the
    roundoff clamp applied; significantly negative spectrum raises."""
    w, v = hermitian_eig(h)
    scale = max(abs(w[0]), abs(w[-1]))
    if w[0] < -PSD_CLAMP_REL * scale:
        raise NotPSDError(f"{name}: eigenvalue {w[0]:.3e} below -{PSD_CLAMP_REL:.0e} * {scale:.3e}")
    return HermEig(np.maximum(w, 0.0), v)


def psd_power(h, alpha: float) -> np.ndarray:
    """H^alpha for Hermitian PSD H, alpha >= 0, via the spectral map t -> t^alpha.

    Tiny negative eigenvalues from roundoff are clamped to zero first; the
    convention 0^0 = 1 applies, so alpha = 0 returns the identity.
    """
    if alpha < 0:
        raise ValueError(f"alpha must be nonnegative, got {alpha}")
    w, v = _psd_eig(h, "psd_power")
    if alpha == 0.0:
        return np.eye(w.size, dtype=np.complex128)
    return (v * np.power(w, alpha)) @ v.conj().T


def matrix_func(h, fn: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Apply a scalar map to the spectrum of a Hermitian PSD matrix.

    `fn` must accept a nonnegative float array and return one (Orlicz
    functions qualify). Eigenvectors are preserved; the result is Hermitian.
    """
    w, v = _psd_eig(h, "matrix_func")
    fw = np.asarray(fn(w), dtype=np.float64)
    return (v * fw) @ v.conj().T


def matrix_abs(x) -> np.ndarray:
    """|x| = (x*x)^(1/2), Hermitian PSD."""
    x = as_matrix(x)
    return psd_power(x.conj().T @ x, 0.5)


def polar_unitary(x) -> np.ndarray:
    """Unitary factor u of the polar decomposition x = u |x|.

    Requires x invertible (smallest singular value > 1e-12 * ||x||).
    Computed from the SVD x = U S V* as u = U V*.
    """
    x = as_matrix(x)
    u, s, vh = np.linalg.svd(x)
    if s[-1] <= 1e-12 * s[0] or s[0] == 0.0:
        raise SingularMatrixError(
            f"matrix is numerically singular (sigma_min/sigma_max = "
            f"{s[-1] / s[0] if s[0] else 0.0:.3e})"
        )
    return u @ vh


def eigmax(h: np.ndarray) -> float:
    """Largest eigenvalue of a Hermitian matrix (no Hermiticity check)."""
    return float(np.linalg.eigvalsh(h)[-1])


def eigmin(h: np.ndarray) -> float:
    """Smallest eigenvalue of a Hermitian matrix (no Hermiticity check)."""
    return float(np.linalg.eigvalsh(h)[0])
