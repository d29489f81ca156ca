"""Dense complex matrix primitives: Hermitian eigensystems, norms, PSD tests.

Everything here is a pure function of its arguments. Inputs are coerced to
``complex128`` arrays; nothing is modified in place.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import NotHermitian, NotSquare, NumericalFailure


@dataclass(frozen=True)
class Tolerance:
    """Absolute/relative tolerance pair; ``bound(scale)`` is the admissible error."""

    absolute: float = 1e-9
    relative: float = 1e-9

    def __post_init__(self):
        for name in ("absolute", "relative"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise ValueError(f"tolerance {name} must be finite and >= 0, got {value}")

    def bound(self, scale: float = 0.0) -> float:
        return self.absolute + self.relative * scale


DEFAULT_TOL = Tolerance()


class EigenSystem(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


class PsdCheck(NamedTuple):
    margin: float
    ok: bool


def as_matrix(a) -> np.ndarray:
    m = np.asarray(getattr(a, "matrix", a), dtype=np.complex128)
    if m.ndim != 2:
        raise NotSquare(f"expected a 2-d matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NumericalFailure("matrix has non-finite entries")
    return m


def adjoint(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def hermitian_defect(a) -> float:
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise NotSquare(f"matrix of shape {m.shape} is not square")
    return float(np.linalg.norm(m - m.conj().T))


def symmetrize(a, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Return ``(A + A^*)/2`` after checking the Hermitian defect is within tolerance."""
    m = as_matrix(a)
    defect = hermitian_defect(m)
    if defect > tol.bound(float(np.linalg.norm(m))):
        raise NotHermitian(f"Hermitian defect {defect:.3e} exceeds tolerance")
    return 0.5 * (m + m.conj().T)


def hermitian_eig(a, tol: Tolerance = DEFAULT_TOL) -> EigenSystem:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    m = symmetrize(a, tol)
    try:
        values, vectors = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NumericalFailure(str(exc)) from exc
    return EigenSystem(values, vectors)


def operator_norm(a) -> float:
    """Largest singular value, via the top eigenvalue of ``A^* A``."""
    m = as_matrix(a)
    if m.size == 0:
        return 0.0
    gram = m.conj().T @ m
    try:
        top = np.linalg.eigvalsh(0.5 * (gram + gram.conj().T))[-1]
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise NumericalFailure(str(exc)) from exc
    return float(np.sqrt(max(top, 0.0)))


def is_psd(a, tol: Tolerance = DEFAULT_TOL) -> PsdCheck:
    """Return ``(min eigenvalue, min eigenvalue >= -tol.absolute)``."""
    values = hermitian_eig(a, tol).eigenvalues
    margin = float(values[0]) if values.size else 0.0
    return PsdCheck(margin, margin >= -tol.absolute)


def clamp_small(values: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    out = np.array(values, dtype=float)
    out[np.abs(out) <= tol.absolute] = 0.0
    return out


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))
