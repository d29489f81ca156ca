"""Block-diagonal matrix *-algebras and the operator decompositions used on them.

A ``MatrixAlgebra`` with blocks ``(n_1, ..., n_r)`` is the algebra
``M_{n_1} + ... + M_{n_r}`` sitting block-diagonally inside ``M_N``,
``N = sum(n_b)``. Its canonical basis is the list of matrix units ``E_ij``
with ``(i, j)`` inside one diagonal block, enumerated block by block in
row-major order. Linear maps out of an algebra are stored by their values on
this basis (see :mod:`opmeasure.measures`).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .errors import DomainMismatch, NotHermitian
from .kernel import (
    DEFAULT_TOL,
    Tolerance,
    adjoint,
    as_matrix,
    clamp_small,
    hermitian_defect,
    operator_norm,
    random_unitary,
)


@dataclass(frozen=True)
class MatrixAlgebra:
    blocks: tuple[int, ...]

    def __post_init__(self):
        blocks = tuple(int(b) for b in self.blocks)
        if not blocks or any(b < 1 for b in blocks):
            raise ValueError(f"block sizes must be a nonempty list of positive ints, got {self.blocks}")
        object.__setattr__(self, "blocks", blocks)

    @property
    def ambient_dim(self) -> int:
        return sum(self.blocks)

    @property
    def dim(self) -> int:
        """Vector-space dimension (number of matrix units)."""
        return sum(b * b for b in self.blocks)

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        return tuple(int(o) for o in np.concatenate([[0], np.cumsum(self.blocks)[:-1]]))

    @cached_property
    def mask(self) -> np.ndarray:
        m = np.zeros((self.ambient_dim, self.ambient_dim), dtype=bool)
        for off, n in zip(self.offsets, self.blocks):
            m[off:off + n, off:off + n] = True
        m.setflags(write=False)
        return m

    @cached_property
    def units(self) -> tuple[np.ndarray, np.ndarray]:
        """Row and column indices of the matrix units, in basis order."""
        rows, cols = [], []
        for off, n in zip(self.offsets, self.blocks):
            for i in range(n):
                for j in range(n):
                    rows.append(off + i)
                    cols.append(off + j)
        r, c = np.array(rows), np.array(cols)
        r.setflags(write=False)
        c.setflags(write=False)
        return r, c

    @cached_property
    def unit_index(self) -> dict[tuple[int, int], int]:
        rows, cols = self.units
        return {(int(i), int(j)): k for k, (i, j) in enumerate(zip(rows, cols))}

    def block_slices(self) -> list[slice]:
        return [slice(off, off + n) for off, n in zip(self.offsets, self.blocks)]

    def block_units(self, b: int) -> np.ndarray:
        """Basis indices of block ``b`` arranged as an ``n_b x n_b`` array."""
        start = sum(n * n for n in self.blocks[:b])
        n = self.blocks[b]
        return np.arange(start, start + n * n).reshape(n, n)

    def off_pattern_norm(self, matrix) -> float:
        m = np.asarray(matrix)
        return float(np.linalg.norm(np.where(self.mask, 0, m)))

    def contains(self, matrix, tol: Tolerance = DEFAULT_TOL) -> bool:
        m = np.asarray(matrix)
        if m.shape != (self.ambient_dim, self.ambient_dim):
            return False
        return self.off_pattern_norm(m) <= tol.absolute

    def coords(self, matrix) -> np.ndarray:
        rows, cols = self.units
        return np.asarray(matrix, dtype=np.complex128)[..., rows, cols]

    def from_coords(self, coords) -> np.ndarray:
        coords = np.asarray(coords, dtype=np.complex128)
        out = np.zeros(coords.shape[:-1] + (self.ambient_dim, self.ambient_dim), dtype=np.complex128)
        rows, cols = self.units
        out[..., rows, cols] = coords
        return out

    def unit(self, k: int) -> np.ndarray:
        rows, cols = self.units
        e = np.zeros((self.ambient_dim, self.ambient_dim), dtype=np.complex128)
        e[rows[k], cols[k]] = 1.0
        return e

    def element(self, matrix, tol: Tolerance = DEFAULT_TOL) -> "AlgebraElement":
        return AlgebraElement(self, matrix, tol)

    def identity(self) -> "AlgebraElement":
        return AlgebraElement(self, np.eye(self.ambient_dim))

    def zero(self) -> "AlgebraElement":
        return AlgebraElement(self, np.zeros((self.ambient_dim, self.ambient_dim)))

    def __repr__(self):
        return f"MatrixAlgebra(blocks={list(self.blocks)})"


class AlgebraElement:
    """A matrix known to lie in a ``MatrixAlgebra``'s block pattern.

    Off-pattern entries within tolerance are zeroed on construction; larger
    ones raise :class:`DomainMismatch`.
    """

    __slots__ = ("algebra", "matrix")

    def __init__(self, algebra: MatrixAlgebra, matrix, tol: Tolerance = DEFAULT_TOL):
        m = as_matrix(matrix)
        n = algebra.ambient_dim
        if m.shape != (n, n):
            raise DomainMismatch(f"matrix shape {m.shape} does not match algebra of ambient dim {n}")
        off = algebra.off_pattern_norm(m)
        if off > tol.absolute:
            raise DomainMismatch(f"matrix has off-pattern mass {off:.3e} for {algebra!r}")
        m = np.where(algebra.mask, m, 0).astype(np.complex128)
        m.setflags(write=False)
        self.algebra = algebra
        self.matrix = m

    def _wrap(self, matrix) -> "AlgebraElement":
        return AlgebraElement(self.algebra, matrix)

    def _other(self, other) -> np.ndarray:
        if isinstance(other, AlgebraElement):
            if other.algebra != self.algebra:
                raise DomainMismatch(f"{other.algebra!r} vs {self.algebra!r}")
            return other.matrix
        return np.asarray(other)

    def __add__(self, other):
        return self._wrap(self.matrix + self._other(other))

    def __sub__(self, other):
        return self._wrap(self.matrix - self._other(other))

    def __neg__(self):
        return self._wrap(-self.matrix)

    def __mul__(self, scalar):
        return self._wrap(complex(scalar) * self.matrix)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self._wrap(self.matrix / complex(scalar))

    def __matmul__(self, other):
        return self._wrap(self.matrix @ self._other(other))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)

    @property
    def H(self) -> "AlgebraElement":
        return self._wrap(self.matrix.conj().T)

    def norm(self) -> float:
        return operator_norm(self.matrix)

    def is_hermitian(self, tol: Tolerance = DEFAULT_TOL) -> bool:
        return hermitian_defect(self.matrix) <= tol.bound(float(np.linalg.norm(self.matrix)))

    def is_projection(self, tol: Tolerance = DEFAULT_TOL) -> bool:
        return projection_defect(self.matrix) <= tol.absolute

    def is_positive(self, tol: Tolerance = DEFAULT_TOL) -> bool:
        if not self.is_hermitian(tol):
            return False
        return bool(np.linalg.eigvalsh(0.5 * (self.matrix + self.matrix.conj().T))[0] >= -tol.absolute)

    def __repr__(self):
        return f"AlgebraElement({self.algebra!r}, {np.array2string(self.matrix, precision=4)})"


def projection_defect(p) -> float:
    """``max(||P^2 - P||, ||P - P^*||)`` in operator norm."""
    p = np.asarray(p)
    return max(operator_norm(p @ p - p), operator_norm(p - adjoint(p)))


def _hermitian_matrix(a: AlgebraElement, tol: Tolerance) -> np.ndarray:
    m = a.matrix
    defect = hermitian_defect(m)
    if defect > tol.bound(float(np.linalg.norm(m))):
        raise NotHermitian(f"Hermitian defect {defect:.3e} exceeds tolerance")
    return 0.5 * (m + m.conj().T)


def block_eigh(a: AlgebraElement, tol: Tolerance = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Per-block eigendecomposition, so eigenvectors never straddle two blocks.

    Returns eigenvalues (clamped near zero, block order, ascending inside each
    block) and a block-diagonal unitary whose columns are the eigenvectors.
    """
    m = _hermitian_matrix(a, tol)
    values = np.empty(a.algebra.ambient_dim)
    vectors = np.zeros_like(m)
    for sl in a.algebra.block_slices():
        w, v = np.linalg.eigh(m[sl, sl])
        values[sl] = w
        vectors[sl, sl] = v
    return clamp_small(values, tol), vectors


def _functional_calculus(vectors: np.ndarray, values: np.ndarray) -> np.ndarray:
    return (vectors * values) @ vectors.conj().T


def cartesian_parts(a: AlgebraElement) -> tuple[AlgebraElement, AlgebraElement]:
    """``re(A) = (A + A^*)/2`` and ``im(A) = i(A^* - A)/2``."""
    m = a.matrix
    mh = m.conj().T
    return a._wrap(0.5 * (m + mh)), a._wrap(0.5j * (mh - m))


def jordan_parts(a: AlgebraElement, tol: Tolerance = DEFAULT_TOL) -> tuple[AlgebraElement, AlgebraElement]:
    """Positive and negative parts ``A = A_+ - A_-`` with ``A_+ A_- = 0``."""
    values, vectors = block_eigh(a, tol)
    plus = _functional_calculus(vectors, np.maximum(values, 0.0))
    minus = _functional_calculus(vectors, np.maximum(-values, 0.0))
    return a._wrap(plus), a._wrap(minus)


class SpectralTerm(NamedTuple):
    eigenvalue: float
    projection: AlgebraElement


@dataclass(frozen=True)
class SpectralDecomposition:
    terms: tuple[SpectralTerm, ...]

    def __iter__(self):
        return iter(self.terms)

    def __len__(self):
        return len(self.terms)

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.array([t.eigenvalue for t in self.terms])

    def reconstruct(self) -> np.ndarray:
        if not self.terms:
            raise ValueError("empty decomposition")
        return sum(t.eigenvalue * t.projection.matrix for t in self.terms)


def cluster_threshold(a: AlgebraElement) -> float:
    return 1e-8 * max(1.0, a.norm())


def spectral_decomposition(a: AlgebraElement, tol: Tolerance = DEFAULT_TOL) -> SpectralDecomposition:
    """Distinct eigenvalues with their (mutually orthogonal) eigenprojections.

    Eigenvalues closer than ``1e-8 * max(1, ||A||)`` are merged; a cluster's
    eigenvalue is the mean of its members. The kernel projection, when
    nonzero, appears as the term with eigenvalue 0.
    """
    values, vectors = block_eigh(a, tol)
    order = np.argsort(values, kind="stable")
    thr = cluster_threshold(a)
    groups: list[list[int]] = []
    for idx in order:
        if groups and values[idx] - values[groups[-1][-1]] <= thr:
            groups[-1].append(idx)
        else:
            groups.append([idx])
    terms = []
    for g in groups:
        cols = vectors[:, g]
        lam = float(np.mean(values[g]))
        if lam != 0.0 and abs(lam) <= tol.absolute:
            lam = 0.0
        terms.append(SpectralTerm(lam, a._wrap(cols @ cols.conj().T)))
    return SpectralDecomposition(tuple(terms))


@dataclass(frozen=True)
class RiemannSum:
    """``S_l(A) = sum_k tag_k * P_k`` on the grid of step ``1/level`` anchored at 0."""

    level: int
    terms: SpectralDecomposition
    error_bound: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "error_bound", 1.0 / self.level)

    @property
    def matrix(self) -> np.ndarray:
        return self.terms.reconstruct()

    @property
    def coefficients(self) -> np.ndarray:
        return self.terms.eigenvalues


def _grid_index(values: np.ndarray, level: int) -> np.ndarray:
    scaled = values * level
    snapped = np.round(scaled)
    # eigenvalues sitting on a grid edge up to rounding belong to the bin they start
    on_edge = np.abs(scaled - snapped) <= 1e-9 * np.maximum(1.0, np.abs(scaled))
    return np.where(on_edge, snapped, np.floor(scaled)).astype(np.int64)


def riemann_sum(a: AlgebraElement, level: int, tol: Tolerance = DEFAULT_TOL) -> RiemannSum:
    """Bin the spectrum into ``[k/level, (k+1)/level)`` and tag each bin by its left end.

    The grid for ``level * m`` refines the grid for ``level``; for PSD ``A``
    every tag is non-negative.
    """
    level = int(level)
    if level < 1:
        raise ValueError(f"level must be >= 1, got {level}")
    values, vectors = block_eigh(a, tol)
    psd = bool(values.min() >= 0.0)
    bins = _grid_index(values, level)
    terms = []
    for k in np.unique(bins):
        cols = vectors[:, bins == k]
        tag = k / level
        if psd:
            tag = max(tag, 0.0)
        terms.append(SpectralTerm(float(tag), a._wrap(cols @ cols.conj().T)))
    return RiemannSum(level, SpectralDecomposition(tuple(terms)))


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _ginibre(n: int, rng: np.random.Generator) -> np.ndarray:
    return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)


def sample_positive(algebra: MatrixAlgebra, rng_seed=None) -> AlgebraElement:
    """``G^* G`` with complex Gaussian ``G`` per block, scaled to unit operator norm."""
    rng = _rng(rng_seed)
    m = np.zeros((algebra.ambient_dim,) * 2, dtype=np.complex128)
    for sl, n in zip(algebra.block_slices(), algebra.blocks):
        g = _ginibre(n, rng)
        m[sl, sl] = g.conj().T @ g
    m = 0.5 * (m + m.conj().T)
    norm = operator_norm(m)
    return AlgebraElement(algebra, m / norm if norm > 0 else m)


def sample_hermitian(algebra: MatrixAlgebra, rng_seed=None) -> AlgebraElement:
    rng = _rng(rng_seed)
    m = np.zeros((algebra.ambient_dim,) * 2, dtype=np.complex128)
    for sl, n in zip(algebra.block_slices(), algebra.blocks):
        g = _ginibre(n, rng)
        m[sl, sl] = 0.5 * (g + g.conj().T)
    return AlgebraElement(algebra, m)


def sample_element(algebra: MatrixAlgebra, rng_seed=None) -> AlgebraElement:
    rng = _rng(rng_seed)
    m = np.zeros((algebra.ambient_dim,) * 2, dtype=np.complex128)
    for sl, n in zip(algebra.block_slices(), algebra.blocks):
        m[sl, sl] = _ginibre(n, rng)
    return AlgebraElement(algebra, m)


def sample_unitary(algebra: MatrixAlgebra, rng_seed=None) -> AlgebraElement:
    rng = _rng(rng_seed)
    m = np.zeros((algebra.ambient_dim,) * 2, dtype=np.complex128)
    for sl, n in zip(algebra.block_slices(), algebra.blocks):
        m[sl, sl] = random_unitary(n, rng)
    return AlgebraElement(algebra, m)


def sample_projection(algebra: MatrixAlgebra, rng_seed=None, diagonal=None) -> AlgebraElement:
    """``U D U^*`` with ``U`` a random block unitary and ``D`` a random 0/1 diagonal.

    ``diagonal`` fixes ``D`` (ambient-length 0/1 sequence) instead of drawing it.
    """
    rng = _rng(rng_seed)
    u = sample_unitary(algebra, rng).matrix
    if diagonal is None:
        d = rng.integers(0, 2, size=algebra.ambient_dim)
    else:
        d = np.asarray(diagonal)
    p = (u * d) @ u.conj().T
    p = 0.5 * (p + p.conj().T)
    return AlgebraElement(algebra, p)


def sample_commuting_projections(algebra: MatrixAlgebra, count: int, rng_seed=None) -> list[AlgebraElement]:
    """``count`` projections diagonal in one shared random block eigenbasis."""
    rng = _rng(rng_seed)
    u = sample_unitary(algebra, rng).matrix
    out = []
    for _ in range(count):
        d = rng.integers(0, 2, size=algebra.ambient_dim)
        p = (u * d) @ u.conj().T
        out.append(AlgebraElement(algebra, 0.5 * (p + p.conj().T)))
    return out
