import numpy as np
import pytest

from conftest import opnorm
from opmeasure.algebra import (
    AlgebraElement,
    MatrixAlgebra,
    cartesian_parts,
    jordan_parts,
    riemann_sum,
    sample_commuting_projections,
    sample_element,
    sample_positive,
    sample_projection,
    spectral_decomposition,
)
from opmeasure.errors import DomainMismatch, NotHermitian, NotSquare
from opmeasure.kernel import Tolerance, hermitian_eig, is_psd, operator_norm, random_unitary

SWAP = np.array([[0.0, 1.0], [1.0, 0.0]])
# eigenprojections of SWAP for -1 and +1, frozen from the characteristic polynomial lambda^2 - 1
P_MINUS = np.array([[0.5, -0.5], [-0.5, 0.5]])
P_PLUS = np.array([[0.5, 0.5], [0.5, 0.5]])


def m2(matrix):
    return AlgebraElement(MatrixAlgebra([2]), np.asarray(matrix, dtype=complex))


# --- kernel ---------------------------------------------------------------------

def test_eig_identity():
    sys = hermitian_eig(np.eye(2))
    assert np.allclose(sys.eigenvalues, [1, 1])
    assert np.allclose(sys.eigenvectors.conj().T @ sys.eigenvectors, np.eye(2))


def test_eig_diagonal():
    sys = hermitian_eig(np.diag([-3.0, 2.0]))
    assert np.allclose(sys.eigenvalues, [-3, 2])
    assert np.allclose(np.abs(sys.eigenvectors), np.eye(2))


def test_eig_swap():
    sys = hermitian_eig(SWAP)
    assert np.allclose(sys.eigenvalues, [-1, 1])
    for lam, v in zip(sys.eigenvalues, sys.eigenvectors.T):
        assert np.allclose(SWAP @ v, lam * v)
    assert np.allclose(np.outer(sys.eigenvectors[:, 0], sys.eigenvectors[:, 0].conj()), P_MINUS)


def test_eig_rejects_bad_input():
    with pytest.raises(NotSquare):
        hermitian_eig(np.zeros((2, 3)))
    with pytest.raises(NotHermitian):
        hermitian_eig(np.array([[0, 1], [0, 0]]))


def test_operator_norm_examples(rng):
    assert operator_norm(np.zeros((3, 3))) == 0.0
    assert abs(operator_norm(random_unitary(4, rng)) - 1) <= 1e-12
    assert abs(operator_norm(np.diag([2.0, -3.0])) - 3) <= 1e-12


def test_is_psd_examples(rng):
    assert is_psd(np.eye(2)) == (pytest.approx(1.0), True)
    margin, ok = is_psd(np.array([[1.0, 2.0], [2.0, 1.0]]))
    assert margin == pytest.approx(-1.0) and not ok
    v = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    v /= np.linalg.norm(v)
    margin, ok = is_psd(np.outer(v, v.conj()))
    assert ok and margin >= -1e-12


def test_tolerance_validation():
    with pytest.raises(ValueError):
        Tolerance(-1.0, 0.0)


# --- algebra ----------------------------------------------------------------------

def test_block_algebra_basis():
    alg = MatrixAlgebra([2, 1])
    assert alg.ambient_dim == 3 and alg.dim == 5
    rows, cols = alg.units
    assert list(zip(rows, cols)) == [(0, 0), (0, 1), (1, 0), (1, 1), (2, 2)]
    a = sample_element(alg, 0).matrix
    assert np.allclose(alg.from_coords(alg.coords(a)), a)
    with pytest.raises(DomainMismatch):
        alg.element(np.ones((3, 3)))


def test_cartesian_hermitian():
    a = m2([[1, 2j], [-2j, 3]])
    re, im = cartesian_parts(a)
    assert np.allclose(re.matrix, a.matrix) and np.allclose(im.matrix, 0)


def test_cartesian_nilpotent():
    a = m2([[0, 2j], [0, 0]])
    re, im = cartesian_parts(a)
    assert np.allclose(re.matrix, [[0, 1j], [-1j, 0]])
    assert np.allclose(im.matrix, SWAP)
    assert np.allclose(re.matrix + 1j * im.matrix, a.matrix)


def test_cartesian_imaginary_scalar():
    re, im = cartesian_parts(m2(1j * np.eye(2)))
    assert np.allclose(re.matrix, 0) and np.allclose(im.matrix, np.eye(2))


def test_jordan_examples():
    pos, neg = jordan_parts(m2(np.diag([2.0, -3.0])))
    assert np.allclose(pos.matrix, np.diag([2, 0])) and np.allclose(neg.matrix, np.diag([0, 3]))
    pos, neg = jordan_parts(m2(SWAP))
    assert np.allclose(pos.matrix, P_PLUS) and np.allclose(neg.matrix, P_MINUS)
    a = sample_positive(MatrixAlgebra([3]), 1)
    pos, neg = jordan_parts(a)
    assert np.allclose(pos.matrix, a.matrix) and np.allclose(neg.matrix, 0)


def test_jordan_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        jordan_parts(m2([[0, 1], [0, 0]]))


def test_spectral_examples():
    sd = spectral_decomposition(m2(np.eye(2)))
    assert len(sd) == 1 and sd.terms[0].eigenvalue == pytest.approx(1.0)
    sd = spectral_decomposition(AlgebraElement(MatrixAlgebra([3]), np.diag([1.0, 1.0, 4.0])))
    assert [t.eigenvalue for t in sd] == pytest.approx([1.0, 4.0])
    assert np.allclose(sd.terms[0].projection.matrix, np.diag([1, 1, 0]))
    sd = spectral_decomposition(m2(SWAP))
    assert [t.eigenvalue for t in sd] == pytest.approx([-1.0, 1.0])
    assert np.allclose(sd.terms[0].projection.matrix, P_MINUS)
    assert np.allclose(sd.terms[1].projection.matrix, P_PLUS)


def test_spectral_keeps_kernel():
    sd = spectral_decomposition(m2(np.diag([0.0, 2.0])))
    assert [t.eigenvalue for t in sd] == [0.0, 2.0]


def test_riemann_examples():
    a = AlgebraElement(MatrixAlgebra([3]), np.diag([1.0, 2.0, 3.0]))
    s = riemann_sum(a, 1)
    assert opnorm(s.matrix - a.matrix) <= 1
    s = riemann_sum(m2(np.diag([0.3, 0.7])), 10)
    assert opnorm(s.matrix - np.diag([0.3, 0.7])) <= 1e-12
    s = riemann_sum(sample_positive(MatrixAlgebra([2, 2]), 3), 7)
    assert np.all(s.coefficients >= 0)
    with pytest.raises(ValueError):
        riemann_sum(m2(np.eye(2)), 0)


def test_riemann_projection_is_exact():
    p = sample_projection(MatrixAlgebra([3]), 4, diagonal=[1, 0, 1])
    for level in (2, 5, 64):
        assert opnorm(riemann_sum(p, level).matrix - p.matrix) <= 1e-12


def test_samplers(rng):
    alg = MatrixAlgebra([1])
    a = sample_positive(alg, 3)
    assert a.matrix.real[0, 0] >= 0 and abs(a.matrix.imag[0, 0]) == 0
    assert np.array_equal(sample_positive(MatrixAlgebra([2, 1]), 5).matrix,
                          sample_positive(MatrixAlgebra([2, 1]), 5).matrix)
    alg = MatrixAlgebra([3])
    assert np.allclose(sample_projection(alg, rng, diagonal=[1, 1, 1]).matrix, np.eye(3))
    assert np.allclose(sample_projection(alg, rng, diagonal=[0, 0, 0]).matrix, 0)
    p = sample_projection(alg, rng)
    assert opnorm(p.matrix @ p.matrix - p.matrix) <= 1e-12
    p, q = sample_commuting_projections(MatrixAlgebra([2, 2]), 2, rng)
    assert opnorm(p.matrix @ q.matrix - q.matrix @ p.matrix) <= 1e-12


def test_element_arithmetic():
    alg = MatrixAlgebra([2, 1])
    a, b = sample_element(alg, 1), sample_element(alg, 2)
    assert np.allclose((a @ b).matrix, a.matrix @ b.matrix)
    assert np.allclose((a + b * 2).matrix, a.matrix + 2 * b.matrix)
    assert np.allclose(a.H.matrix, a.matrix.conj().T)
    assert alg.identity().is_projection() and not a.is_hermitian()
