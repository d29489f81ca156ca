import numpy as np
import pytest

from conftest import opnorm
from opmeasure.algebra import MatrixAlgebra, sample_positive, sample_projection
from opmeasure.errors import IntractablePartitionCount
from opmeasure.measures import (
    FiniteMeasurableSpace,
    NonNegativeMeasure,
    NonNegativeSpectralMeasure,
    PovMeasure,
    TracePairing,
    evaluate,
    identity_measure,
    kraus_measure,
    pair,
    random_cp_measure,
    random_transpose_measure,
    semivariation,
    set_partitions,
    validate_nonneg,
    validate_nonneg_spectral,
    validate_pov,
    validate_spectral,
)
from opmeasure.correspondence import generate_representation, random_blueprint, rep_to_measure


def reduction_measure(n: int, c: float) -> NonNegativeMeasure:
    """``A -> c trace(A) I - A``; positive exactly when ``c >= 1``."""
    alg = MatrixAlgebra([n])
    return NonNegativeMeasure.from_functions(
        FiniteMeasurableSpace(1), alg, alg, [lambda a: c * np.trace(a) * np.eye(n) - a])


# --- evaluate / pair ----------------------------------------------------------------

def test_evaluate_examples(rng):
    space, alg = FiniteMeasurableSpace(2), MatrixAlgebra([2])
    m = identity_measure(space, alg)
    a = sample_positive(alg, rng)
    assert np.allclose(evaluate(m, space.empty(), a).matrix, 0)
    assert np.allclose(evaluate(m, space.full(), a).matrix, 2 * a.matrix)
    cp = random_cp_measure(space, alg, MatrixAlgebra([3]), rng)
    assert np.array_equal(evaluate(cp, space.singleton(1), alg.unit(0)).matrix, cp.atom_maps[1, 0])


def test_pair_examples(rng):
    space, alg = FiniteMeasurableSpace(3), MatrixAlgebra([2])
    m = identity_measure(space, alg)
    a = sample_positive(alg, rng)
    assert np.allclose(pair(TracePairing(alg.zero()), m, a).values, 0)
    assert np.allclose(pair(TracePairing(alg.identity()), m, a).values, np.trace(a.matrix))
    w = sample_positive(MatrixAlgebra([3]), rng)
    vals = pair(TracePairing(w), random_cp_measure(space, alg, MatrixAlgebra([3]), rng), a).values
    assert np.all(vals.real >= -1e-12) and np.all(np.abs(vals.imag) <= 1e-12)


# --- POVM / spectral validators ----------------------------------------------------

def test_validate_pov_examples():
    space, cod = FiniteMeasurableSpace(2), MatrixAlgebra([2])
    assert validate_pov(PovMeasure(space, cod, [np.eye(2), np.diag([1.0, 0.0])])).passed
    assert validate_pov(PovMeasure(space, cod, np.zeros((2, 2, 2)))).passed
    bad = validate_pov(PovMeasure(space, cod, [np.eye(2), np.diag([1.0, -0.1])]))
    assert not bad.passed
    (fail,) = bad.failures()
    assert fail.name == "psd[1]" and fail.witness["margin"] == pytest.approx(-0.1)


def test_validate_spectral_examples(rng):
    space, cod = FiniteMeasurableSpace(2), MatrixAlgebra([2])
    assert validate_spectral(PovMeasure(space, cod, [np.diag([1.0, 0]), np.diag([0, 1.0])]), normalized=True).passed
    rep = validate_spectral(PovMeasure(space, cod, [np.eye(2), np.eye(2)]))
    assert [c.name for c in rep.failures()] == ["orthogonal[0,1]"]
    assert rep.get("orthogonal[0,1]").defect == pytest.approx(1.0)
    p = sample_projection(MatrixAlgebra([3]), rng).matrix
    assert validate_spectral(PovMeasure(space, MatrixAlgebra([3]), [p, np.eye(3) - p]), normalized=True).passed


# --- non-negativity -------------------------------------------------------------------

def test_cp_measure_is_choi_certified(rng):
    m = random_cp_measure(FiniteMeasurableSpace(2), MatrixAlgebra([2, 1]), MatrixAlgebra([3]), rng)
    rep = validate_nonneg(m)
    assert rep.passed and set(rep.info["verdicts"].values()) == {"certified"}


def test_transpose_measure_needs_rank_one_search(rng):
    m = random_transpose_measure(FiniteMeasurableSpace(1), MatrixAlgebra([2]), MatrixAlgebra([2]), rng, count=1)
    assert not validate_nonneg(m, policy="choi").passed
    rep = validate_nonneg(m, policy="auto")
    assert rep.passed and rep.info["verdicts"][0] == "qualified"


def test_reduction_map_refuted_with_witness():
    m = reduction_measure(3, 0.5)
    rep = validate_nonneg(m, policy="rank-one")
    assert not rep.passed
    fail = rep.get("positive[0]")
    assert fail.sound and fail.witness["margin"] == pytest.approx(-0.5, abs=1e-6)
    v = fail.witness["vector"]
    image = m.apply_atom(0, np.outer(v, v.conj()))
    # oracle: the witness image really has a negative eigenvalue
    assert np.linalg.eigvalsh(image)[0] < -0.4


def test_reduction_map_positive_at_threshold():
    assert validate_nonneg(reduction_measure(3, 1.0)).passed


def test_zero_measure_is_nonneg():
    alg = MatrixAlgebra([2])
    m = NonNegativeMeasure(FiniteMeasurableSpace(2), alg, alg, np.zeros((2, alg.dim, 2, 2)))
    assert validate_nonneg(m, policy="rank-one").passed


def test_validate_nonneg_spectral(rng):
    m = rep_to_measure(generate_representation(random_blueprint(rng)))
    assert validate_nonneg_spectral(m, rng_seed=rng, normalized=True).passed
    maps = m.atom_maps.copy()
    maps[0] *= 0.5
    bad = validate_nonneg_spectral(NonNegativeSpectralMeasure(m.space, m.domain, m.codomain, maps))
    assert not bad.passed
    assert all(c.witness is not None for c in bad.failures())


# --- semivariation ------------------------------------------------------------------

@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("strategy", ["structured", "exhaustive"])
def test_semivariation_identity(k, strategy):
    m = identity_measure(FiniteMeasurableSpace(k), MatrixAlgebra([2]))
    lo, hi, _ = semivariation(m, strategy=strategy)
    assert lo >= k - 1e-6 and hi == 4 * k


def test_semivariation_zero_measure():
    alg = MatrixAlgebra([2])
    m = NonNegativeMeasure(FiniteMeasurableSpace(2), alg, alg, np.zeros((2, alg.dim, 2, 2)))
    assert semivariation(m)[:2] == (0.0, 0.0)


def test_semivariation_exhaustive_limit():
    m = identity_measure(FiniteMeasurableSpace(13), MatrixAlgebra([1]))
    with pytest.raises(IntractablePartitionCount):
        semivariation(m, strategy="exhaustive")


def test_set_partitions_bell_numbers():
    assert [sum(1 for _ in set_partitions(list(range(n)))) for n in range(1, 6)] == [1, 2, 5, 15, 52]


def test_transpose_kraus_matches_explicit_formula(rng):
    k = [[rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))]]
    alg = MatrixAlgebra([2])
    m = kraus_measure(FiniteMeasurableSpace(1), alg, alg, k, transpose=True)
    a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    assert opnorm(m.apply_atom(0, a) - k[0][0] @ a.T @ k[0][0].conj().T) <= 1e-12
