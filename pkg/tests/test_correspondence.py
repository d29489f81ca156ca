import numpy as np
import pytest

from conftest import opnorm
from opmeasure.algebra import MatrixAlgebra, sample_element
from opmeasure.correspondence import (
    RepresentationBlueprint,
    certify_representation,
    generate_representation,
    measure_to_rep,
    perturbed_measure,
    random_blueprint,
    rep_to_measure,
    roundtrip_defect,
    scaled_representation,
    transposed_representation,
)
from opmeasure.errors import EmptyBlueprint, InvalidMeasure
from opmeasure.integration import OperatorFunction
from opmeasure.measures import FiniteMeasurableSpace


def test_single_atom_identity_blueprint(rng):
    alg = MatrixAlgebra([3])
    rho = generate_representation(RepresentationBlueprint(FiniteMeasurableSpace(1), alg, (1,), np.eye(3)))
    a = sample_element(alg, rng)
    assert np.allclose(rho(OperatorFunction(alg, [a.matrix])), a.matrix)


def test_scalar_case_is_diagonal():
    alg = MatrixAlgebra([1])
    rho = generate_representation(RepresentationBlueprint(FiniteMeasurableSpace(2), alg, (1, 1), np.eye(2)))
    F = OperatorFunction(alg, [[[2.0 + 1j]], [[-0.5]]])
    assert np.allclose(rho(F), np.diag([2.0 + 1j, -0.5]))


def test_dimension_arithmetic(rng):
    bp = RepresentationBlueprint(FiniteMeasurableSpace(2), MatrixAlgebra([2]), (1, 2), np.eye(6))
    assert bp.total_dim == 6 and generate_representation(bp).codomain.ambient_dim == 6


def test_empty_blueprint():
    bp = RepresentationBlueprint(FiniteMeasurableSpace(2), MatrixAlgebra([2]), (0, 0), np.eye(0))
    with pytest.raises(EmptyBlueprint):
        generate_representation(bp)


@pytest.mark.parametrize("seed", range(5))
def test_generated_representation_certifies(seed):
    rep = certify_representation(generate_representation(random_blueprint(seed)))
    assert rep.passed
    assert max(c.defect for c in rep.checks) <= 1e-10
    assert rep.info["norm_estimate"] <= 1 + 1e-9


@pytest.mark.parametrize("seed", range(5))
def test_roundtrip(seed):
    assert max(roundtrip_defect(seed)) <= 1e-8


def test_rep_to_measure_reads_basis(rng):
    rho = generate_representation(random_blueprint(rng))
    m = rep_to_measure(rho)
    x, d = rho.space.atom_count - 1, rho.domain.dim - 1
    vals = np.zeros((rho.space.atom_count, rho.domain.ambient_dim, rho.domain.ambient_dim), dtype=complex)
    vals[x] = rho.domain.unit(d)
    assert np.allclose(m.atom_maps[x, d], rho(OperatorFunction(rho.domain, vals)))


def test_measure_to_rep_inverts(rng):
    rho = generate_representation(random_blueprint(rng))
    back = measure_to_rep(rep_to_measure(rho))
    assert np.abs(back.basis_action - rho.basis_action).max() <= 1e-10


def test_negative_controls_are_rejected(rng):
    rho = generate_representation(random_blueprint(rng, domain_blocks=[2]))
    bad = certify_representation(scaled_representation(rho))
    assert not bad.passed and all(c.witness is not None for c in bad.failures())
    bad = certify_representation(transposed_representation(rho))
    assert not bad.passed and all(c.witness is not None for c in bad.failures())
    with pytest.raises(InvalidMeasure) as err:
        measure_to_rep(perturbed_measure(rep_to_measure(rho), 1e-3, rng))
    assert not err.value.report.passed


def test_blueprint_bounds():
    for seed in range(30):
        bp = random_blueprint(seed)
        assert bp.space.atom_count <= 4 and bp.domain.ambient_dim <= 3 and bp.total_dim <= 12
        u = np.asarray(bp.intertwiner)
        assert opnorm(u.conj().T @ u - np.eye(len(u))) <= 1e-12
