import numpy as np
import pytest

from conftest import opnorm
from opmeasure.algebra import AlgebraElement, MatrixAlgebra, jordan_parts, sample_hermitian, sample_positive, sample_projection
from opmeasure.correspondence import generate_representation, random_blueprint, rep_to_measure
from opmeasure.errors import IncompatibleFamily
from opmeasure.family import (
    ProjectionFamily,
    atomwise_family,
    build_from_positive_family,
    build_from_projection_family,
    check_positive_family,
    check_projection_family,
    measure_of_hermitian,
    positive_family_from_measure,
    projection_family_from_measure,
    riemann_path_check,
)
from opmeasure.kernel import operator_norm
from opmeasure.measures import FiniteMeasurableSpace, SpectralMeasureFD, random_cp_measure, random_transpose_measure

SPACE = FiniteMeasurableSpace(2)
W1 = MatrixAlgebra([2, 1])


def conjugation_family(rng):
    v = [rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)) for _ in range(SPACE.atom_count)]
    return v, atomwise_family(SPACE, W1, MatrixAlgebra([3]), lambda x, a: v[x] @ a @ v[x].conj().T)


def test_linear_family_passes(rng):
    _, fam = conjugation_family(rng)
    rep = check_positive_family(fam, rng_seed=rng)
    assert rep.passed
    assert rep.additivity_defect <= 1e-12 and rep.homogeneity_defect <= 1e-12


def test_nonadditive_family_rejected():
    fam = atomwise_family(SPACE, W1, W1, lambda x, a: 0.5 * (a + a @ a))
    rep = check_positive_family(fam)
    assert rep.additivity_defect > 1e-3
    assert rep.get("additivity").witness["atom"] in (0, 1)
    with pytest.raises(IncompatibleFamily) as err:
        build_from_positive_family(fam)
    assert not err.value.report.passed


def test_norm_family_fails_additivity_only():
    fam = atomwise_family(SPACE, W1, W1, lambda x, a: operator_norm(a) * np.eye(3))
    rep = check_positive_family(fam)
    assert rep.homogeneity_defect <= 1e-12
    assert rep.additivity_defect > 1e-3


def test_rebuild_from_measure(rng):
    m = random_transpose_measure(SPACE, W1, MatrixAlgebra([3]), rng)
    rebuilt = build_from_positive_family(positive_family_from_measure(m))
    assert np.abs(rebuilt.atom_maps - m.atom_maps).max() <= 1e-10


def test_rebuild_conjugation_exact(rng):
    v, fam = conjugation_family(rng)
    m = build_from_positive_family(fam)
    a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    a = W1.from_coords(W1.coords(a))
    for x in range(SPACE.atom_count):
        assert opnorm(m.apply_atom(x, a) - v[x] @ a @ v[x].conj().T) <= 1e-12


def test_rebuild_hermitian_difference(rng):
    m = random_cp_measure(SPACE, W1, MatrixAlgebra([2]), rng)
    fam = positive_family_from_measure(m)
    rebuilt = build_from_positive_family(fam)
    h = sample_hermitian(W1, rng)
    pos, neg = jordan_parts(h)
    assert np.abs(rebuilt.atom_values(h) - (fam(pos) - fam(neg))).max() <= 1e-10


def test_projection_family_from_representation(rng):
    m = rep_to_measure(generate_representation(random_blueprint(rng)))
    fam = projection_family_from_measure(m)
    rep = check_projection_family(fam, rng_seed=rng)
    assert rep.passed
    assert max(rep.bound_constant.values()) <= 1 + 1e-9
    rebuilt = build_from_projection_family(fam, check=False)
    assert np.abs(rebuilt.atom_maps - m.atom_maps).max() <= 1e-9


def test_constant_projection_family_rejected(rng):
    p = sample_projection(MatrixAlgebra([3]), rng, diagonal=[1, 0, 1]).matrix
    fixed = SpectralMeasureFD(SPACE, MatrixAlgebra([3]), [p, np.eye(3) - p])
    fam = ProjectionFamily(SPACE, W1, MatrixAlgebra([3]), lambda _: fixed)
    rep = check_projection_family(fam)
    assert rep.linear_relation_defect >= 1 - 1e-9
    assert "relation" in rep.get("linear_relation").witness


def test_measure_of_hermitian_examples(rng):
    m = rep_to_measure(generate_representation(random_blueprint(rng, domain_blocks=[2])))
    fam = projection_family_from_measure(m)
    p = sample_projection(m.domain, rng, diagonal=[1, 0])
    assert np.allclose(measure_of_hermitian(fam, p * 2.5), 2.5 * fam(p))
    assert np.allclose(measure_of_hermitian(fam, m.domain.zero()), 0)


def test_riemann_path(rng):
    m = rep_to_measure(generate_representation(random_blueprint(rng)))
    fam = projection_family_from_measure(m)
    path = riemann_path_check(fam, sample_positive(m.domain, rng), factor=2.0)
    assert path.passed and path.constant <= 2.0
    p = sample_projection(m.domain, rng)
    path = riemann_path_check(fam, p, levels=(2, 3, 17))
    assert all(v <= 1e-12 for per in path.defects for v in per.values())
    a = AlgebraElement(m.domain, np.diag(np.arange(m.domain.ambient_dim) * 0.25))
    path = riemann_path_check(fam, a, levels=(4, 40, 400))
    assert all(v <= 1e-12 for per in path.defects for v in per.values())
