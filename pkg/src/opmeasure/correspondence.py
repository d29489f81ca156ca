"""Unital *-representations of C(X, W1) and their non-negative spectral measures.

On a finite space ``C(X, W1)`` has the canonical basis ``chi_x (x) E_d``, and
a representation is stored by its values there. The measure of a
representation reads ``M^x(E_d) = rho(chi_x (x) E_d)``; the representation of
a measure is ``rho(F) = int F dM``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import AlgebraElement, MatrixAlgebra, sample_element, _rng
from .errors import EmptyBlueprint, InvalidMeasure, NotARepresentation
from .integration import OperatorFunction, ScalarFunction, integrate_literal
from .kernel import Tolerance, adjoint, operator_norm, random_unitary
from .measures import FiniteMeasurableSpace, NonNegativeSpectralMeasure, validate_nonneg_spectral
from .report import Report

REP_TOL = Tolerance(1e-9, 1e-9)


class Representation:
    """Linear map ``C(X, W1) -> W2`` stored as ``basis_action[x, d] = rho(chi_x (x) E_d)``."""

    def __init__(self, space: FiniteMeasurableSpace, domain: MatrixAlgebra, codomain: MatrixAlgebra, basis_action):
        b = np.array(basis_action, dtype=np.complex128)
        n = codomain.ambient_dim
        expected = (space.atom_count, domain.dim, n, n)
        if b.shape != expected:
            raise ValueError(f"basis action of shape {b.shape}, expected {expected}")
        b.setflags(write=False)
        self.space = space
        self.domain = domain
        self.codomain = codomain
        self.basis_action = b
        self.certified: dict | None = None

    def __call__(self, F: OperatorFunction) -> np.ndarray:
        return np.einsum("xdij,xd->ij", self.basis_action, self.domain.coords(F.values))

    def with_action(self, action) -> "Representation":
        return Representation(self.space, self.domain, self.codomain, action)


@dataclass(frozen=True)
class RepresentationBlueprint:
    """Canonical form ``rho(F) = U (+)_x (F(x) (x) I_{k_x}) U^*``."""

    space: FiniteMeasurableSpace
    domain: MatrixAlgebra
    multiplicities: tuple[int, ...]
    intertwiner: np.ndarray

    @property
    def total_dim(self) -> int:
        return sum(self.multiplicities) * self.domain.ambient_dim


def random_blueprint(rng_seed=None, atoms: int | None = None, domain_blocks=None,
                     max_total: int = 12, max_atoms: int = 4, max_domain: int = 3) -> RepresentationBlueprint:
    """Seeded blueprint with ``|X| <= max_atoms``, ``dim W1 <= max_domain``, total dim ``<= max_total``."""
    rng = _rng(rng_seed)
    if atoms is None:
        atoms = int(rng.integers(1, max_atoms + 1))
    if domain_blocks is None:
        n = int(rng.integers(1, max_domain + 1))
        parts = []
        while n:
            p = int(rng.integers(1, n + 1))
            parts.append(p)
            n -= p
        domain_blocks = parts
    domain = MatrixAlgebra(domain_blocks)
    budget = max(1, max_total // domain.ambient_dim)
    while True:
        mult = [int(k) for k in rng.integers(0, 3, size=atoms)]
        if 1 <= sum(mult) <= budget:
            break
    n_total = sum(mult) * domain.ambient_dim
    u = random_unitary(n_total, rng)
    return RepresentationBlueprint(FiniteMeasurableSpace(atoms), domain, tuple(mult), u)


def generate_representation(bp: RepresentationBlueprint) -> Representation:
    if sum(bp.multiplicities) < 1:
        raise EmptyBlueprint("at least one atom needs positive multiplicity")
    n1 = bp.domain.ambient_dim
    n = bp.total_dim
    u = np.asarray(bp.intertwiner, dtype=np.complex128)
    if u.shape != (n, n) or operator_norm(u.conj().T @ u - np.eye(n)) > 1e-12:
        raise ValueError("intertwiner must be a unitary of the total dimension")
    action = np.zeros((bp.space.atom_count, bp.domain.dim, n, n), dtype=np.complex128)
    offset = 0
    for x, k in enumerate(bp.multiplicities):
        if k == 0:
            continue
        sl = slice(offset, offset + n1 * k)
        for d in range(bp.domain.dim):
            block = np.zeros((n, n), dtype=np.complex128)
            block[sl, sl] = np.kron(bp.domain.unit(d), np.eye(k))
            action[x, d] = u @ block @ u.conj().T
        offset += n1 * k
    return Representation(bp.space, bp.domain, MatrixAlgebra([n]), action)


def _random_function(rho: Representation, rng) -> OperatorFunction:
    vals = [sample_element(rho.domain, rng).matrix for _ in range(rho.space.atom_count)]
    F = OperatorFunction(rho.domain, vals)
    return F * (1.0 / F.sup_norm())


def certify_representation(rho: Representation, samples: int = 8, rng_seed=0, tol: Tolerance = REP_TOL) -> Report:
    """Unitality, multiplicativity and *-preservation, on the basis and on samples.

    ``info["norm_estimate"]`` is the largest ``||rho(F)|| / ||F||_inf`` seen
    over the samples and ``F = 1 (x) id``.
    """
    rng = _rng(rng_seed)
    dom = rho.domain
    b = rho.basis_action
    k, n = rho.space.atom_count, rho.codomain.ambient_dim
    report = Report("representation")
    one = OperatorFunction.constant(rho.space, dom.identity())
    report.add("unital", operator_norm(rho(one) - np.eye(n)), tol.absolute,
               witness={"F": "constant identity", "image": rho(one)})

    rows, cols = dom.units
    index = dom.unit_index
    products = np.einsum("xdab,yebc->xdyeac", b, b)
    expected = np.zeros_like(products)
    for x in range(k):
        for d in range(dom.dim):
            for e in range(dom.dim):
                if cols[d] == rows[e]:
                    expected[x, d, x, e] = b[x, index[(int(rows[d]), int(cols[e]))]]
    diff = np.linalg.norm(products - expected, axis=(-2, -1))
    w = np.unravel_index(int(np.argmax(diff)), diff.shape)
    report.add("multiplicative_basis", float(diff.max()), tol.absolute,
               witness={"atoms": [int(w[0]), int(w[2])], "units": [int(w[1]), int(w[3])]})
    transposed = np.array([index[(int(j), int(i))] for i, j in zip(rows, cols)])
    star = np.linalg.norm(adjoint(b) - b[:, transposed], axis=(-2, -1))
    w = np.unravel_index(int(np.argmax(star)), star.shape)
    report.add("star_basis", float(star.max()), tol.absolute, witness={"atom": int(w[0]), "unit": int(w[1])})

    worst_mul, worst_star, wit_mul, wit_star = 0.0, 0.0, None, None
    norm_est = operator_norm(rho(one))
    for _ in range(samples):
        F, G = _random_function(rho, rng), _random_function(rho, rng)
        dm = operator_norm(rho(F @ G) - rho(F) @ rho(G))
        ds = operator_norm(rho(F.H) - adjoint(rho(F)))
        norm_est = max(norm_est, operator_norm(rho(F)))
        if dm >= worst_mul:
            worst_mul, wit_mul = dm, {"F": F.values, "G": G.values}
        if ds >= worst_star:
            worst_star, wit_star = ds, {"F": F.values}
    report.add("multiplicative_sampled", worst_mul, tol.absolute, witness=wit_mul)
    report.add("star_sampled", worst_star, tol.absolute, witness=wit_star)
    report.info["norm_estimate"] = norm_est
    rho.certified = {c.name: c.passed for c in report.checks}
    return report


def scalar_slice_defects(rho: Representation, p: AlgebraElement, samples: int = 8, rng_seed=0) -> tuple[float, float]:
    """Multiplicativity and *-defects of the scalar map ``f -> rho(f (x) P)``."""
    rng = _rng(rng_seed)
    k = rho.space.atom_count
    worst_mul = worst_star = 0.0
    for _ in range(samples):
        f = ScalarFunction(rng.standard_normal(k) + 1j * rng.standard_normal(k))
        g = ScalarFunction(rng.standard_normal(k) + 1j * rng.standard_normal(k))
        fp, gp = OperatorFunction.decomposable(f, p), OperatorFunction.decomposable(g, p)
        fgp = OperatorFunction.decomposable(f * g, p)
        worst_mul = max(worst_mul, operator_norm(rho(fgp) - rho(fp) @ rho(gp)))
        fbar = OperatorFunction.decomposable(ScalarFunction(f.values.conj()), p)
        worst_star = max(worst_star, operator_norm(rho(fbar) - adjoint(rho(fp))))
    return worst_mul, worst_star


def rep_to_measure(rho: Representation, tol: Tolerance = REP_TOL, samples: int = 4, rng_seed=0) -> NonNegativeSpectralMeasure:
    """``M^x(E_d) := rho(chi_x (x) E_d)``, after certifying ``rho``."""
    report = certify_representation(rho, samples, rng_seed, tol)
    if not report.passed:
        raise NotARepresentation(f"failed checks: {[c.name for c in report.failures()]}", report)
    maps = np.empty_like(rho.basis_action)
    for x in range(rho.space.atom_count):
        chi = ScalarFunction.indicator(rho.space.singleton(x))
        for d in range(rho.domain.dim):
            maps[x, d] = rho(OperatorFunction.decomposable(chi, AlgebraElement(rho.domain, rho.domain.unit(d))))
    return NonNegativeSpectralMeasure(rho.space, rho.domain, rho.codomain, maps)


def measure_to_rep(m: NonNegativeSpectralMeasure, tol: Tolerance = REP_TOL, samples: int = 4, rng_seed=0) -> Representation:
    """``rho(F) := int F dM``, after validating ``M`` as normalized non-negative spectral."""
    report = validate_nonneg_spectral(m, samples, rng_seed, tol, normalized=True)
    if not report.passed:
        raise InvalidMeasure(f"failed checks: {[c.name for c in report.failures()][:5]}", report)
    action = np.empty_like(m.atom_maps)
    for x in range(m.space.atom_count):
        chi = ScalarFunction.indicator(m.space.singleton(x))
        for d in range(m.domain.dim):
            F = OperatorFunction.decomposable(chi, AlgebraElement(m.domain, m.domain.unit(d)))
            action[x, d] = integrate_literal(F, m).matrix
    return Representation(m.space, m.domain, m.codomain, action)


def basis_defect(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b)), initial=0.0))


def roundtrip_defect(seed, **blueprint_kwargs) -> tuple[float, float]:
    """Basis defects of rep -> measure -> rep and measure -> rep -> measure."""
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    first, second = ss.spawn(2)
    rho = generate_representation(random_blueprint(np.random.default_rng(first), **blueprint_kwargs))
    rep_side = basis_defect(measure_to_rep(rep_to_measure(rho)).basis_action, rho.basis_action)
    rho2 = generate_representation(random_blueprint(np.random.default_rng(second), **blueprint_kwargs))
    m = rep_to_measure(rho2)
    measure_side = basis_defect(rep_to_measure(measure_to_rep(m)).atom_maps, m.atom_maps)
    return rep_side, measure_side


# --- negative controls --------------------------------------------------------

def scaled_representation(rho: Representation, factor: float = 2.0) -> Representation:
    return rho.with_action(factor * rho.basis_action)


def transposed_representation(rho: Representation) -> Representation:
    """``F -> rho(F)^T``: unital and *-preserving but anti-multiplicative."""
    return rho.with_action(np.swapaxes(rho.basis_action, -1, -2))


def perturbed_measure(m: NonNegativeSpectralMeasure, size: float = 1e-3, rng_seed=0) -> NonNegativeSpectralMeasure:
    """Add Hermitian noise of norm ``size`` to ``M^0(E_0)``."""
    rng = _rng(rng_seed)
    n = m.codomain.ambient_dim
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    h = g + g.conj().T
    maps = np.array(m.atom_maps)
    maps[0, 0] += size * h / operator_norm(h)
    return m.with_maps(maps)
