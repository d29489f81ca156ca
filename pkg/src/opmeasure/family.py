"""Measures assembled from compatible families of POVMs or spectral measures.

A family is an evaluator queried at chosen operators; its index set (all
positive operators, or all projections) is infinite, so compatibility is
certified on a finite probe set and reports are tolerance-qualified.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .algebra import (
    AlgebraElement,
    MatrixAlgebra,
    cartesian_parts,
    jordan_parts,
    riemann_sum,
    sample_positive,
    sample_projection,
    sample_unitary,
    spectral_decomposition,
    _rng,
)
from .errors import DomainMismatch, IncompatibleFamily
from .kernel import DEFAULT_TOL, Tolerance, operator_norm
from .measures import (
    FiniteMeasurableSpace,
    NonNegativeMeasure,
    NonNegativeSpectralMeasure,
    PovMeasure,
    SpectralMeasureFD,
    validate_pov,
    validate_spectral,
)
from .report import Report


@dataclass
class PositiveFamily:
    """``A -> E_A`` for positive ``A`` in ``domain``; ``E_A`` is a POVM into ``codomain``."""

    space: FiniteMeasurableSpace
    domain: MatrixAlgebra
    codomain: MatrixAlgebra
    evaluator: Callable[[AlgebraElement], PovMeasure]
    probe_triples: Sequence[tuple] | None = None

    def __call__(self, a: AlgebraElement) -> np.ndarray:
        if a.algebra != self.domain:
            raise DomainMismatch("family queried outside its domain")
        return np.asarray(self.evaluator(a).atom_values)


@dataclass
class ProjectionFamily:
    """``P -> F_P`` for projections ``P`` in ``domain``; ``F_P`` is a spectral measure."""

    space: FiniteMeasurableSpace
    domain: MatrixAlgebra
    codomain: MatrixAlgebra
    evaluator: Callable[[AlgebraElement], SpectralMeasureFD]

    def __call__(self, p: AlgebraElement) -> np.ndarray:
        if p.algebra != self.domain:
            raise DomainMismatch("family queried outside its domain")
        return np.asarray(self.evaluator(p).atom_values)


class CompatibilityReport(Report):
    def _defect(self, name: str) -> float:
        return self.worst(name)

    @property
    def additivity_defect(self) -> float:
        return self._defect("additivity")

    @property
    def homogeneity_defect(self) -> float:
        return self._defect("homogeneity")

    @property
    def linear_relation_defect(self) -> float:
        return self._defect("linear_relation")

    @property
    def product_law_defect(self) -> float:
        return self._defect("product_law")

    @property
    def bound_constant(self) -> dict:
        """Estimated ``k_Delta`` for each singleton (keyed by atom) and for ``"X"``."""
        return self.info.get("k_delta", {})


def positive_family_from_measure(m: NonNegativeMeasure) -> PositiveFamily:
    return PositiveFamily(m.space, m.domain, m.codomain, m.restrict)


def projection_family_from_measure(m: NonNegativeMeasure) -> ProjectionFamily:
    def ev(p):
        return SpectralMeasureFD(m.space, m.codomain, m.atom_values(p))

    return ProjectionFamily(m.space, m.domain, m.codomain, ev)


def atomwise_family(space, domain, codomain, fn: Callable[[int, np.ndarray], np.ndarray]) -> PositiveFamily:
    """Family ``E_A({x}) = fn(x, A)``; no linearity is assumed."""

    def ev(a):
        return PovMeasure(space, codomain, [fn(x, a.matrix) for x in range(space.atom_count)])

    return PositiveFamily(space, domain, codomain, ev)


def _k_update(k: dict, values: np.ndarray, scale: float = 1.0):
    if scale <= 0:
        return
    for x, v in enumerate(values):
        k[x] = max(k.get(x, 0.0), operator_norm(v) / scale)
    k["X"] = max(k.get("X", 0.0), operator_norm(values.sum(axis=0)) / scale)


def check_positive_family(fam: PositiveFamily, samples: int = 16, rng_seed=0,
                          tol: Tolerance = DEFAULT_TOL) -> CompatibilityReport:
    """Additivity, positive homogeneity and the norm bound on sampled probes.

    Probes are ``samples`` random unit-norm positive pairs ``(A, B)`` with a
    random ``lambda >= 0``, or ``fam.probe_triples`` when the family carries
    a fixed probe set. ``k_Delta`` is estimated as the largest
    ``||E_A(Delta)|| / ||A||`` seen.
    """
    rng = _rng(rng_seed)
    report = CompatibilityReport("positive_family")
    if fam.probe_triples is not None:
        triples = list(fam.probe_triples)
    else:
        triples = [(sample_positive(fam.domain, rng), sample_positive(fam.domain, rng), float(rng.uniform(0, 3)))
                   for _ in range(samples)]
    k: dict = {}
    worst = {"additivity": (0.0, None), "homogeneity": (0.0, None), "povm": (0.0, None)}

    def bump(name, value, witness):
        if value >= worst[name][0]:
            worst[name] = (value, witness)

    for a, b, lam in triples:
        ea, eb, eab, ela = fam(a), fam(b), fam(a + b), fam(lam * a)
        for which, vals in (("A", ea), ("B", eb), ("A+B", eab)):
            pov = validate_pov(PovMeasure(fam.space, fam.codomain, vals), tol)
            bump("povm", max((c.defect for c in pov.checks), default=0.0), {"operator": which, "A": a, "B": b})
        _k_update(k, ea, a.norm())
        _k_update(k, eb, b.norm())
        per_atom = [operator_norm(d) for d in eab - ea - eb]
        x = int(np.argmax(per_atom))
        bump("additivity", per_atom[x], {"A": a, "B": b, "atom": x})
        per_atom = [operator_norm(d) for d in ela - lam * ea]
        x = int(np.argmax(per_atom))
        bump("homogeneity", per_atom[x], {"A": a, "lambda": lam, "atom": x})
    for name, (value, witness) in worst.items():
        report.add(name, value, tol.absolute, witness=witness)
    report.info["k_delta"] = k
    report.info["probes"] = len(triples)
    return report


def build_from_positive_family(fam: PositiveFamily, check: bool = True, samples: int = 16,
                               rng_seed=0, tol: Tolerance = DEFAULT_TOL) -> NonNegativeMeasure:
    """``m(Delta)(A) = (E_{re A+} - E_{re A-})(Delta) + i (E_{im A+} - E_{im A-})(Delta)``.

    Applied to each matrix unit of the domain to obtain the basis-stored maps.
    """
    if check:
        report = check_positive_family(fam, samples, rng_seed, tol)
        if not report.passed:
            raise IncompatibleFamily(f"failed checks: {[c.name for c in report.failures()]}", report)
    dom = fam.domain
    maps = np.empty((fam.space.atom_count, dom.dim, fam.codomain.ambient_dim, fam.codomain.ambient_dim),
                    dtype=np.complex128)
    for d in range(dom.dim):
        unit = AlgebraElement(dom, dom.unit(d))
        re, im = cartesian_parts(unit)
        rp, rm = jordan_parts(re)
        ip, imn = jordan_parts(im)
        maps[:, d] = (fam(rp) - fam(rm)) + 1j * (fam(ip) - fam(imn))
    return NonNegativeMeasure(fam.space, dom, fam.codomain, maps)


# --- projection families ----------------------------------------------------

def measure_of_hermitian(fam: ProjectionFamily, a: AlgebraElement, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """``M_A = sum_k lambda_k F_{P_k}`` over the finite spectral decomposition of ``A``."""
    out = np.zeros((fam.space.atom_count,) + (fam.codomain.ambient_dim,) * 2, dtype=np.complex128)
    for lam, p in spectral_decomposition(a, tol):
        if lam != 0.0:
            out += lam * fam(p)
    return out


def _sum_terms(fam: ProjectionFamily, terms) -> np.ndarray:
    out = np.zeros((fam.space.atom_count,) + (fam.codomain.ambient_dim,) * 2, dtype=np.complex128)
    for lam, p in terms:
        if lam != 0.0:
            out += lam * fam(p)
    return out


def _diag_projection(dom: MatrixAlgebra, u: np.ndarray, d) -> AlgebraElement:
    p = (u * np.asarray(d)) @ u.conj().T
    return AlgebraElement(dom, 0.5 * (p + p.conj().T))


def check_projection_family(fam: ProjectionFamily, samples: int = 8, rng_seed=0,
                            tol: Tolerance = DEFAULT_TOL) -> CompatibilityReport:
    """Linear relations, the norm bound and the product law on generated probes.

    Relations checked: ``F_0 = 0``; ``F_P + F_{I-P} = F_I``;
    ``F_P + F_{I-P} = F_Q + F_{I-Q}``; and ``sum_i l_i F_{P_i} = sum_k c_k F_{R_k}``
    for commuting ``P_i`` diagonal in a shared eigenbasis, with ``R_k`` the
    rank-one eigenprojections and ``c_k`` the exact diagonal of ``sum_i l_i P_i``.
    """
    rng = _rng(rng_seed)
    dom = fam.domain
    report = CompatibilityReport("projection_family")
    eye = dom.identity()
    k: dict = {}
    worst: dict = {"spectral": (0.0, None), "linear_relation": (0.0, None), "product_law": (0.0, None)}

    def bump(name, value, witness):
        if value >= worst[name][0]:
            worst[name] = (value, witness)

    def query(p):
        vals = fam(p)
        sub = validate_spectral(SpectralMeasureFD(fam.space, fam.codomain, vals), tol)
        bump("spectral", max((c.defect for c in sub.checks), default=0.0), {"P": p})
        _k_update(k, vals)
        return vals

    def rel(lhs, rhs, witness):
        per_atom = [operator_norm(d) for d in lhs - rhs]
        x = int(np.argmax(per_atom))
        bump("linear_relation", per_atom[x], {**witness, "atom": x})

    f_eye = query(eye)
    rel(query(dom.zero()), np.zeros_like(f_eye), {"relation": "F_0 = 0"})
    canonical = []
    for i in range(dom.ambient_dim):
        d = np.zeros(dom.ambient_dim)
        d[i] = 1
        canonical.append(_diag_projection(dom, np.eye(dom.ambient_dim), d))
    randoms = [sample_projection(dom, rng) for _ in range(samples)]
    for p in canonical + randoms:
        rel(query(p) + query(eye - p), f_eye, {"relation": "P + (I-P) = I", "P": p})
    for p, q in zip(randoms, randoms[1:]):
        rel(query(p) + query(eye - p), query(q) + query(eye - q), {"relation": "P + (I-P) = Q + (I-Q)", "P": p, "Q": q})

    n = dom.ambient_dim
    for _ in range(samples):
        u = sample_unitary(dom, rng).matrix
        diags = rng.integers(0, 2, size=(3, n))
        coeffs = rng.integers(-4, 5, size=3) / rng.integers(1, 5, size=3)
        lhs = sum(c * query(_diag_projection(dom, u, d)) for c, d in zip(coeffs, diags))
        c_k = coeffs @ diags
        rhs = sum(c_k[j] * query(_diag_projection(dom, u, np.eye(n)[j])) for j in range(n))
        rel(lhs, rhs, {"relation": "commuting", "coefficients": coeffs, "diagonals": diags, "basis": u})

    # product law on commuting pairs: canonical diagonal pairs plus shared-eigenbasis pairs
    pairs = [(p, q) for p in canonical for q in canonical]
    for _ in range(samples):
        u = sample_unitary(dom, rng).matrix
        d1, d2 = rng.integers(0, 2, size=(2, n))
        pairs.append((_diag_projection(dom, u, d1), _diag_projection(dom, u, d2)))
    for p, q in pairs:
        fp, fq = query(p), query(q)
        pq = p.matrix @ q.matrix
        fpq = query(AlgebraElement(dom, 0.5 * (pq + pq.conj().T)))
        for x in range(fam.space.atom_count):
            for y in range(fam.space.atom_count):
                target = fpq[x] if x == y else 0.0
                bump("product_law", operator_norm(fp[x] @ fq[y] - target), {"P": p, "Q": q, "atoms": [x, y]})

    for name, (value, witness) in worst.items():
        report.add(name, value, tol.absolute, witness=witness)
    kmax = max(k.values(), default=0.0)
    report.add("bound", max(0.0, kmax - 1.0), tol.absolute, witness={"k_delta": dict(k)})
    report.info["k_delta"] = k
    return report


def build_from_projection_family(fam: ProjectionFamily, check: bool = True, samples: int = 8,
                                 rng_seed=0, tol: Tolerance = DEFAULT_TOL) -> NonNegativeSpectralMeasure:
    """Basis maps from finite spectral decompositions of Hermitian unit combinations.

    ``M(E_ii) = F_{E_ii}``; for ``i != j`` in one block,
    ``E_ij = (H1 - i H2)/2`` with ``H1 = E_ij + E_ji`` and ``H2 = i(E_ij - E_ji)``,
    and ``M_H = sum_k lambda_k F_{P_k}`` for each Hermitian ``H``.
    """
    if check:
        report = check_projection_family(fam, samples, rng_seed, tol)
        if not report.passed:
            raise IncompatibleFamily(f"failed checks: {[c.name for c in report.failures()]}", report)
    dom = fam.domain
    rows, cols = dom.units
    maps = np.empty((fam.space.atom_count, dom.dim, fam.codomain.ambient_dim, fam.codomain.ambient_dim),
                    dtype=np.complex128)
    for d, (i, j) in enumerate(zip(rows, cols)):
        if i == j:
            maps[:, d] = fam(AlgebraElement(dom, dom.unit(d)))
        elif i < j:
            e = dom.unit(d)
            h1 = AlgebraElement(dom, e + e.T)
            h2 = AlgebraElement(dom, 1j * (e - e.T))
            m1, m2 = measure_of_hermitian(fam, h1, tol), measure_of_hermitian(fam, h2, tol)
            maps[:, d] = 0.5 * (m1 - 1j * m2)
            maps[:, dom.unit_index[(int(j), int(i))]] = 0.5 * (m1 + 1j * m2)
    return NonNegativeSpectralMeasure(fam.space, dom, fam.codomain, maps)


@dataclass
class RiemannPath:
    levels: list[int]
    defects: list[dict]
    k_delta: dict
    constant: float
    factor: float
    passed: bool = field(default=False)


def riemann_path_check(fam: ProjectionFamily, a: AlgebraElement, levels=(1, 10, 100, 1000),
                       factor: float = 3.0, tol: Tolerance = DEFAULT_TOL) -> RiemannPath:
    """Distance of ``M_{S_l(A)}(Delta)`` from ``M_A(Delta)`` along the Riemann sums.

    Checked for every singleton and for ``X``. Passes when each defect is at
    most ``factor * k_Delta / l`` (plus ``1e-12`` rounding slack); ``constant``
    is the largest observed ``l * defect / k_Delta``.
    """
    exact = measure_of_hermitian(fam, a, tol)
    k: dict = {}
    _k_update(k, fam(a.algebra.identity()))
    for _, p in spectral_decomposition(a, tol):
        _k_update(k, fam(p))
    defects, constant, ok = [], 0.0, True
    for level in levels:
        approx = _sum_terms(fam, riemann_sum(a, level, tol).terms)
        per = {x: operator_norm(approx[x] - exact[x]) for x in range(fam.space.atom_count)}
        per["X"] = operator_norm(approx.sum(axis=0) - exact.sum(axis=0))
        defects.append(per)
        for key, value in per.items():
            if value > factor * k[key] / level + 1e-12:
                ok = False
            if k[key] > 0:
                constant = max(constant, level * value / k[key])
    return RiemannPath(list(levels), defects, k, constant, factor, ok)
