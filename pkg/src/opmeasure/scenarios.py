"""Seeded trials and instance validation behind the ``run`` command.

Each trial takes a ``numpy.random.SeedSequence`` and returns a :class:`Report`.
"""
from __future__ import annotations

import os
from importlib import resources
from pathlib import Path

import numpy as np

from .algebra import MatrixAlgebra, sample_element, sample_positive
from .correspondence import (
    certify_representation,
    generate_representation,
    random_blueprint,
    rep_to_measure,
    roundtrip_defect,
)
from .errors import BadInstanceFile
from .family import (
    build_from_positive_family,
    build_from_projection_family,
    check_positive_family,
    positive_family_from_measure,
    projection_family_from_measure,
    riemann_path_check,
)
from .instances import Instance
from .integration import (
    OperatorFunction,
    ScalarFunction,
    integrate,
    integrate_limit,
    monotone_convergence_check,
    multiplicativity_check,
)
from .kernel import Tolerance, operator_norm
from .measures import (
    FiniteMeasurableSpace,
    identity_measure,
    random_cp_measure,
    random_transpose_measure,
    semivariation,
    validate_nonneg,
    validate_nonneg_spectral,
)
from .report import Report

FIXTURE_ENV = "OPMEASURE_FIXTURES"
ROUNDTRIP_TOL = 1e-8


def fixture_dir() -> Path:
    env = os.environ.get(FIXTURE_ENV)
    if env:
        return Path(env)
    return Path(str(resources.files("opmeasure") / "fixtures"))


def resolve_path(path: str) -> Path:
    """``path`` as given, else relative to the fixture directory."""
    p = Path(path)
    if p.exists():
        return p
    base = fixture_dir()
    for candidate in (base / p, base / p.name):
        if candidate.exists():
            return candidate
    raise BadInstanceFile(f"no such instance file: {path}")


def _rng(seed: np.random.SeedSequence) -> np.random.Generator:
    return np.random.default_rng(seed)


def _random_setup(rng, max_atoms=4, max_domain=3, max_codomain=6):
    space = FiniteMeasurableSpace(int(rng.integers(1, max_atoms + 1)))
    n1 = int(rng.integers(1, max_domain + 1))
    blocks = [n1] if rng.random() < 0.5 or n1 == 1 else [n1 - 1, 1]
    domain = MatrixAlgebra(blocks)
    codomain = MatrixAlgebra([int(rng.integers(1, max_codomain + 1))])
    return space, domain, codomain


def random_measure(rng, transpose: bool | None = None):
    space, domain, codomain = _random_setup(rng)
    if transpose is None:
        transpose = bool(rng.integers(0, 2))
    make = random_transpose_measure if transpose else random_cp_measure
    return make(space, domain, codomain, rng)


# --- trials -------------------------------------------------------------------

def trial_roundtrip(seed, tol: Tolerance) -> Report:
    rep = Report("roundtrip")
    rep_side, measure_side = roundtrip_defect(seed)
    rep.add("rep_side", rep_side, ROUNDTRIP_TOL)
    rep.add("measure_side", measure_side, ROUNDTRIP_TOL)
    return rep


def trial_validate(seed, tol: Tolerance) -> Report:
    rng = _rng(seed)
    rep = Report("validate")
    rho = generate_representation(random_blueprint(rng))
    rep.extend(certify_representation(rho, rng_seed=rng, tol=tol), "representation.")
    rep.extend(validate_nonneg_spectral(rep_to_measure(rho), rng_seed=rng, tol=tol, normalized=True), "spectral_measure.")
    rep.extend(validate_nonneg(random_measure(rng), tol=tol, rng_seed=rng), "measure.")
    return rep


def trial_build_from_family(seed, tol: Tolerance) -> Report:
    rng = _rng(seed)
    rep = Report("build_from_family")
    m = random_measure(rng)
    rebuilt = build_from_positive_family(positive_family_from_measure(m), rng_seed=rng, tol=tol)
    rep.add("positive_family_rebuild", float(np.abs(rebuilt.atom_maps - m.atom_maps).max()), 1e-10)
    big = generate_representation(random_blueprint(rng))
    mm = rep_to_measure(big)
    fam = projection_family_from_measure(mm)
    rebuilt = build_from_projection_family(fam, rng_seed=rng, tol=tol)
    rep.add("projection_family_rebuild", float(np.abs(rebuilt.atom_maps - mm.atom_maps).max()), 1e-9)
    path = riemann_path_check(fam, sample_positive(mm.domain, rng), factor=2.0, tol=tol)
    rep.add("riemann_path", path.constant, 2.0, passed=path.passed,
            witness={"levels": path.levels, "defects": path.defects, "k_delta": path.k_delta})
    return rep


def trial_multiplicativity(seed, tol: Tolerance) -> Report:
    rng = _rng(seed)
    rep = Report("multiplicativity")
    m = rep_to_measure(generate_representation(random_blueprint(rng)))
    worst, witness = 0.0, None
    for _ in range(10):
        F = OperatorFunction(m.domain, [sample_element(m.domain, rng).matrix for _ in range(m.space.atom_count)])
        G = OperatorFunction(m.domain, [sample_element(m.domain, rng).matrix for _ in range(m.space.atom_count)])
        d = multiplicativity_check(F, G, m)
        if d >= worst:
            worst, witness = d, {"F": F.values, "G": G.values}
    rep.add("multiplicativity", worst, ROUNDTRIP_TOL, witness=witness)
    return rep


def trial_semivariation(seed, tol: Tolerance, measure=None) -> Report:
    rng = _rng(seed)
    rep = Report("semivariation")
    if measure is None:
        k = int(rng.integers(1, 4))
        ident = identity_measure(FiniteMeasurableSpace(k), MatrixAlgebra([int(rng.integers(1, 4))]))
        lo, hi, _ = semivariation(ident, rng_seed=rng)
        rep.add("identity_lower", max(0.0, k - lo), 1e-6, witness={"atoms": k, "lower": lo})
        rep.add("identity_upper", abs(hi - 4 * k), 0.0, witness={"atoms": k, "upper": hi})
        measure = random_measure(rng)
    lo, hi, wit = semivariation(measure, rng_seed=rng)
    rep.add("lower_le_upper", max(0.0, lo - hi), 1e-6, witness={"lower": lo, "upper": hi, **wit})
    rep.info.update(lower=lo, upper=hi)
    return rep


def trial_convergence(seed, tol: Tolerance) -> Report:
    rng = _rng(seed)
    rep = Report("convergence")
    m = random_measure(rng, transpose=False)
    povm = m.restrict(sample_positive(m.domain, rng))
    f = ScalarFunction(rng.uniform(0, 2, size=m.space.atom_count))
    steps = int(rng.integers(5, 40))
    seq = [f * (1 - 1 / n) for n in range(1, steps + 1)]
    res = monotone_convergence_check(seq, povm, bound=povm.value(m.space.full()) * 2.0, limit=f)
    predicted = operator_norm(np.einsum("x,xij->ij", f.values, povm.atom_values)) / steps
    rep.add("final_deviation", abs(res.final_deviation - predicted), 1e-9,
            witness={"steps": steps, "predicted": predicted, "observed": res.final_deviation})
    F = OperatorFunction(m.domain, [sample_positive(m.domain, rng).matrix for _ in range(m.space.atom_count)])
    limit = integrate_limit([F * (1 - 2.0 ** -j) for j in range(1, 40)], m)
    rep.add("integrate_limit", operator_norm(limit.matrix - integrate(F, m).matrix),
            2 * operator_norm(m.identity_total()) * 2.0 ** -38 + 1e-12)
    return rep


TRIALS = {
    "validate": trial_validate,
    "build-from-family": trial_build_from_family,
    "roundtrip": trial_roundtrip,
    "semivariation": trial_semivariation,
    "convergence": trial_convergence,
    "multiplicativity": trial_multiplicativity,
}


# --- instance files -------------------------------------------------------------

def validate_instance(inst: Instance, tol: Tolerance, samples: int = 8, seed=0) -> Report:
    obj = inst.obj
    if inst.kind == "measure":
        return validate_nonneg(obj, tol=tol, rng_seed=seed)
    if inst.kind == "spectral-measure":
        normalized = bool(inst.metadata.get("normalized", True))
        return validate_nonneg_spectral(obj, samples, seed, tol, normalized=normalized)
    if inst.kind == "representation":
        return certify_representation(obj, samples, seed, tol)
    return check_positive_family(obj, tol=tol)


def build_instance(inst: Instance, tol: Tolerance) -> Report:
    if inst.kind != "family-probe-set":
        raise BadInstanceFile("build-from-family needs a family-probe-set instance", "kind")
    fam = inst.obj
    rep = Report("build_from_family")
    check = check_positive_family(fam, tol=tol)
    rep.extend(check, "check.")
    if check.passed:
        m = build_from_positive_family(fam, check=False)
        worst = 0.0
        for a, b, _ in fam.probe_triples:
            for op in (a, b):
                worst = max(worst, float(np.abs(m.atom_values(op) - fam(op)).max()))
        rep.add("rebuild_matches_probes", worst, tol.absolute)
    return rep


def semivariation_instance(inst: Instance, tol: Tolerance, seed) -> Report:
    if inst.kind not in ("measure", "spectral-measure"):
        raise BadInstanceFile("semivariation needs a measure instance", "kind")
    return trial_semivariation(seed, tol, measure=inst.obj)


def negative_control(inst: Instance, tol: Tolerance) -> Report:
    """Passes iff the invalid instance is rejected and every failure carries a witness."""
    if inst.kind == "family-probe-set":
        inner = check_positive_family(inst.obj, tol=tol)
    else:
        inner = validate_instance(inst, tol)
    rep = Report("negative_control", info={"fixture": inst.metadata.get("description", "")})
    fails = inner.failures()
    rep.add("rejected", 0.0 if fails else 1.0, 0.0, witness={"failed": [c.name for c in fails][:10]})
    rep.add("witnessed", 0.0 if fails and all(c.witness is not None for c in fails) else 1.0, 0.0,
            witness=fails[0].witness if fails else None)
    return rep
