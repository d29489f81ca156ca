"""Command-line scenario runner and instance generator.

    opmeasure run SCENARIO [--in PATH] [--out PATH] [--seed N] [--trials N]
                           [--tol-abs X] [--workers N]
    opmeasure generate --kind KIND [--atoms K] [--domain 2,1] [--multiplicities 1,2]
                       [--codomain-dim N] [--variant V] [--seed N] --out PATH

Reports are JSON lines on stdout (or ``--out``). Exit status: 0 when every
check passed, 1 on any failed check, 2 on usage or I/O errors.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import instances, scenarios
from .algebra import MatrixAlgebra, sample_positive
from .correspondence import (
    RepresentationBlueprint,
    generate_representation,
    perturbed_measure,
    random_blueprint,
    rep_to_measure,
    scaled_representation,
    transposed_representation,
)
from .errors import BadConfig, BadInstanceFile
from .family import atomwise_family, positive_family_from_measure
from .kernel import Tolerance, random_unitary
from .measures import FiniteMeasurableSpace, identity_measure, random_cp_measure, random_transpose_measure

SCENARIOS = ("validate", "build-from-family", "roundtrip", "semivariation", "convergence",
             "multiplicativity", "full-suite")
VARIANTS = ("none", "transpose", "identity", "not-spectral", "scaled", "transposed", "nonadditive")


def _record(scenario, trial, seed, report, tol, elapsed) -> dict:
    out = report.to_dict()
    out.pop("name")
    return {
        "scenario": scenario,
        "trial": trial,
        "seed": seed,
        "tolerances": {"abs": tol.absolute, "rel": tol.relative, "roundtrip": scenarios.ROUNDTRIP_TOL},
        "wall_time": elapsed,
        **out,
    }


def _timed(fn, *args):
    t0 = time.perf_counter()
    report = fn(*args)
    return report, time.perf_counter() - t0


def _run_trials(name, count, seed, tol, workers):
    fn = scenarios.TRIALS[name]

    def one(i):
        report, elapsed = _timed(fn, np.random.SeedSequence([seed, i]), tol)
        for c in report.failures():
            if c.witness is None:
                c.witness = {"seed_entropy": [seed, i]}
        return _record(name, i, seed, report, tol, elapsed)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(one, range(count)))
    return [one(i) for i in range(count)]


def _file_records(scenario, path, seed, tol):
    inst = instances.load(scenarios.resolve_path(path))
    if scenario == "validate":
        report, elapsed = _timed(scenarios.validate_instance, inst, tol, 8, seed)
    elif scenario == "build-from-family":
        report, elapsed = _timed(scenarios.build_instance, inst, tol)
    elif scenario == "semivariation":
        report, elapsed = _timed(scenarios.semivariation_instance, inst, tol, np.random.SeedSequence(seed))
    else:
        raise BadConfig(f"scenario {scenario!r} does not take --in")
    rec = _record(scenario, 0, seed, report, tol, elapsed)
    rec["instance"] = str(path)
    return [rec]


def negative_control_records(seed, tol):
    out = []
    for i, path in enumerate(sorted(scenarios.fixture_dir().glob("*.json"))):
        inst = instances.load(path)
        if inst.metadata.get("expect") != "reject":
            continue
        report, elapsed = _timed(scenarios.negative_control, inst, tol)
        rec = _record("negative-control", i, seed, report, tol, elapsed)
        rec["instance"] = path.name
        out.append(rec)
    return out


def run(args) -> int:
    tol = Tolerance(args.tol_abs, args.tol_rel)
    if args.trials < 0 or args.workers < 1:
        raise BadConfig("--trials must be >= 0 and --workers >= 1")
    if args.input:
        records = _file_records(args.scenario, args.input, args.seed, tol)
    elif args.scenario == "full-suite":
        records = _run_trials("roundtrip", args.trials, args.seed, tol, args.workers)
        side = min(args.trials, 10)
        for name in ("validate", "build-from-family", "semivariation", "convergence", "multiplicativity"):
            records += _run_trials(name, side, args.seed, tol, args.workers)
        records += negative_control_records(args.seed, tol)
    else:
        records = _run_trials(args.scenario, args.trials, args.seed, tol, args.workers)
    lines = "".join(json.dumps(r, sort_keys=True) + "\n" for r in records)
    if args.out:
        Path(args.out).write_text(lines)
    else:
        sys.stdout.write(lines)
    failed = sum(not r["passed"] for r in records)
    print(f"{len(records) - failed}/{len(records)} records passed", file=sys.stderr)
    return 0 if failed == 0 else 1


def _ints(text: str | None):
    if text is None:
        return None
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise BadConfig(f"expected comma-separated integers, got {text!r}") from exc


def build_instance(kind, atoms=None, domain=None, multiplicities=None, codomain_dim=None,
                   variant="none", seed=0) -> instances.Instance:
    """Deterministic instance for ``generate``; same arguments give the same instance."""
    rng = np.random.default_rng(seed)
    meta = {"seed": seed, "variant": variant}
    domain_alg = MatrixAlgebra(domain or [2])
    k = atoms or (len(multiplicities) if multiplicities else 2)
    space = FiniteMeasurableSpace(k)
    if kind in ("representation", "spectral-measure"):
        if multiplicities:
            if len(multiplicities) != k:
                raise BadConfig("--multiplicities needs one entry per atom")
            n = sum(multiplicities) * domain_alg.ambient_dim
            bp = RepresentationBlueprint(space, domain_alg, tuple(multiplicities), random_unitary(n, rng))
        else:
            bp = random_blueprint(rng, atoms=k, domain_blocks=list(domain_alg.blocks))
        rho = generate_representation(bp)
        if kind == "representation":
            if variant == "scaled":
                rho, meta = scaled_representation(rho), {**meta, "expect": "reject", "description": "representation scaled by 2"}
            elif variant == "transposed":
                rho, meta = transposed_representation(rho), {**meta, "expect": "reject", "description": "representation composed with transpose"}
            elif variant != "none":
                raise BadConfig(f"variant {variant!r} does not apply to {kind}")
            return instances.Instance(kind, space, domain_alg, rho.codomain, rho, meta)
        m = rep_to_measure(rho)
        if variant == "not-spectral":
            m = perturbed_measure(m, 1e-3, rng)
            meta = {**meta, "expect": "reject", "description": "non-projection atom value"}
        elif variant != "none":
            raise BadConfig(f"variant {variant!r} does not apply to {kind}")
        meta["normalized"] = True
        return instances.Instance(kind, space, domain_alg, m.codomain, m, meta)
    codomain = MatrixAlgebra([codomain_dim or domain_alg.ambient_dim])
    if kind == "measure":
        if variant == "identity":
            m = identity_measure(space, domain_alg)
            codomain = domain_alg
        elif variant == "transpose":
            m = random_transpose_measure(space, domain_alg, codomain, rng)
        elif variant == "none":
            m = random_cp_measure(space, domain_alg, codomain, rng)
        else:
            raise BadConfig(f"variant {variant!r} does not apply to {kind}")
        return instances.Instance(kind, space, domain_alg, codomain, m, meta)
    if kind == "family-probe-set":
        if variant == "nonadditive":
            fam = atomwise_family(space, domain_alg, domain_alg, lambda x, a: 0.5 * (a + a @ a))
            codomain = domain_alg
            meta = {**meta, "expect": "reject", "description": "non-additive family (A + A^2)/2"}
        elif variant == "none":
            fam = positive_family_from_measure(random_cp_measure(space, domain_alg, codomain, rng))
        else:
            raise BadConfig(f"variant {variant!r} does not apply to {kind}")
        triples = [(sample_positive(domain_alg, rng), sample_positive(domain_alg, rng), float(rng.uniform(0, 3)))
                   for _ in range(6)]
        return instances.Instance(kind, space, domain_alg, codomain, instances.make_probe_set(fam, triples), meta)
    raise BadConfig(f"unknown kind {kind!r}")


def generate(args) -> int:
    inst = build_instance(args.kind, args.atoms, _ints(args.domain), _ints(args.multiplicities),
                          args.codomain_dim, args.variant, args.seed)
    text = instances.dumps(inst)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="opmeasure", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a scenario and emit JSON-lines reports")
    r.add_argument("scenario", choices=SCENARIOS)
    r.add_argument("--in", dest="input", metavar="PATH", help="instance file (relative paths also searched in $%s)" % scenarios.FIXTURE_ENV)
    r.add_argument("--out", metavar="PATH")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--trials", type=int, default=10)
    r.add_argument("--tol-abs", type=float, default=1e-9)
    r.add_argument("--tol-rel", type=float, default=1e-9)
    r.add_argument("--workers", type=int, default=1)
    r.set_defaults(func=run)

    g = sub.add_parser("generate", help="write a deterministic instance file")
    g.add_argument("--kind", required=True, choices=instances.KINDS)
    g.add_argument("--atoms", type=int)
    g.add_argument("--domain", help="block sizes of W1, e.g. 2,1")
    g.add_argument("--multiplicities", help="per-atom multiplicities for representations, e.g. 1,2")
    g.add_argument("--codomain-dim", type=int)
    g.add_argument("--variant", choices=VARIANTS, default="none")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", metavar="PATH")
    g.set_defaults(func=generate)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except (BadConfig, BadInstanceFile, OSError, ValueError) as exc:
        print(f"opmeasure: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
