"""JSON instance files.

One self-describing document per instance::

    {"format": "opmeasure-instance/1", "kind": ..., "atom_count": k,
     "domain": [blocks], "codomain": [blocks], "payload": {...}, "metadata": {...}}

Complex scalars are ``[re, im]`` pairs. For ``measure``, ``spectral-measure``
and ``representation`` the payload holds ``maps[x][d]``, the image of the
matrix unit ``E_d`` (domain basis order) on atom ``x``. A
``family-probe-set`` payload stores a positive family evaluated at a finite
list of probe operators plus the ``(A, B, A+B, lambda*A, lambda)`` index
triples used for its compatibility check; the builder's own probes (parts of
the matrix units) are included so the family can be rebuilt from the file.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .algebra import AlgebraElement, MatrixAlgebra, cartesian_parts, jordan_parts
from .correspondence import Representation
from .errors import BadInstanceFile, DomainMismatch
from .family import PositiveFamily
from .measures import FiniteMeasurableSpace, NonNegativeMeasure, NonNegativeSpectralMeasure, PovMeasure

FORMAT = "opmeasure-instance/1"
KINDS = ("measure", "spectral-measure", "representation", "family-probe-set")
PROBE_MATCH_TOL = 1e-9


def encode_complex(a) -> list:
    a = np.asarray(a, dtype=np.complex128)
    return np.stack([a.real, a.imag], axis=-1).tolist()


def decode_complex(data, shape: tuple, path: str) -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise BadInstanceFile(f"not a numeric nested array ({exc})", path) from exc
    if arr.shape != tuple(shape) + (2,):
        raise BadInstanceFile(f"shape {arr.shape[:-1] if arr.ndim else ()} (+[re,im]) expected {tuple(shape)}", path)
    if not np.all(np.isfinite(arr)):
        raise BadInstanceFile("non-finite entries", path)
    out = np.empty(arr.shape[:-1], dtype=np.complex128)
    out.real, out.imag = arr[..., 0], arr[..., 1]  # keeps signed zeros for byte-identical re-serialization
    return out


@dataclass
class ProbeSet:
    operators: list[np.ndarray]
    values: list[np.ndarray]
    triples: list[tuple[int, int, int, int, float]]


@dataclass
class Instance:
    kind: str
    space: FiniteMeasurableSpace
    domain: MatrixAlgebra
    codomain: MatrixAlgebra
    payload: Any
    metadata: dict = field(default_factory=dict)

    @property
    def obj(self):
        """The measure / representation / family the file describes."""
        if self.kind == "family-probe-set":
            return probe_family(self)
        return self.payload


def probe_family(inst: Instance) -> PositiveFamily:
    probes: ProbeSet = inst.payload
    ops = np.stack(probes.operators)

    def ev(a: AlgebraElement) -> PovMeasure:
        dist = np.abs(ops - a.matrix[None]).max(axis=(1, 2))
        i = int(np.argmin(dist))
        if dist[i] > PROBE_MATCH_TOL:
            raise KeyError("operator is not in the stored probe set")
        return PovMeasure(inst.space, inst.codomain, probes.values[i])

    triples = [
        (AlgebraElement(inst.domain, probes.operators[a]), AlgebraElement(inst.domain, probes.operators[b]), lam)
        for a, b, _, _, lam in probes.triples
    ]
    return PositiveFamily(inst.space, inst.domain, inst.codomain, ev, probe_triples=triples)


def builder_probes(domain: MatrixAlgebra) -> list[np.ndarray]:
    """Positive operators a positive-family builder queries: Jordan parts of re/im of each unit."""
    out = []
    for d in range(domain.dim):
        re, im = cartesian_parts(AlgebraElement(domain, domain.unit(d)))
        for part in (*jordan_parts(re), *jordan_parts(im)):
            out.append(part.matrix)
    return out


def make_probe_set(family: PositiveFamily, triples) -> ProbeSet:
    """Evaluate ``family`` at the builder probes and at every operator in ``triples``."""
    ops, values = [], []

    def add(m) -> int:
        ops.append(np.asarray(m, dtype=np.complex128))
        values.append(family(AlgebraElement(family.domain, m)))
        return len(ops) - 1

    for m in builder_probes(family.domain):
        add(m)
    idx = []
    for a, b, lam in triples:
        a, b = np.asarray(getattr(a, "matrix", a)), np.asarray(getattr(b, "matrix", b))
        idx.append((add(a), add(b), add(a + b), add(lam * a), float(lam)))
    return ProbeSet(ops, values, idx)


def to_document(inst: Instance) -> dict:
    if inst.kind not in KINDS:
        raise BadInstanceFile(f"unknown kind {inst.kind!r}", "kind")
    if inst.kind == "family-probe-set":
        p: ProbeSet = inst.payload
        payload = {
            "family": "positive",
            "probes": [{"operator": encode_complex(o), "atoms": encode_complex(v)} for o, v in zip(p.operators, p.values)],
            "triples": [[a, b, ab, la, lam] for a, b, ab, la, lam in p.triples],
        }
    elif inst.kind == "representation":
        payload = {"basis": "matrix-units", "maps": encode_complex(inst.payload.basis_action)}
    else:
        payload = {"basis": "matrix-units", "maps": encode_complex(inst.payload.atom_maps)}
    return {
        "format": FORMAT,
        "kind": inst.kind,
        "atom_count": inst.space.atom_count,
        "domain": list(inst.domain.blocks),
        "codomain": list(inst.codomain.blocks),
        "payload": payload,
        "metadata": inst.metadata,
    }


def dumps(inst: Instance) -> str:
    return json.dumps(to_document(inst), sort_keys=True, separators=(",", ":")) + "\n"


def save(inst: Instance, path) -> None:
    Path(path).write_text(dumps(inst))


def _field(doc: dict, key: str, path: str = ""):
    if key not in doc:
        raise BadInstanceFile("missing field", f"{path}{key}")
    return doc[key]


def _blocks(value, path) -> MatrixAlgebra:
    if not isinstance(value, list) or not value or not all(isinstance(b, int) and b >= 1 for b in value):
        raise BadInstanceFile("expected a nonempty list of positive integers", path)
    return MatrixAlgebra(value)


def from_document(doc: dict) -> Instance:
    if not isinstance(doc, dict):
        raise BadInstanceFile("top level must be an object")
    if doc.get("format") != FORMAT:
        raise BadInstanceFile(f"expected {FORMAT!r}", "format")
    kind = _field(doc, "kind")
    if kind not in KINDS:
        raise BadInstanceFile(f"unknown kind {kind!r}", "kind")
    k = _field(doc, "atom_count")
    if not isinstance(k, int) or k < 1:
        raise BadInstanceFile("must be a positive integer", "atom_count")
    space = FiniteMeasurableSpace(k)
    domain = _blocks(_field(doc, "domain"), "domain")
    codomain = _blocks(_field(doc, "codomain"), "codomain")
    payload = _field(doc, "payload")
    metadata = doc.get("metadata", {})
    if not isinstance(payload, dict):
        raise BadInstanceFile("must be an object", "payload")
    n2 = codomain.ambient_dim
    try:
        if kind == "family-probe-set":
            probes = _field(payload, "probes", "payload.")
            ops, values = [], []
            for i, pr in enumerate(probes):
                n1 = domain.ambient_dim
                ops.append(decode_complex(_field(pr, "operator", f"payload.probes[{i}]."), (n1, n1), f"payload.probes[{i}].operator"))
                values.append(decode_complex(_field(pr, "atoms", f"payload.probes[{i}]."), (k, n2, n2), f"payload.probes[{i}].atoms"))
            triples = []
            for i, t in enumerate(_field(payload, "triples", "payload.")):
                if len(t) != 5 or not all(isinstance(j, int) and 0 <= j < len(ops) for j in t[:4]):
                    raise BadInstanceFile("expected [iA, iB, iA+B, ilambdaA, lambda]", f"payload.triples[{i}]")
                triples.append((t[0], t[1], t[2], t[3], float(t[4])))
            body = ProbeSet(ops, values, triples)
        else:
            maps = decode_complex(_field(payload, "maps", "payload."), (k, domain.dim, n2, n2), "payload.maps")
            if kind == "representation":
                body = Representation(space, domain, codomain, maps)
            elif kind == "spectral-measure":
                body = NonNegativeSpectralMeasure(space, domain, codomain, maps)
            else:
                body = NonNegativeMeasure(space, domain, codomain, maps)
    except DomainMismatch as exc:
        raise BadInstanceFile(str(exc), "payload") from exc
    return Instance(kind, space, domain, codomain, body, metadata)


def loads(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise BadInstanceFile(f"invalid JSON: {exc}") from exc
    return from_document(doc)


def load(path) -> Instance:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise BadInstanceFile(f"cannot read {path}: {exc}") from exc
    return loads(text)
