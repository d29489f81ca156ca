"""Operator-valued measures on a finite measurable space.

The measurable space is ``{0, ..., k-1}`` with its full power set, so a
measure is determined by its atoms and countable additivity is just finite
additivity. Four classes are modelled:

* ``PovMeasure``: one PSD operator per atom.
* ``SpectralMeasureFD``: atoms are mutually orthogonal Hermitian projections.
* ``NonNegativeMeasure``: one linear map ``m^x: W1 -> W2`` per atom, positive
  on the positive cone of ``W1``. Stored as ``atom_maps[x, d] = m^x(E_d)``
  over the matrix-unit basis ``E_d`` of ``W1``.
* ``NonNegativeSpectralMeasure``: a non-negative measure whose restriction to
  each projection is spectral and which obeys the product law.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, NamedTuple, Sequence

import numpy as np

from .algebra import (
    AlgebraElement,
    MatrixAlgebra,
    projection_defect,
    sample_commuting_projections,
    sample_positive,
    sample_projection,
    sample_unitary,
    _rng,
)
from .errors import DomainMismatch, IntractablePartitionCount
from .kernel import DEFAULT_TOL, Tolerance, adjoint, operator_norm
from .report import Report

POSITIVITY_POLICIES = ("auto", "choi", "rank-one")


@dataclass(frozen=True)
class FiniteMeasurableSpace:
    atom_count: int

    def __post_init__(self):
        if int(self.atom_count) < 1:
            raise ValueError("atom_count must be >= 1")
        object.__setattr__(self, "atom_count", int(self.atom_count))

    def full(self) -> "MeasurableSet":
        return MeasurableSet(self, (True,) * self.atom_count)

    def empty(self) -> "MeasurableSet":
        return MeasurableSet(self, (False,) * self.atom_count)

    def singleton(self, x: int) -> "MeasurableSet":
        return self.subset([x])

    def subset(self, atoms: Iterable[int]) -> "MeasurableSet":
        atoms = set(int(a) for a in atoms)
        if any(a < 0 or a >= self.atom_count for a in atoms):
            raise ValueError(f"atoms {sorted(atoms)} out of range for {self.atom_count} atoms")
        return MeasurableSet(self, tuple(i in atoms for i in range(self.atom_count)))

    def all_sets(self) -> Iterable["MeasurableSet"]:
        for bits in itertools.product((False, True), repeat=self.atom_count):
            yield MeasurableSet(self, bits)


@dataclass(frozen=True)
class MeasurableSet:
    space: FiniteMeasurableSpace
    bits: tuple[bool, ...]

    def __post_init__(self):
        if len(self.bits) != self.space.atom_count:
            raise ValueError("membership bits must have length atom_count")

    @property
    def mask(self) -> np.ndarray:
        return np.array(self.bits, dtype=bool)

    @property
    def atoms(self) -> list[int]:
        return [i for i, b in enumerate(self.bits) if b]

    def __and__(self, other: "MeasurableSet") -> "MeasurableSet":
        return MeasurableSet(self.space, tuple(a and b for a, b in zip(self.bits, other.bits)))

    def __or__(self, other: "MeasurableSet") -> "MeasurableSet":
        return MeasurableSet(self.space, tuple(a or b for a, b in zip(self.bits, other.bits)))

    def isdisjoint(self, other: "MeasurableSet") -> bool:
        return not any(a and b for a, b in zip(self.bits, other.bits))


def _as_set(space: FiniteMeasurableSpace, s) -> MeasurableSet:
    if isinstance(s, MeasurableSet):
        if s.space != space:
            raise DomainMismatch("measurable set belongs to a different space")
        return s
    return space.subset(s)


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128)
    a.setflags(write=False)
    return a


class PovMeasure:
    """Positive operator-valued measure stored by its atom values."""

    def __init__(self, space: FiniteMeasurableSpace, codomain: MatrixAlgebra, atom_values):
        values = np.stack([np.asarray(getattr(v, "matrix", v)) for v in atom_values])
        n = codomain.ambient_dim
        if values.shape != (space.atom_count, n, n):
            raise DomainMismatch(f"atom values of shape {values.shape}, expected {(space.atom_count, n, n)}")
        self.space = space
        self.codomain = codomain
        self.atom_values = _freeze(values)

    def value(self, s) -> AlgebraElement:
        mask = _as_set(self.space, s).mask
        return AlgebraElement(self.codomain, self.atom_values[mask].sum(axis=0))

    def atom(self, x: int) -> AlgebraElement:
        return AlgebraElement(self.codomain, self.atom_values[x])

    def total(self) -> AlgebraElement:
        return AlgebraElement(self.codomain, self.atom_values.sum(axis=0))


class SpectralMeasureFD(PovMeasure):
    """Projection-valued measure; validity is checked by :func:`validate_spectral`."""


class NonNegativeMeasure:
    """Set function ``Delta -> (A -> sum_{x in Delta} m^x(A))`` with basis-stored atoms."""

    def __init__(self, space: FiniteMeasurableSpace, domain: MatrixAlgebra, codomain: MatrixAlgebra, atom_maps):
        maps = np.asarray(atom_maps, dtype=np.complex128)
        n = codomain.ambient_dim
        expected = (space.atom_count, domain.dim, n, n)
        if maps.shape != expected:
            raise DomainMismatch(f"atom maps of shape {maps.shape}, expected {expected}")
        self.space = space
        self.domain = domain
        self.codomain = codomain
        self.atom_maps = _freeze(maps)

    @classmethod
    def from_functions(cls, space, domain, codomain, functions: Sequence[Callable[[np.ndarray], np.ndarray]]):
        """Tabulate one linear map per atom on the matrix-unit basis of ``domain``."""
        if len(functions) != space.atom_count:
            raise ValueError("need one map per atom")
        maps = np.empty((space.atom_count, domain.dim, codomain.ambient_dim, codomain.ambient_dim), dtype=np.complex128)
        for x, f in enumerate(functions):
            for d in range(domain.dim):
                maps[x, d] = np.asarray(f(domain.unit(d)))
        return cls(space, domain, codomain, maps)

    def _coords(self, a) -> np.ndarray:
        if isinstance(a, AlgebraElement):
            if a.algebra != self.domain:
                raise DomainMismatch(f"operator lives in {a.algebra!r}, measure domain is {self.domain!r}")
            return self.domain.coords(a.matrix)
        m = np.asarray(a, dtype=np.complex128)
        if not self.domain.contains(m):
            raise DomainMismatch(f"operator is not in {self.domain!r}")
        return self.domain.coords(m)

    def atom_values(self, a) -> np.ndarray:
        """``m^x(A)`` for every atom, shape ``(k, N, N)``."""
        return np.einsum("xdij,d->xij", self.atom_maps, self._coords(a))

    def apply_atom(self, x: int, a) -> np.ndarray:
        return np.einsum("dij,d->ij", self.atom_maps[x], self._coords(a))

    def restrict(self, a) -> PovMeasure:
        """The set function ``m_A(Delta) = m(Delta)(A)``."""
        return PovMeasure(self.space, self.codomain, self.atom_values(a))

    def identity_total(self) -> np.ndarray:
        """``m_id(X)``."""
        return self.atom_values(self.domain.identity()).sum(axis=0)

    def with_maps(self, maps) -> "NonNegativeMeasure":
        return type(self)(self.space, self.domain, self.codomain, maps)


class NonNegativeSpectralMeasure(NonNegativeMeasure):
    def restrict(self, a) -> SpectralMeasureFD:
        return SpectralMeasureFD(self.space, self.codomain, self.atom_values(a))


@dataclass(frozen=True)
class TracePairing:
    """Normal functional ``B -> trace(weight @ B)`` on the codomain."""

    weight: AlgebraElement


class PairedMeasure(NamedTuple):
    values: np.ndarray
    total_variation: float

    def value(self, atoms) -> complex:
        mask = np.zeros(len(self.values), dtype=bool)
        mask[list(atoms)] = True
        return complex(self.values[mask].sum())


def evaluate(m: NonNegativeMeasure, s, a) -> AlgebraElement:
    """``m_A(Delta) = sum_{x in Delta} m^x(A)``."""
    mask = _as_set(m.space, s).mask
    coords = m._coords(a)
    value = np.einsum("xdij,d->ij", m.atom_maps[mask], coords)
    return AlgebraElement(m.codomain, value)


def pair(t: TracePairing, m: NonNegativeMeasure, a) -> PairedMeasure:
    if t.weight.algebra != m.codomain:
        raise DomainMismatch("pairing weight does not live in the measure codomain")
    values = np.einsum("ij,xji->x", t.weight.matrix, m.atom_values(a))
    return PairedMeasure(values, float(np.abs(values).sum()))


# --- validators -----------------------------------------------------------

def _min_eig(matrix: np.ndarray) -> float:
    h = 0.5 * (matrix + adjoint(matrix))
    return float(np.linalg.eigvalsh(h)[0])


def validate_pov(e: PovMeasure, tol: Tolerance = DEFAULT_TOL) -> Report:
    report = Report("pov")
    margins = []
    for x, v in enumerate(e.atom_values):
        herm = operator_norm(v - v.conj().T)
        report.add(f"hermitian[{x}]", herm, tol.absolute, witness={"atom": x})
        margin = _min_eig(v)
        margins.append(margin)
        report.add(f"psd[{x}]", max(0.0, -margin), tol.absolute, witness={"atom": x, "margin": margin})
    report.info["margins"] = margins
    return report


def validate_spectral(f: PovMeasure, tol: Tolerance = DEFAULT_TOL, normalized: bool = False) -> Report:
    report = Report("spectral")
    vals = f.atom_values
    for x, v in enumerate(vals):
        report.add(f"projection[{x}]", projection_defect(v), tol.absolute, witness={"atom": x})
    for x, y in itertools.combinations(range(len(vals)), 2):
        report.add(f"orthogonal[{x},{y}]", operator_norm(vals[x] @ vals[y]), tol.absolute, witness={"atoms": [x, y]})
    if normalized:
        eye = np.eye(vals.shape[-1])
        report.add("normalized", operator_norm(vals.sum(axis=0) - eye), tol.absolute,
                   witness={"set": "X", "value": vals.sum(axis=0)})
    return report


def choi_blocks(m: NonNegativeMeasure, x: int) -> list[np.ndarray]:
    """Choi matrices ``sum_ij e_i e_j^T (x) m^x(E_ij)``, one per domain block."""
    maps = m.atom_maps[x]
    n2 = m.codomain.ambient_dim
    out = []
    for b, nb in enumerate(m.domain.blocks):
        idx = m.domain.block_units(b)
        # (i, j, a, c) -> (i, a, j, c) so rows index (i, a), columns (j, c)
        c = maps[idx].transpose(0, 2, 1, 3).reshape(nb * n2, nb * n2)
        out.append(c)
    return out


def choi_margin(m: NonNegativeMeasure, x: int) -> float:
    return min(_min_eig(c) for c in choi_blocks(m, x))


class RankOneResult(NamedTuple):
    margin: float
    vector: np.ndarray
    block: int


def rank_one_search(
    m: NonNegativeMeasure,
    x: int,
    starts: int = 64,
    steps: int = 200,
    step_size: float = 0.1,
    rng_seed=0,
) -> RankOneResult:
    """Minimise ``lambda_min(m^x(v v^*))`` over unit vectors ``v`` supported in one block.

    Multi-start projected gradient with per-start backtracking. Rank-one
    projections inside the blocks generate the positive cone, so a negative
    value is a sound refutation of positivity with ``v`` as witness.
    """
    rng = _rng(rng_seed)
    best = RankOneResult(np.inf, np.zeros(0), -1)
    maps = m.atom_maps[x]
    for b, nb in enumerate(m.domain.blocks):
        mb = maps[m.domain.block_units(b)]  # (nb, nb, N, N)
        v = rng.standard_normal((starts, nb)) + 1j * rng.standard_normal((starts, nb))
        v /= np.linalg.norm(v, axis=1, keepdims=True)

        def objective(vecs):
            img = np.einsum("si,sj,ijab->sab", vecs, vecs.conj(), mb)
            img = 0.5 * (img + adjoint(img))
            w, u = np.linalg.eigh(img)
            return w[:, 0], u[:, :, 0]

        f, w = objective(v)
        eta = np.full(starts, step_size)
        stall = 0
        for _ in range(steps):
            k = np.einsum("sa,ijab,sb->sij", w.conj(), mb, w)
            grad = np.einsum("sij,si->sj", k, v)
            grad -= np.einsum("sj,sj->s", v.conj(), grad)[:, None] * v  # tangent component
            trial = v - eta[:, None] * grad
            trial /= np.linalg.norm(trial, axis=1, keepdims=True)
            f_new, w_new = objective(trial)
            better = f_new < f
            gain = np.where(better, f - f_new, 0.0)
            v = np.where(better[:, None], trial, v)
            w = np.where(better[:, None], w_new, w)
            f = np.where(better, f_new, f)
            eta = np.where(better, np.minimum(eta * 1.5, 1.0), eta * 0.5)
            stall = stall + 1 if gain.max() < 1e-14 else 0
            if stall >= 8:
                break
        i = int(np.argmin(f))
        if f[i] < best.margin:
            full = np.zeros(m.domain.ambient_dim, dtype=np.complex128)
            full[m.domain.block_slices()[b]] = v[i]
            best = RankOneResult(float(f[i]), full, b)
    return best


def validate_nonneg(
    m: NonNegativeMeasure,
    policy: str = "auto",
    tol: Tolerance = DEFAULT_TOL,
    starts: int = 64,
    steps: int = 200,
    step_size: float = 0.1,
    rng_seed=0,
) -> Report:
    """Positivity of every atom map on the positive cone of the domain.

    ``choi``: a PSD Choi matrix certifies complete positivity, hence
    positivity (sound PASS); a non-PSD Choi matrix is inconclusive.
    ``rank-one``: projected-gradient search over ``v v^*``; a negative margin
    is a sound FAIL with witness ``v``, otherwise a tolerance-qualified PASS.
    ``auto``: Choi first, rank-one search only when Choi is inconclusive.
    """
    if policy not in POSITIVITY_POLICIES:
        raise ValueError(f"unknown positivity policy {policy!r}")
    report = Report("nonneg", info={"policy": policy, "verdicts": {}})
    rng = _rng(rng_seed)
    d_rows, d_cols = m.domain.units
    transpose_index = np.array([m.domain.unit_index[(int(j), int(i))] for i, j in zip(d_rows, d_cols)])
    for x in range(m.space.atom_count):
        maps = m.atom_maps[x]
        herm = float(np.max(np.abs(adjoint(maps) - maps[transpose_index]))) if maps.size else 0.0
        report.add(f"hermitian_preserving[{x}]", herm, tol.absolute, witness={"atom": x})
        verdict = None
        if policy in ("auto", "choi"):
            cm = choi_margin(m, x)
            if cm >= -tol.absolute:
                report.add(f"positive[{x}]", max(0.0, -cm), tol.absolute, witness={"atom": x, "choi_margin": cm})
                verdict = "certified"
            elif policy == "choi":
                report.add(f"positive[{x}]", -cm, tol.absolute, passed=False, sound=False,
                           witness={"atom": x, "choi_margin": cm})
                verdict = "inconclusive"
        if verdict is None:
            res = rank_one_search(m, x, starts, steps, step_size, rng)
            ok = res.margin >= -tol.absolute
            report.add(
                f"positive[{x}]", max(0.0, -res.margin), tol.absolute,
                passed=ok, sound=not ok,
                witness={"atom": x, "margin": res.margin, "block": res.block, "vector": res.vector},
            )
            verdict = "qualified" if ok else "refuted"
        report.info["verdicts"][x] = verdict
    return report


def canonical_projections(algebra: MatrixAlgebra) -> list[AlgebraElement]:
    """Diagonal matrix units ``E_ii`` plus the identity."""
    out = []
    for i in range(algebra.ambient_dim):
        e = np.zeros((algebra.ambient_dim,) * 2)
        e[i, i] = 1.0
        out.append(AlgebraElement(algebra, e))
    out.append(algebra.identity())
    return out


def product_law_defect(m: NonNegativeMeasure, p, q) -> tuple[float, tuple[int, int]]:
    """``max_{x,y} ||M_P(x) M_Q(y) - M_PQ({x} & {y})||`` with ``M_PQ`` linearly extended."""
    mp = m.atom_values(p)
    mq = m.atom_values(q)
    pq = np.asarray(getattr(p, "matrix", p)) @ np.asarray(getattr(q, "matrix", q))
    mpq = m.atom_values(pq)
    worst, where = 0.0, (0, 0)
    k = m.space.atom_count
    for x in range(k):
        for y in range(k):
            target = mpq[x] if x == y else 0.0
            d = operator_norm(mp[x] @ mq[y] - target)
            if d > worst:
                worst, where = d, (x, y)
    return worst, where


def validate_nonneg_spectral(
    m: NonNegativeMeasure,
    samples: int = 8,
    rng_seed=0,
    tol: Tolerance = DEFAULT_TOL,
    normalized: bool = False,
    noncommuting: bool = False,
    positivity_policy: str = "auto",
) -> Report:
    """Spectral restrictions, product law, and non-negativity, cross-checked.

    Projections probed: every ``E_ii``, the identity and ``samples`` random
    projections. Product-law pairs: all pairs of diagonal units plus
    ``samples`` random commuting pairs (independent pairs when
    ``noncommuting`` is set).
    """
    rng = _rng(rng_seed)
    report = Report("nonneg_spectral")
    probes = canonical_projections(m.domain)
    probes += [sample_projection(m.domain, rng) for _ in range(samples)]
    spectral_ok = True
    for i, p in enumerate(probes):
        sub = validate_spectral(SpectralMeasureFD(m.space, m.codomain, m.atom_values(p)), tol)
        for c in sub.checks:
            c.witness = {**(c.witness or {}), "probe": i, "projection": p.matrix}
        report.extend(sub, prefix=f"spectral[{i}].")
        spectral_ok &= sub.passed

    pairs = []
    diag = probes[: m.domain.ambient_dim]
    pairs += [(p, q) for p in diag for q in diag]
    for _ in range(samples):
        if noncommuting:
            pairs.append((sample_projection(m.domain, rng), sample_projection(m.domain, rng)))
        else:
            pairs.append(tuple(sample_commuting_projections(m.domain, 2, rng)))
    worst, witness = 0.0, None
    for p, q in pairs:
        d, (x, y) = product_law_defect(m, p, q)
        if d >= worst:
            worst, witness = d, {"P": p.matrix, "Q": q.matrix, "atoms": [x, y]}
    product_ok = worst <= tol.absolute
    report.add("product_law", worst, tol.absolute, witness=witness)

    nonneg = validate_nonneg(m, positivity_policy, tol, rng_seed=rng)
    report.extend(nonneg, prefix="nonneg.")
    # spectral + product law already force non-negativity; disagreement means a bug or a bad tolerance
    consistent = not (spectral_ok and product_ok and not nonneg.passed)
    report.add("cross_check", 0.0 if consistent else 1.0, 0.0, passed=consistent,
               witness={"spectral": spectral_ok, "product_law": product_ok, "nonneg": nonneg.passed})
    if normalized:
        total = m.identity_total()
        report.add("normalized", operator_norm(total - np.eye(m.codomain.ambient_dim)), tol.absolute,
                   witness={"operator": "identity", "set": "X", "value": total})
    return report


# --- semivariation ----------------------------------------------------------

class SemivariationBounds(NamedTuple):
    lower: float
    upper: float
    witness: dict


def set_partitions(items: Sequence[int]) -> Iterable[list[list[int]]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def _contraction_candidates(algebra: MatrixAlgebra, rng, count: int) -> list[np.ndarray]:
    eye = np.eye(algebra.ambient_dim, dtype=np.complex128)
    cands = [eye, -eye]
    for _ in range(count):
        p = sample_projection(algebra, rng).matrix
        cands += [2 * p - eye, -(2 * p - eye), p]
        cands.append(sample_unitary(algebra, rng).matrix)
        cands.append(sample_positive(algebra, rng).matrix)
    return cands


def _polar_ascent(m: NonNegativeMeasure, choice: np.ndarray, iters: int = 50) -> tuple[float, np.ndarray]:
    """Improve per-atom contractions by maximising ``Re u^* m^x(A_x) w``.

    ``(u, w)`` is the top singular pair of the current sum; the maximiser over
    the unit ball of each block is the polar factor of the transposed
    coefficient block, so the objective never decreases.
    """
    dom = m.domain
    value = -1.0
    for _ in range(iters):
        total = np.einsum("xdij,xd->ij", m.atom_maps, dom.coords(choice))
        u_s, s, vh = np.linalg.svd(total)
        if s[0] <= value * (1 + 1e-13):
            value = max(value, float(s[0]))
            break
        value = float(s[0])
        u, w = u_s[:, 0], vh[0].conj()
        b = np.einsum("a,xdab,b->xd", u.conj(), m.atom_maps, w)
        bmat = dom.from_coords(b)
        new = np.zeros_like(choice)
        for sl in dom.block_slices():
            bt = np.swapaxes(bmat[:, sl, sl], -1, -2)
            wu, _, zh = np.linalg.svd(bt)
            new[:, sl, sl] = adjoint(zh) @ adjoint(wu)
        choice = new
    return value, choice


def semivariation(
    m: NonNegativeMeasure,
    strategy: str = "structured",
    samples: int = 16,
    rng_seed=0,
) -> SemivariationBounds:
    """Bounds on ``sup || sum_j m_{A_j}(Delta_j) ||`` over partitions and ``||A_j|| <= 1``.

    The upper bound is ``4 ||m_id(X)||``. ``exhaustive`` enumerates every set
    partition of the atoms and samples contractions per part;
    ``structured`` works on singletons (which dominate every coarser
    partition) with structured candidates refined by polar ascent.
    """
    k = m.space.atom_count
    upper = 4.0 * operator_norm(m.identity_total())
    rng = _rng(rng_seed)
    cands = _contraction_candidates(m.domain, rng, max(1, samples // 4))
    images = np.einsum("xdij,cd->xcij", m.atom_maps, m.domain.coords(np.stack(cands)))
    best, witness = 0.0, {}
    if strategy == "exhaustive":
        if k > 12:
            raise IntractablePartitionCount(f"{k} atoms: too many set partitions to enumerate")
        for part in set_partitions(list(range(k))):
            trials = [np.full(len(part), c) for c in range(len(cands))]
            trials += [rng.integers(0, len(cands), size=len(part)) for _ in range(samples)]
            for assign in trials:
                total = sum(images[x, c] for block, c in zip(part, assign) for x in block)
                val = operator_norm(total)
                if val > best:
                    best, witness = val, {"partition": part, "candidates": [int(c) for c in assign]}
    elif strategy == "structured":
        starts = [np.stack([cands[c]] * k) for c in range(len(cands))]
        starts += [np.stack([cands[i] for i in rng.integers(0, len(cands), size=k)]) for _ in range(samples)]
        for start in starts:
            val, choice = _polar_ascent(m, start.astype(np.complex128))
            if val > best:
                best, witness = val, {"partition": [[x] for x in range(k)], "operators": choice}
    else:
        raise ValueError(f"unknown semivariation strategy {strategy!r}")
    return SemivariationBounds(float(best), float(upper), witness)


# --- measure constructors ---------------------------------------------------

def identity_measure(space: FiniteMeasurableSpace, algebra: MatrixAlgebra) -> NonNegativeMeasure:
    """``m^x(A) = A`` on every atom."""
    maps = np.stack([algebra.from_coords(np.eye(algebra.dim))] * space.atom_count)
    return NonNegativeMeasure(space, algebra, algebra, maps)


def kraus_measure(space, domain, codomain, kraus, transpose: bool = False, cls=NonNegativeMeasure):
    """``m^x(A) = sum_K K A K^*`` (or with ``A^T`` when ``transpose`` is set).

    ``kraus[x]`` is a list of ``N2 x N1`` matrices. The plain form is
    completely positive; the transposed form is positive but in general not
    completely positive.
    """
    fns = []
    for ops in kraus:
        ops = [np.asarray(k, dtype=np.complex128) for k in ops]

        def f(a, ops=ops):
            a = a.T if transpose else a
            return sum(k @ a @ k.conj().T for k in ops)

        fns.append(f)
    return cls.from_functions(space, domain, codomain, fns)


def random_kraus(space, domain, codomain, rng_seed=None, count: int = 2, scale: float | None = None):
    rng = _rng(rng_seed)
    n1, n2 = domain.ambient_dim, codomain.ambient_dim
    scale = scale if scale is not None else 1.0 / np.sqrt(count * n1)
    return [
        [scale * (rng.standard_normal((n2, n1)) + 1j * rng.standard_normal((n2, n1))) / np.sqrt(2) for _ in range(count)]
        for _ in range(space.atom_count)
    ]


def random_cp_measure(space, domain, codomain, rng_seed=None, count: int = 2) -> NonNegativeMeasure:
    return kraus_measure(space, domain, codomain, random_kraus(space, domain, codomain, rng_seed, count))


def random_transpose_measure(space, domain, codomain, rng_seed=None, count: int = 2) -> NonNegativeMeasure:
    return kraus_measure(space, domain, codomain, random_kraus(space, domain, codomain, rng_seed, count), transpose=True)
