"""Integration of scalar and operator-valued functions against non-negative measures."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import AlgebraElement, MatrixAlgebra, cartesian_parts, jordan_parts
from .errors import BoundViolated, DomainMismatch, NotCauchy, NotMonotone, NumericalFailure
from .kernel import DEFAULT_TOL, Tolerance, adjoint, operator_norm
from .measures import FiniteMeasurableSpace, MeasurableSet, NonNegativeMeasure, PovMeasure
from .report import Report


class ScalarFunction:
    """A complex function on the atoms of a finite measurable space."""

    def __init__(self, values):
        v = np.array(values, dtype=np.complex128).reshape(-1)
        if not np.all(np.isfinite(v)):
            raise ValueError("function values must be finite")
        v.setflags(write=False)
        self.values = v

    @classmethod
    def indicator(cls, s: MeasurableSet) -> "ScalarFunction":
        return cls(s.mask.astype(float))

    @classmethod
    def constant(cls, space: FiniteMeasurableSpace, c=1.0) -> "ScalarFunction":
        return cls(np.full(space.atom_count, c))

    def __len__(self):
        return len(self.values)

    def __add__(self, other):
        return ScalarFunction(self.values + other.values)

    def __mul__(self, c):
        if isinstance(c, ScalarFunction):
            return ScalarFunction(self.values * c.values)
        return ScalarFunction(self.values * c)

    __rmul__ = __mul__

    def is_nonnegative(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.values.imag) <= tol) and np.all(self.values.real >= -tol))


class OperatorFunction:
    """A map from atoms into ``algebra``; values stacked as ``(k, n, n)``."""

    def __init__(self, algebra: MatrixAlgebra, values):
        v = np.stack([np.asarray(getattr(a, "matrix", a), dtype=np.complex128) for a in values])
        n = algebra.ambient_dim
        if v.shape[1:] != (n, n):
            raise DomainMismatch(f"function values of shape {v.shape[1:]}, expected {(n, n)}")
        for x, a in enumerate(v):
            if not algebra.contains(a):
                raise DomainMismatch(f"value at atom {x} is outside {algebra!r}")
        v = np.where(algebra.mask, v, 0)
        v.setflags(write=False)
        self.algebra = algebra
        self.values = v

    @classmethod
    def decomposable(cls, f: ScalarFunction, a: AlgebraElement) -> "OperatorFunction":
        """``f (x) A``."""
        return cls(a.algebra, f.values[:, None, None] * a.matrix[None])

    @classmethod
    def constant(cls, space: FiniteMeasurableSpace, a: AlgebraElement) -> "OperatorFunction":
        return cls(a.algebra, [a.matrix] * space.atom_count)

    @property
    def atom_count(self) -> int:
        return self.values.shape[0]

    def _same(self, other: "OperatorFunction"):
        if other.algebra != self.algebra or other.atom_count != self.atom_count:
            raise DomainMismatch("operator functions over different spaces or algebras")

    def __add__(self, other):
        self._same(other)
        return OperatorFunction(self.algebra, self.values + other.values)

    def __sub__(self, other):
        self._same(other)
        return OperatorFunction(self.algebra, self.values - other.values)

    def __mul__(self, c):
        return OperatorFunction(self.algebra, complex(c) * self.values)

    __rmul__ = __mul__

    def __matmul__(self, other):
        """Pointwise product ``(FG)(x) = F(x) G(x)``."""
        self._same(other)
        return OperatorFunction(self.algebra, self.values @ other.values)

    @property
    def H(self) -> "OperatorFunction":
        return OperatorFunction(self.algebra, adjoint(self.values))

    def sup_norm(self) -> float:
        return max(operator_norm(v) for v in self.values)

    def is_positive(self, tol: Tolerance = DEFAULT_TOL) -> bool:
        for v in self.values:
            if operator_norm(v - v.conj().T) > tol.absolute:
                return False
            if np.linalg.eigvalsh(0.5 * (v + v.conj().T))[0] < -tol.absolute:
                return False
        return True


def _check_domain(m: NonNegativeMeasure, algebra: MatrixAlgebra, atom_count: int):
    if algebra != m.domain:
        raise DomainMismatch(f"{algebra!r} is not the measure domain {m.domain!r}")
    if atom_count != m.space.atom_count:
        raise DomainMismatch(f"function has {atom_count} atoms, space has {m.space.atom_count}")


def _scalar_sum(f: ScalarFunction, images: np.ndarray) -> np.ndarray:
    return np.einsum("x,xij->ij", f.values, images)


def integrate_scalar(f: ScalarFunction, a: AlgebraElement, m: NonNegativeMeasure,
                     crosscheck_tol: float = 1e-10) -> AlgebraElement:
    """``int f dm_A`` via the four positive parts of ``A``.

    ``A = re(A)_+ - re(A)_- + i im(A)_+ - i im(A)_-``; each part is integrated
    against its POVM ``m_part`` and the results recombined. The value is
    cross-checked against the direct linear extension ``sum_x f(x) m^x(A)``.
    """
    _check_domain(m, a.algebra, len(f))
    re, im = cartesian_parts(a)
    rp, rm = jordan_parts(re)
    ip, imn = jordan_parts(im)
    parts = [_scalar_sum(f, m.atom_values(p)) for p in (rp, rm, ip, imn)]
    value = (parts[0] - parts[1]) + 1j * (parts[2] - parts[3])
    direct = _scalar_sum(f, m.atom_values(a))
    scale = max(1.0, float(np.abs(f.values).max(initial=0.0)) * operator_norm(m.identity_total()) * a.norm())
    if np.max(np.abs(value - direct), initial=0.0) > crosscheck_tol * scale:
        raise NumericalFailure("four-part integral disagrees with the linear extension")
    return AlgebraElement(m.codomain, value)


def integrate(F: OperatorFunction, m: NonNegativeMeasure) -> AlgebraElement:
    """``int F dm = sum_x m^x(F(x))``."""
    _check_domain(m, F.algebra, F.atom_count)
    coords = m.domain.coords(F.values)
    return AlgebraElement(m.codomain, np.einsum("xdij,xd->ij", m.atom_maps, coords))


def integrate_literal(F: OperatorFunction, m: NonNegativeMeasure) -> AlgebraElement:
    """``int F dm`` through the tensor expansion ``F = sum_{x,d} chi_x (x) c_{x,d} E_d``.

    Each elementary tensor goes through :func:`integrate_scalar`; used to
    cross-check :func:`integrate`.
    """
    _check_domain(m, F.algebra, F.atom_count)
    space = m.space
    total = np.zeros((m.codomain.ambient_dim,) * 2, dtype=np.complex128)
    for x in range(F.atom_count):
        chi = ScalarFunction.indicator(space.singleton(x))
        total += integrate_scalar(chi, AlgebraElement(F.algebra, F.values[x]), m).matrix
    return AlgebraElement(m.codomain, total)


def star_defect(F: OperatorFunction, m: NonNegativeMeasure) -> float:
    """``|| int F^* dm - (int F dm)^* ||``."""
    return operator_norm(integrate(F.H, m).matrix - integrate(F, m).matrix.conj().T)


def integrate_limit(seq, m: NonNegativeMeasure, window: int = 5, cauchy_tol: float = 1e-7) -> AlgebraElement:
    """Integral of the sup-norm limit of ``seq``.

    The sequence is accepted as Cauchy when every pair in its last
    ``window`` elements is within ``cauchy_tol`` in sup norm; the limit
    integral is then the integral of the final element.
    """
    seq = list(seq)
    if not seq:
        raise NotCauchy("empty sequence")
    tail = seq[-window:]
    gap = max(((a - b).sup_norm() for i, a in enumerate(tail) for b in tail[i + 1:]), default=0.0)
    if gap > cauchy_tol:
        raise NotCauchy(f"tail sup-norm gap {gap:.3e} exceeds {cauchy_tol:.1e}")
    return integrate(seq[-1], m)


def tail_gap(seq, window: int = 5) -> float:
    tail = list(seq)[-window:]
    return max(((a - b).sup_norm() for i, a in enumerate(tail) for b in tail[i + 1:]), default=0.0)


def multiplicativity_check(F: OperatorFunction, G: OperatorFunction, m: NonNegativeMeasure) -> float:
    """``|| int FG dM - (int F dM)(int G dM) ||``."""
    lhs = integrate(F @ G, m).matrix
    rhs = integrate(F, m).matrix @ integrate(G, m).matrix
    return operator_norm(lhs - rhs)


@dataclass
class ConvergenceReport:
    deviations: list[float]
    final_deviation: float
    limit_integral: np.ndarray
    stabilized_at: int | None


def monotone_convergence_check(seq, E: PovMeasure, bound: AlgebraElement | None = None,
                               limit: ScalarFunction | None = None,
                               tol: Tolerance = DEFAULT_TOL) -> ConvergenceReport:
    """Follow ``int f_n dE`` for a nondecreasing nonnegative sequence ``f_n``.

    ``limit`` is the pointwise limit; it defaults to the last element (at a
    finite space a stabilised sequence reaches its limit). Deviations are
    operator-norm distances to ``int limit dE``; ``stabilized_at`` is the
    first index from which the deviation stays exactly zero.
    """
    seq = list(seq)
    if not seq:
        raise NotMonotone("empty sequence")
    for n, f in enumerate(seq):
        if not f.is_nonnegative():
            raise NotMonotone(f"element {n} is not nonnegative")
        if n and np.any(f.values.real < seq[n - 1].values.real - tol.absolute):
            raise NotMonotone(f"element {n} decreases somewhere")
    limit = limit if limit is not None else seq[-1]
    integrals = [np.einsum("x,xij->ij", f.values, E.atom_values) for f in seq]
    if bound is not None:
        for n, val in enumerate(integrals):
            slack = bound.matrix - val
            if np.linalg.eigvalsh(0.5 * (slack + slack.conj().T))[0] < -tol.absolute:
                raise BoundViolated(f"integral of element {n} is not dominated by the bound")
    target = np.einsum("x,xij->ij", limit.values, E.atom_values)
    deviations = [operator_norm(val - target) for val in integrals]
    stabilized = None
    for n in range(len(deviations) - 1, -1, -1):
        if deviations[n] != 0.0:
            break
        stabilized = n
    return ConvergenceReport(deviations, deviations[-1], target, stabilized)


def bilinearity_report(f, g, a, b, alpha, beta, m: NonNegativeMeasure) -> Report:
    """Defects of linearity in the function and in the operator argument."""
    rep = Report("bilinearity")
    lhs = integrate_scalar(f * alpha + g * beta, a, m).matrix
    rhs = alpha * integrate_scalar(f, a, m).matrix + beta * integrate_scalar(g, a, m).matrix
    rep.add("function", operator_norm(lhs - rhs), 1e-10)
    lhs = integrate_scalar(f, a + b, m).matrix
    rhs = integrate_scalar(f, a, m).matrix + integrate_scalar(f, b, m).matrix
    rep.add("operator", operator_norm(lhs - rhs), 1e-10)
    return rep
