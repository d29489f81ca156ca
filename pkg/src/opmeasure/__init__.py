"""Operator-valued measures over finite measurable spaces and block matrix algebras.

Non-negative (spectral) measures ``Delta -> (W1 -> W2)``, integration of
operator-valued functions against them, reconstruction from compatible
families, and the correspondence with unital *-representations of
``C(X, W1)``.
"""
from .algebra import (
    AlgebraElement,
    MatrixAlgebra,
    RiemannSum,
    SpectralDecomposition,
    cartesian_parts,
    jordan_parts,
    riemann_sum,
    sample_positive,
    sample_projection,
    spectral_decomposition,
)
from .correspondence import (
    Representation,
    RepresentationBlueprint,
    certify_representation,
    generate_representation,
    measure_to_rep,
    rep_to_measure,
    roundtrip_defect,
)
from .family import (
    CompatibilityReport,
    PositiveFamily,
    ProjectionFamily,
    build_from_positive_family,
    build_from_projection_family,
    check_positive_family,
    check_projection_family,
    riemann_path_check,
)
from .integration import (
    OperatorFunction,
    ScalarFunction,
    integrate,
    integrate_limit,
    integrate_scalar,
    monotone_convergence_check,
    multiplicativity_check,
)
from .kernel import EigenSystem, Tolerance, hermitian_eig, is_psd, operator_norm
from .measures import (
    FiniteMeasurableSpace,
    MeasurableSet,
    NonNegativeMeasure,
    NonNegativeSpectralMeasure,
    PovMeasure,
    SpectralMeasureFD,
    TracePairing,
    evaluate,
    pair,
    semivariation,
    validate_nonneg,
    validate_nonneg_spectral,
    validate_pov,
    validate_spectral,
)
from .report import Check, Report

__version__ = "0.1.0"
