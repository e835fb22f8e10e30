"""Recovery of rational functions from Fourier coefficients via Hankel pencils,
with pole sensitivity analysis and an AAA baseline."""
from .aaa import BarycentricModel, aaa_fit, bary_eval, bary_poles, bary_residues, bary_to_rational
from .errors import InvalidInputError, NumericalFailure, RatPencilError
from .experiments import ExperimentReport, NoiseSpec, NoiseTarget, compare_aaa, perturb, run_experiment
from .exponential import ExponentialSum, esprit, hankel_full, hankel_window, numerical_rank, solve_coeffs, vandermonde
from .rational import (
    FourierWindow,
    RationalFunction,
    UnitCircleSamples,
    aliasing_bound,
    fourier_closed_form,
    fourier_from_samples,
    match_poles,
    recover,
    recover_from_samples,
    sample_unit_circle,
)
from .sensitivity import (
    PencilSpec,
    eigenvalue_shifts,
    first_order_prediction,
    hankel_perturbation,
    rational_sensitivity_report,
    structured_sensitivities,
    unstructured_sensitivities,
)

__version__ = "0.1.0"
