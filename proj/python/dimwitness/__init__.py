"""Projector-unitary iteration sums, measurement simulation, dimension estimation."""

from dimwitness._core import (  # noqa: F401
    InvalidInputError,
    NumericFailureError,
    __version__,
    all_ones_probability,
    alpha_trace,
    contraction_radius,
    d_lower,
    exact_sum_complex,
    exact_sum_real,
    experiment_sweep,
    first_return_probability,
    haar_orthogonal,
    haar_unitary,
    haversin,
    havercosin,
    iterate_norms,
    markov_string_probability,
    mean_return_time,
    monte_carlo_return_time,
    orthonormal_basis_of_span,
    projector_matrix,
    qubit_p,
    real_invariant_planes,
    run_estimator,
    sample_outcomes,
    spectral_decomposition,
    string_probability,
    theta_eigenspace_dim,
)
