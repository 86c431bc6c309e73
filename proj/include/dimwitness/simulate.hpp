#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "dimwitness/witness.hpp"

namespace dimwitness {

// ---------------------------------------------------------------------------
// Sequential yes-no measurement process

// The repeatable measurement: evolve by U, then project with {I - P, P} where
// P is the projector on the hyperplane orthogonal to z. Outcome '0' means
// "found in z", outcome '1' means "found in the hyperplane".
struct MeasurementProcess {
    UnitaryMatrix u;
    Projector p;

    MeasurementProcess(UnitaryMatrix u_, CVec z_);

    const CVec& z() const noexcept { return p.z(); }
    Eigen::Index dim() const noexcept { return u.dim(); }
};

struct OutcomeString {
    std::string symbols;  // ASCII '0'/'1'
    std::optional<double> probability;
};

// ---------------------------------------------------------------------------
// Exact probabilities

// ||P_{i_n} U ... P_{i_1} U z||^2 with P_1 = P and P_0 = I - P.
double string_probability(const MeasurementProcess& proc, const std::string& symbols);

// a_n = ||(PU)^n z||^2 (a_0 = 1): probability of n consecutive '1' outcomes.
double all_ones_probability(const MeasurementProcess& proc, int n);

// b_n = a_n - a_{n+1}: probability that '0' first appears at step n + 1.
double first_return_probability(const MeasurementProcess& proc, int n);

struct MeanReturnTime {
    double value = 0.0;
    TruncationReason truncation_reason = TruncationReason::MaxSteps;
};

// Mean return time M = sum_n a_n, computed as the truncated series with the
// geometric tail bound; equals the exact sum when the bound is met.
MeanReturnTime mean_return_time_series(const MeasurementProcess& proc, double tail_tol = 1e-8,
                                       int max_steps = 100000);

// Transition-matrix product for the two-outcome Markov chain started at 0:
// p_{0 i_1} * prod_m p_{i_m i_{m+1}}. Rows must sum to 1 within 1e-12 with
// nonnegative entries. Reproduces string_probability exactly when d = 2 only.
double markov_string_probability(const Eigen::Matrix2d& transition, const std::string& symbols);

// ---------------------------------------------------------------------------
// Trajectory sampling

// Samples one outcome string of the given length under the collapse rule:
// with q = |<z|U psi>|^2 emit '0' (and reset psi to z) with probability q,
// else emit '1' and renormalize the projected state. Outcome '0' is a
// renewal: the chain restarts from z exactly.
OutcomeString sample_outcomes(const MeasurementProcess& proc, std::int64_t length,
                              const SeedStream& stream);

struct ReturnTimeStats {
    std::vector<std::int64_t> samples;  // gaps T_k between consecutive '0's
    std::int64_t count = 0;
    double mean = 0.0;
    double standard_error = 0.0;
    std::int64_t steps_taken = 0;
    bool complete = true;  // false when the step cap preempted the target
};

// Runs the sampler until `target_returns` zeros are observed (or step_cap
// steps have been taken; the partial result is then flagged) and reports the
// gap statistics. The sample mean estimates the dimension of a generic map.
ReturnTimeStats monte_carlo_return_time(const MeasurementProcess& proc,
                                        std::int64_t target_returns, const SeedStream& stream,
                                        std::int64_t step_cap = 100000000);

} // namespace dimwitness
