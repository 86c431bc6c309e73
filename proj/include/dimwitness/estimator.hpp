#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dimwitness/witness.hpp"

namespace dimwitness {

// ---------------------------------------------------------------------------
// Dimension estimation from an ensemble of evolutions

struct EstimatorConfig {
    int dimension = 2;           // d of the sampled unitaries
    int ensemble_size = 100;     // number of independent evolutions M
    double quorum = 0.5;         // beta: fraction of the ensemble required at the top bound
    int stability_window = 1;    // s: steps the top bound must have been stable for
    int max_steps = 100000;      // hard cap N_max on executed steps
    std::uint64_t master_seed = 0;
    double ceiling_clamp = 1e-9; // subtracted before taking ceilings
    // Spec'd alternative reading of the quorum condition: check it at the
    // stopping step instead of at the start of the stability window.
    bool require_quorum_at_stop = false;
    // Initial vector; defaults to e_1 (any fixed choice is equivalent for
    // Haar-drawn unitaries by left invariance).
    std::optional<CVec> initial_vector;
    // Also record, per history, the first step at which the bound reaches d
    // and d/2 (advancing histories past the stopping step if needed).
    bool collect_first_passage = false;
};

// Lower bound d_N = ceil(S_N - clamp) from the first `steps` partial sums.
// The clamp keeps floating round-up from ever exceeding the true dimension.
int d_lower(const UnitaryMatrix& u, const CVec& z, int steps, double ceiling_clamp = 1e-9);

enum class StoppedBy { CriterionMet, StepCap };

const char* to_string(StoppedBy s) noexcept;

struct EstimatorResult {
    int estimate = 0;       // d~ := max_i d_{N~}(U_i)
    int stopping_step = 0;  // N~
    StoppedBy stopped_by = StoppedBy::StepCap;
    // histories[i][n] = d_{n+1}(U_i) for n = 0..N~-1; each row is nondecreasing.
    std::vector<std::vector<int>> histories;
    std::vector<int> final_bounds;  // d_{N~}(U_i)
    // First-passage steps (only when collect_first_passage): first N with
    // d_N(U_i) = dimension resp. d_N(U_i) >= dimension / 2; capped at max_steps.
    std::vector<int> steps_to_dimension;
    std::vector<int> steps_to_half_dimension;
};

// Draws `ensemble_size` Haar unitaries on streams (master_seed, i), iterates
// all bound histories in lockstep and stops at the first step N~ such that
//   (i)  max_i d_N(U_i) held one value d~ for N = N~-s .. N~, and
//   (ii) at least quorum * M histories already sat at d~ at step N~-s
//        (or at N~ when require_quorum_at_stop is set),
// else stops at max_steps.
EstimatorResult run_estimator(const EstimatorConfig& config);

// ---------------------------------------------------------------------------
// Experiment sweeps

struct SweepRow {
    int dimension = 0;
    int rep = 0;
    int estimate = 0;
    int stopping_step = 0;
    bool correct = false;
    double steps_to_d = 0.0;       // ensemble mean of first N with d_N(U_i) = d
    double steps_to_half_d = 0.0;  // ensemble mean of first N with d_N(U_i) >= d/2
    StoppedBy stopped_by = StoppedBy::StepCap;
};

struct SweepSummary {
    int dimension = 0;
    int reps = 0;
    double accuracy = 0.0;
    double mean_stopping_step = 0.0;
    double mean_steps_to_d = 0.0;
    double mean_steps_to_half_d = 0.0;
};

// Runs run_estimator `reps` times for every d in [d_min, d_max], on seed
// streams forked from config.master_seed by (d, rep). Rows come back sorted
// by (d, rep) regardless of how many worker threads ran them (threads = 0
// picks the hardware count).
std::vector<SweepRow> experiment_sweep(int d_min, int d_max, int reps,
                                       const EstimatorConfig& config, int threads = 0);

std::vector<SweepSummary> sweep_summary(const std::vector<SweepRow>& rows);

} // namespace dimwitness
