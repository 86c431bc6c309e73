#include "dimwitness/estimator.hpp"

#include <atomic>
#include <cmath>
#include <deque>
#include <thread>

namespace dimwitness {

namespace {

int ceiling_bound(double partial_sum, double clamp) {
    return static_cast<int>(std::ceil(partial_sum - clamp));
}

void validate(const EstimatorConfig& config) {
    if (config.dimension < 1) throw InvalidInputError("estimator: dimension must be >= 1");
    if (config.ensemble_size < 1) throw InvalidInputError("estimator: ensemble size must be >= 1");
    if (config.quorum < 0.0 || config.quorum > 1.0)
        throw InvalidInputError("estimator: quorum must lie in [0, 1]");
    if (config.stability_window < 1)
        throw InvalidInputError("estimator: stability window must be >= 1");
    if (config.max_steps < config.stability_window + 1)
        throw InvalidInputError("estimator: max_steps must be at least stability_window + 1");
    if (config.ceiling_clamp < 0)
        throw InvalidInputError("estimator: ceiling clamp must be nonnegative");
}

// One evolution's running partial sum and bound history.
struct History {
    UnitaryMatrix u;
    CVec state;
    double sum = 1.0;
    bool frozen = false;
    std::vector<int> bounds;

    History(UnitaryMatrix u_, const CVec& z) : u(std::move(u_)), state(z) {}

    void advance(const CVec& z, double clamp) {
        if (!frozen) {
            CVec evolved = u.matrix() * state;
            evolved -= z * z.dot(evolved);
            state = std::move(evolved);
            const double norm_sq = state.squaredNorm();
            sum += norm_sq;
            // Below this the whole remaining tail is invisible at double
            // precision; stop multiplying.
            if (norm_sq < 1e-100) frozen = true;
        }
        bounds.push_back(ceiling_bound(sum, clamp));
    }
};

} // namespace

const char* to_string(StoppedBy s) noexcept {
    return s == StoppedBy::CriterionMet ? "criterion-met" : "step-cap";
}

int d_lower(const UnitaryMatrix& u, const CVec& z_in, int steps, double ceiling_clamp) {
    if (steps < 1) throw InvalidInputError("d_lower: steps must be >= 1");
    const Projector proj(z_in);
    if (proj.dim() != u.dim()) throw InvalidInputError("d_lower: dimension mismatch");
    const CVec& z = proj.z();
    CVec state = z;
    double sum = 1.0;
    for (int n = 1; n < steps; ++n) {
        state = proj.apply(u.matrix() * state);
        sum += state.squaredNorm();
    }
    return ceiling_bound(sum, ceiling_clamp);
}

EstimatorResult run_estimator(const EstimatorConfig& config) {
    validate(config);
    const int d = config.dimension;
    const int m = config.ensemble_size;
    const int window_len = config.stability_window + 1;

    CVec z;
    if (config.initial_vector) {
        const Projector proj(*config.initial_vector);
        if (proj.dim() != d)
            throw InvalidInputError("estimator: initial vector dimension mismatch");
        z = proj.z();
    } else {
        z = CVec::Unit(d, 0);
    }

    std::vector<History> histories;
    histories.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
        histories.emplace_back(
            haar_unitary(d, SeedStream{config.master_seed, static_cast<std::uint64_t>(i)}), z);

    EstimatorResult result;
    result.stopped_by = StoppedBy::StepCap;

    // Sliding window of (max bound, histories at the max) over the last
    // stability_window + 1 steps.
    std::deque<std::pair<int, int>> window;

    int step = 0;
    for (step = 1; step <= config.max_steps; ++step) {
        int max_bound = 0;
        for (auto& h : histories) {
            if (step == 1)
                h.bounds.push_back(ceiling_bound(h.sum, config.ceiling_clamp));
            else
                h.advance(z, config.ceiling_clamp);
            max_bound = std::max(max_bound, h.bounds.back());
        }
        int at_max = 0;
        for (const auto& h : histories)
            if (h.bounds.back() == max_bound) ++at_max;

        window.emplace_back(max_bound, at_max);
        if (static_cast<int>(window.size()) > window_len) window.pop_front();

        if (static_cast<int>(window.size()) == window_len) {
            bool stable = true;
            for (const auto& [top, count] : window)
                if (top != max_bound) stable = false;
            const int quorum_count =
                config.require_quorum_at_stop ? window.back().second : window.front().second;
            if (stable &&
                static_cast<double>(quorum_count) >=
                    config.quorum * static_cast<double>(m) - 1e-12) {
                result.stopped_by = StoppedBy::CriterionMet;
                break;
            }
        }
    }
    result.stopping_step = std::min(step, config.max_steps);

    result.estimate = 0;
    result.final_bounds.reserve(histories.size());
    for (const auto& h : histories) {
        result.final_bounds.push_back(h.bounds.back());
        result.estimate = std::max(result.estimate, h.bounds.back());
    }
    result.histories.reserve(histories.size());
    for (auto& h : histories) result.histories.push_back(h.bounds);

    if (config.collect_first_passage) {
        result.steps_to_dimension.resize(histories.size(), config.max_steps);
        result.steps_to_half_dimension.resize(histories.size(), config.max_steps);
        for (std::size_t i = 0; i < histories.size(); ++i) {
            auto& h = histories[i];
            int reach_d = 0;
            int reach_half = 0;
            for (std::size_t n = 0; n < h.bounds.size(); ++n) {
                if (reach_half == 0 && 2 * h.bounds[n] >= d) reach_half = static_cast<int>(n) + 1;
                if (reach_d == 0 && h.bounds[n] >= d) reach_d = static_cast<int>(n) + 1;
            }
            // Slow histories have not hit d by the stopping step; keep
            // advancing them individually up to the step cap.
            int n = static_cast<int>(h.bounds.size());
            while (reach_d == 0 && n < config.max_steps) {
                h.advance(z, config.ceiling_clamp);
                ++n;
                if (reach_half == 0 && 2 * h.bounds.back() >= d) reach_half = n;
                if (h.bounds.back() >= d) reach_d = n;
            }
            result.steps_to_dimension[i] = reach_d > 0 ? reach_d : config.max_steps;
            result.steps_to_half_dimension[i] = reach_half > 0 ? reach_half : config.max_steps;
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Sweeps

std::vector<SweepRow> experiment_sweep(int d_min, int d_max, int reps,
                                       const EstimatorConfig& config, int threads) {
    if (d_min < 1 || d_max < d_min) throw InvalidInputError("sweep: invalid dimension range");
    if (reps < 1) throw InvalidInputError("sweep: reps must be >= 1");

    const int dims = d_max - d_min + 1;
    const std::size_t task_count = static_cast<std::size_t>(dims) * static_cast<std::size_t>(reps);
    std::vector<SweepRow> rows(task_count);

    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min<int>(threads, static_cast<int>(task_count)));

    std::atomic<std::size_t> cursor{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t k = cursor.fetch_add(1);
            if (k >= task_count) return;
            const int d = d_min + static_cast<int>(k) / reps;
            const int rep = static_cast<int>(k) % reps;

            EstimatorConfig run_config = config;
            run_config.dimension = d;
            run_config.collect_first_passage = true;
            run_config.master_seed = SeedStream{config.master_seed, 0}
                                         .substream(static_cast<std::uint64_t>(d))
                                         .substream(static_cast<std::uint64_t>(rep))
                                         .substream(0)
                                         .master_seed;

            const EstimatorResult result = run_estimator(run_config);

            SweepRow row;
            row.dimension = d;
            row.rep = rep;
            row.estimate = result.estimate;
            row.stopping_step = result.stopping_step;
            row.correct = result.estimate == d;
            row.stopped_by = result.stopped_by;
            double to_d = 0.0;
            double to_half = 0.0;
            for (std::size_t i = 0; i < result.steps_to_dimension.size(); ++i) {
                to_d += result.steps_to_dimension[i];
                to_half += result.steps_to_half_dimension[i];
            }
            const auto count = static_cast<double>(result.steps_to_dimension.size());
            row.steps_to_d = to_d / count;
            row.steps_to_half_d = to_half / count;
            rows[k] = row;
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    return rows;
}

std::vector<SweepSummary> sweep_summary(const std::vector<SweepRow>& rows) {
    std::vector<SweepSummary> summary;
    for (const auto& row : rows) {
        if (summary.empty() || summary.back().dimension != row.dimension) {
            summary.push_back(SweepSummary{row.dimension, 0, 0.0, 0.0, 0.0, 0.0});
        }
        auto& agg = summary.back();
        agg.reps += 1;
        agg.accuracy += row.correct ? 1.0 : 0.0;
        agg.mean_stopping_step += row.stopping_step;
        agg.mean_steps_to_d += row.steps_to_d;
        agg.mean_steps_to_half_d += row.steps_to_half_d;
    }
    for (auto& agg : summary) {
        const auto n = static_cast<double>(agg.reps);
        agg.accuracy /= n;
        agg.mean_stopping_step /= n;
        agg.mean_steps_to_d /= n;
        agg.mean_steps_to_half_d /= n;
    }
    return summary;
}

} // namespace dimwitness
